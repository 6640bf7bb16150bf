//! Small numeric helpers shared across modules: means, spreads, Pearson
//! correlation, and an exact one-sided sign test.

/// Arithmetic mean; `None` for an empty slice.
pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Sample standard deviation (n − 1 denominator); `None` below 2 samples.
pub fn sample_sd(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// Pearson correlation coefficient. `None` when either side has zero
/// variance (the coefficient is undefined, not zero).
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "pearson: length mismatch");
    if xs.len() < 2 {
        return None;
    }
    // exact constancy check: mean subtraction alone can leave ulp-sized
    // residuals on a constant vector
    if xs.iter().all(|&x| x == xs[0]) || ys.iter().all(|&y| y == ys[0]) {
        return None;
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Exact one-sided sign test: probability of observing at least `wins`
/// successes in `wins + losses` fair coin flips. Ties are dropped by the
/// caller. Stable for a few thousand observations.
pub fn sign_test_greater(wins: usize, losses: usize) -> f64 {
    let m = wins + losses;
    if m == 0 {
        return 1.0;
    }
    // P(X = 0) = 0.5^m, then the multiplicative recurrence over the tail.
    let mut p = 0.5f64.powi(m as i32);
    let mut tail = if wins == 0 { p } else { 0.0 };
    for i in 0..m {
        p *= (m - i) as f64 / (i + 1) as f64;
        if i + 1 >= wins {
            tail += p;
        }
    }
    tail.min(1.0)
}
