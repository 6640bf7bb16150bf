//! Grid-search calibration of (λ, γ): score every grid point by the mean
//! Pearson correlation between model score matrices and observed similarity
//! targets, and return the argmax plus the full surface.

use std::io::Write;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::metrics::similarity_matrix;
use crate::agentsim::SimResult;
use crate::net::TemporalNetwork;
use crate::reach::{mnemonic_reachability, ModelParams, ReachabilityMatrix};
use crate::stats::pearson;

/// Candidate λ and γ values, ascending, within [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationGrid {
    pub lambda_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
}

impl Default for CalibrationGrid {
    /// 0 to 1 in 0.1 increments on both axes.
    fn default() -> Self {
        let axis: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        Self { lambda_values: axis.clone(), gamma_values: axis }
    }
}

impl CalibrationGrid {
    /// Uniform grid with the given step on both axes.
    pub fn with_step(step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::ParamOutOfRange { name: "grid step", value: step, bounds: "(0, 1]" });
        }
        let mut axis = Vec::new();
        let mut i = 0u32;
        loop {
            let v = (i as f64 * step).min(1.0);
            axis.push(v);
            if v >= 1.0 {
                break;
            }
            i += 1;
        }
        Ok(Self { lambda_values: axis.clone(), gamma_values: axis })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [("lambda", &self.lambda_values), ("gamma", &self.gamma_values)] {
            if axis.is_empty() {
                return Err(Error::EmptyInput("calibration grid axis"));
            }
            for &v in axis {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::ParamOutOfRange { name, value: v, bounds: "[0, 1]" });
                }
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Invalid(format!("{name} values must be strictly ascending")));
            }
        }
        Ok(())
    }
}

/// Whether the asymmetric score matrix is symmetrized before comparison
/// against (symmetric) similarity targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelTransform {
    /// Compare (C + Cᵀ)/2.
    #[default]
    Symmetrized,
    /// Compare C as-is.
    Raw,
}

/// What an observed target matrix represents when derived from runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TargetMode {
    /// Post-conversation similarity.
    Post,
    /// Post-minus-pre similarity change.
    #[default]
    PostMinusPre,
}

impl TargetMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TargetMode::Post => "post",
            TargetMode::PostMinusPre => "post-minus-pre",
        }
    }
}

impl FromStr for TargetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "post" => Ok(TargetMode::Post),
            "post-minus-pre" | "post_minus_pre" | "change" => Ok(TargetMode::PostMinusPre),
            other => Err(Error::Invalid(format!(
                "unknown target mode {other:?} (expected post or post-minus-pre)"
            ))),
        }
    }
}

/// Builds the target matrix of a finished simulation run.
pub fn target_from_sim(result: &SimResult, mode: TargetMode) -> Array2<f64> {
    let post = similarity_matrix(&result.post);
    match mode {
        TargetMode::Post => post,
        TargetMode::PostMinusPre => post - similarity_matrix(&result.pre),
    }
}

/// Symmetrized model matrix (C + Cᵀ)/2 at the given parameters: the ideal
/// noiseless target for recovery tests.
pub fn model_target(tn: &TemporalNetwork, params: ModelParams) -> Array2<f64> {
    symmetrize(&mnemonic_reachability(tn, params).c)
}

fn symmetrize(c: &Array2<f64>) -> Array2<f64> {
    (c + &c.t()) * 0.5
}

/// Pearson correlation between model scores and a target over off-diagonal
/// entries, with the default symmetrization. `None` when either side has
/// zero variance.
pub fn matrix_correlation(
    model: &ReachabilityMatrix,
    target: &Array2<f64>,
) -> Result<Option<f64>> {
    matrix_correlation_with(model, target, ModelTransform::default())
}

pub fn matrix_correlation_with(
    model: &ReachabilityMatrix,
    target: &Array2<f64>,
    transform: ModelTransform,
) -> Result<Option<f64>> {
    let n = model.n();
    if target.nrows() != n || target.ncols() != n {
        return Err(Error::DimensionMismatch { context: "target matrix", expected: n, got: target.nrows().max(target.ncols()) });
    }
    let compared = match transform {
        ModelTransform::Symmetrized => symmetrize(&model.c),
        ModelTransform::Raw => model.c.clone(),
    };
    let mut xs = Vec::with_capacity(n * (n - 1));
    let mut ys = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                xs.push(compared[[i, j]]);
                ys.push(target[[i, j]]);
            }
        }
    }
    Ok(pearson(&xs, &ys))
}

/// Argmax of the correlation surface plus the surface itself. Undefined
/// surface entries (all pairwise correlations degenerate) are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub best: ModelParams,
    pub best_correlation: f64,
    pub surface: Array2<f64>,
    pub grid: CalibrationGrid,
    pub targets_used: usize,
}

/// Scores every grid point by mean correlation over the aligned
/// (network, target) pairs. Ties prefer smaller λ, then smaller γ.
pub fn grid_search(
    tns: &[TemporalNetwork],
    targets: &[Array2<f64>],
    grid: &CalibrationGrid,
) -> Result<CalibrationResult> {
    grid_search_with(tns, targets, grid, ModelTransform::default())
}

pub fn grid_search_with(
    tns: &[TemporalNetwork],
    targets: &[Array2<f64>],
    grid: &CalibrationGrid,
    transform: ModelTransform,
) -> Result<CalibrationResult> {
    grid.validate()?;
    if tns.is_empty() {
        return Err(Error::EmptyInput("calibration networks"));
    }
    if tns.len() != targets.len() {
        return Err(Error::DimensionMismatch { context: "networks vs targets", expected: tns.len(), got: targets.len() });
    }
    let (nl, ng) = (grid.lambda_values.len(), grid.gamma_values.len());
    let mut surface = Array2::from_elem((nl, ng), f64::NAN);
    let mut best: Option<(f64, ModelParams)> = None;
    for (li, &lambda) in grid.lambda_values.iter().enumerate() {
        for (gi, &gamma) in grid.gamma_values.iter().enumerate() {
            let params = ModelParams::new(lambda, gamma)?;
            let mut sum = 0.0;
            let mut count = 0usize;
            for (tn, target) in tns.iter().zip(targets) {
                let model = mnemonic_reachability(tn, params);
                if let Some(r) = matrix_correlation_with(&model, target, transform)? {
                    sum += r;
                    count += 1;
                }
            }
            if count == 0 {
                continue;
            }
            let mean_r = sum / count as f64;
            surface[[li, gi]] = mean_r;
            // strictly-greater keeps the first (smallest λ, γ) maximizer
            if best.is_none_or(|(b, _)| mean_r > b) {
                best = Some((mean_r, params));
            }
        }
    }
    let (best_correlation, best) = best.ok_or_else(|| {
        Error::Invalid("correlation undefined at every grid point (degenerate targets)".into())
    })?;
    Ok(CalibrationResult {
        best,
        best_correlation,
        surface,
        grid: grid.clone(),
        targets_used: targets.len(),
    })
}

/// Surface CSV: rows are λ values, columns γ values.
pub fn write_surface_csv<W: Write>(w: &mut W, result: &CalibrationResult) -> Result<()> {
    let header: Vec<String> = result.grid.gamma_values.iter().map(|g| format!("gamma_{g}")).collect();
    writeln!(w, "lambda,{}", header.join(","))?;
    for (li, &lambda) in result.grid.lambda_values.iter().enumerate() {
        let row: Vec<String> = (0..result.grid.gamma_values.len())
            .map(|gi| result.surface[[li, gi]].to_string())
            .collect();
        writeln!(w, "{lambda},{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{build_experiment_network, Condition};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn experiment_network() -> TemporalNetwork {
        build_experiment_network(Condition::WeakTiesFirst).0
    }

    #[test]
    fn self_correlation_is_one() {
        let tn = experiment_network();
        let params = ModelParams::default();
        let model = mnemonic_reachability(&tn, params);
        let target = model_target(&tn, params);
        let r = matrix_correlation(&model, &target).unwrap().unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn negated_target_gives_minus_one() {
        let tn = experiment_network();
        let params = ModelParams::default();
        let model = mnemonic_reachability(&tn, params);
        let target = model_target(&tn, params) * -1.0 + 3.0;
        let r = matrix_correlation(&model, &target).unwrap().unwrap();
        assert_abs_diff_eq!(r, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_target_is_undefined_not_nan() {
        let tn = experiment_network();
        let model = mnemonic_reachability(&tn, ModelParams::default());
        let target = Array2::from_elem((16, 16), 0.7);
        assert_eq!(matrix_correlation(&model, &target).unwrap(), None);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let tn = experiment_network();
        let model = mnemonic_reachability(&tn, ModelParams::default());
        let target = Array2::zeros((4, 4));
        assert!(matrix_correlation(&model, &target).is_err());
    }

    #[test]
    fn noiseless_recovery_at_several_points() {
        let tn = experiment_network();
        let grid = CalibrationGrid::default();
        for &(l, g) in &[(1.0, 0.5), (0.0, 0.0), (0.3, 0.8), (1.0, 1.0), (0.2, 0.5)] {
            let truth = ModelParams::new(l, g).unwrap();
            let target = model_target(&tn, truth);
            let result = grid_search(std::slice::from_ref(&tn), &[target], &grid).unwrap();
            assert_eq!(result.best, truth, "failed to recover ({l}, {g})");
            assert!(result.best_correlation > 1.0 - 1e-12);
        }
    }

    #[test]
    fn surface_shape_and_argmax_consistency() {
        let tn = experiment_network();
        let grid = CalibrationGrid::default();
        let target = model_target(&tn, ModelParams::new(0.6, 0.4).unwrap());
        let result = super::grid_search(&[tn], &[target], &grid).unwrap();
        assert_eq!(result.surface.dim(), (11, 11));
        let max = result
            .surface
            .iter()
            .copied()
            .filter(|v| !v.is_nan())
            .fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(result.best_correlation, max);
        assert!(result.surface.iter().all(|v| v.is_nan() || (-1.0..=1.0 + 1e-12).contains(v)));
    }

    #[test]
    fn tie_break_prefers_smaller_params() {
        // a single-round network makes C identical at every grid point
        // (no recency window, no paths), so the whole surface ties and the
        // scan order must pick the smallest λ, then γ
        let tn = TemporalNetwork::from_round_edges(4, &[vec![(0, 1), (2, 3)]]).unwrap();
        let target = model_target(&tn, ModelParams::default());
        let result = super::grid_search(&[tn], &[target], &CalibrationGrid::default()).unwrap();
        assert_eq!(result.best, ModelParams::new(0.0, 0.0).unwrap());
    }

    #[test]
    fn multiple_networks_average() {
        let wtf = build_experiment_network(Condition::WeakTiesFirst).0;
        let stf = build_experiment_network(Condition::StrongTiesFirst).0;
        let truth = ModelParams::new(1.0, 0.5).unwrap();
        let targets = vec![model_target(&wtf, truth), model_target(&stf, truth)];
        let result =
            super::grid_search(&[wtf, stf], &targets, &CalibrationGrid::default()).unwrap();
        assert_eq!(result.best, truth);
        assert_eq!(result.targets_used, 2);
    }

    #[test]
    fn grid_with_step() {
        let g = CalibrationGrid::with_step(0.25).unwrap();
        assert_eq!(g.lambda_values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = CalibrationGrid::with_step(0.3).unwrap();
        assert_eq!(g.lambda_values, vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
        assert!(CalibrationGrid::with_step(0.0).is_err());
        assert!(CalibrationGrid::default().validate().is_ok());
    }

    #[test]
    fn surface_csv_layout() {
        let tn = experiment_network();
        let target = model_target(&tn, ModelParams::default());
        let grid = CalibrationGrid { lambda_values: vec![0.0, 1.0], gamma_values: vec![0.0, 0.5, 1.0] };
        let result = super::grid_search(&[tn], &[target], &grid).unwrap();
        let mut buf = Vec::new();
        write_surface_csv(&mut buf, &result).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "lambda,gamma_0,gamma_0.5,gamma_1");
        assert!(lines[1].starts_with("0,"));
        assert!(lines[2].starts_with("1,"));
        assert_eq!(lines[1].split(',').count(), 4);
    }

    #[test]
    fn target_mode_parsing() {
        assert_eq!("post".parse::<TargetMode>().unwrap(), TargetMode::Post);
        assert_eq!("post-minus-pre".parse::<TargetMode>().unwrap(), TargetMode::PostMinusPre);
        assert!("pre".parse::<TargetMode>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn surface_invariant_under_affine_target_transform(
            scale in 0.1f64..5.0,
            shift in -3.0f64..3.0,
        ) {
            let tn = experiment_network();
            let grid = CalibrationGrid { lambda_values: vec![0.0, 0.5, 1.0], gamma_values: vec![0.0, 0.5, 1.0] };
            let target = model_target(&tn, ModelParams::new(0.5, 0.5).unwrap());
            let plain =
                super::grid_search(std::slice::from_ref(&tn), std::slice::from_ref(&target), &grid)
                    .unwrap();
            let scaled = super::grid_search(&[tn], &[target * scale + shift], &grid).unwrap();
            prop_assert_eq!(plain.best, scaled.best);
            for (a, b) in plain.surface.iter().zip(scaled.surface.iter()) {
                prop_assert!((a - b).abs() < 1e-9 || (a.is_nan() && b.is_nan()));
            }
        }
    }
}
