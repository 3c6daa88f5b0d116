//! Surrogate training losses and their analytic gradients.
//!
//! The correlation loss drives the surrogate energies toward a perfect
//! order-reversal of the figure-of-merit values (correlation -1); the
//! energy-matching loss instead forces the energies to equal the negated
//! figures of merit point by point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clamp applied to the correlation before the inverse-logistic transform;
/// the transform diverges at +-1 and this keeps its gradient finite.
pub const RHO_CLAMP: f64 = 1e-6;

/// Spread floor below which a list counts as constant and correlation
/// statistics report a degenerate-variance error instead of a value.
pub const STD_FLOOR: f64 = 1e-12;

/// Paired (figure-of-merit, surrogate-energy) samples for one training step.
#[derive(Clone, Copy, Debug)]
pub struct TrainingBatch<'a> {
    foms: &'a [f64],
    energies: &'a [f64],
}

impl<'a> TrainingBatch<'a> {
    pub fn new(foms: &'a [f64], energies: &'a [f64]) -> Result<Self> {
        if foms.len() != energies.len() {
            return Err(Error::invalid(
                "training batch",
                format!(
                    "fom and energy lists differ in length: {} vs {}",
                    foms.len(),
                    energies.len()
                ),
            ));
        }
        if foms.is_empty() {
            return Err(Error::invalid("training batch", "batch is empty"));
        }
        if let Some(bad) = foms.iter().chain(energies).find(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "training batch",
                format!("non-finite entry {bad}"),
            ));
        }
        Ok(TrainingBatch { foms, energies })
    }

    pub fn len(&self) -> usize {
        self.foms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.foms.is_empty()
    }

    pub fn foms(&self) -> &[f64] {
        self.foms
    }

    pub fn energies(&self) -> &[f64] {
        self.energies
    }
}

/// Weights of the three terms in the combined correlation loss.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LossWeights {
    /// Weight on the inverse-logistic correlation term.
    pub pearson: f64,
    /// Weight on the batch-average energy term.
    pub mean_energy: f64,
    /// Weight on the coefficient-norm regularizer.
    pub norm: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            pearson: 10.0,
            mean_energy: 0.01,
            norm: 10.0,
        }
    }
}

impl LossWeights {
    pub fn new(pearson: f64, mean_energy: f64, norm: f64) -> Result<Self> {
        for (name, v) in [
            ("pearson", pearson),
            ("mean_energy", mean_energy),
            ("norm", norm),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    "loss weights",
                    format!("{name} must be finite and non-negative, got {v}"),
                ));
            }
        }
        Ok(LossWeights {
            pearson,
            mean_energy,
            norm,
        })
    }
}

/// Which loss a trainer optimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Pearsol,
    EnergyMatching,
    EnergyMatchingAffine,
}

impl LossKind {
    pub fn label(&self) -> &'static str {
        match self {
            LossKind::Pearsol => "pearsol",
            LossKind::EnergyMatching => "energy_matching",
            LossKind::EnergyMatchingAffine => "energy_matching_affine",
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean and sum of squared deviations (two-pass).
fn moments(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    let ss = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    (m, ss)
}

struct PearsonParts {
    mean_f: f64,
    mean_h: f64,
    /// sqrt of the sum of squared deviations (no 1/N; the factors cancel in
    /// the ratio, so the correlation value is convention-independent).
    spread_f: f64,
    spread_h: f64,
    rho: f64,
}

fn pearson_parts(foms: &[f64], energies: &[f64]) -> Result<PearsonParts> {
    if foms.len() != energies.len() || foms.is_empty() {
        return Err(Error::invalid(
            "correlation input",
            format!("lengths {} vs {}", foms.len(), energies.len()),
        ));
    }
    let (mean_f, ss_f) = moments(foms);
    let (mean_h, ss_h) = moments(energies);
    let spread_f = ss_f.sqrt();
    let spread_h = ss_h.sqrt();
    if spread_f <= STD_FLOOR {
        return Err(Error::DegenerateVariance {
            series: "fom",
            len: foms.len(),
        });
    }
    if spread_h <= STD_FLOOR {
        return Err(Error::DegenerateVariance {
            series: "energy",
            len: energies.len(),
        });
    }
    let cov: f64 = foms
        .iter()
        .zip(energies)
        .map(|(f, h)| (f - mean_f) * (h - mean_h))
        .sum();
    let rho = (cov / (spread_f * spread_h)).clamp(-1.0, 1.0);
    Ok(PearsonParts {
        mean_f,
        mean_h,
        spread_f,
        spread_h,
        rho,
    })
}

/// Pearson correlation of two equal-length lists, in [-1, 1].
///
/// Errors with a degenerate-variance report naming the constant list; a
/// single-element input is degenerate by construction.
pub fn pearson(foms: &[f64], energies: &[f64]) -> Result<f64> {
    Ok(pearson_parts(foms, energies)?.rho)
}

/// Inverse-logistic transform of a correlation value:
/// `log(0.5(rho+1) / (1 - 0.5(rho+1)))` after clamping rho away from +-1.
///
/// Strictly increasing and odd, with derivative growing without bound toward
/// the clamp boundaries, which keeps pushing the correlation toward -1 long
/// after a plain linear term would have flattened out.
pub fn inverse_logistic(rho: f64) -> Result<f64> {
    if !rho.is_finite() {
        return Err(Error::NonFinite {
            context: "inverse_logistic input",
        });
    }
    let clamped = rho.clamp(-1.0 + RHO_CLAMP, 1.0 - RHO_CLAMP);
    let a = 0.5 * (clamped + 1.0);
    Ok((a / (1.0 - a)).ln())
}

/// Combined correlation loss: weighted inverse-logistic correlation plus
/// average energy plus a `(||coeffs|| - 1)^2` norm regularizer.
///
/// `coeff_sq_norm` is the sum of squared coefficients of the surrogate being
/// trained. Minimizing drives the correlation toward -1, the mean energy
/// down, and the coefficient norm toward 1.
pub fn pearsol(batch: TrainingBatch, weights: &LossWeights, coeff_sq_norm: f64) -> Result<f64> {
    let rho = pearson(batch.foms(), batch.energies())?;
    let norm_dev = coeff_sq_norm.sqrt() - 1.0;
    Ok(weights.pearson * inverse_logistic(rho)?
        + weights.mean_energy * mean(batch.energies())
        + weights.norm * norm_dev * norm_dev)
}

/// Pairwise squared matching loss: `sum_i (F_i + H_i)^2`.
/// Zero exactly when the energies are the negated figures of merit.
pub fn energy_matching(batch: TrainingBatch) -> f64 {
    batch
        .foms()
        .iter()
        .zip(batch.energies())
        .map(|(f, h)| (f + h) * (f + h))
        .sum()
}

/// Partial derivatives of a loss with respect to each surrogate energy and to
/// the squared coefficient norm.
#[derive(Clone, Debug)]
pub struct LossGradients {
    pub wrt_energies: Vec<f64>,
    pub wrt_coeff_sq_norm: f64,
}

/// Analytic gradients for the given loss kind.
///
/// For the correlation loss, `coeff_sq_norm` must be the same value that
/// would be passed to [`pearsol`]; the energy-matching kinds ignore it.
pub fn loss_gradients(
    batch: TrainingBatch,
    weights: &LossWeights,
    kind: LossKind,
    coeff_sq_norm: f64,
) -> Result<LossGradients> {
    match kind {
        LossKind::EnergyMatching | LossKind::EnergyMatchingAffine => Ok(LossGradients {
            wrt_energies: batch
                .foms()
                .iter()
                .zip(batch.energies())
                .map(|(f, h)| 2.0 * (f + h))
                .collect(),
            wrt_coeff_sq_norm: 0.0,
        }),
        LossKind::Pearsol => {
            let parts = pearson_parts(batch.foms(), batch.energies())?;
            let n = batch.len() as f64;
            // Chain rule through the clamped inverse-logistic: flat outside
            // the clamp interval, 2/(1-rho^2) inside.
            let inside =
                parts.rho > -1.0 + RHO_CLAMP && parts.rho < 1.0 - RHO_CLAMP;
            let dlogistic = if inside {
                2.0 / (1.0 - parts.rho * parts.rho)
            } else {
                0.0
            };
            let wrt_energies = batch
                .foms()
                .iter()
                .zip(batch.energies())
                .map(|(f, h)| {
                    let drho = ((f - parts.mean_f) / parts.spread_f
                        - parts.rho * (h - parts.mean_h) / parts.spread_h)
                        / parts.spread_h;
                    weights.pearson * dlogistic * drho + weights.mean_energy / n
                })
                .collect();
            let wrt_coeff_sq_norm = if coeff_sq_norm > 0.0 {
                weights.norm * (1.0 - 1.0 / coeff_sq_norm.sqrt())
            } else {
                // Collapse point: every coefficient is zero, so the trainer's
                // per-coefficient norm gradient vanishes anyway.
                0.0
            };
            Ok(LossGradients {
                wrt_energies,
                wrt_coeff_sq_norm,
            })
        }
    }
}

/// O(N^2) pairwise order statistic with population-normalized deviations:
/// `(1/N^2) sum_{i,j} (x_i - x_j)(y_i - y_j) / (sigma_x sigma_y)`.
///
/// Diagnostic only; algebraically it equals twice the Pearson correlation.
pub fn gamma_pairwise(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid(
            "pairwise statistic input",
            format!("lengths {} vs {}", xs.len(), ys.len()),
        ));
    }
    let n = xs.len() as f64;
    let (_, ss_x) = moments(xs);
    let (_, ss_y) = moments(ys);
    let sigma_x = (ss_x / n).sqrt();
    let sigma_y = (ss_y / n).sqrt();
    if sigma_x <= STD_FLOOR {
        return Err(Error::DegenerateVariance {
            series: "x",
            len: xs.len(),
        });
    }
    if sigma_y <= STD_FLOOR {
        return Err(Error::DegenerateVariance {
            series: "y",
            len: ys.len(),
        });
    }
    let mut total = 0.0;
    for (xi, yi) in xs.iter().zip(ys) {
        for (xj, yj) in xs.iter().zip(ys) {
            total += (xi - xj) * (yi - yj);
        }
    }
    Ok(total / (n * n * sigma_x * sigma_y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn batch<'a>(f: &'a [f64], h: &'a [f64]) -> TrainingBatch<'a> {
        TrainingBatch::new(f, h).unwrap()
    }

    #[test]
    fn pearson_perfect_correlations() {
        let f = [0.2, 0.7, 0.1, 0.9, 0.4];
        let same = f;
        assert!((pearson(&f, &same).unwrap() - 1.0).abs() <= 1e-12);
        let anti: Vec<f64> = f.iter().map(|x| -x + 7.0).collect();
        assert!((pearson(&f, &anti).unwrap() + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn pearson_matches_direct_formula() {
        // Separately coded covariance / spread computation.
        let f = [1.0, 2.0, 3.0, 4.0];
        let h = [2.0, 1.0, 4.0, 3.0];
        let mf = f.iter().sum::<f64>() / 4.0;
        let mh = h.iter().sum::<f64>() / 4.0;
        let cov: f64 = f.iter().zip(&h).map(|(a, b)| (a - mf) * (b - mh)).sum();
        let sf: f64 = f.iter().map(|a| (a - mf) * (a - mf)).sum::<f64>().sqrt();
        let sh: f64 = h.iter().map(|b| (b - mh) * (b - mh)).sum::<f64>().sqrt();
        let expected = cov / (sf * sh);
        assert!((expected - 0.6).abs() <= 1e-12);
        assert!((pearson(&f, &h).unwrap() - expected).abs() <= 1e-12);
    }

    #[test]
    fn pearson_degenerate_reports_which_list() {
        let constant = [3.0, 3.0, 3.0];
        let varying = [1.0, 2.0, 3.0];
        match pearson(&constant, &varying) {
            Err(Error::DegenerateVariance { series, .. }) => assert_eq!(series, "fom"),
            other => panic!("expected degenerate fom, got {other:?}"),
        }
        match pearson(&varying, &constant) {
            Err(Error::DegenerateVariance { series, .. }) => assert_eq!(series, "energy"),
            other => panic!("expected degenerate energy, got {other:?}"),
        }
    }

    #[test]
    fn pearson_scale_shift_equivariance_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let f: Vec<f64> = (0..30).map(|_| rng.random::<f64>()).collect();
            let h: Vec<f64> = (0..30).map(|_| rng.random::<f64>()).collect();
            let rho = pearson(&f, &h).unwrap();
            for (a, b) in [(2.5, 1.0), (-0.3, 4.0)] {
                let scaled: Vec<f64> = h.iter().map(|x| a * x + b).collect();
                let expected = a.signum() * rho;
                assert!((pearson(&f, &scaled).unwrap() - expected).abs() <= 1e-9);
            }
            assert!((pearson(&h, &f).unwrap() - rho).abs() <= 1e-12);
        }
    }

    #[test]
    fn inverse_logistic_reference_points() {
        assert_eq!(inverse_logistic(0.0).unwrap(), 0.0);
        assert!((inverse_logistic(0.5).unwrap() - 3.0f64.ln()).abs() <= 1e-12);
        // At the clamp boundary for rho = -1.
        let a = RHO_CLAMP / 2.0;
        let expected = (a / (1.0 - a)).ln();
        assert!((inverse_logistic(-1.0).unwrap() - expected).abs() <= 1e-12);
        assert!(expected < -10.0);
        assert!(inverse_logistic(f64::NAN).is_err());
    }

    #[test]
    fn inverse_logistic_is_odd_and_increasing() {
        for rho in [-0.999, -0.5, -0.1, 0.0, 0.3, 0.8] {
            let l = inverse_logistic(rho).unwrap();
            let neg = inverse_logistic(-rho).unwrap();
            assert!((l + neg).abs() <= 1e-12);
        }
        let mut last = f64::NEG_INFINITY;
        for k in 0..100 {
            let rho = -1.0 + 2.0 * (k as f64) / 99.0;
            let l = inverse_logistic(rho).unwrap();
            assert!(l >= last);
            last = l;
        }
    }

    #[test]
    fn pearsol_isolated_terms() {
        let f = [0.1, 0.5, 0.9];
        let anti: Vec<f64> = f.iter().map(|x| -x).collect();
        let floor = pearsol(
            batch(&f, &anti),
            &LossWeights::new(1.0, 0.0, 0.0).unwrap(),
            1.0,
        )
        .unwrap();
        assert!((floor - inverse_logistic(-1.0).unwrap()).abs() <= 1e-9);

        let mean_only = pearsol(
            batch(&[1.0, 2.0], &[2.0, 4.0]),
            &LossWeights::new(0.0, 1.0, 0.0).unwrap(),
            1.0,
        )
        .unwrap();
        assert!((mean_only - 3.0).abs() <= 1e-12);

        let norm_only = pearsol(
            batch(&[1.0, 2.0], &[2.0, 4.0]),
            &LossWeights::new(0.0, 0.0, 1.0).unwrap(),
            4.0,
        )
        .unwrap();
        assert!((norm_only - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn energy_matching_reference_points() {
        let f = [0.3, 0.6, 0.2];
        let anti: Vec<f64> = f.iter().map(|x| -x).collect();
        assert_eq!(energy_matching(batch(&f, &anti)), 0.0);
        assert_eq!(energy_matching(batch(&[1.0], &[1.0])), 4.0);

        // Element-loop oracle on random data.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: Vec<f64> = (0..40).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..40).map(|_| rng.random::<f64>()).collect();
        let mut expected = 0.0;
        for i in 0..40 {
            expected += (a[i] - (-b[i])).powi(2);
        }
        assert!((energy_matching(batch(&a, &b)) - expected).abs() <= 1e-12);
        assert!(energy_matching(batch(&a, &b)) >= 0.0);
    }

    #[test]
    fn energy_matching_gradient_vanishes_at_minimum() {
        let f = [0.3, 0.6, 0.2];
        let anti: Vec<f64> = f.iter().map(|x| -x).collect();
        let grads = loss_gradients(
            batch(&f, &anti),
            &LossWeights::default(),
            LossKind::EnergyMatching,
            1.0,
        )
        .unwrap();
        assert!(grads.wrt_energies.iter().all(|&g| g == 0.0));
        assert_eq!(grads.wrt_coeff_sq_norm, 0.0);
    }

    #[test]
    fn mean_term_gradient_is_uniform() {
        let f = [0.1, 0.4, 0.8, 0.2];
        let h = [0.9, -0.3, 0.5, 0.0];
        let grads = loss_gradients(
            batch(&f, &h),
            &LossWeights::new(0.0, 1.0, 0.0).unwrap(),
            LossKind::Pearsol,
            1.0,
        )
        .unwrap();
        for g in grads.wrt_energies {
            assert!((g - 0.25).abs() <= 1e-12);
        }
    }

    #[test]
    fn pearsol_gradients_match_finite_differences() {
        let weights = LossWeights::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let step = 1e-6;
        for _ in 0..100 {
            let len = rng.random_range(3..20);
            let f: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
            let mut h: Vec<f64> = (0..len).map(|_| rng.random::<f64>() - 0.5).collect();
            let sq_norm = 0.25 + 2.0 * rng.random::<f64>();
            let grads =
                loss_gradients(batch(&f, &h), &weights, LossKind::Pearsol, sq_norm).unwrap();

            let mut fd = Vec::with_capacity(len + 1);
            for i in 0..len {
                let orig = h[i];
                h[i] = orig + step;
                let up = pearsol(batch(&f, &h), &weights, sq_norm).unwrap();
                h[i] = orig - step;
                let down = pearsol(batch(&f, &h), &weights, sq_norm).unwrap();
                h[i] = orig;
                fd.push((up - down) / (2.0 * step));
            }
            let up = pearsol(batch(&f, &h), &weights, sq_norm + step).unwrap();
            let down = pearsol(batch(&f, &h), &weights, sq_norm - step).unwrap();
            fd.push((up - down) / (2.0 * step));

            let analytic: Vec<f64> = grads
                .wrt_energies
                .iter()
                .copied()
                .chain([grads.wrt_coeff_sq_norm])
                .collect();
            let diff_norm: f64 = analytic
                .iter()
                .zip(&fd)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let fd_norm: f64 = fd.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(
                diff_norm <= 1e-5 * fd_norm.max(1e-8),
                "gradient mismatch: {diff_norm} vs norm {fd_norm}"
            );
        }
    }

    #[test]
    fn gamma_sign_agreement_and_exact_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let x: Vec<f64> = (0..25).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = (0..25).map(|_| rng.random::<f64>()).collect();
            let gamma = gamma_pairwise(&x, &y).unwrap();
            let rho = pearson(&x, &y).unwrap();
            assert_eq!(gamma.signum(), rho.signum());
            assert!((gamma - 2.0 * rho).abs() <= 1e-9, "{gamma} vs 2*{rho}");
        }
        let x = [1.0, 2.0, 3.0];
        assert!(gamma_pairwise(&x, &x).unwrap() > 0.0);
        assert!(matches!(
            gamma_pairwise(&x, &[5.0, 5.0, 5.0]),
            Err(Error::DegenerateVariance { series: "y", .. })
        ));
    }

    #[test]
    fn batch_validation() {
        assert!(TrainingBatch::new(&[1.0], &[1.0, 2.0]).is_err());
        assert!(TrainingBatch::new(&[], &[]).is_err());
        assert!(TrainingBatch::new(&[f64::NAN], &[1.0]).is_err());
        assert!(TrainingBatch::new(&[1.0], &[1.0]).is_ok());
    }
}
