//! Statistical diagnostics of the surrogate/fom coupling: pairwise order
//! violations, the O(N^2) pairwise statistic, and a 2x2 principal-component
//! summary of the (fom, energy) scatter.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::losses::{gamma_pairwise, pearson};
use crate::polynomial::EnergyModel;
use crate::problem::LatentDataset;

/// Required order between two series when counting violations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Isotonic,
    Antitonic,
}

/// Count strict-order violations over all pairs with distinct values in both
/// series. Returns `(violations, comparable_pairs)`.
pub fn isotonicity_violations(
    foms: &[f64],
    energies: &[f64],
    direction: Direction,
) -> Result<(usize, usize)> {
    if foms.len() != energies.len() || foms.len() < 2 {
        return Err(Error::invalid(
            "violation count input",
            format!("lengths {} vs {}", foms.len(), energies.len()),
        ));
    }
    let mut violations = 0;
    let mut comparable = 0;
    for i in 0..foms.len() {
        for j in (i + 1)..foms.len() {
            let df = foms[i] - foms[j];
            let dh = energies[i] - energies[j];
            if df == 0.0 || dh == 0.0 {
                continue;
            }
            comparable += 1;
            let product = df * dh;
            let violated = match direction {
                Direction::Isotonic => product < 0.0,
                Direction::Antitonic => product > 0.0,
            };
            if violated {
                violations += 1;
            }
        }
    }
    Ok((violations, comparable))
}

/// Closed-form eigendecomposition of the 2x2 sample covariance of the
/// centered (fom, energy) pairs.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PcaSummary {
    /// Eigenvalues in decreasing order.
    pub eigenvalues: [f64; 2],
    /// Unit eigenvectors as rows, matching `eigenvalues`.
    pub components: [[f64; 2]; 2],
    /// `e2 / e1`; 0 for perfectly linear clouds, 1 for isotropic ones.
    pub variance_ratio: f64,
    /// Sign of the product of the first component's loadings; negative means
    /// the two series move inversely.
    pub loading_sign: i8,
}

pub fn pca_first_two(foms: &[f64], energies: &[f64]) -> Result<PcaSummary> {
    if foms.len() != energies.len() || foms.len() < 3 {
        return Err(Error::invalid(
            "pca input",
            format!("need >= 3 paired rows, got {} and {}", foms.len(), energies.len()),
        ));
    }
    let n = foms.len() as f64;
    let mean_f = foms.iter().sum::<f64>() / n;
    let mean_h = energies.iter().sum::<f64>() / n;
    let mut var_f = 0.0;
    let mut var_h = 0.0;
    let mut cov = 0.0;
    for (f, h) in foms.iter().zip(energies) {
        let df = f - mean_f;
        let dh = h - mean_h;
        var_f += df * df;
        var_h += dh * dh;
        cov += df * dh;
    }
    var_f /= n - 1.0;
    var_h /= n - 1.0;
    cov /= n - 1.0;
    if var_f == 0.0 && var_h == 0.0 {
        return Err(Error::DegenerateVariance {
            series: "fom and energy",
            len: foms.len(),
        });
    }

    let (a, b, c) = (var_f, cov, var_h);
    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    let e1 = 0.5 * (a + c + disc);
    let e2 = (0.5 * (a + c - disc)).max(0.0);
    let first = if b != 0.0 {
        normalize([b, e1 - a])
    } else if a >= c {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let second = [-first[1], first[0]];
    let product = first[0] * first[1];
    Ok(PcaSummary {
        eigenvalues: [e1, e2],
        components: [first, second],
        variance_ratio: e2 / e1,
        loading_sign: if product > 0.0 {
            1
        } else if product < 0.0 {
            -1
        } else {
            0
        },
    })
}

fn normalize(v: [f64; 2]) -> [f64; 2] {
    let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
    [v[0] / norm, v[1] / norm]
}

/// Cap on the number of rows fed to the O(N^2) pairwise statistic.
pub const GAMMA_SUBSAMPLE_CAP: usize = 2000;

const GAMMA_SUBSAMPLE_SEED: u64 = 0x9e3779b9;

/// Correlation diagnostics of a dataset against a surrogate energy model.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    pub rows: usize,
    pub pearson: f64,
    pub gamma: f64,
    pub gamma_sample_size: usize,
    pub antitonic_violations: usize,
    pub comparable_pairs: usize,
    pub pca: PcaSummary,
}

pub fn correlation_report(
    dataset: &LatentDataset,
    energy: &dyn EnergyModel,
) -> Result<CorrelationReport> {
    if dataset.is_empty() {
        return Err(Error::invalid("correlation report", "dataset is empty"));
    }
    let foms = dataset.foms();
    let energies = energy.energy_batch(&dataset.latents())?;
    let rho = pearson(&foms, &energies)?;

    // The pairwise statistic is O(N^2); run it on a fixed-seed subsample.
    let mut indices: Vec<usize> = (0..foms.len()).collect();
    if indices.len() > GAMMA_SUBSAMPLE_CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(GAMMA_SUBSAMPLE_SEED);
        indices.shuffle(&mut rng);
        indices.truncate(GAMMA_SUBSAMPLE_CAP);
    }
    let sub_f: Vec<f64> = indices.iter().map(|&i| foms[i]).collect();
    let sub_h: Vec<f64> = indices.iter().map(|&i| energies[i]).collect();
    let gamma = gamma_pairwise(&sub_f, &sub_h)?;
    let (antitonic_violations, comparable_pairs) =
        isotonicity_violations(&sub_f, &sub_h, Direction::Antitonic)?;
    let pca = pca_first_two(&foms, &energies)?;

    Ok(CorrelationReport {
        rows: dataset.len(),
        pearson: rho,
        gamma,
        gamma_sample_size: indices.len(),
        antitonic_violations,
        comparable_pairs,
        pca,
    })
}
