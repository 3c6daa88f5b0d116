//! Gradient-descent training of polynomial surrogates against latent
//! datasets.
//!
//! The energy is linear in its coefficients, so the chain rule through the
//! loss is exact: `dL/dc_j = sum_i dL/dH_i * activation_ij` plus the norm
//! regularizer's contribution `dL/d(sum c^2) * 2 c_j`. Plain SGD is the
//! default; an adaptive-moment variant sits behind a config flag.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{
    self, energy_matching, loss_gradients, pearsol, LossKind, LossWeights, TrainingBatch,
};
use crate::polynomial::{AffineWrapper, PuboPolynomial};
use crate::problem::LatentDataset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    Sgd,
    Adam,
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TrainerConfig {
    pub loss_kind: LossKind,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Learning rate for the affine scale/offset in the affine variant.
    pub affine_learning_rate: f64,
    /// Rows per gradient step; `None` trains full-batch.
    pub batch_size: Option<usize>,
    pub weights: LossWeights,
    pub method: GradientMethod,
    pub seed: u64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            loss_kind: LossKind::Pearsol,
            epochs: 300,
            learning_rate: 1e-5,
            affine_learning_rate: 1e-3,
            batch_size: None,
            weights: LossWeights::default(),
            method: GradientMethod::Sgd,
            seed: 0,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::invalid("trainer config", "epochs must be positive"));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::invalid(
                "trainer config",
                format!("learning_rate must be positive, got {}", self.learning_rate),
            ));
        }
        if !(self.affine_learning_rate > 0.0) || !self.affine_learning_rate.is_finite() {
            return Err(Error::invalid(
                "trainer config",
                format!(
                    "affine_learning_rate must be positive, got {}",
                    self.affine_learning_rate
                ),
            ));
        }
        if let Some(b) = self.batch_size {
            if b == 0 {
                return Err(Error::invalid("trainer config", "batch_size must be positive"));
            }
            if b < 2 && self.loss_kind == LossKind::Pearsol {
                return Err(Error::invalid(
                    "trainer config",
                    "correlation loss needs batches of at least 2 rows",
                ));
            }
        }
        Ok(())
    }
}

/// Loss recorded before each epoch's update, plus the loss after the final
/// update.
#[derive(Clone, Debug, Serialize)]
pub struct TrainReport {
    pub loss_history: Vec<f64>,
    pub final_loss: f64,
}

struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    fn new(len: usize) -> Self {
        AdamState {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    /// One bias-corrected step; `scales[j]` is the per-parameter learning rate.
    fn step(&mut self, params: &mut [f64], grads: &[f64], scales: impl Fn(usize) -> f64) {
        self.t += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.t as i32);
        let c2 = 1.0 - ADAM_BETA2.powi(self.t as i32);
        for j in 0..params.len() {
            self.m[j] = ADAM_BETA1 * self.m[j] + (1.0 - ADAM_BETA1) * grads[j];
            self.v[j] = ADAM_BETA2 * self.v[j] + (1.0 - ADAM_BETA2) * grads[j] * grads[j];
            let m_hat = self.m[j] / c1;
            let v_hat = self.v[j] / c2;
            params[j] -= scales(j) * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

fn check_dataset(dataset: &LatentDataset, config: &TrainerConfig) -> Result<()> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::invalid("trainer input", "dataset is empty"));
    }
    if config.loss_kind == LossKind::Pearsol {
        let mut foms = dataset.foms();
        foms.sort_by(|a, b| a.total_cmp(b));
        foms.dedup();
        if foms.len() < 2 {
            return Err(Error::TrainingDegenerate {
                rows: dataset.len(),
                distinct: foms.len(),
                source: Box::new(Error::DegenerateVariance {
                    series: "fom",
                    len: dataset.len(),
                }),
            });
        }
    }
    Ok(())
}

/// Row-index batches for one epoch: the whole dataset, or seeded-shuffle
/// minibatches.
fn epoch_batches(
    indices: &mut [usize],
    batch_size: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    match batch_size {
        None => vec![indices.to_vec()],
        Some(size) => {
            indices.shuffle(rng);
            indices.chunks(size).map(|c| c.to_vec()).collect()
        }
    }
}

fn batch_loss(
    kind: LossKind,
    foms: &[f64],
    energies: &[f64],
    weights: &LossWeights,
    coeff_sq_norm: f64,
) -> Result<f64> {
    let batch = TrainingBatch::new(foms, energies)?;
    match kind {
        LossKind::Pearsol => pearsol(batch, weights, coeff_sq_norm),
        LossKind::EnergyMatching | LossKind::EnergyMatchingAffine => Ok(energy_matching(batch)),
    }
}

/// Train a polynomial surrogate with the correlation or energy-matching loss.
/// Coefficients are updated in place; the key set never changes.
pub fn train_surrogate(
    poly: &mut PuboPolynomial,
    dataset: &LatentDataset,
    config: &TrainerConfig,
) -> Result<TrainReport> {
    if config.loss_kind == LossKind::EnergyMatchingAffine {
        return Err(Error::invalid(
            "trainer config",
            "the affine loss kind is trained through train_affine",
        ));
    }
    check_dataset(dataset, config)?;
    let rows: Vec<_> = dataset.rows().to_vec();
    let foms_all: Vec<f64> = rows.iter().map(|r| r.fom).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut indices: Vec<usize> = (0..rows.len()).collect();
    let mut adam = AdamState::new(poly.num_terms());
    let mut history = Vec::with_capacity(config.epochs);
    let mut grad = vec![0.0; poly.num_terms()];

    for _ in 0..config.epochs {
        let batches = epoch_batches(&mut indices, config.batch_size, &mut rng);
        let mut epoch_loss = 0.0;
        for batch_rows in &batches {
            let sq_norm = poly.coeff_sq_norm();
            let foms: Vec<f64> = batch_rows.iter().map(|&i| foms_all[i]).collect();
            let energies: Vec<f64> = batch_rows
                .iter()
                .map(|&i| poly.evaluate(&rows[i].latent))
                .collect::<Result<_>>()?;
            epoch_loss +=
                batch_loss(config.loss_kind, &foms, &energies, &config.weights, sq_norm)?;
            let batch = TrainingBatch::new(&foms, &energies)?;
            let partials = loss_gradients(batch, &config.weights, config.loss_kind, sq_norm)?;

            grad.iter_mut().for_each(|g| *g = 0.0);
            for (&row, &dh) in batch_rows.iter().zip(&partials.wrt_energies) {
                if dh == 0.0 {
                    continue;
                }
                let z = &rows[row].latent;
                for (j, key) in poly.keys().iter().enumerate() {
                    if key.activation(z) == 1.0 {
                        grad[j] += dh;
                    }
                }
            }
            if partials.wrt_coeff_sq_norm != 0.0 {
                for (g, &c) in grad.iter_mut().zip(poly.coefficients()) {
                    *g += partials.wrt_coeff_sq_norm * 2.0 * c;
                }
            }
            match config.method {
                GradientMethod::Sgd => {
                    for (c, &g) in poly.coefficients_mut().iter_mut().zip(&grad) {
                        *c -= config.learning_rate * g;
                    }
                }
                GradientMethod::Adam => {
                    adam.step(poly.coefficients_mut(), &grad, |_| config.learning_rate);
                }
            }
        }
        history.push(epoch_loss / batches.len() as f64);
    }

    let energies = rows
        .iter()
        .map(|r| poly.evaluate(&r.latent))
        .collect::<Result<Vec<_>>>()?;
    let final_loss = batch_loss(
        config.loss_kind,
        &foms_all,
        &energies,
        &config.weights,
        poly.coeff_sq_norm(),
    )?;
    Ok(TrainReport {
        loss_history: history,
        final_loss,
    })
}

/// Train the affine-wrapped surrogate with the energy-matching loss.
///
/// Base coefficients move at `learning_rate`; scale and offset move at
/// `affine_learning_rate`, with the scale projected back to a strictly
/// positive floor after every step.
pub fn train_affine(
    wrapper: &mut AffineWrapper,
    dataset: &LatentDataset,
    config: &TrainerConfig,
) -> Result<TrainReport> {
    if config.loss_kind != LossKind::EnergyMatchingAffine {
        return Err(Error::invalid(
            "trainer config",
            "train_affine requires the affine energy-matching loss kind",
        ));
    }
    check_dataset(dataset, config)?;
    let rows: Vec<_> = dataset.rows().to_vec();
    let foms_all: Vec<f64> = rows.iter().map(|r| r.fom).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut indices: Vec<usize> = (0..rows.len()).collect();
    let n_terms = wrapper.base().num_terms();
    let mut adam = AdamState::new(n_terms + 2);
    let mut history = Vec::with_capacity(config.epochs);
    let mut grad = vec![0.0; n_terms + 2];

    for _ in 0..config.epochs {
        let batches = epoch_batches(&mut indices, config.batch_size, &mut rng);
        let mut epoch_loss = 0.0;
        for batch_rows in &batches {
            let foms: Vec<f64> = batch_rows.iter().map(|&i| foms_all[i]).collect();
            let base_energies: Vec<f64> = batch_rows
                .iter()
                .map(|&i| wrapper.base().evaluate(&rows[i].latent))
                .collect::<Result<_>>()?;
            let scale = wrapper.scale();
            let offset = wrapper.offset();
            let wrapped: Vec<f64> = base_energies.iter().map(|b| scale * b + offset).collect();
            let batch = TrainingBatch::new(&foms, &wrapped)?;
            epoch_loss += energy_matching(batch);
            let partials =
                loss_gradients(batch, &config.weights, LossKind::EnergyMatchingAffine, 0.0)?;

            grad.iter_mut().for_each(|g| *g = 0.0);
            for ((&row, &dh), &base_e) in batch_rows
                .iter()
                .zip(&partials.wrt_energies)
                .zip(&base_energies)
            {
                // d(wrapped)/d(coeff) = scale * activation,
                // d(wrapped)/d(scale) = base energy, d(wrapped)/d(offset) = 1.
                let z = &rows[row].latent;
                if dh != 0.0 {
                    for (j, key) in wrapper.base().keys().iter().enumerate() {
                        if key.activation(z) == 1.0 {
                            grad[j] += dh * scale;
                        }
                    }
                    grad[n_terms] += dh * base_e;
                    grad[n_terms + 1] += dh;
                }
            }
            match config.method {
                GradientMethod::Sgd => {
                    for (c, &g) in wrapper
                        .base_mut()
                        .coefficients_mut()
                        .iter_mut()
                        .zip(&grad[..n_terms])
                    {
                        *c -= config.learning_rate * g;
                    }
                    wrapper.set_scale(scale - config.affine_learning_rate * grad[n_terms]);
                    wrapper.set_offset(offset - config.affine_learning_rate * grad[n_terms + 1]);
                }
                GradientMethod::Adam => {
                    let mut params: Vec<f64> = wrapper.base().coefficients().to_vec();
                    params.push(scale);
                    params.push(offset);
                    let lr = config.learning_rate;
                    let affine_lr = config.affine_learning_rate;
                    adam.step(&mut params, &grad, |j| {
                        if j < n_terms {
                            lr
                        } else {
                            affine_lr
                        }
                    });
                    wrapper
                        .base_mut()
                        .coefficients_mut()
                        .copy_from_slice(&params[..n_terms]);
                    wrapper.set_scale(params[n_terms]);
                    wrapper.set_offset(params[n_terms + 1]);
                }
            }
        }
        history.push(epoch_loss / batches.len() as f64);
    }

    let energies = rows
        .iter()
        .map(|r| wrapper.evaluate(&r.latent))
        .collect::<Result<Vec<_>>>()?;
    let final_loss = energy_matching(TrainingBatch::new(&foms_all, &energies)?);
    Ok(TrainReport {
        loss_history: history,
        final_loss,
    })
}

/// Post-training correlation between dataset figures of merit and surrogate
/// energies; `None` when the correlation is degenerate.
pub fn final_pearson(
    dataset: &LatentDataset,
    energies: &[f64],
) -> Option<f64> {
    losses::pearson(&dataset.foms(), energies).ok()
}
