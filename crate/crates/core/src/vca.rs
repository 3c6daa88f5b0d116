//! Autoregressive Bernoulli sampler trained by variational classical
//! annealing.
//!
//! The sampler is a small recurrent network that emits one bit at a time; the
//! joint probability factorizes by the chain rule, so exact per-sample
//! log-probabilities are available. Training minimizes the Monte Carlo free
//! energy `mean(h(z) + T log q(z))` with a score-function gradient estimator
//! and a batch-mean baseline, one gradient step per temperature step.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::polynomial::EnergyModel;
use crate::schedule::AnnealSchedule;
use crate::trace::{VcaTrace, VcaTraceRow};

/// Conditional probabilities are clamped into `[PROB_FLOOR, 1 - PROB_FLOOR]`
/// so every emitted log-probability stays finite.
pub const PROB_FLOOR: f64 = 1e-7;

/// Input symbols: previous bit 0, previous bit 1, and a dedicated start token
/// for the first step.
const INPUT_DIM: usize = 3;
const START_TOKEN: usize = 2;

/// Recurrent cell variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    /// `h_t = tanh(W [onehot(x_t); h_{t-1}] + b)`
    Concatenation,
    /// `h_t = tanh(sum_{a,b} M[a,b,:] onehot(x_t)[a] h_{t-1}[b] + b)`
    Tensorized,
}

impl CellKind {
    pub fn label(&self) -> &'static str {
        match self {
            CellKind::Concatenation => "concatenation",
            CellKind::Tensorized => "tensorized",
        }
    }
}

/// Sampler hyperparameters carried by loop and benchmark configs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub hidden_dim: usize,
    pub cell: CellKind,
    pub learning_rate: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            hidden_dim: 32,
            cell: CellKind::Concatenation,
            learning_rate: 5e-4,
        }
    }
}

/// Recurrent autoregressive sampler over `{0,1}^n`.
#[derive(Clone, Debug)]
pub struct AutoregressiveSampler {
    n: usize,
    hidden_dim: usize,
    cell: CellKind,
    /// Concatenation: `hidden x (INPUT_DIM + hidden)` row-major.
    /// Tensorized: `INPUT_DIM x hidden x hidden` with index `(a*h + b)*h + c`.
    recurrent: Vec<f64>,
    bias: Vec<f64>,
    readout: Vec<f64>,
    readout_bias: f64,
}

/// Monte Carlo estimate of the variational free energy at one temperature.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FreeEnergyEstimate {
    /// `mean_energy + T * mean_log_q`.
    pub value: f64,
    pub mean_energy: f64,
    pub mean_log_q: f64,
}

/// Everything produced by one sampling/update step.
#[derive(Clone, Debug)]
pub struct VcaStep {
    pub estimate: FreeEnergyEstimate,
    pub samples: Vec<Bitstring>,
    pub energies: Vec<f64>,
    pub log_probs: Vec<f64>,
}

/// Result of a full annealing run.
#[derive(Clone, Debug)]
pub struct AnnealRun {
    /// Unique bit-vectors collected from `collect_after` onward, in first-seen
    /// order.
    pub collected: Vec<Bitstring>,
    pub trace: VcaTrace,
}

struct StepCache {
    symbol: usize,
    hidden: Vec<f64>,
    prob: f64,
    clamped: bool,
    bit: bool,
}

/// Parameter-shaped gradient accumulator.
struct Gradients {
    recurrent: Vec<f64>,
    bias: Vec<f64>,
    readout: Vec<f64>,
    readout_bias: f64,
}

impl Gradients {
    fn zeros_like(sampler: &AutoregressiveSampler) -> Self {
        Gradients {
            recurrent: vec![0.0; sampler.recurrent.len()],
            bias: vec![0.0; sampler.bias.len()],
            readout: vec![0.0; sampler.readout.len()],
            readout_bias: 0.0,
        }
    }

    fn into_flat(self) -> Vec<f64> {
        let mut flat = self.recurrent;
        flat.extend_from_slice(&self.bias);
        flat.extend_from_slice(&self.readout);
        flat.push(self.readout_bias);
        flat
    }
}

impl AutoregressiveSampler {
    /// Fresh sampler with parameters i.i.d. uniform in `[-k, k]`,
    /// `k = 1/sqrt(hidden_dim)`, which starts close to the uniform
    /// distribution and therefore at high entropy.
    pub fn new<R: Rng + ?Sized>(
        n: usize,
        hidden_dim: usize,
        cell: CellKind,
        rng: &mut R,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("sampler", "n must be at least 1"));
        }
        if hidden_dim == 0 {
            return Err(Error::invalid("sampler", "hidden_dim must be at least 1"));
        }
        let k = 1.0 / (hidden_dim as f64).sqrt();
        let recurrent_len = match cell {
            CellKind::Concatenation => hidden_dim * (INPUT_DIM + hidden_dim),
            CellKind::Tensorized => INPUT_DIM * hidden_dim * hidden_dim,
        };
        let mut draw = |len: usize| -> Vec<f64> {
            (0..len).map(|_| rng.random_range(-k..=k)).collect()
        };
        Ok(AutoregressiveSampler {
            n,
            hidden_dim,
            cell,
            recurrent: draw(recurrent_len),
            bias: draw(hidden_dim),
            readout: draw(hidden_dim),
            readout_bias: rng.random_range(-k..=k),
        })
    }

    pub fn from_config<R: Rng + ?Sized>(n: usize, config: &SamplerConfig, rng: &mut R) -> Result<Self> {
        Self::new(n, config.hidden_dim, config.cell, rng)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn cell(&self) -> CellKind {
        self.cell
    }

    /// All parameters flattened in a fixed order (recurrent, bias, readout,
    /// readout bias); the inverse of [`set_parameters`](Self::set_parameters).
    pub fn parameters(&self) -> Vec<f64> {
        let mut flat = self.recurrent.clone();
        flat.extend_from_slice(&self.bias);
        flat.extend_from_slice(&self.readout);
        flat.push(self.readout_bias);
        flat
    }

    pub fn num_parameters(&self) -> usize {
        self.recurrent.len() + self.bias.len() + self.readout.len() + 1
    }

    pub fn set_parameters(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_parameters() {
            return Err(Error::invalid(
                "sampler parameters",
                format!(
                    "expected {} values, got {}",
                    self.num_parameters(),
                    flat.len()
                ),
            ));
        }
        let (rec, rest) = flat.split_at(self.recurrent.len());
        let (bias, rest) = rest.split_at(self.bias.len());
        let (readout, last) = rest.split_at(self.readout.len());
        self.recurrent.copy_from_slice(rec);
        self.bias.copy_from_slice(bias);
        self.readout.copy_from_slice(readout);
        self.readout_bias = last[0];
        Ok(())
    }

    /// One recurrence step: hidden state update from the previous symbol.
    fn advance(&self, symbol: usize, h_prev: Option<&[f64]>, h_out: &mut [f64]) {
        let hid = self.hidden_dim;
        match self.cell {
            CellKind::Concatenation => {
                for c in 0..hid {
                    let row = c * (INPUT_DIM + hid);
                    let mut acc = self.bias[c] + self.recurrent[row + symbol];
                    if let Some(h_prev) = h_prev {
                        for b in 0..hid {
                            acc += self.recurrent[row + INPUT_DIM + b] * h_prev[b];
                        }
                    }
                    h_out[c] = acc.tanh();
                }
            }
            CellKind::Tensorized => {
                h_out.copy_from_slice(&self.bias);
                if let Some(h_prev) = h_prev {
                    for (b, &hv) in h_prev.iter().enumerate() {
                        if hv == 0.0 {
                            continue;
                        }
                        let base = (symbol * hid + b) * hid;
                        for c in 0..hid {
                            h_out[c] += self.recurrent[base + c] * hv;
                        }
                    }
                }
                for v in h_out.iter_mut() {
                    *v = v.tanh();
                }
            }
        }
    }

    /// Conditional probability of emitting bit 1 given the hidden state,
    /// clamped into the probability floor.
    fn emit_prob(&self, hidden: &[f64]) -> (f64, bool) {
        let mut s = self.readout_bias;
        for (u, h) in self.readout.iter().zip(hidden) {
            s += u * h;
        }
        let raw = 1.0 / (1.0 + (-s).exp());
        let clamped = raw.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
        (clamped, clamped != raw)
    }

    /// Run the chain once, deciding each bit through `choose(step, p1)`.
    /// Returns the per-step caches and the total log-probability.
    fn forward<F: FnMut(usize, f64) -> bool>(&self, mut choose: F) -> (Vec<StepCache>, f64) {
        let mut caches: Vec<StepCache> = Vec::with_capacity(self.n);
        let mut log_prob = 0.0;
        let mut symbol = START_TOKEN;
        let mut hidden = vec![0.0; self.hidden_dim];
        for t in 0..self.n {
            let fed_symbol = symbol;
            let mut h_t = vec![0.0; self.hidden_dim];
            let h_prev = if t == 0 { None } else { Some(hidden.as_slice()) };
            self.advance(fed_symbol, h_prev, &mut h_t);
            let (prob, clamped) = self.emit_prob(&h_t);
            let bit = choose(t, prob);
            log_prob += if bit { prob.ln() } else { (1.0 - prob).ln() };
            symbol = bit as usize;
            hidden.copy_from_slice(&h_t);
            caches.push(StepCache {
                symbol: fed_symbol,
                hidden: h_t,
                prob,
                clamped,
                bit,
            });
        }
        (caches, log_prob)
    }

    fn caches_to_bits(&self, caches: &[StepCache]) -> Bitstring {
        Bitstring::new(caches.iter().map(|c| c.bit).collect())
    }

    /// Draw `count` samples with their log-probabilities.
    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> (Vec<Bitstring>, Vec<f64>) {
        let mut samples = Vec::with_capacity(count);
        let mut log_probs = Vec::with_capacity(count);
        for _ in 0..count {
            let (caches, lq) = self.forward(|_, p| rng.random::<f64>() < p);
            samples.push(self.caches_to_bits(&caches));
            log_probs.push(lq);
        }
        (samples, log_probs)
    }

    /// Teacher-forced log-probability of a given bit-vector.
    pub fn log_prob(&self, z: &Bitstring) -> Result<f64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: z.len(),
            });
        }
        let (_, lq) = self.forward(|t, _| z.bit(t));
        Ok(lq)
    }

    /// Accumulate `weight * d(log q)/d(params)` for one sampled sequence.
    fn backprop(&self, caches: &[StepCache], weight: f64, grads: &mut Gradients) {
        let hid = self.hidden_dim;
        let mut delta_h = vec![0.0; hid];
        let mut delta_prev = vec![0.0; hid];
        let zero_hidden = vec![0.0; hid];
        for t in (0..self.n).rev() {
            let cache = &caches[t];
            let h_prev: &[f64] = if t == 0 {
                &zero_hidden
            } else {
                &caches[t - 1].hidden
            };
            // Output layer. Clamped steps contribute nothing through the
            // probability (the clamp is flat).
            let dlogq_ds = if cache.clamped {
                0.0
            } else {
                (cache.bit as u8 as f64) - cache.prob
            };
            let g = weight * dlogq_ds;
            if g != 0.0 {
                for c in 0..hid {
                    grads.readout[c] += g * cache.hidden[c];
                    delta_h[c] += g * self.readout[c];
                }
                grads.readout_bias += g;
            }
            // Through tanh: delta wrt pre-activation.
            for c in 0..hid {
                delta_h[c] *= 1.0 - cache.hidden[c] * cache.hidden[c];
            }
            match self.cell {
                CellKind::Concatenation => {
                    for c in 0..hid {
                        let d = delta_h[c];
                        if d == 0.0 {
                            continue;
                        }
                        let row = c * (INPUT_DIM + hid);
                        grads.bias[c] += d;
                        grads.recurrent[row + cache.symbol] += d;
                        for b in 0..hid {
                            grads.recurrent[row + INPUT_DIM + b] += d * h_prev[b];
                            delta_prev[b] += d * self.recurrent[row + INPUT_DIM + b];
                        }
                    }
                }
                CellKind::Tensorized => {
                    for c in 0..hid {
                        grads.bias[c] += delta_h[c];
                    }
                    for b in 0..hid {
                        let hv = h_prev[b];
                        let base = (cache.symbol * hid + b) * hid;
                        let mut acc = 0.0;
                        for c in 0..hid {
                            let d = delta_h[c];
                            grads.recurrent[base + c] += d * hv;
                            acc += d * self.recurrent[base + c];
                        }
                        delta_prev[b] += acc;
                    }
                }
            }
            std::mem::swap(&mut delta_h, &mut delta_prev);
            delta_prev.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    fn check_model(&self, energy: &dyn EnergyModel) -> Result<()> {
        if energy.num_vars() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: energy.num_vars(),
            });
        }
        Ok(())
    }

    /// Sample a batch and assemble the free-energy estimate plus the
    /// score-function gradient with a batch-mean baseline.
    fn sample_and_grade<R: Rng + ?Sized>(
        &self,
        energy: &dyn EnergyModel,
        temperature: f64,
        n_samples: usize,
        rng: &mut R,
    ) -> Result<(VcaStep, Gradients)> {
        self.check_model(energy)?;
        if n_samples == 0 {
            return Err(Error::invalid("vca step", "n_samples must be at least 1"));
        }
        if !(temperature >= 0.0) {
            return Err(Error::invalid(
                "vca step",
                format!("temperature must be non-negative, got {temperature}"),
            ));
        }
        let mut batch = Vec::with_capacity(n_samples);
        let mut samples = Vec::with_capacity(n_samples);
        let mut energies = Vec::with_capacity(n_samples);
        let mut log_probs = Vec::with_capacity(n_samples);
        for _ in 0..n_samples {
            let (caches, lq) = self.forward(|_, p| rng.random::<f64>() < p);
            let z = self.caches_to_bits(&caches);
            energies.push(energy.energy(&z)?);
            log_probs.push(lq);
            samples.push(z);
            batch.push(caches);
        }
        let count = n_samples as f64;
        let mean_energy = energies.iter().sum::<f64>() / count;
        let mean_log_q = log_probs.iter().sum::<f64>() / count;
        // Per-sample local free energy and its batch mean as baseline.
        let local: Vec<f64> = energies
            .iter()
            .zip(&log_probs)
            .map(|(e, lq)| e + temperature * lq)
            .collect();
        let baseline = local.iter().sum::<f64>() / count;
        let mut grads = Gradients::zeros_like(self);
        for (caches, l) in batch.iter().zip(&local) {
            self.backprop(caches, (l - baseline) / count, &mut grads);
        }
        let estimate = FreeEnergyEstimate {
            value: mean_energy + temperature * mean_log_q,
            mean_energy,
            mean_log_q,
        };
        Ok((
            VcaStep {
                estimate,
                samples,
                energies,
                log_probs,
            },
            grads,
        ))
    }

    /// Score-function estimate of the free-energy gradient, flattened in
    /// parameter order. Exposed so the estimator can be checked against
    /// exact enumeration.
    pub fn free_energy_gradient<R: Rng + ?Sized>(
        &self,
        energy: &dyn EnergyModel,
        temperature: f64,
        n_samples: usize,
        rng: &mut R,
    ) -> Result<(Vec<f64>, FreeEnergyEstimate)> {
        let (step, grads) = self.sample_and_grade(energy, temperature, n_samples, rng)?;
        Ok((grads.into_flat(), step.estimate))
    }

    /// Monte Carlo free energy at the given temperature, without updating.
    pub fn free_energy<R: Rng + ?Sized>(
        &self,
        energy: &dyn EnergyModel,
        temperature: f64,
        n_samples: usize,
        rng: &mut R,
    ) -> Result<FreeEnergyEstimate> {
        self.check_model(energy)?;
        let (samples, log_probs) = self.sample(n_samples, rng);
        let energies = energy.energy_batch(&samples)?;
        let count = n_samples as f64;
        let mean_energy = energies.iter().sum::<f64>() / count;
        let mean_log_q = log_probs.iter().sum::<f64>() / count;
        Ok(FreeEnergyEstimate {
            value: mean_energy + temperature * mean_log_q,
            mean_energy,
            mean_log_q,
        })
    }

    /// One gradient-descent step on the free energy at `temperature`.
    pub fn vca_step<R: Rng + ?Sized>(
        &mut self,
        energy: &dyn EnergyModel,
        temperature: f64,
        n_samples: usize,
        learning_rate: f64,
        rng: &mut R,
    ) -> Result<VcaStep> {
        let (step, grads) = self.sample_and_grade(energy, temperature, n_samples, rng)?;
        for (p, g) in self.recurrent.iter_mut().zip(&grads.recurrent) {
            *p -= learning_rate * g;
        }
        for (p, g) in self.bias.iter_mut().zip(&grads.bias) {
            *p -= learning_rate * g;
        }
        for (p, g) in self.readout.iter_mut().zip(&grads.readout) {
            *p -= learning_rate * g;
        }
        self.readout_bias -= learning_rate * grads.readout_bias;
        Ok(step)
    }

    /// Anneal through the whole schedule, one gradient step per temperature,
    /// collecting unique samples from step `collect_after` onward.
    pub fn anneal<R: Rng + ?Sized>(
        &mut self,
        energy: &dyn EnergyModel,
        schedule: &AnnealSchedule,
        n_samples: usize,
        learning_rate: f64,
        collect_after: usize,
        rng: &mut R,
    ) -> Result<AnnealRun> {
        if collect_after >= schedule.steps {
            return Err(Error::invalid(
                "anneal",
                format!(
                    "collect_after ({collect_after}) must be less than schedule steps ({})",
                    schedule.steps
                ),
            ));
        }
        let mut trace = VcaTrace::new();
        let mut collected = Vec::new();
        let mut seen: HashSet<Bitstring> = HashSet::new();
        let mut best_energy = f64::INFINITY;
        for step in 0..schedule.steps {
            let temperature = schedule.temperature(step);
            let out = self.vca_step(energy, temperature, n_samples, learning_rate, rng)?;
            for &e in &out.energies {
                if e < best_energy {
                    best_energy = e;
                }
            }
            let entropy = entropy_estimate(&out.log_probs)?;
            trace.push(VcaTraceRow {
                step,
                temperature,
                free_energy: out.estimate.value,
                mean_energy: out.estimate.mean_energy,
                entropy,
                best_energy,
            });
            if step >= collect_after {
                for z in out.samples {
                    if seen.insert(z.clone()) {
                        collected.push(z);
                    }
                }
            }
        }
        Ok(AnnealRun { collected, trace })
    }
}

/// Monte Carlo entropy estimate: minus the mean sampled log-probability.
pub fn entropy_estimate(log_probs: &[f64]) -> Result<f64> {
    if log_probs.is_empty() {
        return Err(Error::invalid("entropy estimate", "empty input"));
    }
    if log_probs.iter().any(|lq| !lq.is_finite()) {
        return Err(Error::NonFinite {
            context: "entropy estimate input",
        });
    }
    Ok(-log_probs.iter().sum::<f64>() / log_probs.len() as f64)
}
