//! The alternating optimization loop: train the surrogate on the accumulated
//! dataset, anneal a fresh sampler against it, decode and score the collected
//! latent vectors, and fold them back into the dataset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::losses::LossKind;
use crate::polynomial::{AffineWrapper, EnergyModel, PuboPolynomial};
use crate::problem::{LatentDataset, Problem};
use crate::schedule::AnnealSchedule;
use crate::stats::{welch_t_test, Histogram, WelchTTest};
use crate::trace::VcaTrace;
use crate::trainer::{train_affine, train_surrogate, TrainerConfig};
use crate::vca::{AutoregressiveSampler, SamplerConfig};

/// Full configuration of one optimization run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LoopConfig {
    /// Retraining iterations.
    pub tau_max: usize,
    /// Annealing step after which sampled vectors are collected.
    pub n_thresh: usize,
    /// Size of the uniform-random initial dataset.
    pub bootstrap_count: usize,
    /// Monomial degree of the surrogate.
    pub surrogate_order: usize,
    /// Samples drawn per annealing step.
    pub n_samples: usize,
    /// Re-randomize the surrogate each iteration instead of warm-starting.
    pub reinit_surrogate: bool,
    pub trainer: TrainerConfig,
    pub schedule: AnnealSchedule,
    pub sampler: SamplerConfig,
    pub seed: u64,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig {
            tau_max: 10,
            n_thresh: 20,
            bootstrap_count: 100,
            surrogate_order: 2,
            n_samples: 50,
            reinit_surrogate: false,
            trainer: TrainerConfig::default(),
            schedule: AnnealSchedule::default(),
            sampler: SamplerConfig::default(),
            seed: 0,
        }
    }
}

impl LoopConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau_max == 0 {
            return Err(Error::invalid("loop config", "tau_max must be positive"));
        }
        if self.n_thresh >= self.schedule.steps {
            return Err(Error::invalid(
                "loop config",
                format!(
                    "n_thresh ({}) must be less than schedule steps ({})",
                    self.n_thresh, self.schedule.steps
                ),
            ));
        }
        if self.n_samples == 0 {
            return Err(Error::invalid("loop config", "n_samples must be positive"));
        }
        if self.bootstrap_count < 2 {
            return Err(Error::invalid(
                "loop config",
                "bootstrap_count must be at least 2",
            ));
        }
        self.trainer.validate()?;
        AnnealSchedule::new(self.schedule.t0, self.schedule.steps)?;
        Ok(())
    }
}

/// Per-iteration record of what the loop learned and collected.
#[derive(Clone, Debug, Serialize)]
pub struct IterationSummary {
    pub tau: usize,
    pub n_new: usize,
    pub mean_fom_new: Option<f64>,
    pub max_fom_new: Option<f64>,
    pub mean_fom_cumulative: f64,
    pub surrogate_final_loss: f64,
    pub pearson_final: Option<f64>,
}

/// The trained surrogate at the end of a run.
#[derive(Clone, Debug)]
pub enum TrainedSurrogate {
    Plain(PuboPolynomial),
    Affine(AffineWrapper),
}

impl TrainedSurrogate {
    pub fn as_energy_model(&self) -> &dyn EnergyModel {
        match self {
            TrainedSurrogate::Plain(p) => p,
            TrainedSurrogate::Affine(w) => w,
        }
    }

    pub fn base_polynomial(&self) -> &PuboPolynomial {
        match self {
            TrainedSurrogate::Plain(p) => p,
            TrainedSurrogate::Affine(w) => w.base(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PearsanRun {
    pub dataset: LatentDataset,
    pub summaries: Vec<IterationSummary>,
    pub best_latent: Bitstring,
    pub best_fom: f64,
    pub surrogate: TrainedSurrogate,
    /// One annealing trace per iteration.
    pub traces: Vec<VcaTrace>,
}

/// Seeds for every stochastic stage, derived in a fixed order from the master
/// seed so runs are reproducible and arms sharing a seed share their streams.
struct SeedPlan {
    bootstrap: u64,
    surrogate_init: u64,
    per_iteration: Vec<(u64, u64, u64)>, // (trainer, sampler init, anneal)
}

impl SeedPlan {
    fn derive(seed: u64, tau_max: usize) -> SeedPlan {
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        let bootstrap = master.random();
        let surrogate_init = master.random();
        let per_iteration = (0..tau_max)
            .map(|_| (master.random(), master.random(), master.random()))
            .collect();
        SeedPlan {
            bootstrap,
            surrogate_init,
            per_iteration,
        }
    }
}

/// Run the full loop against a problem.
pub fn run_pearsan(problem: &Problem, config: &LoopConfig) -> Result<PearsanRun> {
    config.validate()?;
    let n = problem.latent_len();
    let seeds = SeedPlan::derive(config.seed, config.tau_max);

    let mut bootstrap_rng = ChaCha8Rng::seed_from_u64(seeds.bootstrap);
    let mut dataset = LatentDataset::bootstrap(problem, config.bootstrap_count, &mut bootstrap_rng)?;

    let mut surrogate = init_surrogate(n, config, seeds.surrogate_init)?;
    let mut summaries = Vec::with_capacity(config.tau_max);
    let mut traces = Vec::with_capacity(config.tau_max);

    for tau in 0..config.tau_max {
        let (trainer_seed, sampler_seed, anneal_seed) = seeds.per_iteration[tau];
        if config.reinit_surrogate && tau > 0 {
            surrogate = init_surrogate(n, config, trainer_seed ^ seeds.surrogate_init)?;
        }
        let mut trainer_config = config.trainer;
        trainer_config.seed = trainer_seed;

        let report = match &mut surrogate {
            TrainedSurrogate::Plain(poly) => train_surrogate(poly, &dataset, &trainer_config)?,
            TrainedSurrogate::Affine(wrapper) => train_affine(wrapper, &dataset, &trainer_config)?,
        };
        let energies = surrogate
            .as_energy_model()
            .energy_batch(&dataset.latents())?;
        let pearson_final = crate::losses::pearson(&dataset.foms(), &energies).ok();

        let mut sampler_rng = ChaCha8Rng::seed_from_u64(sampler_seed);
        let mut sampler = AutoregressiveSampler::from_config(n, &config.sampler, &mut sampler_rng)?;
        let mut anneal_rng = ChaCha8Rng::seed_from_u64(anneal_seed);
        let run = sampler.anneal(
            surrogate.as_energy_model(),
            &config.schedule,
            config.n_samples,
            config.sampler.learning_rate,
            config.n_thresh,
            &mut anneal_rng,
        )?;
        traces.push(run.trace);

        let mut n_new = 0usize;
        let mut fom_sum = 0.0;
        let mut fom_max = f64::NEG_INFINITY;
        for z in run.collected {
            if dataset.contains(&z) {
                continue;
            }
            let fom = problem.fom_of(&z)?;
            dataset.insert(z, fom, tau as u32 + 1)?;
            n_new += 1;
            fom_sum += fom;
            if fom > fom_max {
                fom_max = fom;
            }
        }
        summaries.push(IterationSummary {
            tau,
            n_new,
            mean_fom_new: (n_new > 0).then(|| fom_sum / n_new as f64),
            max_fom_new: (n_new > 0).then_some(fom_max),
            mean_fom_cumulative: dataset.mean_fom(),
            surrogate_final_loss: report.final_loss,
            pearson_final,
        });
    }

    let best = dataset
        .rows()
        .iter()
        .max_by(|a, b| {
            a.fom
                .total_cmp(&b.fom)
                .then_with(|| b.latent.cmp_as_integer(&a.latent))
        })
        .expect("dataset is never empty");
    Ok(PearsanRun {
        best_latent: best.latent.clone(),
        best_fom: best.fom,
        dataset,
        summaries,
        surrogate,
        traces,
    })
}

fn init_surrogate(n: usize, config: &LoopConfig, seed: u64) -> Result<TrainedSurrogate> {
    let poly = PuboPolynomial::random_init(n, config.surrogate_order, seed)?;
    Ok(match config.trainer.loss_kind {
        LossKind::EnergyMatchingAffine => TrainedSurrogate::Affine(AffineWrapper::new(poly)),
        _ => TrainedSurrogate::Plain(poly),
    })
}

/// Per-arm aggregate over repeated runs.
#[derive(Clone, Debug, Serialize)]
pub struct ArmReport {
    pub loss_kind: LossKind,
    /// Mean over repeats of each iteration's newly-collected mean fom.
    pub per_iteration_mean_new_fom: Vec<Option<f64>>,
    /// Average of the per-iteration means, excluding iteration 0 where the
    /// surrogate is still at its random initialization.
    pub mean_new_fom_excluding_first: Option<f64>,
    /// Mean fom of all vectors collected in the final iteration, pooled
    /// across repeats.
    pub final_mean_fom: Option<f64>,
    pub final_histogram: Histogram,
    #[serde(skip)]
    pub final_foms: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WelchEntry {
    pub arm_a: &'static str,
    pub arm_b: &'static str,
    #[serde(flatten)]
    pub test: WelchTTest,
}

#[derive(Clone, Debug, Serialize)]
pub struct LossComparison {
    pub repeats: usize,
    pub arms: Vec<ArmReport>,
    pub welch: Vec<WelchEntry>,
}

const COMPARISON_ARMS: [LossKind; 3] = [
    LossKind::Pearsol,
    LossKind::EnergyMatching,
    LossKind::EnergyMatchingAffine,
];

const HISTOGRAM_BINS: usize = 20;

/// Run all three loss arms under identical per-repeat seeds and report
/// per-iteration means, final-iteration histograms, and pairwise two-sample
/// tests on the final-iteration figures of merit.
pub fn compare_losses(
    problem: &Problem,
    config: &LoopConfig,
    repeats: usize,
) -> Result<LossComparison> {
    if repeats < 2 {
        return Err(Error::invalid("comparison", "repeats must be at least 2"));
    }
    config.validate()?;
    let mut seed_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let repeat_seeds: Vec<u64> = (0..repeats).map(|_| seed_rng.random()).collect();

    let mut arms = Vec::with_capacity(COMPARISON_ARMS.len());
    for kind in COMPARISON_ARMS {
        // Repeats are independent runs; execute them in parallel and collect
        // in index order so the report stays deterministic.
        let runs: Vec<PearsanRun> = repeat_seeds
            .par_iter()
            .map(|&seed| {
                let mut arm_config = *config;
                arm_config.trainer.loss_kind = kind;
                arm_config.seed = seed;
                run_pearsan(problem, &arm_config)
            })
            .collect::<Result<_>>()?;
        arms.push(summarize_arm(kind, &runs, config.tau_max));
    }

    let mut welch = Vec::new();
    for i in 0..arms.len() {
        for j in (i + 1)..arms.len() {
            if let Ok(test) = welch_t_test(&arms[i].final_foms, &arms[j].final_foms) {
                welch.push(WelchEntry {
                    arm_a: arms[i].loss_kind.label(),
                    arm_b: arms[j].loss_kind.label(),
                    test,
                });
            }
        }
    }
    Ok(LossComparison {
        repeats,
        arms,
        welch,
    })
}

fn summarize_arm(kind: LossKind, runs: &[PearsanRun], tau_max: usize) -> ArmReport {
    let per_iteration_mean_new_fom: Vec<Option<f64>> = (0..tau_max)
        .map(|tau| {
            let values: Vec<f64> = runs
                .iter()
                .filter_map(|r| r.summaries[tau].mean_fom_new)
                .collect();
            (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
        })
        .collect();
    let tail: Vec<f64> = per_iteration_mean_new_fom
        .iter()
        .skip(1)
        .flatten()
        .copied()
        .collect();
    let mean_new_fom_excluding_first =
        (!tail.is_empty()).then(|| tail.iter().sum::<f64>() / tail.len() as f64);
    let final_foms: Vec<f64> = runs
        .iter()
        .flat_map(|r| {
            r.dataset
                .rows_from_iteration(tau_max as u32)
                .into_iter()
                .map(|row| row.fom)
                .collect::<Vec<_>>()
        })
        .collect();
    let final_mean_fom =
        (!final_foms.is_empty()).then(|| final_foms.iter().sum::<f64>() / final_foms.len() as f64);
    let final_histogram =
        Histogram::build(&final_foms, 0.0, 1.0, HISTOGRAM_BINS).expect("fixed bin parameters");
    ArmReport {
        loss_kind: kind,
        per_iteration_mean_new_fom,
        mean_new_fom_excluding_first,
        final_mean_fom,
        final_histogram,
        final_foms,
    }
}
