//! Latent-space optimization over binary vectors.
//!
//! The pipeline alternates three pieces: a pseudo-boolean polynomial
//! surrogate trained with a correlation loss (or the energy-matching
//! baselines) against accumulated (latent, figure-of-merit) data, a recurrent
//! autoregressive sampler annealed over that surrogate to propose low-energy
//! latent vectors, and a deterministic decoder + oracle that scores the
//! proposals before folding them back into the dataset. A Metropolis
//! simulated-annealing baseline and brute-force enumeration make runs
//! verifiable end to end on synthetic problems.

pub mod bits;
pub mod diagnostics;
pub mod error;
pub mod losses;
pub mod pearsan;
pub mod polynomial;
pub mod problem;
pub mod sa;
pub mod schedule;
pub mod stats;
pub mod trace;
pub mod trainer;
pub mod vca;

pub use bits::Bitstring;
pub use error::{Error, Result};
pub use losses::{LossKind, LossWeights};
pub use pearsan::{compare_losses, run_pearsan, LoopConfig, LossComparison, PearsanRun};
pub use polynomial::{AffineWrapper, EnergyModel, PuboPolynomial, TermKey};
pub use problem::{LatentDataset, Problem};
pub use sa::{run_sa, SaConfig};
pub use schedule::AnnealSchedule;
pub use trainer::{train_affine, train_surrogate, GradientMethod, TrainerConfig};
pub use vca::{AutoregressiveSampler, CellKind, SamplerConfig};
