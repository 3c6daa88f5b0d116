//! Metropolis simulated-annealing baseline over a polynomial energy.
//!
//! Single-bit-flip proposals with the Metropolis acceptance rule under the
//! shared linear temperature schedule. Energy deltas are computed
//! incrementally, touching only the terms that contain the flipped variable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::polynomial::PuboPolynomial;
use crate::schedule::AnnealSchedule;
use crate::trace::{SaTrace, SaTraceRow};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SaConfig {
    pub steps: usize,
    pub t0: f64,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            steps: 200,
            t0: 1.0,
            seed: 0,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::invalid("sa config", "steps must be at least 1"));
        }
        if !(self.t0 > 0.0) || !self.t0.is_finite() {
            return Err(Error::invalid(
                "sa config",
                format!("t0 must be finite and positive, got {}", self.t0),
            ));
        }
        Ok(())
    }
}

/// Metropolis acceptance probability for moving from energy `e_current` to
/// `e_candidate` at temperature `t`: `min(1, exp((e_current - e_candidate)/t))`,
/// with the `t = 0` limit accepting only downhill moves.
pub fn acceptance_probability(e_current: f64, e_candidate: f64, t: f64) -> f64 {
    if e_candidate <= e_current {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    ((e_current - e_candidate) / t).exp()
}

/// Positions of the polynomial terms containing each variable.
struct FlipTable {
    by_var: Vec<Vec<usize>>,
}

impl FlipTable {
    fn build(poly: &PuboPolynomial) -> Self {
        let mut by_var = vec![Vec::new(); poly.num_vars()];
        for (pos, key) in poly.keys().iter().enumerate() {
            for &i in key.indices() {
                by_var[i as usize].push(pos);
            }
        }
        FlipTable { by_var }
    }

    /// Energy change from flipping `var` in `z`, visiting only terms that
    /// contain `var`.
    fn delta(&self, poly: &PuboPolynomial, z: &Bitstring, var: usize) -> f64 {
        let mut delta = 0.0;
        for &pos in &self.by_var[var] {
            let key = &poly.keys()[pos];
            if key
                .indices()
                .iter()
                .all(|&i| i as usize == var || z.bit(i as usize))
            {
                let c = poly.coefficients()[pos];
                delta += if z.bit(var) { -c } else { c };
            }
        }
        delta
    }
}

#[derive(Clone, Debug)]
pub struct SaRun {
    pub best: Bitstring,
    pub best_energy: f64,
    pub trace: SaTrace,
}

/// One annealing chain from a uniformly random start, tracking the best state
/// seen.
pub fn run_sa(poly: &PuboPolynomial, config: &SaConfig) -> Result<SaRun> {
    config.validate()?;
    let schedule = AnnealSchedule::new(config.t0, config.steps)?;
    let n = poly.num_vars();
    let table = FlipTable::build(poly);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = Bitstring::random(n, &mut rng);
    let mut energy = poly.evaluate(&state)?;
    let mut best = state.clone();
    let mut best_energy = energy;
    let mut trace = SaTrace::new();
    for step in 0..config.steps {
        let temperature = schedule.temperature(step);
        let var = rng.random_range(0..n);
        let delta = table.delta(poly, &state, var);
        let accept = acceptance_probability(energy, energy + delta, temperature);
        if rng.random::<f64>() < accept {
            state.flip(var);
            energy += delta;
            if energy < best_energy {
                best_energy = energy;
                best = state.clone();
            }
        }
        trace.push(SaTraceRow {
            step,
            temperature,
            current_energy: energy,
            best_energy,
        });
    }
    Ok(SaRun {
        best,
        best_energy,
        trace,
    })
}

/// Fixed-temperature Metropolis chain returning per-state visit counts
/// (index = little-endian state encoding). The chain runs for `steps`
/// proposals and records the state every `thin` steps, which suppresses the
/// autocorrelation that would otherwise distort count-based goodness-of-fit
/// statistics.
pub fn boltzmann_visit_counts(
    poly: &PuboPolynomial,
    temperature: f64,
    steps: usize,
    thin: usize,
    seed: u64,
) -> Result<Vec<u64>> {
    let n = poly.num_vars();
    if n > 16 {
        return Err(Error::EnumerationTooLarge { n, limit: 16 });
    }
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::invalid(
            "fixed-temperature chain",
            format!("temperature must be finite and positive, got {temperature}"),
        ));
    }
    if thin == 0 {
        return Err(Error::invalid("fixed-temperature chain", "thin must be >= 1"));
    }
    let table = FlipTable::build(poly);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = Bitstring::random(n, &mut rng);
    let mut energy = poly.evaluate(&state)?;
    let mut counts = vec![0u64; 1 << n];
    for step in 0..steps {
        let var = rng.random_range(0..n);
        let delta = table.delta(poly, &state, var);
        let accept = acceptance_probability(energy, energy + delta, temperature);
        if rng.random::<f64>() < accept {
            state.flip(var);
            energy += delta;
        }
        if step % thin == 0 {
            counts[state.to_index() as usize] += 1;
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn acceptance_rule_reference_points() {
        assert_eq!(acceptance_probability(1.0, 0.5, 0.7), 1.0);
        assert_eq!(acceptance_probability(1.0, 1.0, 0.7), 1.0);
        let t = 0.37;
        let a = acceptance_probability(0.0, t, t);
        assert!((a - (-1.0f64).exp()).abs() <= 1e-12);
        assert_eq!(acceptance_probability(0.0, 1.0, 0.0), 0.0);
    }

    #[test]
    fn zero_polynomial_best_is_zero() {
        let poly = PuboPolynomial::new(8, 1, []).unwrap();
        let run = run_sa(&poly, &SaConfig::default()).unwrap();
        assert_eq!(run.best_energy, 0.0);
        assert_eq!(run.trace.len(), 200);
    }

    #[test]
    fn incremental_delta_matches_full_evaluation() {
        let poly = PuboPolynomial::random_init(9, 3, 15).unwrap();
        let table = FlipTable::build(&poly);
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..500 {
            let z = Bitstring::random(9, &mut rng);
            let var = rng.random_range(0..9);
            let delta = table.delta(&poly, &z, var);
            let mut flipped = z.clone();
            flipped.flip(var);
            let full = poly.evaluate(&flipped).unwrap() - poly.evaluate(&z).unwrap();
            assert!((delta - full).abs() <= 1e-9, "{delta} vs {full}");
        }
    }

    #[test]
    fn best_energy_is_non_increasing() {
        let poly = PuboPolynomial::random_init(10, 2, 51).unwrap();
        let run = run_sa(
            &poly,
            &SaConfig {
                steps: 1000,
                t0: 1.0,
                seed: 77,
            },
        )
        .unwrap();
        let mut last = f64::INFINITY;
        for row in run.trace.rows() {
            assert!(row.best_energy <= last);
            last = row.best_energy;
        }
        assert_eq!(run.best_energy, last);
        assert_eq!(poly.evaluate(&run.best).unwrap(), run.best_energy);
    }

    #[test]
    fn restarts_reach_the_ground_state() {
        let poly = PuboPolynomial::random_init(8, 2, 60).unwrap();
        let (_, target) = poly.brute_force_minimum().unwrap();
        let mut hits = 0;
        for seed in 0..10u64 {
            let run = run_sa(
                &poly,
                &SaConfig {
                    steps: 1500,
                    t0: 1.0,
                    seed,
                },
            )
            .unwrap();
            if (run.best_energy - target).abs() <= 1e-9 {
                hits += 1;
            }
        }
        assert!(hits >= 7, "only {hits}/10 restarts hit the ground state");
    }

    #[test]
    fn fixed_temperature_chain_approaches_boltzmann() {
        let poly = PuboPolynomial::random_init(2, 2, 5).unwrap();
        let t = 1.0;
        let counts = boltzmann_visit_counts(&poly, t, 100_000, 5, 9).unwrap();
        let total: u64 = counts.iter().sum();
        // Exact Boltzmann weights over the 4 states.
        let energies: Vec<f64> = Bitstring::enumerate_all(2)
            .map(|z| poly.evaluate(&z).unwrap())
            .collect();
        let z_partition: f64 = energies.iter().map(|e| (-e / t).exp()).sum();
        let mut chi2 = 0.0;
        for (count, e) in counts.iter().zip(&energies) {
            let expected = total as f64 * (-e / t).exp() / z_partition;
            chi2 += (*count as f64 - expected).powi(2) / expected;
        }
        // Critical value of chi-square with 3 degrees of freedom at p = 0.01.
        assert!(chi2 < 11.345, "chi2 = {chi2}");
    }
}
