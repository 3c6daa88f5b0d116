//! Linear annealing temperature schedule shared by both samplers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Temperature ramp `T(t) = t0 * (1 - t/steps)`, reaching exactly 0 at
/// `t = steps`. Annealing loops run `t = 0..steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub t0: f64,
    pub steps: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule { t0: 1.0, steps: 100 }
    }
}

impl AnnealSchedule {
    pub fn new(t0: f64, steps: usize) -> Result<Self> {
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::invalid(
                "anneal schedule",
                format!("t0 must be finite and positive, got {t0}"),
            ));
        }
        if steps == 0 {
            return Err(Error::invalid("anneal schedule", "steps must be positive"));
        }
        Ok(AnnealSchedule { t0, steps })
    }

    pub fn temperature(&self, step: usize) -> f64 {
        (self.t0 * (1.0 - step as f64 / self.steps as f64)).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_ramp_hits_endpoints() {
        let s = AnnealSchedule::new(1.0, 100).unwrap();
        assert_eq!(s.temperature(0), 1.0);
        assert_eq!(s.temperature(100), 0.0);
        assert_eq!(s.temperature(200), 0.0);
        let mut last = f64::INFINITY;
        for t in 0..=100 {
            let temp = s.temperature(t);
            assert!(temp <= last);
            last = temp;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(AnnealSchedule::new(0.0, 10).is_err());
        assert!(AnnealSchedule::new(1.0, 0).is_err());
        assert!(AnnealSchedule::new(f64::NAN, 10).is_err());
    }
}
