//! Two-sample statistics and histograms used in comparison reports.

use std::io::Write;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of
/// freedom and a two-sided p-value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WelchTTest {
    pub t: f64,
    pub dof: f64,
    pub p_two_sided: f64,
}

pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchTTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid(
            "welch t-test",
            format!("both samples need length >= 2, got {} and {}", a.len(), b.len()),
        ));
    }
    let (mean_a, var_a) = sample_moments(a);
    let (mean_b, var_b) = sample_moments(b);
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let sa = var_a / na;
    let sb = var_b / nb;
    if sa + sb <= 0.0 {
        return Err(Error::DegenerateVariance {
            series: "both samples",
            len: a.len() + b.len(),
        });
    }
    let t = (mean_a - mean_b) / (sa + sb).sqrt();
    let dof = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let p_two_sided = 2.0 * (1.0 - student_t_cdf(t.abs(), dof));
    Ok(WelchTTest {
        t,
        dof,
        p_two_sided,
    })
}

/// Mean and unbiased sample variance.
fn sample_moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// CDF of the Student t distribution with `dof` degrees of freedom.
pub fn student_t_cdf(x: f64, dof: f64) -> f64 {
    StudentsT::new(0.0, 1.0, dof)
        .expect("dof must be positive")
        .cdf(x)
}

/// Fixed-range histogram; values outside [lo, hi] are clamped into the edge
/// bins.
#[derive(Clone, Debug, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn build(values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
        if bins == 0 || !(hi > lo) {
            return Err(Error::invalid(
                "histogram",
                format!("need bins >= 1 and hi > lo, got bins={bins}, [{lo}, {hi}]"),
            ));
        }
        let mut counts = vec![0u64; bins];
        let width = (hi - lo) / bins as f64;
        for &v in values {
            let idx = ((v - lo) / width).floor();
            let idx = (idx.max(0.0) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Ok(Histogram { lo, hi, counts })
    }

    /// CSV of bin lower edge / count pairs.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "bin,count")?;
        let width = (self.hi - self.lo) / self.counts.len() as f64;
        for (i, count) in self.counts.iter().enumerate() {
            writeln!(w, "{},{}", self.lo + i as f64 * width, count)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welch_matches_hand_computation() {
        // Both samples have variance 2.5 and n = 5, so t = -1 and dof = 8.
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0];
        let test = welch_t_test(&a, &b).unwrap();
        assert!((test.t - (-1.0)).abs() <= 1e-12);
        assert!((test.dof - 8.0).abs() <= 1e-12);
        assert!(test.p_two_sided > 0.3 && test.p_two_sided < 0.4);
    }

    #[test]
    fn identical_samples_give_zero_t() {
        let a = [0.2, 0.4, 0.6, 0.8];
        let test = welch_t_test(&a, &a).unwrap();
        assert_eq!(test.t, 0.0);
        assert!((test.p_two_sided - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn degenerate_samples_are_rejected() {
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
        assert!(welch_t_test(&[2.0, 2.0], &[3.0, 3.0]).is_err());
    }

    #[test]
    fn t_cdf_closed_forms() {
        // dof = 1 is Cauchy: CDF(x) = 1/2 + atan(x)/pi.
        for x in [-2.0f64, -0.5, 0.0, 1.0, 3.0] {
            let expected = 0.5 + x.atan() / std::f64::consts::PI;
            assert!((student_t_cdf(x, 1.0) - expected).abs() <= 1e-10);
        }
        // dof = 2: CDF(x) = 1/2 + x / (2 sqrt(2 + x^2)).
        for x in [-1.5f64, 0.0, 0.7, 2.0] {
            let expected = 0.5 + x / (2.0 * (2.0 + x * x).sqrt());
            assert!((student_t_cdf(x, 2.0) - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn histogram_bins_and_edges() {
        let h = Histogram::build(&[0.0, 0.05, 0.5, 0.99, 1.0, 1.5], 0.0, 1.0, 10).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 6);
        assert_eq!(h.counts[0], 2);
        assert_eq!(h.counts[5], 1);
        // 0.99, 1.0 and the out-of-range 1.5 all land in the last bin.
        assert_eq!(h.counts[9], 3);
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("bin,count\n0,2\n"));
        assert_eq!(text.lines().count(), 11);
    }
}
