//! Pseudo-boolean polynomial energies over {0,1}^n.
//!
//! An energy is a sum of monomials `c * prod_{i in s} z_i` over index subsets
//! `s` of size 1..=order. There is deliberately no constant term: a constant
//! never moves the argmin and the correlation losses are shift-invariant, so
//! the all-zeros vector always evaluates to exactly 0.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::Bitstring;
use crate::error::{Error, Result};

/// Largest variable count accepted by [`PuboPolynomial::brute_force_minimum`].
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Largest supported monomial degree.
pub const MAX_ORDER: usize = 3;

/// A sorted index subset of size 1..=3 identifying one monomial.
///
/// Ordering is degree-major, then lexicographic, which is also the canonical
/// storage and serialization order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TermKey {
    len: u8,
    idx: [u16; 3],
}

impl TermKey {
    pub fn new(indices: &[usize]) -> Result<Self> {
        if indices.is_empty() || indices.len() > MAX_ORDER {
            return Err(Error::invalid(
                "term key",
                format!("subset size {} is outside 1..={MAX_ORDER}", indices.len()),
            ));
        }
        let mut idx = [0u16; 3];
        for (slot, window) in indices.windows(2).enumerate() {
            if window[0] >= window[1] {
                return Err(Error::invalid(
                    "term key",
                    format!("indices must be strictly increasing, got {indices:?} at slot {slot}"),
                ));
            }
        }
        for (slot, &i) in indices.iter().enumerate() {
            if i > u16::MAX as usize {
                return Err(Error::invalid("term key", format!("index {i} too large")));
            }
            idx[slot] = i as u16;
        }
        Ok(TermKey {
            len: indices.len() as u8,
            idx,
        })
    }

    pub fn degree(&self) -> usize {
        self.len as usize
    }

    pub fn indices(&self) -> &[u16] {
        &self.idx[..self.len as usize]
    }

    pub fn max_index(&self) -> usize {
        self.idx[self.len as usize - 1] as usize
    }

    pub fn contains(&self, var: usize) -> bool {
        self.indices().iter().any(|&i| i as usize == var)
    }

    /// 1.0 when every indexed bit of `z` is set, else 0.0 (the monomial value
    /// and simultaneously its coefficient gradient).
    pub fn activation(&self, z: &Bitstring) -> f64 {
        if self.indices().iter().all(|&i| z.bit(i as usize)) {
            1.0
        } else {
            0.0
        }
    }
}

/// A pseudo-boolean polynomial with dense or sparse coefficient support.
#[derive(Clone, Debug, PartialEq)]
pub struct PuboPolynomial {
    n: usize,
    order: usize,
    keys: Vec<TermKey>,
    coeffs: Vec<f64>,
}

impl PuboPolynomial {
    /// Build a polynomial from (subset, coefficient) pairs.
    ///
    /// Keys are stored in canonical (degree-major, lexicographic) order.
    pub fn new(
        n: usize,
        order: usize,
        terms: impl IntoIterator<Item = (TermKey, f64)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("polynomial", "n must be at least 1"));
        }
        if order == 0 || order > MAX_ORDER {
            return Err(Error::invalid(
                "polynomial",
                format!("order {order} is outside 1..={MAX_ORDER}"),
            ));
        }
        let mut entries: Vec<(TermKey, f64)> = terms.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut keys = Vec::with_capacity(entries.len());
        let mut coeffs = Vec::with_capacity(entries.len());
        for (key, c) in entries {
            if key.degree() > order {
                return Err(Error::invalid(
                    "polynomial",
                    format!("term {:?} exceeds order {order}", key.indices()),
                ));
            }
            if key.max_index() >= n {
                return Err(Error::invalid(
                    "polynomial",
                    format!("term {:?} references a variable >= n = {n}", key.indices()),
                ));
            }
            if !c.is_finite() {
                return Err(Error::invalid(
                    "polynomial",
                    format!("coefficient for {:?} is not finite", key.indices()),
                ));
            }
            if keys.last() == Some(&key) {
                return Err(Error::invalid(
                    "polynomial",
                    format!("duplicate term {:?}", key.indices()),
                ));
            }
            keys.push(key);
            coeffs.push(c);
        }
        Ok(PuboPolynomial {
            n,
            order,
            keys,
            coeffs,
        })
    }

    /// Dense random polynomial: one i.i.d. standard-normal coefficient per
    /// subset up to `order`, rescaled so the squared coefficients sum to 1.
    pub fn random_init(n: usize, order: usize, seed: u64) -> Result<Self> {
        let keys = dense_keys(n, order)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs: Vec<f64> = keys
            .iter()
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 {
            for c in &mut coeffs {
                *c /= norm;
            }
        }
        Ok(PuboPolynomial {
            n,
            order,
            keys,
            coeffs,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_terms(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[TermKey] {
        &self.keys
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Mutable access for trainers; the key set itself is fixed.
    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn coefficient(&self, key: &TermKey) -> Option<f64> {
        self.keys
            .binary_search(key)
            .ok()
            .map(|pos| self.coeffs[pos])
    }

    /// Sum of squared coefficients (the quantity the norm regularizer acts on).
    pub fn coeff_sq_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    fn check_len(&self, z: &Bitstring) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: z.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, z: &Bitstring) -> Result<f64> {
        self.check_len(z)?;
        Ok(self.evaluate_unchecked(z))
    }

    pub(crate) fn evaluate_unchecked(&self, z: &Bitstring) -> f64 {
        let mut sum = 0.0;
        for (key, &c) in self.keys.iter().zip(&self.coeffs) {
            if key.indices().iter().all(|&i| z.bit(i as usize)) {
                sum += c;
            }
        }
        sum
    }

    pub fn evaluate_batch(&self, zs: &[Bitstring]) -> Result<Vec<f64>> {
        zs.iter().map(|z| self.evaluate(z)).collect()
    }

    /// Partial derivatives of the evaluation with respect to each coefficient.
    /// The energy is linear in the coefficients, so each entry is the 0/1
    /// monomial activation.
    pub fn gradient_wrt_coefficients(&self, z: &Bitstring) -> Result<BTreeMap<TermKey, f64>> {
        self.check_len(z)?;
        Ok(self
            .keys
            .iter()
            .map(|key| (*key, key.activation(z)))
            .collect())
    }

    /// Exhaustive argmin with ties broken by the smallest little-endian
    /// integer encoding. Refuses n above [`BRUTE_FORCE_LIMIT`].
    pub fn brute_force_minimum(&self) -> Result<(Bitstring, f64)> {
        if self.n > BRUTE_FORCE_LIMIT {
            return Err(Error::EnumerationTooLarge {
                n: self.n,
                limit: BRUTE_FORCE_LIMIT,
            });
        }
        let total = 1usize << self.n;
        let (best_energy, best_code) = (0..total)
            .into_par_iter()
            .with_min_len(1 << 12)
            .fold(
                || (f64::INFINITY, u64::MAX, Bitstring::zeros(self.n)),
                |(best_e, best_c, mut scratch), code| {
                    let code = code as u64;
                    scratch.assign_from_index(code);
                    let e = self.evaluate_unchecked(&scratch);
                    if e < best_e || (e == best_e && code < best_c) {
                        (e, code, scratch)
                    } else {
                        (best_e, best_c, scratch)
                    }
                },
            )
            .map(|(e, c, _)| (e, c))
            .reduce(
                || (f64::INFINITY, u64::MAX),
                |a, b| {
                    if a.0 < b.0 || (a.0 == b.0 && a.1 < b.1) {
                        a
                    } else {
                        b
                    }
                },
            );
        Ok((Bitstring::from_index(best_code, self.n), best_energy))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolynomialDoc::from(self)).expect("polynomial serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PolynomialDoc = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// All index subsets up to `order`, in canonical order.
fn dense_keys(n: usize, order: usize) -> Result<Vec<TermKey>> {
    if n == 0 {
        return Err(Error::invalid("polynomial", "n must be at least 1"));
    }
    if order == 0 || order > MAX_ORDER {
        return Err(Error::invalid(
            "polynomial",
            format!("order {order} is outside 1..={MAX_ORDER}"),
        ));
    }
    let mut keys = Vec::new();
    for i in 0..n {
        keys.push(TermKey::new(&[i])?);
    }
    if order >= 2 {
        for i in 0..n {
            for j in (i + 1)..n {
                keys.push(TermKey::new(&[i, j])?);
            }
        }
    }
    if order >= 3 {
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    keys.push(TermKey::new(&[i, j, k])?);
                }
            }
        }
    }
    Ok(keys)
}

/// JSON document form: `{"n": .., "order": .., "terms": [{"idx": [..], "c": ..}]}`.
#[derive(Serialize, Deserialize)]
struct PolynomialDoc {
    n: usize,
    order: usize,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    idx: Vec<usize>,
    c: f64,
}

impl From<&PuboPolynomial> for PolynomialDoc {
    fn from(poly: &PuboPolynomial) -> Self {
        PolynomialDoc {
            n: poly.n,
            order: poly.order,
            terms: poly
                .keys
                .iter()
                .zip(&poly.coeffs)
                .map(|(key, &c)| TermDoc {
                    idx: key.indices().iter().map(|&i| i as usize).collect(),
                    c,
                })
                .collect(),
        }
    }
}

impl TryFrom<PolynomialDoc> for PuboPolynomial {
    type Error = Error;

    fn try_from(doc: PolynomialDoc) -> Result<Self> {
        let terms = doc
            .terms
            .into_iter()
            .map(|t| Ok((TermKey::new(&t.idx)?, t.c)))
            .collect::<Result<Vec<_>>>()?;
        PuboPolynomial::new(doc.n, doc.order, terms)
    }
}

impl Serialize for PuboPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PuboPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = PolynomialDoc::deserialize(deserializer)?;
        doc.try_into().map_err(serde::de::Error::custom)
    }
}

/// Anything that assigns a finite energy to a bit-vector.
pub trait EnergyModel: Send + Sync {
    fn num_vars(&self) -> usize;

    fn energy(&self, z: &Bitstring) -> Result<f64>;

    fn energy_batch(&self, zs: &[Bitstring]) -> Result<Vec<f64>> {
        zs.iter().map(|z| self.energy(z)).collect()
    }
}

impl EnergyModel for PuboPolynomial {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn energy(&self, z: &Bitstring) -> Result<f64> {
        self.evaluate(z)
    }
}

/// Smallest value the affine scale is allowed to take; projections after each
/// trainer step keep it strictly positive.
pub const SCALE_FLOOR: f64 = 1e-6;

/// A base polynomial composed with a trainable positive-scale affine map:
/// `scale * base(z) + offset`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineWrapper {
    base: PuboPolynomial,
    scale: f64,
    offset: f64,
}

impl AffineWrapper {
    /// Identity wrap: scale 1, offset 0, so evaluation initially equals the base.
    pub fn new(base: PuboPolynomial) -> Self {
        AffineWrapper {
            base,
            scale: 1.0,
            offset: 0.0,
        }
    }

    pub fn with_params(base: PuboPolynomial, scale: f64, offset: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !offset.is_finite() {
            return Err(Error::invalid(
                "affine wrapper",
                format!("scale must be finite and positive, offset finite; got {scale}, {offset}"),
            ));
        }
        Ok(AffineWrapper {
            base,
            scale,
            offset,
        })
    }

    pub fn base(&self) -> &PuboPolynomial {
        &self.base
    }

    pub fn base_mut(&mut self) -> &mut PuboPolynomial {
        &mut self.base
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Sets the scale, projecting onto [`SCALE_FLOOR`], inf).
    pub fn set_scale(&mut self, scale: f64) {
        self.scale = scale.max(SCALE_FLOOR);
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn evaluate(&self, z: &Bitstring) -> Result<f64> {
        Ok(self.scale * self.base.evaluate(z)? + self.offset)
    }
}

impl EnergyModel for AffineWrapper {
    fn num_vars(&self) -> usize {
        self.base.num_vars()
    }

    fn energy(&self, z: &Bitstring) -> Result<f64> {
        self.evaluate(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    /// Independent term-by-term evaluation: walks the key/coefficient map the
    /// naive way, multiplying bits one by one.
    fn naive_evaluate(poly: &PuboPolynomial, z: &Bitstring) -> f64 {
        let mut total = 0.0;
        for (key, &c) in poly.keys().iter().zip(poly.coefficients()) {
            let mut prod = c;
            for &i in key.indices() {
                prod *= if z.bit(i as usize) { 1.0 } else { 0.0 };
            }
            total += prod;
        }
        total
    }

    /// Second, separately coded enumerator for the brute-force oracle: walks
    /// codes downward and keeps `<=` winners so the lowest code wins ties.
    fn independent_minimum(poly: &PuboPolynomial) -> (Bitstring, f64) {
        let n = poly.num_vars();
        let mut best: Option<(Bitstring, f64)> = None;
        for code in (0..(1u64 << n)).rev() {
            let z = Bitstring::from_index(code, n);
            let e = naive_evaluate(poly, &z);
            match &best {
                Some((_, be)) if *be < e => {}
                _ => best = Some((z, e)),
            }
        }
        best.unwrap()
    }

    #[test]
    fn all_zeros_evaluates_to_zero() {
        let poly = PuboPolynomial::random_init(9, 3, 5).unwrap();
        assert_eq!(poly.evaluate(&Bitstring::zeros(9)).unwrap(), 0.0);
    }

    #[test]
    fn single_monomial_identity() {
        let poly =
            PuboPolynomial::new(6, 1, [(TermKey::new(&[3]).unwrap(), 2.5)]).unwrap();
        assert_eq!(poly.evaluate(&Bitstring::unit(6, 3)).unwrap(), 2.5);
        assert_eq!(poly.evaluate(&Bitstring::unit(6, 2)).unwrap(), 0.0);
    }

    #[test]
    fn matches_naive_summation() {
        let poly = PuboPolynomial::random_init(6, 2, 42).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let z = Bitstring::random(6, &mut rng);
            let fast = poly.evaluate(&z).unwrap();
            let slow = naive_evaluate(&poly, &z);
            assert!((fast - slow).abs() <= 1e-12, "{fast} vs {slow}");
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let poly = PuboPolynomial::random_init(6, 2, 0).unwrap();
        assert!(matches!(
            poly.evaluate(&Bitstring::zeros(5)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn batch_equals_scalar_loop_bitwise() {
        let poly = PuboPolynomial::random_init(10, 2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let zs: Vec<_> = (0..100).map(|_| Bitstring::random(10, &mut rng)).collect();
        let batch = poly.evaluate_batch(&zs).unwrap();
        for (z, &b) in zs.iter().zip(&batch) {
            let scalar = poly.evaluate(z).unwrap();
            assert_eq!(scalar.to_bits(), b.to_bits());
        }
        assert_eq!(
            poly.evaluate_batch(&[Bitstring::zeros(10), Bitstring::zeros(10)])
                .unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn coefficient_gradient_extremes() {
        let poly = PuboPolynomial::random_init(5, 3, 1).unwrap();
        let ones = poly.gradient_wrt_coefficients(&Bitstring::ones(5)).unwrap();
        assert!(ones.values().all(|&g| g == 1.0));
        let zeros = poly
            .gradient_wrt_coefficients(&Bitstring::zeros(5))
            .unwrap();
        assert!(zeros.values().all(|&g| g == 0.0));
    }

    #[test]
    fn coefficient_gradient_matches_finite_differences() {
        let poly = PuboPolynomial::random_init(7, 2, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let eps = 1e-4;
        for _ in 0..10 {
            let z = Bitstring::random(7, &mut rng);
            let grads = poly.gradient_wrt_coefficients(&z).unwrap();
            for (pos, key) in poly.keys().iter().enumerate() {
                let mut plus = poly.clone();
                plus.coefficients_mut()[pos] += eps;
                let mut minus = poly.clone();
                minus.coefficients_mut()[pos] -= eps;
                let fd = (plus.evaluate(&z).unwrap() - minus.evaluate(&z).unwrap()) / (2.0 * eps);
                assert!(
                    (fd - grads[key]).abs() <= 1e-9,
                    "term {:?}: fd {fd} vs analytic {}",
                    key.indices(),
                    grads[key]
                );
            }
        }
    }

    #[test]
    fn random_init_is_unit_norm_and_deterministic() {
        for seed in [0u64, 1, 99] {
            let a = PuboPolynomial::random_init(8, 2, seed).unwrap();
            let b = PuboPolynomial::random_init(8, 2, seed).unwrap();
            assert!((a.coeff_sq_norm() - 1.0).abs() <= 1e-12);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dense_term_count_is_binomial() {
        let poly = PuboPolynomial::random_init(4, 2, 0).unwrap();
        assert_eq!(poly.num_terms(), 4 + 6);
        let cubic = PuboPolynomial::random_init(4, 3, 0).unwrap();
        assert_eq!(cubic.num_terms(), 4 + 6 + 4);
    }

    #[test]
    fn brute_force_on_signed_linear_terms() {
        let n = 6;
        let positive = PuboPolynomial::new(
            n,
            1,
            (0..n).map(|i| (TermKey::new(&[i]).unwrap(), 1.0)),
        )
        .unwrap();
        let (argmin, energy) = positive.brute_force_minimum().unwrap();
        assert_eq!(argmin, Bitstring::zeros(n));
        assert_eq!(energy, 0.0);

        let negative = PuboPolynomial::new(
            n,
            1,
            (0..n).map(|i| (TermKey::new(&[i]).unwrap(), -1.0)),
        )
        .unwrap();
        let (argmin, energy) = negative.brute_force_minimum().unwrap();
        assert_eq!(argmin, Bitstring::ones(n));
        assert_eq!(energy, -(n as f64));
    }

    #[test]
    fn brute_force_matches_independent_enumeration() {
        for seed in [2u64, 17, 31] {
            let poly = PuboPolynomial::random_init(10, 2, seed).unwrap();
            let (z, e) = poly.brute_force_minimum().unwrap();
            let (z_ref, e_ref) = independent_minimum(&poly);
            assert_eq!(z, z_ref);
            assert!((e - e_ref).abs() <= 1e-12);
        }
    }

    #[test]
    fn brute_force_refuses_large_n() {
        let poly = PuboPolynomial::random_init(25, 1, 0).unwrap();
        assert!(matches!(
            poly.brute_force_minimum(),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn brute_force_lower_bounds_random_states() {
        let poly = PuboPolynomial::random_init(12, 2, 13).unwrap();
        let (_, min_energy) = poly.brute_force_minimum().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let z = Bitstring::random(12, &mut rng);
            assert!(min_energy <= poly.evaluate(&z).unwrap() + 1e-12);
        }
    }

    #[test]
    fn evaluation_is_affine_in_each_coefficient() {
        let poly = PuboPolynomial::random_init(8, 2, 77).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let delta = 0.37;
        for _ in 0..20 {
            let z = Bitstring::random(8, &mut rng);
            let pos = rng.random_range(0..poly.num_terms());
            let base = poly.evaluate(&z).unwrap();
            let mut bumped = poly.clone();
            bumped.coefficients_mut()[pos] += delta;
            let act = poly.keys()[pos].activation(&z);
            let diff = bumped.evaluate(&z).unwrap() - base;
            assert!((diff - delta * act).abs() <= 1e-9);
        }
    }

    #[test]
    fn affine_wrapper_is_scale_and_shift() {
        let base = PuboPolynomial::random_init(7, 2, 4).unwrap();
        let wrapper = AffineWrapper::with_params(base.clone(), 2.5, -0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let z = Bitstring::random(7, &mut rng);
            let expected = 2.5 * base.evaluate(&z).unwrap() + (-0.75);
            assert_eq!(wrapper.evaluate(&z).unwrap().to_bits(), expected.to_bits());
        }
    }

    #[test]
    fn affine_scale_projection() {
        let base = PuboPolynomial::random_init(4, 1, 0).unwrap();
        let mut wrapper = AffineWrapper::new(base);
        wrapper.set_scale(-3.0);
        assert_eq!(wrapper.scale(), SCALE_FLOOR);
        assert!(AffineWrapper::with_params(wrapper.base().clone(), 0.0, 0.0).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let poly = PuboPolynomial::random_init(5, 2, 23).unwrap();
        let text = poly.to_json();
        let back = PuboPolynomial::from_json(&text).unwrap();
        assert_eq!(poly, back);

        // idx out of range
        assert!(PuboPolynomial::from_json(r#"{"n":3,"order":2,"terms":[{"idx":[5],"c":1.0}]}"#)
            .is_err());
        // unsorted idx
        assert!(PuboPolynomial::from_json(
            r#"{"n":4,"order":2,"terms":[{"idx":[2,1],"c":1.0}]}"#
        )
        .is_err());
        // subset larger than order
        assert!(PuboPolynomial::from_json(
            r#"{"n":4,"order":1,"terms":[{"idx":[1,2],"c":1.0}]}"#
        )
        .is_err());
        // empty subset (would be a constant term)
        assert!(
            PuboPolynomial::from_json(r#"{"n":4,"order":2,"terms":[{"idx":[],"c":1.0}]}"#).is_err()
        );
    }
}
