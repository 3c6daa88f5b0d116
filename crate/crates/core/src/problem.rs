//! Synthetic decoder + figure-of-merit problems with computable optima, and
//! the accumulated latent dataset they feed.
//!
//! Shipped problems keep their figures of merit in [0, 1] by construction and
//! know their exact optimum, so optimizer runs can be scored decisively.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::polynomial::PuboPolynomial;

/// A rectangular bit-grid produced by a decoder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Design {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl Design {
    pub fn new(width: usize, height: usize, cells: Vec<bool>) -> Result<Self> {
        if cells.len() != width * height {
            return Err(Error::invalid(
                "design",
                format!("{}x{} grid needs {} cells, got {}", width, height, width * height, cells.len()),
            ));
        }
        Ok(Design {
            width,
            height,
            cells,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn count_ones(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn hamming_distance(&self, other: &Design) -> Result<usize> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::invalid(
                "design comparison",
                format!(
                    "grid shapes differ: {}x{} vs {}x{}",
                    self.width, self.height, other.width, other.height
                ),
            ));
        }
        Ok(self
            .cells
            .iter()
            .zip(&other.cells)
            .filter(|(a, b)| a != b)
            .count())
    }
}

/// Deterministic map from latent bit-vectors to designs.
pub trait Decoder: Send + Sync {
    fn latent_len(&self) -> usize;

    fn decode(&self, z: &Bitstring) -> Result<Design>;
}

/// Scalar objective over designs; total and finite on the decoder's image.
pub trait FomOracle: Send + Sync {
    fn evaluate(&self, design: &Design) -> f64;
}

/// The latent vector laid out as a 1 x n grid.
pub struct IdentityDecoder {
    n: usize,
}

impl IdentityDecoder {
    pub fn new(n: usize) -> Self {
        IdentityDecoder { n }
    }
}

impl Decoder for IdentityDecoder {
    fn latent_len(&self) -> usize {
        self.n
    }

    fn decode(&self, z: &Bitstring) -> Result<Design> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: z.len(),
            });
        }
        Design::new(self.n, 1, z.bits().to_vec())
    }
}

/// Expands each latent bit into a `tile x tile` block of one quadrant, then
/// mirrors across both axes, so designs are symmetric under x/y reflections
/// while the map stays injective in latent space.
///
/// The latent vector is read as a `side x side` grid, row-major; the full
/// design is `(2 * side * tile)` squared.
pub struct BlockDecoder {
    side: usize,
    tile: usize,
}

impl BlockDecoder {
    pub fn new(side: usize, tile: usize) -> Result<Self> {
        if side == 0 || tile == 0 {
            return Err(Error::invalid(
                "block decoder",
                "side and tile must be positive",
            ));
        }
        Ok(BlockDecoder { side, tile })
    }
}

impl Decoder for BlockDecoder {
    fn latent_len(&self) -> usize {
        self.side * self.side
    }

    fn decode(&self, z: &Bitstring) -> Result<Design> {
        let n = self.latent_len();
        if z.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: z.len(),
            });
        }
        let half = self.side * self.tile;
        let full = 2 * half;
        let mut cells = vec![false; full * full];
        for y in 0..full {
            // Mirror into the top-left quadrant.
            let qy = if y < half { y } else { full - 1 - y };
            let row = (qy / self.tile) * self.side;
            for x in 0..full {
                let qx = if x < half { x } else { full - 1 - x };
                let bit = z.bit(row + qx / self.tile);
                cells[y * full + x] = bit;
            }
        }
        Design::new(full, full, cells)
    }
}

/// Applies a fixed xor mask to the latent vector before block expansion;
/// decoding the mask itself yields the all-zeros grid.
pub struct XorMaskDecoder {
    mask: Bitstring,
    inner: BlockDecoder,
}

impl XorMaskDecoder {
    pub fn new(mask: Bitstring, tile: usize) -> Result<Self> {
        let side = (mask.len() as f64).sqrt().round() as usize;
        if side * side != mask.len() {
            return Err(Error::invalid(
                "xor-mask decoder",
                format!("mask length {} is not a perfect square", mask.len()),
            ));
        }
        Ok(XorMaskDecoder {
            inner: BlockDecoder::new(side, tile)?,
            mask,
        })
    }
}

impl Decoder for XorMaskDecoder {
    fn latent_len(&self) -> usize {
        self.mask.len()
    }

    fn decode(&self, z: &Bitstring) -> Result<Design> {
        self.inner.decode(&z.xor(&self.mask)?)
    }
}

/// Closeness to a hidden target design: `1 - hamming(design, target) / size`.
pub struct HammingAffinity {
    target: Design,
}

impl HammingAffinity {
    pub fn new(target: Design) -> Self {
        HammingAffinity { target }
    }
}

impl FomOracle for HammingAffinity {
    fn evaluate(&self, design: &Design) -> f64 {
        match design.hamming_distance(&self.target) {
            Ok(d) => 1.0 - d as f64 / self.target.size() as f64,
            Err(_) => 0.0,
        }
    }
}

/// Negated hidden-polynomial energy rescaled to [0, 1]; the design is read
/// back as a latent vector (identity layout), so the maximizer is exactly the
/// hidden polynomial's ground state.
pub struct ScaledNegativeEnergy {
    hidden: PuboPolynomial,
    e_min: f64,
    e_max: f64,
}

impl ScaledNegativeEnergy {
    pub fn new(hidden: PuboPolynomial) -> Result<Self> {
        let (_, e_min) = hidden.brute_force_minimum()?;
        let mut negated = hidden.clone();
        for c in negated.coefficients_mut() {
            *c = -*c;
        }
        let (_, neg_min) = negated.brute_force_minimum()?;
        let e_max = -neg_min;
        if !(e_max > e_min) {
            return Err(Error::invalid(
                "planted problem",
                "hidden polynomial is constant over all states",
            ));
        }
        Ok(ScaledNegativeEnergy {
            hidden,
            e_min,
            e_max,
        })
    }

    pub fn hidden(&self) -> &PuboPolynomial {
        &self.hidden
    }
}

impl FomOracle for ScaledNegativeEnergy {
    fn evaluate(&self, design: &Design) -> f64 {
        let z = Bitstring::new(design.cells().to_vec());
        match self.hidden.evaluate(&z) {
            Ok(e) => (self.e_max - e) / (self.e_max - self.e_min),
            Err(_) => 0.0,
        }
    }
}

/// A decoder/oracle pair, optionally carrying its exact maximum figure of
/// merit for verification.
pub struct Problem {
    name: String,
    decoder: Box<dyn Decoder>,
    fom: Box<dyn FomOracle>,
    known_max_fom: Option<f64>,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        decoder: Box<dyn Decoder>,
        fom: Box<dyn FomOracle>,
        known_max_fom: Option<f64>,
    ) -> Self {
        Problem {
            name: name.into(),
            decoder,
            fom,
            known_max_fom,
        }
    }

    /// Identity decoder over `n` bits with a fom that peaks (at exactly 1) on
    /// the ground state of a hidden random quadratic. Requires n small enough
    /// to enumerate.
    pub fn planted_quadratic(n: usize, seed: u64) -> Result<Problem> {
        let hidden = PuboPolynomial::random_init(n, 2, seed)?;
        let fom = ScaledNegativeEnergy::new(hidden)?;
        Ok(Problem {
            name: "planted-quadratic".to_string(),
            decoder: Box::new(IdentityDecoder::new(n)),
            fom: Box::new(fom),
            known_max_fom: Some(1.0),
        })
    }

    /// Block decoder over `side^2` bits with a hidden target drawn from
    /// `seed`; the fom is Hamming affinity to that target, so the maximum 1.0
    /// is attained exactly at the hidden latent vector.
    pub fn hidden_target(side: usize, tile: usize, seed: u64) -> Result<Problem> {
        let decoder = BlockDecoder::new(side, tile)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let hidden_latent = Bitstring::random(side * side, &mut rng);
        let target = decoder.decode(&hidden_latent)?;
        Ok(Problem {
            name: "hidden-target".to_string(),
            decoder: Box::new(decoder),
            fom: Box::new(HammingAffinity::new(target)),
            known_max_fom: Some(1.0),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn latent_len(&self) -> usize {
        self.decoder.latent_len()
    }

    pub fn known_max_fom(&self) -> Option<f64> {
        self.known_max_fom
    }

    pub fn decode(&self, z: &Bitstring) -> Result<Design> {
        self.decoder.decode(z)
    }

    /// Figure of merit of the decoded design.
    pub fn fom_of(&self, z: &Bitstring) -> Result<f64> {
        Ok(self.fom.evaluate(&self.decode(z)?))
    }
}

/// One accumulated (latent, fom) observation; `iteration` tags the loop
/// iteration that produced it (0 = bootstrap).
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetRow {
    pub latent: Bitstring,
    pub fom: f64,
    pub iteration: u32,
}

/// Accumulated latent observations with unique bit-vectors, in insertion
/// order.
#[derive(Clone, Debug, Default)]
pub struct LatentDataset {
    rows: Vec<DatasetRow>,
    seen: HashSet<Bitstring>,
}

impl LatentDataset {
    pub fn new() -> Self {
        LatentDataset::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[DatasetRow] {
        &self.rows
    }

    pub fn contains(&self, z: &Bitstring) -> bool {
        self.seen.contains(z)
    }

    /// Union-style insert: duplicates are skipped and reported as `false`.
    pub fn insert(&mut self, latent: Bitstring, fom: f64, iteration: u32) -> Result<bool> {
        if !fom.is_finite() {
            return Err(Error::NonFinite {
                context: "dataset fom",
            });
        }
        if !self.rows.is_empty() && self.rows[0].latent.len() != latent.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows[0].latent.len(),
                actual: latent.len(),
            });
        }
        if !self.seen.insert(latent.clone()) {
            return Ok(false);
        }
        self.rows.push(DatasetRow {
            latent,
            fom,
            iteration,
        });
        Ok(true)
    }

    pub fn foms(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.fom).collect()
    }

    pub fn latents(&self) -> Vec<Bitstring> {
        self.rows.iter().map(|r| r.latent.clone()).collect()
    }

    pub fn mean_fom(&self) -> f64 {
        self.rows.iter().map(|r| r.fom).sum::<f64>() / self.rows.len() as f64
    }

    /// Rows produced by one specific loop iteration.
    pub fn rows_from_iteration(&self, iteration: u32) -> Vec<&DatasetRow> {
        self.rows
            .iter()
            .filter(|r| r.iteration == iteration)
            .collect()
    }

    /// Uniform-random bootstrap: `count` unique latent vectors with their
    /// figures of merit, tagged iteration 0.
    pub fn bootstrap<R: Rng + ?Sized>(
        problem: &Problem,
        count: usize,
        rng: &mut R,
    ) -> Result<LatentDataset> {
        let n = problem.latent_len();
        if count < 2 {
            return Err(Error::invalid("bootstrap", "count must be at least 2"));
        }
        if n < 64 && (count as u128) > (1u128 << n) {
            return Err(Error::invalid(
                "bootstrap",
                format!("cannot draw {count} unique vectors from a {n}-bit space"),
            ));
        }
        let mut dataset = LatentDataset::new();
        // Dense request on a small space: enumerate and shuffle instead of
        // rejection-sampling the last few vectors.
        if n <= 24 && (count as u128) * 2 > (1u128 << n) {
            let mut all: Vec<Bitstring> = Bitstring::enumerate_all(n).collect();
            use rand::seq::SliceRandom;
            all.shuffle(rng);
            for z in all.into_iter().take(count) {
                let fom = problem.fom_of(&z)?;
                dataset.insert(z, fom, 0)?;
            }
            return Ok(dataset);
        }
        while dataset.len() < count {
            let z = Bitstring::random(n, rng);
            if dataset.contains(&z) {
                continue;
            }
            let fom = problem.fom_of(&z)?;
            dataset.insert(z, fom, 0)?;
        }
        Ok(dataset)
    }

    /// CSV with header `z,fom,tau`; `z` is the 0/1 string in index order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "z,fom,tau")?;
        for row in &self.rows {
            writeln!(w, "{},{},{}", row.latent, row.fom, row.iteration)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv is ascii")
    }

    pub fn read_csv<R: BufRead>(reader: R) -> Result<LatentDataset> {
        let mut dataset = LatentDataset::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if lineno == 0 {
                if line.trim() != "z,fom,tau" {
                    return Err(Error::MalformedRecord {
                        line: 1,
                        reason: format!("expected header 'z,fom,tau', got {line:?}"),
                    });
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let (z, fom, tau) = match (fields.next(), fields.next(), fields.next(), fields.next())
            {
                (Some(z), Some(f), Some(t), None) => (z, f, t),
                _ => {
                    return Err(Error::MalformedRecord {
                        line: lineno + 1,
                        reason: "expected exactly 3 fields".to_string(),
                    })
                }
            };
            let latent: Bitstring = z.parse().map_err(|e| Error::MalformedRecord {
                line: lineno + 1,
                reason: format!("{e}"),
            })?;
            let fom: f64 = fom.parse().map_err(|e| Error::MalformedRecord {
                line: lineno + 1,
                reason: format!("bad fom: {e}"),
            })?;
            let tau: u32 = tau.parse().map_err(|e| Error::MalformedRecord {
                line: lineno + 1,
                reason: format!("bad tau: {e}"),
            })?;
            if !dataset.insert(latent, fom, tau)? {
                return Err(Error::MalformedRecord {
                    line: lineno + 1,
                    reason: "duplicate latent vector".to_string(),
                });
            }
        }
        Ok(dataset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_decoder_is_the_latent() {
        let dec = IdentityDecoder::new(5);
        let z: Bitstring = "01011".parse().unwrap();
        let design = dec.decode(&z).unwrap();
        assert_eq!(design.cells(), z.bits());
        assert!(dec.decode(&Bitstring::zeros(4)).is_err());
    }

    #[test]
    fn block_decoder_zeroes_and_symmetry() {
        let dec = BlockDecoder::new(3, 2).unwrap();
        assert_eq!(dec.latent_len(), 9);
        let design = dec.decode(&Bitstring::zeros(9)).unwrap();
        assert_eq!(design.count_ones(), 0);
        assert_eq!(design.width(), 12);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = Bitstring::random(9, &mut rng);
        let d = dec.decode(&z).unwrap();
        let full = d.width();
        for y in 0..full {
            for x in 0..full {
                assert_eq!(d.get(x, y), d.get(full - 1 - x, y));
                assert_eq!(d.get(x, y), d.get(x, full - 1 - y));
            }
        }
        // Each latent bit occupies its own tile: the map is injective.
        let mut z2 = z.clone();
        z2.flip(4);
        assert_ne!(dec.decode(&z2).unwrap(), d);
    }

    #[test]
    fn xor_mask_decoder_zeroes_on_mask() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mask = Bitstring::random(9, &mut rng);
        let dec = XorMaskDecoder::new(mask.clone(), 2).unwrap();
        let design = dec.decode(&mask).unwrap();
        assert_eq!(design.count_ones(), 0);
        let z = Bitstring::random(9, &mut rng);
        let expected = BlockDecoder::new(3, 2)
            .unwrap()
            .decode(&z.xor(&mask).unwrap())
            .unwrap();
        assert_eq!(dec.decode(&z).unwrap(), expected);
    }

    #[test]
    fn decoding_is_referentially_transparent() {
        let problem = Problem::hidden_target(3, 2, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = Bitstring::random(9, &mut rng);
        let first = problem.decode(&z).unwrap();
        for _ in 0..1000 {
            assert_eq!(problem.decode(&z).unwrap(), first);
        }
    }

    #[test]
    fn hidden_target_extremes() {
        let side = 3;
        let seed = 11;
        let problem = Problem::hidden_target(side, 2, seed).unwrap();
        // Reconstruct the hidden latent the same way the constructor does.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hidden = Bitstring::random(side * side, &mut rng);
        assert_eq!(problem.fom_of(&hidden).unwrap(), 1.0);
        let complement = Bitstring::new(hidden.bits().iter().map(|b| !b).collect());
        assert_eq!(problem.fom_of(&complement).unwrap(), 0.0);
    }

    #[test]
    fn planted_quadratic_maximum_matches_enumeration() {
        let problem = Problem::planted_quadratic(12, 5).unwrap();
        let best = Bitstring::enumerate_all(12)
            .map(|z| problem.fom_of(&z).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((best - problem.known_max_fom().unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn fom_values_respect_known_maximum() {
        let problem = Problem::planted_quadratic(10, 9).unwrap();
        let max = problem.known_max_fom().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let z = Bitstring::random(10, &mut rng);
            let fom = problem.fom_of(&z).unwrap();
            assert!((0.0..=max + 1e-12).contains(&fom));
        }
    }

    #[test]
    fn bootstrap_forced_coverage_and_uniqueness() {
        // n = 1, count = 2 forces exactly {0}, {1}.
        let problem = Problem::planted_quadratic(1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dataset = LatentDataset::bootstrap(&problem, 2, &mut rng).unwrap();
        let mut values: Vec<u64> = dataset.rows().iter().map(|r| r.latent.to_index()).collect();
        values.sort_unstable();
        assert_eq!(values, vec![0, 1]);
        assert!(LatentDataset::bootstrap(&problem, 3, &mut rng).is_err());
    }

    #[test]
    fn bootstrap_rows_are_unique_and_recomputable() {
        let problem = Problem::planted_quadratic(10, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let dataset = LatentDataset::bootstrap(&problem, 200, &mut rng).unwrap();
        assert_eq!(dataset.len(), 200);
        let unique: HashSet<_> = dataset.rows().iter().map(|r| r.latent.clone()).collect();
        assert_eq!(unique.len(), 200);
        for row in dataset.rows() {
            assert_eq!(problem.fom_of(&row.latent).unwrap(), row.fom);
        }
    }

    #[test]
    fn dataset_union_preserves_rows() {
        let mut dataset = LatentDataset::new();
        assert!(dataset.insert("0101".parse().unwrap(), 0.5, 0).unwrap());
        assert!(!dataset.insert("0101".parse().unwrap(), 0.9, 1).unwrap());
        assert!(dataset.insert("1111".parse().unwrap(), 0.25, 1).unwrap());
        assert_eq!(dataset.len(), 2);
        assert_eq!(dataset.rows()[0].fom, 0.5);
        assert!(dataset
            .insert(Bitstring::zeros(3), 0.1, 0)
            .is_err());
        assert!(dataset
            .insert(Bitstring::zeros(4), f64::NAN, 0)
            .is_err());
    }

    #[test]
    fn dataset_csv_round_trip() {
        let problem = Problem::planted_quadratic(8, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dataset = LatentDataset::bootstrap(&problem, 50, &mut rng).unwrap();
        let text = dataset.to_csv_string();
        let back = LatentDataset::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.len(), dataset.len());
        assert_eq!(back.to_csv_string(), text);
        assert!(LatentDataset::read_csv("nope\n".as_bytes()).is_err());
    }
}
