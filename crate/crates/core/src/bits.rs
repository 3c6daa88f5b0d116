//! Fixed-length bit-vectors used as latent states.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A fixed-length vector of bits, indexed from 0.
///
/// When a bit-vector must be read as an unsigned integer (enumeration,
/// deterministic tie-breaking) the convention is little-endian: bit `i`
/// contributes `2^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitstring {
    bits: Vec<bool>,
}

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Bitstring { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Bitstring {
            bits: vec![false; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Bitstring {
            bits: vec![true; n],
        }
    }

    /// A single set bit at `index`, all others zero.
    pub fn unit(n: usize, index: usize) -> Self {
        let mut b = Self::zeros(n);
        b.set(index, true);
        b
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Bitstring {
            bits: (0..n).map(|_| rng.random::<bool>()).collect(),
        }
    }

    /// Decode the little-endian integer `code` into an `n`-bit vector (`n` <= 64).
    pub fn from_index(code: u64, n: usize) -> Self {
        assert!(n <= 64, "from_index supports at most 64 bits");
        let mut b = Self::zeros(n);
        b.assign_from_index(code);
        b
    }

    /// Overwrite in place with the bits of `code`; avoids reallocation in hot
    /// enumeration loops.
    pub fn assign_from_index(&mut self, code: u64) {
        for (i, bit) in self.bits.iter_mut().enumerate() {
            *bit = (code >> i) & 1 == 1;
        }
    }

    /// The little-endian integer value (`n` <= 64 only).
    pub fn to_index(&self) -> u64 {
        assert!(self.len() <= 64, "to_index supports at most 64 bits");
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn xor(&self, other: &Bitstring) -> Result<Bitstring> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(Bitstring {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a ^ b)
                .collect(),
        })
    }

    /// Compare two equal-length vectors by their little-endian integer value.
    /// Works for any length (no 64-bit cap).
    pub fn cmp_as_integer(&self, other: &Bitstring) -> Ordering {
        assert_eq!(self.len(), other.len(), "length mismatch in comparison");
        for i in (0..self.len()).rev() {
            match (self.bits[i], other.bits[i]) {
                (false, true) => return Ordering::Less,
                (true, false) => return Ordering::Greater,
                _ => {}
            }
        }
        Ordering::Equal
    }

    /// All 2^n vectors in increasing little-endian integer order.
    pub fn enumerate_all(n: usize) -> impl Iterator<Item = Bitstring> {
        assert!(n < 32, "enumeration is only meant for small n");
        (0u64..(1u64 << n)).map(move |code| Bitstring::from_index(code, n))
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring(\"{self}\")")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::invalid(
                        "bitstring",
                        format!("unexpected character {other:?} at position {i}"),
                    ))
                }
            }
        }
        Ok(Bitstring { bits })
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
