//! Fixed-width bit strings. Index 0 is the leftmost character of the textual form.

use std::fmt;
use std::str::FromStr;

use num::{BigUint, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid bit string {0:?}")]
pub struct BitsParseError(pub String);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits(pub Vec<bool>);

impl Bits {
    pub fn zeros(n: usize) -> Self {
        Bits(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|b| !b)
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0[i] = v;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn ones(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i]).collect()
    }

    pub fn xor(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a ^ b).collect())
    }

    pub fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    pub fn concat(&self, o: &Bits) -> Bits {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Bits(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> Bits {
        Bits(self.0[from..to].to_vec())
    }

    /// Big-endian value: bit 0 is the most significant.
    pub fn to_biguint(&self) -> BigUint {
        let mut v = BigUint::zero();
        for &b in &self.0 {
            v <<= 1u32;
            if b {
                v += 1u32;
            }
        }
        v
    }

    pub fn to_u64(&self) -> u64 {
        assert!(self.len() <= 64, "bit string too wide for u64");
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// Big-endian encoding of `v` in `width` bits; `None` if it does not fit.
    pub fn from_biguint(v: &BigUint, width: usize) -> Option<Bits> {
        if v.bits() as usize > width {
            return None;
        }
        Some(Bits((0..width).map(|i| v.bit((width - 1 - i) as u64)).collect()))
    }

    pub fn from_u64(v: u64, width: usize) -> Bits {
        assert!(width >= 64 || v >> width == 0, "value {v} does not fit in {width} bits");
        Bits((0..width).map(|i| (v >> (width - 1 - i)) & 1 == 1).collect())
    }

    /// All strings of width `n` in increasing numeric order.
    pub fn all(n: usize) -> impl Iterator<Item = Bits> {
        assert!(n < 63, "enumeration width too large");
        (0..(1u64 << n)).map(move |v| Bits::from_u64(v, n))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl FromStr for Bits {
    type Err = BitsParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(BitsParseError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bits)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and tables: `b("0101")`.
pub fn b(s: &str) -> Bits {
    s.parse().expect("valid bit string")
}
