use super::{Element, FiniteMonoid};
use crate::error::{Error, Result};

/// Default cap on the number of elements of a materialized power.
pub const DEFAULT_POWER_CAP: usize = 10_000;

/// The Cartesian power `M^n`, operated on coordinatewise without building its table.
///
/// Tuples are encoded big-endian in base `|M|`, so index order is lexicographic order.
#[derive(Debug, Clone)]
pub struct CartesianPower<'a> {
    base: &'a FiniteMonoid,
    arity: usize,
}

impl<'a> CartesianPower<'a> {
    pub fn new(base: &'a FiniteMonoid, arity: usize) -> Self {
        assert!(arity >= 1, "power arity must be positive");
        CartesianPower { base, arity }
    }

    pub fn base(&self) -> &FiniteMonoid {
        self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of tuples, or `None` on overflow.
    pub fn size(&self) -> Option<usize> {
        self.base.size().checked_pow(self.arity as u32)
    }

    pub fn identity(&self) -> Vec<Element> {
        vec![self.base.identity(); self.arity]
    }

    pub fn mul(&self, x: &[Element], y: &[Element]) -> Vec<Element> {
        x.iter().zip(y).map(|(&a, &b)| self.base.mul(a, b)).collect()
    }

    pub fn encode(&self, t: &[Element]) -> usize {
        encode_tuple(self.base.size(), t)
    }

    pub fn decode(&self, index: usize) -> Vec<Element> {
        decode_tuple(self.base.size(), self.arity, index)
    }

    /// Materializes the full table, failing above `cap` elements.
    pub fn materialize(&self, cap: usize) -> Result<FiniteMonoid> {
        let size = self.size().unwrap_or(usize::MAX);
        if size > cap {
            return Err(Error::PowerTooLarge { size, cap });
        }
        let tuples: Vec<Vec<Element>> = (0..size).map(|i| self.decode(i)).collect();
        let mut table = Vec::with_capacity(size * size);
        for x in &tuples {
            for y in &tuples {
                table.push(self.encode(&self.mul(x, y)));
            }
        }
        Ok(FiniteMonoid::from_flat_unchecked(size, table, self.encode(&self.identity())))
    }
}

pub fn encode_tuple(base: usize, t: &[Element]) -> usize {
    t.iter().fold(0, |acc, &a| acc * base + a)
}

pub fn decode_tuple(base: usize, arity: usize, mut index: usize) -> Vec<Element> {
    let mut t = vec![0; arity];
    for slot in t.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    t
}
