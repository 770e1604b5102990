use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::matrix::{is_zero_vector, vec_sub, IntMatrix, IntVector};
use super::normal_forms::hermite_normal_form;
use crate::error::{Error, Result};

/// A subgroup of `ℤ^dim`, stored by its Hermite-reduced basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    basis: Vec<IntVector>,
    pivots: Vec<usize>,
}

fn check_dim(dim: usize, v: &[BigInt]) -> Result<()> {
    if v.len() == dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "vector of length {} in a lattice of dimension {dim}",
            v.len()
        )))
    }
}

impl Lattice {
    pub fn zero(dim: usize) -> Self {
        Lattice {
            dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// `ℤ^dim` itself.
    pub fn full(dim: usize) -> Self {
        Self::from_generators(dim, &(0..dim).map(|i| unit(dim, i)).collect::<Vec<_>>())
            .expect("unit vectors have the right length")
    }

    pub fn from_generators(dim: usize, generators: &[IntVector]) -> Result<Self> {
        for g in generators {
            check_dim(dim, g)?;
        }
        let m = IntMatrix::from_rows(generators.to_vec(), dim)?;
        let hf = hermite_normal_form(&m);
        let rank = hf.rank();
        Ok(Lattice {
            dim,
            basis: hf.h.to_rows().into_iter().take(rank).collect(),
            pivots: hf.pivots,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[IntVector] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Canonical representative of `v + L`: the pivot coordinates lie in `[0, pivot)`.
    pub fn reduce(&self, v: &[BigInt]) -> Result<IntVector> {
        check_dim(self.dim, v)?;
        let mut out = v.to_vec();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            let q = out[c].div_floor(&row[c]);
            if !q.is_zero() {
                for (o, r) in out.iter_mut().zip(row) {
                    *o -= &q * r;
                }
            }
        }
        Ok(out)
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        Ok(is_zero_vector(&self.reduce(v)?))
    }

    pub fn contains_lattice(&self, other: &Lattice) -> Result<bool> {
        for b in &other.basis {
            if !self.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "lattices of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        let gens: Vec<_> = self.basis.iter().chain(&other.basis).cloned().collect();
        Lattice::from_generators(self.dim, &gens)
    }
}

fn unit(dim: usize, i: usize) -> IntVector {
    let mut v = vec![BigInt::zero(); dim];
    v[i] = BigInt::from(1);
    v
}

/// `offset + lattice`, with the offset stored canonically reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeCoset {
    offset: IntVector,
    lattice: Lattice,
}

impl LatticeCoset {
    pub fn new(offset: IntVector, lattice: Lattice) -> Result<Self> {
        let offset = lattice.reduce(&offset)?;
        Ok(LatticeCoset { offset, lattice })
    }

    pub fn offset(&self) -> &IntVector {
        &self.offset
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        check_dim(self.dim(), v)?;
        self.lattice.contains(&vec_sub(v, &self.offset))
    }
}

pub fn lattice_member(v: &[BigInt], lattice: &Lattice) -> Result<bool> {
    lattice.contains(v)
}

pub fn coset_member(v: &[BigInt], coset: &LatticeCoset) -> Result<bool> {
    coset.contains(v)
}
