use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::{IntMatrix, IntVector};
use crate::error::{Error, Result};

/// Row-style Hermite normal form: `u · a = h`, `u` unimodular.
///
/// `h` is in row echelon form with positive pivots, every entry above a pivot lies in
/// `[0, pivot)`, and the zero rows come last.
#[derive(Debug, Clone)]
pub struct Hermite {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Column of each non-zero row's pivot.
    pub pivots: Vec<usize>,
}

impl Hermite {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Smith normal form with certificates: `p · a · q = s` and `a = u · s · v`, where
/// `u = p⁻¹` and `v = q⁻¹`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub p: IntMatrix,
    pub q: IntMatrix,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

fn smallest_nonzero_in_column(a: &IntMatrix, col: usize, from_row: usize) -> Option<usize> {
    (from_row..a.rows())
        .filter(|&i| !a.get(i, col).is_zero())
        .min_by(|&i, &j| a.get(i, col).abs().cmp(&a.get(j, col).abs()))
}

pub fn hermite_normal_form(a: &IntMatrix) -> Hermite {
    let mut h = a.clone();
    let mut u = IntMatrix::identity(a.rows());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        while let Some(p) = smallest_nonzero_in_column(&h, col, r) {
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..a.rows() {
                if h.get(i, col).is_zero() {
                    continue;
                }
                let q = -h.get(i, col).div_floor(h.get(r, col));
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
                if !h.get(i, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, col).is_zero() {
            continue;
        }
        if h.get(r, col).is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h.get(i, col).div_floor(h.get(r, col));
            h.add_row_multiple(i, r, &q);
            u.add_row_multiple(i, r, &q);
        }
        pivots.push(col);
        r += 1;
    }
    Hermite { h, u, pivots }
}

struct SmithState {
    a: IntMatrix,
    p: IntMatrix,
    pinv: IntMatrix,
    q: IntMatrix,
    qinv: IntMatrix,
}

impl SmithState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.p.swap_rows(i, j);
        self.pinv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.q.swap_cols(i, j);
        self.qinv.swap_rows(i, j);
    }

    /// `row[t] += c · row[s]`.
    fn add_row(&mut self, t: usize, s: usize, c: &BigInt) {
        self.a.add_row_multiple(t, s, c);
        self.p.add_row_multiple(t, s, c);
        self.pinv.add_col_multiple(s, t, &-c);
    }

    /// `col[t] += c · col[s]`.
    fn add_col(&mut self, t: usize, s: usize, c: &BigInt) {
        self.a.add_col_multiple(t, s, c);
        self.q.add_col_multiple(t, s, c);
        self.qinv.add_row_multiple(s, t, &-c);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.p.negate_row(i);
        self.pinv.negate_col(i);
    }

    /// Moves the smallest non-zero entry of the trailing block at `t` to `(t, t)`.
    fn place_pivot(&mut self, t: usize) -> bool {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = self.a.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < self.a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        match best {
            Some((i, j)) => {
                self.swap_rows(t, i);
                self.swap_cols(t, j);
                true
            }
            None => false,
        }
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let mut st = SmithState {
        a: a.clone(),
        p: IntMatrix::identity(m),
        pinv: IntMatrix::identity(m),
        q: IntMatrix::identity(n),
        qinv: IntMatrix::identity(n),
    };
    for t in 0..m.min(n) {
        if !st.place_pivot(t) {
            break;
        }
        loop {
            let pivot = st.a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let x = st.a.get(i, t).clone();
                if x.is_zero() {
                    continue;
                }
                st.add_row(i, t, &-x.div_floor(&pivot));
                clean &= st.a.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let x = st.a.get(t, j).clone();
                if x.is_zero() {
                    continue;
                }
                st.add_col(j, t, &-x.div_floor(&pivot));
                clean &= st.a.get(t, j).is_zero();
            }
            if !clean {
                st.place_pivot(t);
                continue;
            }
            // Enforce divisibility: fold an offending row into the pivot row and redo.
            let offending = (t + 1..m)
                .find(|&i| (t + 1..n).any(|j| !st.a.get(i, j).is_multiple_of(&pivot)));
            match offending {
                Some(i) => st.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if st.a.get(t, t).is_negative() {
            st.negate_row(t);
        }
    }
    Smith {
        s: st.a,
        u: st.pinv,
        v: st.qinv,
        p: st.p,
        q: st.q,
    }
}

/// A particular solution plus a basis of the integer kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSolution {
    pub particular: IntVector,
    pub kernel: Vec<IntVector>,
}

/// Solves `a · x = b` over ℤ. Returns `None` iff no integer solution exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Option<IntegerSolution>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} system with right-hand side of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let smith = smith_normal_form(a);
    let pb = smith.p.mul_vec(b)?;
    let diag = smith.diagonal();
    let rank = smith.rank();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, c) in pb.iter().enumerate() {
        if i < rank {
            let (quot, rem) = c.div_rem(&diag[i]);
            if !rem.is_zero() {
                return Ok(None);
            }
            y[i] = quot;
        } else if !c.is_zero() {
            return Ok(None);
        }
    }
    let particular = smith.q.mul_vec(&y)?;
    let kernel = (rank..a.cols()).map(|j| smith.q.column(j)).collect();
    Ok(Some(IntegerSolution { particular, kernel }))
}
