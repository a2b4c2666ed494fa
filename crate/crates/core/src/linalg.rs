//! Dense matrices over the rationals with fraction-free elimination.
//!
//! Every routine clears denominators row by row, runs Bareiss elimination on
//! the resulting integer matrix, and only returns to rationals for back
//! substitution. Row scaling changes neither rank nor solution set, so all
//! results are exact.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};
use thiserror::Error;

use crate::rat::{self, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular (rank {rank} < {n})")]
    Singular { rank: usize, n: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

/// Outcome of a rank-revealing elimination: `rows[i]`, `cols[i]` index a
/// nonsingular `rank x rank` submatrix of the original matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    pub rank: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = rat::int(1);
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat::int(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|q| !q.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> Result<RatMatrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut m = Self::identity(self.rows);
        for (dst, src) in m.data.iter_mut().zip(&self.data) {
            *dst -= src;
        }
        Ok(m)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        RatMatrix::from_rows(
            rows.iter()
                .map(|&i| cols.iter().map(|&j| self[(i, j)].clone()).collect())
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.rank_profile().rank
    }

    pub fn rank_profile(&self) -> RankProfile {
        let mut work = Bareiss::new(integer_rows(self.to_rows().iter().map(Vec::as_slice)));
        work.eliminate(self.cols);
        RankProfile {
            rank: work.pivot_cols.len(),
            rows: work.perm[..work.pivot_cols.len()].to_vec(),
            cols: work.pivot_cols.clone(),
        }
    }

    pub fn determinant(&self) -> Result<Rat, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(rat::int(1));
        }
        let scaled: Vec<(BigInt, Vec<BigInt>)> =
            self.to_rows().iter().map(|r| integerize(r)).collect();
        let scale: BigInt = scaled.iter().map(|(s, _)| s.clone()).product();
        let mut work = Bareiss::new(scaled.into_iter().map(|(_, r)| r).collect());
        work.eliminate(n);
        if work.pivot_cols.len() < n {
            return Ok(Rat::zero());
        }
        let mut det = work.a[n - 1][n - 1].clone();
        if work.swaps % 2 == 1 {
            det = -det;
        }
        Ok(Rat::new(det, scale))
    }

    /// Solves `self * x = b` for square nonsingular `self`.
    pub fn solve(&self, b: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let augmented: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        let mut work = Bareiss::new(integer_rows(augmented.iter().map(Vec::as_slice)));
        work.eliminate(n);
        let rank = work.pivot_cols.len();
        if rank < n {
            return Err(LinalgError::Singular { rank, n });
        }
        let mut x = vec![Rat::zero(); n];
        for i in (0..n).rev() {
            let mut acc = Rat::from_integer(work.a[i][n].clone());
            for (aij, xj) in work.a[i][i + 1..n].iter().zip(&x[i + 1..]) {
                acc -= Rat::from_integer(aij.clone()) * xj;
            }
            x[i] = acc / Rat::from_integer(work.a[i][i].clone());
        }
        Ok(x)
    }

    /// Entries as canonical strings, row-major.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(rat::to_string).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rat;

    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_string_rows() {
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RatMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &self.to_string_rows())?;
        st.end()
    }
}

/// Multiplies a rational row by the lcm of its denominators.
fn integerize(row: &[Rat]) -> (BigInt, Vec<BigInt>) {
    let l = rat::denom_lcm(row);
    let ints = row.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    (l, ints)
}

fn integer_rows<'a>(rows: impl Iterator<Item = &'a [Rat]>) -> Vec<Vec<BigInt>> {
    rows.map(|r| integerize(r).1).collect()
}

/// Rank of an integer matrix, exact.
pub fn integer_rank(rows: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let mut work = Bareiss::new(rows);
    work.eliminate(cols);
    work.pivot_cols.len()
}

struct Bareiss {
    a: Vec<Vec<BigInt>>,
    perm: Vec<usize>,
    pivot_cols: Vec<usize>,
    swaps: usize,
}

impl Bareiss {
    fn new(a: Vec<Vec<BigInt>>) -> Self {
        let perm = (0..a.len()).collect();
        Bareiss {
            a,
            perm,
            pivot_cols: Vec::new(),
            swaps: 0,
        }
    }

    /// Eliminates over the first `ncols` columns; trailing columns (an
    /// augmented right-hand side) are carried along.
    fn eliminate(&mut self, ncols: usize) {
        let nrows = self.a.len();
        let width = self.a.first().map_or(0, Vec::len);
        let mut prev = BigInt::from(1);
        let mut r = 0;
        for c in 0..ncols {
            if r == nrows {
                break;
            }
            let Some(p) = (r..nrows).find(|&i| !self.a[i][c].is_zero()) else {
                continue;
            };
            if p != r {
                self.a.swap(p, r);
                self.perm.swap(p, r);
                self.swaps += 1;
            }
            let (head, tail) = self.a.split_at_mut(r + 1);
            let pivot_row = &head[r];
            let pivot = &pivot_row[c];
            for row in tail.iter_mut() {
                let factor = row[c].clone();
                for j in c + 1..width {
                    let v = pivot * &row[j] - &factor * &pivot_row[j];
                    row[j] = v / &prev;
                }
                row[c] = BigInt::zero();
            }
            prev = pivot.clone();
            self.pivot_cols.push(c);
            r += 1;
        }
    }
}
