//! Rank condition for the moment surface: jet matrices of the monomial map,
//! compressed to a subspace, must carry a nonvanishing minor of a prescribed
//! order. Certificates are exact minors at explicit rational points.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exponents::n_count;
use crate::lattice::{graded_points, MultiIndex};
use crate::linalg::{integer_rank, LinalgError, RatMatrix};
use crate::rat::{self, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlError {
    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no certifying point among {trials} trials")]
    Exhausted { trials: u32 },
    #[error("rank inequality fails for A' = {set:?}: rank {rank}, H = {h}")]
    RankViolated {
        set: Vec<MultiIndex>,
        rank: usize,
        h: usize,
    },
    #[error("{what}: size {size} exceeds guard {limit}")]
    TooLarge { what: String, size: u64, limit: u64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Monomials `t^i`, `1 <= |i| <= k`, in graded order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialMap {
    pub d: usize,
    pub k: u32,
    pub index_order: Vec<MultiIndex>,
}

impl MonomialMap {
    pub fn new(d: usize, k: u32) -> Self {
        MonomialMap {
            d,
            k,
            index_order: graded_points(d, 1, k),
        }
    }

    pub fn len(&self) -> usize {
        self.index_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_order.is_empty()
    }
}

/// A subspace of the monomial coordinate space given by an independent basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subspace {
    pub ambient_dim: usize,
    #[serde(serialize_with = "ser_basis")]
    pub basis: Vec<Vec<Rat>>,
}

fn ser_basis<S: serde::Serializer>(b: &[Vec<Rat>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(b.len()))?;
    for v in b {
        seq.serialize_element(&v.iter().map(rat::to_string).collect::<Vec<_>>())?;
    }
    seq.end()
}

impl Subspace {
    pub fn new(ambient_dim: usize, basis: Vec<Vec<Rat>>) -> Result<Self, BlError> {
        if basis.is_empty() || basis.len() > ambient_dim {
            return Err(BlError::InvalidSubspace(format!(
                "need 1 <= H <= {ambient_dim}, got H = {}",
                basis.len()
            )));
        }
        if basis.iter().any(|v| v.len() != ambient_dim) {
            return Err(BlError::InvalidSubspace(
                "basis vector of wrong length".into(),
            ));
        }
        let rank = RatMatrix::from_rows(basis.clone()).rank();
        if rank < basis.len() {
            return Err(BlError::InvalidSubspace(format!(
                "basis is dependent (rank {rank} < {})",
                basis.len()
            )));
        }
        Ok(Subspace { ambient_dim, basis })
    }

    /// Span of the given standard coordinate vectors.
    pub fn coordinate(ambient_dim: usize, coords: &[usize]) -> Result<Self, BlError> {
        let basis = coords
            .iter()
            .map(|&c| {
                let mut v = vec![Rat::zero(); ambient_dim];
                v[c] = Rat::one();
                v
            })
            .collect();
        Self::new(ambient_dim, basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn falling(m: u32, a: u32) -> i64 {
    (0..a).map(|i| i64::from(m - i)).product()
}

/// Columns `∂^α Φ(t)` for `1 <= |α| <= l`, one row per monomial.
pub fn jet_matrix(map: &MonomialMap, l: u32, t: &[Rat]) -> Result<RatMatrix, BlError> {
    if t.len() != map.d {
        return Err(BlError::InvalidArgument(format!(
            "point has {} coordinates, expected {}",
            t.len(),
            map.d
        )));
    }
    if l == 0 || l >= map.k {
        return Err(BlError::InvalidArgument(format!(
            "need 1 <= l <= k-1, got l={l}, k={}",
            map.k
        )));
    }
    let cols = graded_points(map.d, 1, l);
    let mut m = RatMatrix::zeros(map.len(), cols.len());
    for (i, mono) in map.index_order.iter().enumerate() {
        for (j, alpha) in cols.iter().enumerate() {
            if !alpha.le(mono) {
                continue;
            }
            let mut v = Rat::one();
            for ((&e, &a), x) in mono.0.iter().zip(&alpha.0).zip(t) {
                v *= rat::int(falling(e, a)) * rat::pow(x, e - a);
            }
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// `basis^T * jet`, of shape `H x n_d(l)`.
pub fn compressed_jet(
    v: &Subspace,
    map: &MonomialMap,
    l: u32,
    t: &[Rat],
) -> Result<RatMatrix, BlError> {
    if v.ambient_dim != map.len() {
        return Err(BlError::InvalidSubspace(format!(
            "ambient dimension {} differs from n_d(k) = {}",
            v.ambient_dim,
            map.len()
        )));
    }
    let vt = RatMatrix::from_rows(v.basis.clone());
    Ok(vt.mul(&jet_matrix(map, l, t)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum MinorOrder {
    Order(usize),
    /// `H = n_d(k)`: the order would exceed the column count.
    Degenerate,
}

/// `floor(H n_d(l) / n_d(k)) + 1`.
pub fn required_minor_order(h: usize, d: u32, k: u32, l: u32) -> MinorOrder {
    let (nl, nk) = (n_count(d, l) as u128, n_count(d, k) as u128);
    if h as u128 >= nk {
        return MinorOrder::Degenerate;
    }
    MinorOrder::Order((h as u128 * nl / nk) as usize + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCertificate {
    #[serde(serialize_with = "rat_list")]
    pub t: Vec<Rat>,
    pub trial: u32,
    pub order: usize,
    pub rank: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    #[serde(with = "rat::serde_str")]
    pub minor: Rat,
}

fn rat_list<S: serde::Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
    rat::serde_vec::serialize(v, s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Certification {
    Certified(RankCertificate),
    Degenerate { h: usize, n: usize },
}

/// A point of `(0,1)^d` with coordinates `a/b`, `2 <= b <= 2^16`, `1 <= a < b`.
pub fn random_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<Rat> {
    (0..d)
        .map(|_| {
            let b: i64 = rng.gen_range(2..=1 << 16);
            let a: i64 = rng.gen_range(1..b);
            rat::rat(a, b)
        })
        .collect()
}

/// Looks for a point where the compressed jet matrix has a nonzero minor of
/// the required order, trying at most `trials` seeded random points.
pub fn certify_rank(
    v: &Subspace,
    d: usize,
    k: u32,
    l: u32,
    trials: u32,
    seed: u64,
) -> Result<Certification, BlError> {
    let map = MonomialMap::new(d, k);
    let order = match required_minor_order(v.dim(), d as u32, k, l) {
        MinorOrder::Degenerate => {
            return Ok(Certification::Degenerate {
                h: v.dim(),
                n: map.len(),
            })
        }
        MinorOrder::Order(o) => o,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let t = random_point(&mut rng, d);
        let m = compressed_jet(v, &map, l, &t)?;
        let profile = m.rank_profile();
        if profile.rank < order {
            continue;
        }
        let rows = profile.rows[..order].to_vec();
        let cols = profile.cols[..order].to_vec();
        let minor = m.submatrix(&rows, &cols).determinant()?;
        if minor.is_zero() {
            continue;
        }
        return Ok(Certification::Certified(RankCertificate {
            t,
            trial,
            order,
            rank: profile.rank,
            rows,
            cols,
            minor,
        }));
    }
    Err(BlError::Exhausted { trials })
}

/// Recomputes the minor of a certificate from scratch.
pub fn verify_certificate(v: &Subspace, d: usize, k: u32, l: u32, c: &RankCertificate) -> bool {
    let map = MonomialMap::new(d, k);
    let Ok(m) = compressed_jet(v, &map, l, &c.t) else {
        return false;
    };
    let ok_order = required_minor_order(v.dim(), d as u32, k, l) == MinorOrder::Order(c.order);
    ok_order
        && c.rows.len() == c.order
        && c.cols.len() == c.order
        && m.submatrix(&c.rows, &c.cols).determinant().ok().as_ref() == Some(&c.minor)
        && !c.minor.is_zero()
}

/// Random subspace of dimension `h` with small integer entries.
pub fn random_subspace(rng: &mut ChaCha8Rng, n: usize, h: usize) -> Subspace {
    loop {
        let basis: Vec<Vec<Rat>> = (0..h)
            .map(|_| (0..n).map(|_| rat::int(rng.gen_range(-4..=4))).collect())
            .collect();
        if let Ok(s) = Subspace::new(n, basis) {
            return s;
        }
    }
}

/// `Π_i a_i^{β_i}` with `0^0 = 1`.
fn power_product(a: &MultiIndex, beta: &MultiIndex) -> BigInt {
    a.0.iter()
        .zip(&beta.0)
        .map(|(&x, &e)| BigInt::from(x).pow(e))
        .product()
}

/// Rows indexed by `β`, `1 <= |β| <= l`; one column per exponent in `set`.
pub fn j_matrix(set: &[MultiIndex], d: usize, l: u32) -> Vec<Vec<BigInt>> {
    graded_points(d, 1, l)
        .iter()
        .map(|beta| set.iter().map(|a| power_product(a, beta)).collect())
        .collect()
}

pub const SWEEP_GUARD: u64 = 14;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub d: usize,
    pub k: u32,
    pub l: u32,
    pub checked: u64,
    /// Smallest `r n_d(k) - H n_d(l)` seen.
    pub min_margin: i64,
}

/// Over every nonempty proper `A' ⊆ S_k`: `rank(J) n_d(k) > |A'| n_d(l)`.
pub fn monomial_rank_sweep(d: usize, k: u32, l: u32) -> Result<SweepReport, BlError> {
    if l == 0 || l >= k {
        return Err(BlError::InvalidArgument(format!(
            "need 1 <= l < k, got l={l}, k={k}"
        )));
    }
    let pts = graded_points(d, 1, k);
    let n = pts.len() as u64;
    if n > SWEEP_GUARD {
        return Err(BlError::TooLarge {
            what: "subsets of S_k".into(),
            size: n,
            limit: SWEEP_GUARD,
        });
    }
    let (nk, nl) = (n as i64, n_count(d as u32, l) as i64);
    let rows = graded_points(d, 1, l).len();
    let full = (1u64 << n) - 1;
    let outcome: Result<i64, (Vec<MultiIndex>, usize)> = (1..full)
        .into_par_iter()
        .map(|mask| {
            let set: Vec<MultiIndex> = (0..pts.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pts[i].clone())
                .collect();
            let r = integer_rank(j_matrix(&set, d, l), set.len());
            debug_assert!(r <= rows);
            let margin = r as i64 * nk - set.len() as i64 * nl;
            if margin > 0 {
                Ok(margin)
            } else {
                Err((set, r))
            }
        })
        .try_reduce(|| i64::MAX, |a, b| Ok(a.min(b)));
    match outcome {
        Ok(min_margin) => Ok(SweepReport {
            d,
            k,
            l,
            checked: full - 1,
            min_margin,
        }),
        Err((set, rank)) => Err(BlError::RankViolated {
            h: set.len(),
            set,
            rank,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::mi;
    use crate::rat::{int, rat};

    #[test]
    fn jet_at_origin() {
        let map = MonomialMap::new(2, 2);
        let m = jet_matrix(&map, 1, &[int(0), int(0)]).unwrap();
        let col = |j: usize| (0..5).map(|i| m[(i, j)].clone()).collect::<Vec<_>>();
        assert_eq!(col(0), vec![int(1), int(0), int(0), int(0), int(0)]);
        assert_eq!(col(1), vec![int(0), int(1), int(0), int(0), int(0)]);
    }

    #[test]
    fn jet_full_rank_at_generic_point() {
        for (d, k) in [(1usize, 3u32), (2, 3), (2, 4), (3, 3)] {
            let map = MonomialMap::new(d, k);
            let t: Vec<Rat> = (0..d as i64).map(|i| rat(1, i + 2)).collect();
            for l in 1..k {
                let m = jet_matrix(&map, l, &t).unwrap();
                assert_eq!(m.rank() as u64, n_count(d as u32, l), "d={d} k={k} l={l}");
            }
        }
    }

    #[test]
    fn derivative_beyond_exponent_vanishes() {
        let map = MonomialMap::new(1, 3);
        let m = jet_matrix(&map, 2, &[rat(1, 3)]).unwrap();
        // t has no second derivative
        assert_eq!(m[(0, 1)], int(0));
        assert_eq!(m[(2, 1)], int(6) * rat(1, 3));
    }

    #[test]
    fn minor_orders() {
        assert_eq!(required_minor_order(1, 2, 3, 2), MinorOrder::Order(1));
        assert_eq!(required_minor_order(5, 2, 3, 2), MinorOrder::Order(3));
        assert_eq!(required_minor_order(4, 2, 2, 1), MinorOrder::Order(2));
        assert_eq!(required_minor_order(5, 2, 2, 1), MinorOrder::Degenerate);
    }

    #[test]
    fn certify_examples() {
        let v = Subspace::coordinate(5, &[0]).unwrap();
        let Certification::Certified(c) = certify_rank(&v, 2, 2, 1, 4, 0).unwrap() else {
            panic!("expected certificate");
        };
        assert_eq!(c.order, 1);
        assert!(verify_certificate(&v, 2, 2, 1, &c));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = random_subspace(&mut rng, 5, 4);
        let Certification::Certified(c) = certify_rank(&v, 2, 2, 1, 32, 7).unwrap() else {
            panic!("expected certificate");
        };
        assert_eq!(c.order, 2);
        assert!(verify_certificate(&v, 2, 2, 1, &c));

        let full = Subspace::coordinate(5, &[0, 1, 2, 3, 4]).unwrap();
        assert!(matches!(
            certify_rank(&full, 2, 2, 1, 4, 0).unwrap(),
            Certification::Degenerate { .. }
        ));
    }

    #[test]
    fn certificates_are_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_subspace(&mut rng, 9, 6);
        let a = certify_rank(&v, 2, 3, 2, 32, 11).unwrap();
        let b = certify_rank(&v, 2, 3, 2, 32, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dependent_basis_rejected() {
        let r = Subspace::new(
            3,
            vec![vec![int(1), int(2), int(3)], vec![int(2), int(4), int(6)]],
        );
        assert!(matches!(r, Err(BlError::InvalidSubspace(_))));
    }

    #[test]
    fn j_matrix_examples() {
        let j = j_matrix(&[mi(&[1, 0]), mi(&[2, 0])], 2, 1);
        let want: Vec<Vec<BigInt>> = vec![vec![1.into(), 2.into()], vec![0.into(), 0.into()]];
        assert_eq!(j, want);
        assert_eq!(integer_rank(j, 2), 1);
        let set = [mi(&[1, 0]), mi(&[2, 0]), mi(&[0, 1]), mi(&[0, 2])];
        assert_eq!(integer_rank(j_matrix(&set, 2, 1), 4), 2);
        // zero exponent: every row vanishes
        let z = j_matrix(&[mi(&[0, 0])], 2, 2);
        assert!(z.iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn sweep_small() {
        for k in 2..=3 {
            for l in 1..k {
                let r = monomial_rank_sweep(2, k, l).unwrap();
                assert!(r.min_margin > 0);
            }
        }
        assert!(matches!(
            monomial_rank_sweep(3, 3, 1),
            Err(BlError::TooLarge { .. })
        ));
    }
}
