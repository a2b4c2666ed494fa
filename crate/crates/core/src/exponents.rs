//! Scalar indices and exponents: monomial counts, weights, critical
//! exponents, interpolation indices and the decoupling exponent.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rat::{self, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExponentError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("non-positive denominator n_{j}*p_{k} - p_{j}*n_{k} for d={d}, k={k}, j={j}")]
    DegenerateDenominator { d: u32, k: u32, j: u32 },
    #[error("closed form for {which}_{l} fails its defining relation (d={d}, k={k})")]
    RelationMismatch {
        which: &'static str,
        d: u32,
        k: u32,
        l: u32,
    },
}

/// `C(n, r)`, zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of monomials of degree `1..=l` in `d` variables: `C(d+l, l) - 1`.
///
/// Panics if the count does not fit in a `u64`.
pub fn n_count(d: u32, l: u32) -> u64 {
    let c = binomial(u64::from(d) + u64::from(l), u64::from(l)) - BigUint::one();
    c.to_u64().expect("monomial count overflows u64")
}

fn n_rat(d: u32, l: u32) -> Rat {
    rat::from_u64(n_count(d, l))
}

/// Weight `jk/(j+1) * C(k+j, j)`.
pub fn kappa(j: u32, k: u32) -> Rat {
    let c = binomial(u64::from(k) + u64::from(j), u64::from(j));
    Rat::new(
        BigInt::from(c) * BigInt::from(u64::from(j) * u64::from(k)),
        BigInt::from(j + 1),
    )
}

/// The `d + 1` affine branches of the decoupling exponent at `p`: the volume
/// branch first, then `j = 1..=d`.
pub fn gamma_branches(d: u32, k: u32, p: &Rat) -> Vec<Rat> {
    let inv = p.recip();
    let half = rat::rat(1, 2);
    let mut out = Vec::with_capacity(d as usize + 1);
    out.push((&half - &inv) * rat::int(i64::from(d)));
    for j in 1..=d {
        let jr = rat::int(i64::from(j));
        out.push((Rat::one() - &inv) * jr - kappa(j, k) * &inv);
    }
    out
}

/// Sharp decoupling exponent `Γ_{d,k}(p)` for rational `p >= 2`.
pub fn gamma_exp(d: u32, k: u32, p: &Rat) -> Rat {
    gamma_branches(d, k, p)
        .into_iter()
        .max()
        .expect("at least one branch")
}

/// Critical exponent `2 K_{d,l} / d`.
pub fn p_crit(d: u32, l: u32) -> Rat {
    kappa(d, l) * rat::int(2) / rat::int(i64::from(d))
}

/// `max{2, p * p_d(l) / p_d(k)}`.
pub fn q_index(d: u32, k: u32, p: &Rat, l: u32) -> Rat {
    let q = p * p_crit(d, l) / p_crit(d, k);
    q.max(rat::int(2))
}

/// Threshold `2 n_d(k) / d` above which the iteration is defined.
pub fn regime_threshold(d: u32, k: u32) -> Rat {
    n_rat(d, k) * rat::int(2) / rat::int(i64::from(d))
}

/// Interpolation weights: `alpha[l-1]` for `l = 1..k-1`, `beta[l-2]` for `l = 2..k-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaBeta {
    #[serde(with = "rat::serde_vec")]
    pub alpha: Vec<Rat>,
    #[serde(with = "rat::serde_vec")]
    pub beta: Vec<Rat>,
}

impl AlphaBeta {
    pub fn alpha(&self, l: u32) -> &Rat {
        &self.alpha[l as usize - 1]
    }

    pub fn beta(&self, l: u32) -> &Rat {
        &self.beta[l as usize - 2]
    }
}

/// Closed-form `α_l`, `β_l`, each checked against its defining relation
///
/// `n_k/n_l = α n_k/n_{l+1} + (1-α) p_k/p_l` and
/// `p_k/p_l = (1-β) p_k/p_{l-1} + β n_k/n_l`.
pub fn alpha_beta(d: u32, k: u32) -> Result<AlphaBeta, ExponentError> {
    if d == 0 || k < 2 {
        return Err(ExponentError::InvalidParams(format!(
            "alpha/beta need d >= 1 and k >= 2, got d={d}, k={k}"
        )));
    }
    let n = |l: u32| n_rat(d, l);
    let p = |l: u32| p_crit(d, l);
    let (nk, pk) = (n(k), p(k));
    for j in 1..k {
        if !(n(j) * &pk - p(j) * &nk).is_positive() {
            return Err(ExponentError::DegenerateDenominator { d, k, j });
        }
    }
    let mut alpha = Vec::new();
    for j in 1..k {
        let (nj, nj1, pj) = (n(j), n(j + 1), p(j));
        let a = &nj1 / &nj * (&nj * &pk - &pj * &nk) / (&nj1 * &pk - &pj * &nk);
        let lhs = &nk / &nj;
        let rhs = &a * &nk / &nj1 + (Rat::one() - &a) * &pk / &pj;
        if lhs != rhs {
            return Err(ExponentError::RelationMismatch {
                which: "alpha",
                d,
                k,
                l: j,
            });
        }
        alpha.push(a);
    }
    let mut beta = Vec::new();
    for j in 2..k {
        let (nj, pj, pj0) = (n(j), p(j), p(j - 1));
        let b = &pk / &pj * &nj * (&pj - &pj0) / (&nj * &pk - &pj0 * &nk);
        let lhs = &pk / &pj;
        let rhs = (Rat::one() - &b) * &pk / &pj0 + &b * &nk / &nj;
        if lhs != rhs {
            return Err(ExponentError::RelationMismatch {
                which: "beta",
                d,
                k,
                l: j,
            });
        }
        beta.push(b);
    }
    Ok(AlphaBeta { alpha, beta })
}

/// Lower-bound exponent `max(sd, max_j (2s-1)j + d - K_{j,k})`.
pub fn lower_exponent(s: u32, d: u32, k: u32) -> Rat {
    let base = rat::int(i64::from(s) * i64::from(d));
    (1..=d)
        .map(|j| rat::int((2 * i64::from(s) - 1) * i64::from(j) + i64::from(d)) - kappa(j, k))
        .fold(base, Rat::max)
}

/// `p_j n_1 + p_1 s_{j-1} - j p_1 n_j`, which vanishes identically.
pub fn partial_sum_residual(d: u32, j: u32) -> Rat {
    let s_prev: u64 = (1..j).map(|i| n_count(d, i)).sum();
    p_crit(d, j) * n_rat(d, 1) + p_crit(d, 1) * rat::from_u64(s_prev)
        - rat::int(i64::from(j)) * p_crit(d, 1) * n_rat(d, j)
}

/// `(1/2 - 1/p_c) d - ((1 - 1/p_c) d - K_{d,k}/p_c)` at `p_c = p_d(k)`; zero.
pub fn critical_tie_residual(d: u32, k: u32) -> Rat {
    let pc = p_crit(d, k);
    let branches = gamma_branches(d, k, &pc);
    &branches[0] - &branches[d as usize]
}

/// Validated problem parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Params {
    pub d: u32,
    pub k: u32,
    #[serde(with = "rat::serde_opt", skip_serializing_if = "Option::is_none")]
    pub p: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
}

impl Params {
    pub fn new(d: u32, k: u32, p: Option<Rat>, s: Option<u32>) -> Result<Self, ExponentError> {
        if d < 1 {
            return Err(ExponentError::InvalidParams(format!(
                "d must be >= 1, got {d}"
            )));
        }
        if k < 2 {
            return Err(ExponentError::InvalidParams(format!(
                "k must be >= 2, got {k}"
            )));
        }
        if let Some(p) = &p {
            if *p < rat::int(2) {
                return Err(ExponentError::InvalidParams(format!(
                    "p must be >= 2, got {}",
                    rat::to_string(p)
                )));
            }
        }
        if s == Some(0) {
            return Err(ExponentError::InvalidParams("s must be >= 1".into()));
        }
        Ok(Params { d, k, p, s })
    }
}

/// Every index attached to a fixed `(d, k)` and optionally `p`.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentTable {
    pub d: u32,
    pub k: u32,
    #[serde(with = "rat::serde_opt")]
    pub p: Option<Rat>,
    /// `n_d(l)` for `l = 1..=k`.
    pub n: Vec<u64>,
    /// `K_{j,k}` for `j = 1..=d`.
    #[serde(with = "rat::serde_vec")]
    pub kappa: Vec<Rat>,
    /// `s_j` for `j = 0..=k`.
    pub s_partial: Vec<u64>,
    /// `p_d(l)` for `l = 1..=k`.
    #[serde(with = "rat::serde_vec")]
    pub p_crit: Vec<Rat>,
    /// `q_{d,k}(l)` for `l = 1..k`, present with `p`.
    #[serde(skip_serializing_if = "Vec::is_empty", with = "rat::serde_vec")]
    pub q_idx: Vec<Rat>,
    #[serde(with = "rat::serde_vec")]
    pub alpha: Vec<Rat>,
    #[serde(with = "rat::serde_vec")]
    pub beta: Vec<Rat>,
    /// `Γ_{d,l}(q_{d,k}(l))` for `l = 1..k`, present with `p`.
    #[serde(skip_serializing_if = "Vec::is_empty", with = "rat::serde_vec")]
    pub gamma_q: Vec<Rat>,
    #[serde(with = "rat::serde_opt")]
    pub gamma: Option<Rat>,
    #[serde(with = "rat::serde_str")]
    pub threshold: Rat,
}

impl ExponentTable {
    pub fn new(params: &Params) -> Result<Self, ExponentError> {
        let Params { d, k, .. } = *params;
        let n: Vec<u64> = (1..=k).map(|l| n_count(d, l)).collect();
        let mut s_partial = vec![0u64];
        for &nl in &n {
            s_partial.push(s_partial.last().unwrap() + nl);
        }
        let ab = alpha_beta(d, k)?;
        let (q_idx, gamma_q, gamma) = match &params.p {
            Some(p) => {
                let q: Vec<Rat> = (1..k).map(|l| q_index(d, k, p, l)).collect();
                let g = (1..k)
                    .map(|l| gamma_exp(d, l, &q[l as usize - 1]))
                    .collect();
                (q, g, Some(gamma_exp(d, k, p)))
            }
            None => (Vec::new(), Vec::new(), None),
        };
        Ok(ExponentTable {
            d,
            k,
            p: params.p.clone(),
            n,
            kappa: (1..=d).map(|j| kappa(j, k)).collect(),
            s_partial,
            p_crit: (1..=k).map(|l| p_crit(d, l)).collect(),
            q_idx,
            alpha: ab.alpha,
            beta: ab.beta,
            gamma_q,
            gamma,
            threshold: regime_threshold(d, k),
        })
    }

    pub fn n(&self, l: u32) -> Rat {
        rat::from_u64(self.n[l as usize - 1])
    }

    pub fn pc(&self, l: u32) -> &Rat {
        &self.p_crit[l as usize - 1]
    }

    pub fn s(&self, j: u32) -> Rat {
        rat::from_u64(self.s_partial[j as usize])
    }

    pub fn alpha(&self, l: u32) -> &Rat {
        &self.alpha[l as usize - 1]
    }

    pub fn beta(&self, l: u32) -> &Rat {
        &self.beta[l as usize - 2]
    }

    /// Panics without `p`.
    pub fn q(&self, l: u32) -> &Rat {
        &self.q_idx[l as usize - 1]
    }

    /// `Γ_{d,l}(q_l)`; panics without `p`.
    pub fn gamma_q(&self, l: u32) -> &Rat {
        &self.gamma_q[l as usize - 1]
    }

    /// Names of violated structural invariants; empty when all hold.
    pub fn violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let (d, k) = (self.d, self.k);
        if self.n[0] != u64::from(d) {
            bad.push("n_d(1) != d".into());
        }
        if self.s_partial[0] != 0 || self.s_partial.windows(2).any(|w| w[0] >= w[1]) {
            bad.push("s_j not strictly increasing from 0".into());
        }
        if *self.pc(1) != rat::int(2) || self.p_crit.windows(2).any(|w| w[0] >= w[1]) {
            bad.push("p_d(l) not strictly increasing from 2".into());
        }
        let unit = |q: &Rat| q.is_positive() && *q < Rat::one();
        if !self.alpha.iter().all(unit) {
            bad.push("alpha outside (0,1)".into());
        }
        if !self.beta.iter().all(unit) {
            bad.push("beta outside (0,1)".into());
        }
        for j in 1..k {
            if self.n(j) * self.pc(k) <= self.pc(j) * self.n(k) {
                bad.push(format!("n_j p_k <= p_j n_k at j={j}"));
            }
        }
        if self.q_idx.iter().any(|q| *q < rat::int(2)) {
            bad.push("q below 2".into());
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 0), BigUint::from(1u32));
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(2, 5), BigUint::zero());
    }

    #[test]
    fn n_count_examples() {
        for d in 1..10 {
            assert_eq!(n_count(d, 1), u64::from(d));
        }
        assert_eq!(n_count(2, 2), 5);
        assert_eq!(n_count(2, 3), 9);
    }

    #[test]
    fn kappa_examples() {
        for k in 1..20 {
            assert_eq!(kappa(1, k), int(i64::from(k * (k + 1) / 2)));
        }
        assert_eq!(kappa(2, 2), int(8));
        assert_eq!(kappa(1, 1), int(1));
    }

    #[test]
    fn gamma_examples() {
        for (d, k) in [(1, 2), (2, 3), (3, 4)] {
            assert_eq!(gamma_exp(d, k, &int(2)), int(0));
        }
        assert_eq!(gamma_exp(1, 2, &int(6)), rat(1, 3));
        let br = gamma_branches(1, 2, &int(6));
        assert_eq!(br[0], br[1]);
        // with K_{1,1} = 1 the j-branch is exactly twice the volume branch
        for p in [int(2), rat(7, 2), int(100)] {
            let br = gamma_branches(1, 1, &p);
            assert_eq!(br[1], &br[0] * int(2));
        }
    }

    #[test]
    fn p_crit_and_q_examples() {
        assert_eq!(p_crit(1, 2), int(6));
        assert_eq!(p_crit(2, 2), int(8));
        for d in 1..8 {
            assert_eq!(p_crit(d, 1), int(2));
        }
        assert_eq!(q_index(2, 3, &int(10), 1), int(2));
        assert_eq!(q_index(1, 2, &int(8), 1), rat(8, 3));
        let pk = p_crit(2, 4);
        for l in 1..4 {
            assert_eq!(q_index(2, 4, &pk, l), p_crit(2, l));
        }
    }

    #[test]
    fn alpha_beta_examples() {
        assert_eq!(alpha_beta(2, 2).unwrap().alpha, vec![rat(1, 2)]);
        assert_eq!(*alpha_beta(1, 3).unwrap().beta(2), rat(8, 9));
        assert_eq!(*alpha_beta(1, 2).unwrap().alpha(1), rat(1, 2));
        assert!(alpha_beta(1, 1).is_err());
    }

    #[test]
    fn lower_exponent_examples() {
        assert_eq!(lower_exponent(2, 1, 2), int(2));
        assert_eq!(lower_exponent(3, 1, 2), int(3));
        for (d, k) in [(1, 2), (2, 3), (3, 5)] {
            assert_eq!(lower_exponent(1, d, k), int(i64::from(d)));
        }
    }

    #[test]
    fn table_invariants_hold() {
        for d in 1..=8 {
            for k in 2..=10 {
                let t = ExponentTable::new(&Params::new(d, k, None, None).unwrap()).unwrap();
                assert!(
                    t.violations().is_empty(),
                    "d={d} k={k}: {:?}",
                    t.violations()
                );
                assert!(critical_tie_residual(d, k).is_zero());
                for j in 1..=k {
                    assert!(partial_sum_residual(d, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn partial_sum_hand_value() {
        // d=2, j=2: 8*2 + 2*2 = 2*2*5
        assert_eq!(p_crit(2, 2) * int(2) + p_crit(2, 1) * int(2), int(20));
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(0, 2, None, None).is_err());
        assert!(Params::new(1, 1, None, None).is_err());
        assert!(Params::new(1, 2, Some(rat(3, 2)), None).is_err());
        assert!(Params::new(1, 2, Some(int(2)), Some(0)).is_err());
        assert!(Params::new(1, 2, Some(int(2)), Some(1)).is_ok());
    }

    #[test]
    fn table_serializes_rationals_as_strings() {
        let t = ExponentTable::new(&Params::new(1, 2, Some(int(6)), None).unwrap()).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["gamma"], "1/3");
        assert_eq!(v["alpha"][0], "1/2");
    }
}
