//! Exact counts of solutions to the symmetric moment system
//! `x_1^i + ... + x_s^i = y_1^i + ... + y_s^i`, `1 <= |i| <= k`, with all
//! `x_j, y_j` in `[1, N]^d`, by sparse convolution of representation counts.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exponents::lower_exponent;
use crate::lattice::{graded_points, MultiIndex};
use crate::rat::{self, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("projected table size {estimate} exceeds the limit {limit}")]
    ResourceGuard { estimate: u64, limit: u64 },
    #[error("{tuples} tuples exceed the enumeration guard {limit}")]
    TooLarge { tuples: u64, limit: u64 },
    #[error("moment coordinate overflows u64")]
    Overflow,
    #[error("J({n}) = {j} is below the diagonal count {diagonal}")]
    BelowDiagonal { n: u64, j: String, diagonal: String },
    #[error("failed to build worker pool: {0}")]
    Pool(String),
}

pub const BRUTE_GUARD: u64 = 100_000_000;
pub const DEFAULT_TABLE_LIMIT: u64 = 5_000_000;

pub type Moment = Vec<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountConfig {
    pub threads: usize,
    /// Largest number of table entries a fold may be projected to reach.
    pub table_limit: u64,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            threads: 1,
            table_limit: DEFAULT_TABLE_LIMIT,
        }
    }
}

/// `(x^i)` for `1 <= |i| <= k` in graded order.
pub fn moment_vector(k: u32, x: &[u64]) -> Result<Moment, CountError> {
    if x.is_empty() || x.contains(&0) {
        return Err(CountError::InvalidArgument(
            "coordinates must be positive and d >= 1".into(),
        ));
    }
    moment_for(&graded_points(x.len(), 1, k), x)
}

fn moment_for(order: &[MultiIndex], x: &[u64]) -> Result<Moment, CountError> {
    order
        .iter()
        .map(|i| {
            i.0.iter().zip(x).try_fold(1u64, |acc, (&e, &xi)| {
                xi.checked_pow(e)
                    .and_then(|p| acc.checked_mul(p))
                    .ok_or(CountError::Overflow)
            })
        })
        .collect()
}

fn add_moments(a: &[u64], b: &[u64]) -> Result<Moment, CountError> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).ok_or(CountError::Overflow))
        .collect()
}

/// The `index`-th point of `[1, n]^d`, first coordinate fastest.
fn grid_point(mut index: u64, d: usize, n: u64) -> Vec<u64> {
    let mut x = Vec::with_capacity(d);
    for _ in 0..d {
        x.push(index % n + 1);
        index /= n;
    }
    x
}

fn checked_power(n: u64, e: u64) -> Option<u64> {
    u32::try_from(e).ok().and_then(|e| n.checked_pow(e))
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, CountError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CountError::Pool(e.to_string()))
}

fn merge(into: &mut BTreeMap<Moment, BigUint>, from: BTreeMap<Moment, BigUint>) {
    for (key, c) in from {
        *into.entry(key).or_insert_with(BigUint::zero) += c;
    }
}

/// Representation counts `r_s(m)`: the number of ordered `s`-tuples of grid
/// points whose moment vectors sum to `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub d: usize,
    pub k: u32,
    pub n: u64,
    pub level: u32,
    pub entries: BTreeMap<Moment, BigUint>,
}

impl CountTable {
    /// `r_1`, built in `threads` contiguous ranges of grid indices.
    pub fn base(d: usize, k: u32, n: u64, threads: usize) -> Result<Self, CountError> {
        if d == 0 || k == 0 || n == 0 {
            return Err(CountError::InvalidArgument("need d, k, N >= 1".into()));
        }
        let total = checked_power(n, d as u64).ok_or(CountError::Overflow)?;
        let order = graded_points(d, 1, k);
        let parts = threads.max(1) as u64;
        let chunk = total.div_ceil(parts).max(1);
        let partials: Vec<Result<BTreeMap<Moment, BigUint>, CountError>> =
            pool(threads)?.install(|| {
                (0..parts)
                    .into_par_iter()
                    .map(|p| {
                        let mut m = BTreeMap::new();
                        for idx in (p * chunk)..((p + 1) * chunk).min(total) {
                            let key = moment_for(&order, &grid_point(idx, d, n))?;
                            *m.entry(key).or_insert_with(BigUint::zero) += 1u32;
                        }
                        Ok(m)
                    })
                    .collect()
            });
        let mut entries = BTreeMap::new();
        for part in partials {
            merge(&mut entries, part?);
        }
        Ok(CountTable {
            d,
            k,
            n,
            level: 1,
            entries,
        })
    }

    /// `self ⋆ other`; `self` is split into `threads` contiguous key ranges
    /// and the partial tables are merged in range order.
    pub fn convolve(&self, other: &CountTable, threads: usize) -> Result<Self, CountError> {
        if (self.d, self.k, self.n) != (other.d, other.k, other.n) {
            return Err(CountError::InvalidArgument(
                "tables over different (d, k, N)".into(),
            ));
        }
        let left: Vec<(&Moment, &BigUint)> = self.entries.iter().collect();
        let chunk = left.len().div_ceil(threads.max(1)).max(1);
        let partials: Vec<Result<BTreeMap<Moment, BigUint>, CountError>> =
            pool(threads)?.install(|| {
                left.par_chunks(chunk)
                    .map(|range| {
                        let mut m = BTreeMap::new();
                        for (ka, ca) in range {
                            for (kb, cb) in &other.entries {
                                let key = add_moments(ka, kb)?;
                                *m.entry(key).or_insert_with(BigUint::zero) += *ca * cb;
                            }
                        }
                        Ok(m)
                    })
                    .collect()
            });
        let mut entries = BTreeMap::new();
        for part in partials {
            merge(&mut entries, part?);
        }
        Ok(CountTable {
            d: self.d,
            k: self.k,
            n: self.n,
            level: self.level + other.level,
            entries,
        })
    }

    pub fn mass(&self) -> BigUint {
        self.entries.values().sum()
    }

    pub fn sum_of_squares(&self) -> BigUint {
        self.entries.values().map(|c| c * c).sum()
    }
}

/// Upper bound on the number of keys in `r_s`: both the number of ordered
/// tuples and the product of the coordinate ranges.
pub fn estimate_table_size(s: u32, d: usize, k: u32, n: u64) -> u64 {
    let tuples = checked_power(n, u64::from(s) * d as u64).unwrap_or(u64::MAX);
    let box_size = graded_points(d, 1, k).iter().try_fold(1u64, |acc, i| {
        let top = checked_power(n, u64::from(i.norm()))?;
        let range = top
            .checked_sub(1)?
            .checked_mul(u64::from(s))?
            .checked_add(1)?;
        acc.checked_mul(range)
    });
    tuples.min(box_size.unwrap_or(u64::MAX))
}

fn validate(s: u32, d: usize, k: u32, n: u64) -> Result<(), CountError> {
    if s == 0 || d == 0 || k == 0 || n == 0 {
        return Err(CountError::InvalidArgument("need s, d, k, N >= 1".into()));
    }
    Ok(())
}

/// `r_s` by repeated convolution with `r_1`.
pub fn representation_table(
    s: u32,
    d: usize,
    k: u32,
    n: u64,
    cfg: CountConfig,
) -> Result<CountTable, CountError> {
    validate(s, d, k, n)?;
    let estimate = estimate_table_size(s, d, k, n);
    if estimate > cfg.table_limit {
        return Err(CountError::ResourceGuard {
            estimate,
            limit: cfg.table_limit,
        });
    }
    let r1 = CountTable::base(d, k, n, cfg.threads)?;
    let mut r = r1.clone();
    for _ in 1..s {
        r = r.convolve(&r1, cfg.threads)?;
    }
    Ok(r)
}

/// `J_{s,d,k}(N) = sum_m r_s(m)^2`.
pub fn j_count(s: u32, d: usize, k: u32, n: u64, cfg: CountConfig) -> Result<BigUint, CountError> {
    Ok(representation_table(s, d, k, n, cfg)?.sum_of_squares())
}

/// Direct enumeration of all ordered `2s`-tuples.
pub fn j_brute(s: u32, d: usize, k: u32, n: u64) -> Result<u64, CountError> {
    validate(s, d, k, n)?;
    let side = checked_power(n, u64::from(s) * d as u64);
    let tuples = side.and_then(|x| x.checked_mul(x));
    match tuples {
        Some(t) if t <= BRUTE_GUARD => {}
        _ => {
            return Err(CountError::TooLarge {
                tuples: tuples.unwrap_or(u64::MAX),
                limit: BRUTE_GUARD,
            })
        }
    }
    let points = n.pow(d as u32);
    let order = graded_points(d, 1, k);
    let moments: Vec<Moment> = (0..points)
        .map(|i| moment_for(&order, &grid_point(i, d, n)))
        .collect::<Result<_, _>>()?;
    // Sums over every ordered s-tuple, enumerated as base-`points` digits.
    let side = side.expect("checked above");
    let mut sums = Vec::with_capacity(side as usize);
    for mut t in 0..side {
        let mut acc = vec![0u64; order.len()];
        for _ in 0..s {
            acc = add_moments(&acc, &moments[(t % points) as usize])?;
            t /= points;
        }
        sums.push(acc);
    }
    let mut count = 0u64;
    for x in &sums {
        for y in &sums {
            if x == y {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRow {
    pub n: u64,
    #[serde(serialize_with = "ser_big")]
    pub j: BigUint,
    /// `log2(J(N) / J(N/2))`, absent on the first row.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub s: u32,
    pub d: usize,
    pub k: u32,
    #[serde(with = "rat::serde_str")]
    pub lower_exponent: Rat,
    pub rows: Vec<CountRow>,
}

fn log2_big(v: &BigUint) -> f64 {
    match v.to_f64() {
        Some(f) if f.is_finite() => f.log2(),
        _ => {
            let shift = v.bits().saturating_sub(64);
            (v >> shift).to_f64().unwrap_or(f64::MAX).log2() + shift as f64
        }
    }
}

/// `J` at `N = 2, 4, ...` up to `nmax`, with dyadic slopes.
pub fn growth_report(
    s: u32,
    d: usize,
    k: u32,
    nmax: u64,
    cfg: CountConfig,
) -> Result<CountReport, CountError> {
    validate(s, d, k, nmax)?;
    if nmax < 2 {
        return Err(CountError::InvalidArgument("need Nmax >= 2".into()));
    }
    let mut rows: Vec<CountRow> = Vec::new();
    let mut n = 2u64;
    while n <= nmax {
        let j = j_count(s, d, k, n, cfg)?;
        let diagonal = diagonal_count(s, d, n);
        if j < diagonal {
            return Err(CountError::BelowDiagonal {
                n,
                j: j.to_string(),
                diagonal: diagonal.to_string(),
            });
        }
        let slope = rows.last().map(|prev| log2_big(&j) - log2_big(&prev.j));
        rows.push(CountRow { n, j, slope });
        n *= 2;
    }
    Ok(CountReport {
        s,
        d,
        k,
        lower_exponent: lower_exponent(s, d as u32, k),
        rows,
    })
}

/// `N^{sd}` as an arbitrary-precision integer.
pub fn diagonal_count(s: u32, d: usize, n: u64) -> BigUint {
    BigUint::from(n).pow(s * d as u32)
}
