//! Lattice-point combinatorics on simplices `1 <= |a| <= l`, boxes
//! `0 <= a_i <= l` and shells `|a| = m`: upward closures, layers,
//! predecessors, and the counting inequalities built on them.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exponents::{binomial, n_count};
use crate::rat::{self, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("{point} does not lie in {ambient}")]
    OutsideAmbient { point: MultiIndex, ambient: Ambient },
    #[error("operation not defined on {0}")]
    WrongAmbient(Ambient),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what}: enumeration size {size} exceeds guard {limit}")]
    TooLarge { what: String, size: u64, limit: u64 },
    #[error("predecessor contraction fails for T = {set:?}: |T-| = {pred}, |T| = {size}")]
    ContractionViolated {
        set: Vec<MultiIndex>,
        pred: usize,
        size: usize,
    },
    #[error("convexity fails at d={d}, q={q}")]
    ConvexityViolated { d: u32, q: u32 },
    #[error("ratio inequality fails for B = {set:?}: |B_l+| = {small}, |B_k+| = {large}")]
    InequalityViolated {
        set: Vec<MultiIndex>,
        small: usize,
        large: usize,
    },
    #[error("deficiency {recursion} differs from box extension size {direct} for B = {set:?}")]
    DeficiencyMismatch {
        set: Vec<MultiIndex>,
        recursion: u64,
        direct: u64,
    },
}

/// A `d`-tuple of nonnegative integers, ordered componentwise by [`MultiIndex::le`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn bump(&self, i: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[i] += 1;
        MultiIndex(v)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn mi(v: &[u32]) -> MultiIndex {
    MultiIndex(v.to_vec())
}

/// All `a` with `|a| = m` in `d` coordinates, first component descending.
pub fn shell_points(d: usize, m: u32) -> Vec<MultiIndex> {
    fn rec(d: usize, m: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if d == 1 {
            prefix.push(m);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=m).rev() {
            prefix.push(first);
            rec(d - 1, m - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, m, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

/// All `a` with `lo <= |a| <= hi`, graded, each grade first component descending.
pub fn graded_points(d: usize, lo: u32, hi: u32) -> Vec<MultiIndex> {
    (lo..=hi).flat_map(|m| shell_points(d, m)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ambient {
    /// `1 <= |a| <= l`.
    Simplex { d: usize, l: u32 },
    /// `0 <= a_i <= l`.
    Box { d: usize, l: u32 },
    /// `|a| = m`.
    Shell { d: usize, m: u32 },
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Simplex { d, l } => write!(f, "simplex S_{l} in dimension {d}"),
            Ambient::Box { d, l } => write!(f, "box C_{l} in dimension {d}"),
            Ambient::Shell { d, m } => write!(f, "shell V_{m} in dimension {d}"),
        }
    }
}

impl Ambient {
    pub fn dim(&self) -> usize {
        match *self {
            Ambient::Simplex { d, .. } | Ambient::Box { d, .. } | Ambient::Shell { d, .. } => d,
        }
    }

    pub fn contains(&self, a: &MultiIndex) -> bool {
        if a.dim() != self.dim() {
            return false;
        }
        match *self {
            Ambient::Simplex { l, .. } => (1..=l).contains(&a.norm()),
            Ambient::Box { l, .. } => a.0.iter().all(|&x| x <= l),
            Ambient::Shell { m, .. } => a.norm() == m,
        }
    }

    /// Every point, in canonical graded order.
    pub fn points(&self) -> Vec<MultiIndex> {
        match *self {
            Ambient::Simplex { d, l } => graded_points(d, 1, l),
            Ambient::Box { d, l } => graded_points(d, 0, l * d as u32)
                .into_iter()
                .filter(|a| a.0.iter().all(|&x| x <= l))
                .collect(),
            Ambient::Shell { d, m } => shell_points(d, m),
        }
    }

    pub fn size(&self) -> u64 {
        match *self {
            Ambient::Simplex { d, l } => n_count(d as u32, l),
            Ambient::Box { d, l } => u64::from(l + 1).pow(d as u32),
            Ambient::Shell { d, m } => lambda_count(m, d as u32)
                .try_into()
                .expect("shell size overflows u64"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexSet {
    pub ambient: Ambient,
    pub members: BTreeSet<MultiIndex>,
}

impl IndexSet {
    pub fn new(
        ambient: Ambient,
        members: impl IntoIterator<Item = MultiIndex>,
    ) -> Result<Self, LatticeError> {
        let members: BTreeSet<MultiIndex> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|a| !ambient.contains(a)) {
            return Err(LatticeError::OutsideAmbient {
                point: bad.clone(),
                ambient,
            });
        }
        Ok(IndexSet { ambient, members })
    }

    pub fn empty(ambient: Ambient) -> Self {
        IndexSet {
            ambient,
            members: BTreeSet::new(),
        }
    }

    pub fn full(ambient: Ambient) -> Self {
        IndexSet {
            ambient,
            members: ambient.points().into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: &MultiIndex) -> bool {
        self.members.contains(a)
    }

    pub fn is_full(&self) -> bool {
        self.members.len() as u64 == self.ambient.size()
    }

    /// Members in canonical graded order.
    pub fn sorted(&self) -> Vec<MultiIndex> {
        self.ambient
            .points()
            .into_iter()
            .filter(|a| self.members.contains(a))
            .collect()
    }
}

fn dominated(members: &BTreeSet<MultiIndex>, a: &MultiIndex) -> bool {
    members.iter().any(|b| b.le(a))
}

/// Points of the level-`target` simplex or box dominating some member of `t`.
pub fn positive_extension(t: &IndexSet, target: u32) -> Result<IndexSet, LatticeError> {
    let ambient = match t.ambient {
        Ambient::Simplex { d, l } | Ambient::Box { d, l } if target < l => {
            return Err(LatticeError::InvalidArgument(format!(
                "target level {target} below source level {l} (d={d})"
            )))
        }
        Ambient::Simplex { d, .. } => Ambient::Simplex { d, l: target },
        Ambient::Box { d, .. } => Ambient::Box { d, l: target },
        shell @ Ambient::Shell { .. } => return Err(LatticeError::WrongAmbient(shell)),
    };
    let members = ambient
        .points()
        .into_iter()
        .filter(|a| dominated(&t.members, a))
        .collect();
    Ok(IndexSet { ambient, members })
}

/// The `|b| = m` slice of the upward closure of `b`.
pub fn layer(b: &IndexSet, m: u32) -> Result<IndexSet, LatticeError> {
    if m == 0 {
        return Err(LatticeError::InvalidArgument(
            "layer index must be >= 1".into(),
        ));
    }
    let ambient = Ambient::Shell {
        d: b.ambient.dim(),
        m,
    };
    let members = ambient
        .points()
        .into_iter()
        .filter(|a| dominated(&b.members, a))
        .collect();
    Ok(IndexSet { ambient, members })
}

/// `{b in V_{m-1} : b + e_i in T for every i}`.
pub fn predecessor(t: &IndexSet) -> Result<IndexSet, LatticeError> {
    let Ambient::Shell { d, m } = t.ambient else {
        return Err(LatticeError::WrongAmbient(t.ambient));
    };
    if m <= 1 {
        return Err(LatticeError::InvalidArgument(format!(
            "predecessor needs m > 1, got {m}"
        )));
    }
    let ambient = Ambient::Shell { d, m: m - 1 };
    let members = ambient
        .points()
        .into_iter()
        .filter(|b| (0..d).all(|i| t.contains(&b.bump(i))))
        .collect();
    Ok(IndexSet { ambient, members })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub size: usize,
    pub pred: usize,
    #[serde(with = "rat::serde_str")]
    pub bound: Rat,
    pub equality: bool,
}

/// `|T-| <= |V_{m-1}|/|V_m| * |T|`, strict unless `T` is empty or full.
pub fn check_predecessor_contraction(t: &IndexSet) -> Result<ContractionReport, LatticeError> {
    let pred = predecessor(t)?;
    let Ambient::Shell { d, m } = t.ambient else {
        unreachable!("predecessor checked the ambient")
    };
    let (vm, vm1) = (lambda_count(m, d as u32), lambda_count(m - 1, d as u32));
    let lhs = BigUint::from(pred.len()) * &vm;
    let rhs = BigUint::from(t.len()) * &vm1;
    let trivial = t.is_empty() || t.is_full();
    let ok = if trivial { lhs == rhs } else { lhs < rhs };
    if !ok {
        return Err(LatticeError::ContractionViolated {
            set: t.sorted(),
            pred: pred.len(),
            size: t.len(),
        });
    }
    Ok(ContractionReport {
        size: t.len(),
        pred: pred.len(),
        bound: Rat::new((BigUint::from(t.len()) * vm1).into(), vm.into()),
        equality: trivial,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub checked: u64,
    pub equality_cases: u64,
}

/// Runs the predecessor contraction over every `T ⊆ V_m` in `d` coordinates.
pub fn sweep_predecessor_contraction(
    d: usize,
    m: u32,
    limit: u32,
) -> Result<SweepReport, LatticeError> {
    if m <= 1 {
        return Err(LatticeError::InvalidArgument(format!(
            "need m > 1, got {m}"
        )));
    }
    let top = shell_points(d, m);
    let below = shell_points(d, m - 1);
    guard("predecessor sweep", top.len() as u64, u64::from(limit))?;
    let pos = |a: &MultiIndex| {
        top.iter()
            .position(|b| b == a)
            .expect("bump stays in shell")
    };
    let need: Vec<u64> = below
        .iter()
        .map(|b| (0..d).fold(0u64, |acc, i| acc | 1 << pos(&b.bump(i))))
        .collect();
    let n = top.len();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let (vm, vm1) = (top.len() as u64, below.len() as u64);
    let bad = (0..=full).into_par_iter().find_any(|&mask| {
        let pred = need.iter().filter(|&&nd| mask & nd == nd).count() as u64;
        let size = u64::from(mask.count_ones());
        let (lhs, rhs) = (pred * vm, size * vm1);
        if mask == 0 || mask == full {
            lhs != rhs
        } else {
            lhs >= rhs
        }
    });
    if let Some(mask) = bad {
        let set: Vec<MultiIndex> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| top[i].clone())
            .collect();
        let pred = need.iter().filter(|&&nd| mask & nd == nd).count();
        return Err(LatticeError::ContractionViolated {
            size: set.len(),
            set,
            pred,
        });
    }
    Ok(SweepReport {
        checked: full + 1,
        equality_cases: 2,
    })
}

fn guard(what: &str, size: u64, limit: u64) -> Result<(), LatticeError> {
    if size > limit {
        return Err(LatticeError::TooLarge {
            what: what.into(),
            size,
            limit,
        });
    }
    Ok(())
}

/// `|{a in Z_{>=0}^d : |a| = q}| = C(q+d-1, d-1)`.
pub fn lambda_count(q: u32, d: u32) -> BigUint {
    assert!(d >= 1, "lambda_count needs d >= 1");
    binomial(u64::from(q) + u64::from(d) - 1, u64::from(d) - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub d: u32,
    pub qmax: u32,
    /// `S_q / S_{q+1}` for `q = 0..=qmax+1`, where `S_q = Σ_{j<=q} Λ_j`.
    #[serde(with = "rat::serde_vec")]
    pub ratios: Vec<Rat>,
}

/// Checks `S_q/Λ_{q+1} < S_{q+1}/Λ_{q+2}` and the equivalent
/// `S_q/S_{q+1} < S_{q+1}/S_{q+2}` for `q <= qmax`.
pub fn check_convexity(d: u32, qmax: u32) -> Result<ConvexityReport, LatticeError> {
    if d == 0 {
        return Err(LatticeError::InvalidArgument("d must be >= 1".into()));
    }
    let lam: Vec<Rat> = (0..=qmax + 3)
        .map(|q| Rat::from_integer(lambda_count(q, d).into()))
        .collect();
    let mut s = Vec::with_capacity(lam.len());
    let mut acc = Rat::zero();
    for l in &lam {
        acc += l;
        s.push(acc.clone());
    }
    let ratios: Vec<Rat> = (0..=qmax as usize + 1).map(|q| &s[q] / &s[q + 1]).collect();
    for q in 0..=qmax as usize {
        let first = &s[q] / &lam[q + 1] < &s[q + 1] / &lam[q + 2];
        let second = ratios[q] < ratios[q + 1];
        if !(first && second) {
            return Err(LatticeError::ConvexityViolated { d, q: q as u32 });
        }
    }
    Ok(ConvexityReport { d, qmax, ratios })
}

/// Fixed-width bit set used by the subset sweeps.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn or(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Upward-closure masks of each point of `src` inside `dst`.
fn up_masks(src: &[MultiIndex], dst: &[MultiIndex]) -> Vec<Bits> {
    src.iter()
        .map(|a| {
            let mut b = Bits::new(dst.len());
            for (i, x) in dst.iter().enumerate() {
                if a.le(x) {
                    b.set(i);
                }
            }
            b
        })
        .collect()
}

/// Guard on the subset-sweep exponent.
pub const SUBSET_GUARD: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FracReport {
    pub d: u32,
    pub l: u32,
    pub k: u32,
    pub checked: u64,
    pub equality_cases: u64,
}

/// Over every nonempty `B ⊆ S_l`: `|B_l+| n_d(k) < n_d(l) |B_k+|` unless
/// `B_l+ = S_l`, where the two ratios must agree.
pub fn check_frac_inequality(d: u32, l: u32, k: u32) -> Result<FracReport, LatticeError> {
    if !(1 <= l && l < k) || d == 0 {
        return Err(LatticeError::InvalidArgument(format!(
            "need d >= 1 and 1 <= l < k, got d={d}, l={l}, k={k}"
        )));
    }
    let small = Ambient::Simplex { d: d as usize, l }.points();
    let large = Ambient::Simplex {
        d: d as usize,
        l: k,
    }
    .points();
    guard(
        "subsets of S_l",
        small.len() as u64,
        u64::from(SUBSET_GUARD),
    )?;
    let up_l = up_masks(&small, &small);
    let up_k = up_masks(&small, &large);
    let (nl, nk) = (small.len() as u64, large.len() as u64);
    let n = small.len();
    // split on the first few elements, depth-first on the rest
    let split = n.min(6);
    let results: Vec<Result<u64, u64>> = (0u64..1 << split)
        .into_par_iter()
        .map(|prefix| {
            let mut cl = Bits::new(n);
            let mut ck = Bits::new(large.len());
            for i in 0..split {
                if prefix >> i & 1 == 1 {
                    cl = cl.or(&up_l[i]);
                    ck = ck.or(&up_k[i]);
                }
            }
            let mut eq = 0;
            frac_dfs(
                split,
                prefix,
                prefix != 0,
                &cl,
                &ck,
                &up_l,
                &up_k,
                nl,
                nk,
                &mut eq,
            )?;
            Ok(eq)
        })
        .collect();
    let mut equality_cases = 0;
    for r in results {
        match r {
            Ok(eq) => equality_cases += eq,
            Err(mask) => {
                let set: Vec<MultiIndex> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| small[i].clone())
                    .collect();
                let b = IndexSet::new(Ambient::Simplex { d: d as usize, l }, set.clone())?;
                return Err(LatticeError::InequalityViolated {
                    set,
                    small: positive_extension(&b, l)?.len(),
                    large: positive_extension(&b, k)?.len(),
                });
            }
        }
    }
    Ok(FracReport {
        d,
        l,
        k,
        checked: (1u64 << n) - 1,
        equality_cases,
    })
}

#[allow(clippy::too_many_arguments)]
fn frac_dfs(
    i: usize,
    mask: u64,
    nonempty: bool,
    cl: &Bits,
    ck: &Bits,
    up_l: &[Bits],
    up_k: &[Bits],
    nl: u64,
    nk: u64,
    eq: &mut u64,
) -> Result<(), u64> {
    if i == up_l.len() {
        if !nonempty {
            return Ok(());
        }
        let (sl, sk) = (cl.count() as u64, ck.count() as u64);
        let ok = if sl == nl {
            *eq += 1;
            sl * nk == nl * sk
        } else {
            sl * nk < nl * sk
        };
        return if ok { Ok(()) } else { Err(mask) };
    }
    frac_dfs(i + 1, mask, nonempty, cl, ck, up_l, up_k, nl, nk, eq)?;
    frac_dfs(
        i + 1,
        mask | 1 << i,
        true,
        &cl.or(&up_l[i]),
        &ck.or(&up_k[i]),
        up_l,
        up_k,
        nl,
        nk,
        eq,
    )
}

/// Explicit coordinate-restriction family for one `b`: `sets[i]` restricts
/// coordinate `i` and does not depend on the later coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RFamily {
    pub b: MultiIndex,
    pub sets: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharpConstruction {
    pub d: usize,
    pub k: u32,
    pub a: Vec<MultiIndex>,
    pub bound: u64,
    pub witness: Vec<RFamily>,
}

/// `A = (S_k ∪ {0}) \ B_k+` together with the family `R_{i;*;b} = {0..b_i-1}`.
pub fn sharp_a(d: usize, k: u32, b: &[MultiIndex]) -> Result<SharpConstruction, LatticeError> {
    if b.is_empty() {
        return Err(LatticeError::InvalidArgument("B must be nonempty".into()));
    }
    if let Some(bad) = b.iter().find(|x| x.dim() != d || x.norm() > k) {
        return Err(LatticeError::OutsideAmbient {
            point: bad.clone(),
            ambient: Ambient::Simplex { d, l: k },
        });
    }
    let members: BTreeSet<MultiIndex> = b.iter().cloned().collect();
    let (closure, a): (Vec<MultiIndex>, Vec<MultiIndex>) = graded_points(d, 0, k)
        .into_iter()
        .partition(|x| dominated(&members, x));
    let closure = closure.len() as u64;
    let witness = members
        .iter()
        .map(|x| RFamily {
            b: x.clone(),
            sets: x.0.iter().map(|&bi| (0..bi).collect()).collect(),
        })
        .collect();
    Ok(SharpConstruction {
        d,
        k,
        bound: n_count(d as u32, k) + 1 - closure,
        a,
        witness,
    })
}

/// Checks the restriction-family hypothesis for a [`SharpConstruction`]:
/// each `R_i ⊆ {0..k}` has size `b_i`, and whenever `a_i ∉ R_i` for all
/// `i >= 2` then `a_1 ∈ R_1`.
pub fn verify_sharp(c: &SharpConstruction) -> bool {
    let sizes_ok = c.witness.iter().all(|r| {
        r.sets.len() == c.d
            && r.sets.iter().zip(&r.b.0).all(|(s, &bi)| {
                s.len() == bi as usize
                    && s.iter().all(|&x| x <= c.k)
                    && s.iter().collect::<BTreeSet<_>>().len() == s.len()
            })
    });
    let implication_ok = c.a.iter().all(|a| {
        c.witness.iter().all(|r| {
            let escapes = (1..c.d).all(|i| !r.sets[i].contains(&a.0[i]));
            !escapes || r.sets[0].contains(&a.0[0])
        })
    });
    sizes_ok && implication_ok && c.a.len() as u64 == c.bound
}

/// Deficiency by slicewise recursion: slice `j` of the last coordinate keeps
/// the `b` with `b_d <= j`, projected to the first `d-1` coordinates.
pub fn deficiency(d: usize, k: u32, b: &[MultiIndex]) -> u64 {
    if b.is_empty() {
        return 0;
    }
    if d == 1 {
        let min = b.iter().map(|x| x.0[0]).min().expect("nonempty");
        return u64::from(k + 1).saturating_sub(u64::from(min));
    }
    (0..=k)
        .map(|j| {
            let slice: BTreeSet<MultiIndex> = b
                .iter()
                .filter(|x| x.0[d - 1] <= j)
                .map(|x| MultiIndex(x.0[..d - 1].to_vec()))
                .collect();
            let slice: Vec<MultiIndex> = slice.into_iter().collect();
            deficiency(d - 1, k, &slice)
        })
        .sum()
}

/// `|B_k^{~+}|`, the upward closure inside the box, counted directly.
pub fn box_extension_count(d: usize, k: u32, b: &[MultiIndex]) -> u64 {
    let members: BTreeSet<MultiIndex> = b.iter().cloned().collect();
    Ambient::Box { d, l: k }
        .points()
        .iter()
        .filter(|a| dominated(&members, a))
        .count() as u64
}

/// Recursion versus direct count over every `B ⊆ C_k`.
pub fn sweep_deficiency(d: usize, k: u32) -> Result<SweepReport, LatticeError> {
    let pts = Ambient::Box { d, l: k }.points();
    guard("subsets of C_k", pts.len() as u64, u64::from(SUBSET_GUARD))?;
    let n = pts.len();
    let bad = (0u64..1 << n).into_par_iter().find_map_any(|mask| {
        let set: Vec<MultiIndex> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| pts[i].clone())
            .collect();
        let (r, direct) = (deficiency(d, k, &set), box_extension_count(d, k, &set));
        (r != direct).then_some((set, r, direct))
    });
    if let Some((set, recursion, direct)) = bad {
        return Err(LatticeError::DeficiencyMismatch {
            set,
            recursion,
            direct,
        });
    }
    Ok(SweepReport {
        checked: 1 << n,
        equality_cases: 1 << n,
    })
}
