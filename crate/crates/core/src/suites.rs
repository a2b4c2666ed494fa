//! Check suites over parameter grids, shared by the command line and the
//! acceptance tests. Each suite returns one [`CheckReport`] per named check.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::blrank::{self, BlError, Certification};
use crate::counting::{self, CountConfig, CountError};
use crate::exponents::{self, n_count};
use crate::iteration::{self, IdentityCheck};
use crate::lattice::{self, mi, Ambient, IndexSet, LatticeError};
use crate::multiplicity::{self, CellRule, CubeCollection, Polynomial};
use crate::rat::{self, Rat};
use crate::report::{timed, CheckReport, Status};

/// Failures listed per aggregated check before truncation.
const MAX_LISTED: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Largest enumeration (subsets, tuples or table entries) a check may run.
    pub budget: u64,
    pub seed: u64,
    pub threads: usize,
}

pub const TINY_BUDGET: u64 = 1 << 8;
pub const DEFAULT_BUDGET: u64 = 1 << 24;

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            budget: DEFAULT_BUDGET,
            seed: 0,
            threads: 1,
        }
    }
}

impl SuiteConfig {
    fn count_config(&self) -> CountConfig {
        CountConfig {
            threads: self.threads,
            table_limit: self.budget,
        }
    }
}

fn pow2(bits: u64) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        1 << bits
    }
}

/// `p_i = t + i (2 p_d(k) - t) / n` for `i = 1..=n`, with `t = 2 n_d(k) / d`.
pub fn regime_grid(d: u32, k: u32, n: u32) -> Vec<Rat> {
    let t = exponents::regime_threshold(d, k);
    let span = rat::int(2) * exponents::p_crit(d, k) - &t;
    (1..=n)
        .map(|i| &t + &span * rat::rat(i64::from(i), i64::from(n)))
        .collect()
}

/// `n >= 2` equally spaced points of `[2, 2 n_d(k) / d]`, endpoints included.
pub fn small_p_grid(d: u32, k: u32, n: u32) -> Vec<Rat> {
    let t = exponents::regime_threshold(d, k);
    let two = rat::int(2);
    let step = (&t - &two) / rat::int(i64::from(n.max(2) - 1));
    (0..n.max(2))
        .map(|i| &two + &step * rat::int(i64::from(i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentRanges {
    pub kappa_kmax: u32,
    pub pcrit_dmax: u32,
    pub tie_dmax: u32,
    pub tie_kmax: u32,
    pub collapse_dmax: u32,
    pub collapse_kmax: u32,
    pub grid: u32,
}

impl Default for ExponentRanges {
    fn default() -> Self {
        ExponentRanges {
            kappa_kmax: 20,
            pcrit_dmax: 10,
            tie_dmax: 8,
            tie_kmax: 10,
            collapse_dmax: 6,
            collapse_kmax: 8,
            grid: 10,
        }
    }
}

impl ExponentRanges {
    pub fn uniform(dmax: u32, kmax: u32, grid: u32) -> Self {
        ExponentRanges {
            kappa_kmax: kmax,
            pcrit_dmax: dmax,
            tie_dmax: dmax,
            tie_kmax: kmax,
            collapse_dmax: dmax,
            collapse_kmax: kmax,
            grid,
        }
    }
}

fn listed(failures: Vec<Value>, checked: usize) -> Value {
    let total = failures.len();
    json!({
        "checked": checked,
        "failures": total,
        "listed": failures.into_iter().take(MAX_LISTED).collect::<Vec<_>>(),
    })
}

fn from_failures(name: &str, failures: Vec<Value>, checked: usize) -> CheckReport {
    CheckReport::from_bool(name, failures.is_empty(), listed(failures, checked))
}

pub fn exponent_suite(r: &ExponentRanges) -> Vec<CheckReport> {
    let mut out = Vec::new();
    out.push(timed(|| {
        let bad: Vec<Value> = (2..=r.kappa_kmax.max(2))
            .filter_map(|k| {
                let got = exponents::kappa(1, k);
                let want = rat::int(i64::from(k * (k + 1) / 2));
                (got != want).then(|| json!({"k": k, "kappa": rat::to_string(&got)}))
            })
            .collect();
        from_failures(
            "kappa_1k_triangular",
            bad,
            r.kappa_kmax.saturating_sub(1) as usize,
        )
    }));
    out.push(timed(|| {
        let bad: Vec<Value> = (1..=r.pcrit_dmax)
            .filter_map(|d| {
                let got = exponents::p_crit(d, 1);
                (got != rat::int(2)).then(|| json!({"d": d, "p_crit": rat::to_string(&got)}))
            })
            .collect();
        from_failures("p_crit_first_index", bad, r.pcrit_dmax as usize)
    }));
    out.push(timed(|| {
        let mut bad = Vec::new();
        let mut checked = 0;
        for d in 1..=r.tie_dmax {
            for k in 2..=r.tie_kmax {
                checked += 1;
                let res = exponents::critical_tie_residual(d, k);
                if !res.is_zero() {
                    bad.push(json!({"d": d, "k": k, "residual": rat::to_string(&res)}));
                }
            }
        }
        from_failures("critical_branch_tie", bad, checked)
    }));
    out.push(timed(|| {
        let mut bad = Vec::new();
        let mut checked = 0;
        for d in 2..=r.collapse_dmax {
            for k in 2..=r.collapse_kmax {
                for p in small_p_grid(d, k, r.grid) {
                    checked += 1;
                    let vol = rat::int(i64::from(d)) * (rat::rat(1, 2) - p.recip());
                    let lhs = exponents::gamma_exp(d - 1, k, &p).max(vol);
                    let rhs = exponents::gamma_exp(d, k, &p);
                    if lhs != rhs {
                        bad.push(json!({
                            "d": d, "k": k, "p": rat::to_string(&p),
                            "collapsed": rat::to_string(&lhs), "gamma": rat::to_string(&rhs),
                        }));
                    }
                }
            }
        }
        from_failures("small_p_collapse", bad, checked)
    }));
    out
}

fn identity_case(d: u32, k: u32, p: &Rat) -> Result<Vec<IdentityCheck>, Value> {
    iteration::verify_identities(d, k, p)
        .map_err(|e| json!({"d": d, "k": k, "p": rat::to_string(p), "error": e.to_string()}))
}

/// Every iteration identity over `d <= dmax`, `2 <= k <= kmax` and `pgrid`
/// points of [`regime_grid`], aggregated per identity.
pub fn identity_suite(dmax: u32, kmax: u32, pgrid: u32) -> Vec<CheckReport> {
    let mut out = Vec::new();
    let start = std::time::Instant::now();
    let cases: Vec<(u32, u32, Rat)> = (1..=dmax)
        .flat_map(|d| {
            (2..=kmax)
                .flat_map(move |k| regime_grid(d, k, pgrid).into_iter().map(move |p| (d, k, p)))
        })
        .collect();
    let results: Vec<Result<Vec<IdentityCheck>, Value>> = cases
        .par_iter()
        .map(|(d, k, p)| identity_case(*d, *k, p))
        .collect();
    let mut by_name: BTreeMap<String, (usize, Vec<Value>)> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut errors = Vec::new();
    for ((d, k, p), res) in cases.iter().zip(results) {
        match res {
            Ok(checks) => {
                for c in checks {
                    if !by_name.contains_key(&c.name) {
                        order.push(c.name.clone());
                    }
                    let slot = by_name.entry(c.name.clone()).or_default();
                    slot.0 += 1;
                    if !c.passed {
                        slot.1.push(
                            json!({"d": d, "k": k, "p": rat::to_string(p), "witness": c.witness}),
                        );
                    }
                }
            }
            Err(e) => errors.push(e),
        }
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    for name in order {
        let (checked, bad) = by_name.remove(&name).expect("recorded");
        let mut r = from_failures(&name, bad, checked);
        r.wall_ms = elapsed;
        out.push(r);
    }
    out.push(from_failures("identity_preconditions", errors, cases.len()));
    out.push(timed(|| {
        let p = rat::int(6);
        match iteration::verify_lambda_bound(1, 2, &p) {
            Ok(b) => {
                let want = rat::rat(1, 6);
                let ok = b.lambda0 == want && &b.gamma * &b.w1_dp == want;
                CheckReport::from_bool("lambda0_spot_value", ok, json!(b))
            }
            Err(e) => CheckReport::fail("lambda0_spot_value", json!({"error": e.to_string()})),
        }
    }));
    out
}

fn lattice_result<T>(
    name: &str,
    r: Result<T, LatticeError>,
    ok: impl FnOnce(T) -> Value,
) -> CheckReport {
    match r {
        Ok(v) => CheckReport::pass(name, ok(v)),
        Err(LatticeError::TooLarge { size, limit, .. }) => CheckReport::guarded(name, size, limit),
        Err(e) => CheckReport::fail(
            name,
            json!({"error": e.to_string(), "detail": format!("{e:?}")}),
        ),
    }
}

fn diagram_checks() -> Result<Value, Value> {
    let t = |ambient| IndexSet::new(ambient, [mi(&[1, 1]), mi(&[3, 0])]).expect("in range");
    let err = |e: LatticeError| json!({"error": e.to_string()});
    let s4 = lattice::positive_extension(&t(Ambient::Simplex { d: 2, l: 3 }), 4).map_err(err)?;
    let c4 = lattice::positive_extension(&t(Ambient::Box { d: 2, l: 3 }), 4).map_err(err)?;
    let sharp = lattice::sharp_a(2, 4, &[mi(&[1, 1]), mi(&[3, 0])]).map_err(err)?;
    let v4 = IndexSet::new(
        Ambient::Shell { d: 2, m: 4 },
        [mi(&[4, 0]), mi(&[3, 1]), mi(&[2, 2]), mi(&[0, 4])],
    )
    .map_err(err)?;
    let pred = lattice::predecessor(&v4).map_err(err)?.sorted();
    let mut layered = 0;
    for m in 1..=4 {
        layered += lattice::layer(&t(Ambient::Simplex { d: 2, l: 3 }), m)
            .map_err(err)?
            .len();
    }
    let witness = json!({
        "simplex_extension": s4.len(),
        "box_extension": c4.len(),
        "sharp_a": sharp.a.len(),
        "sharp_verified": lattice::verify_sharp(&sharp),
        "predecessor": pred,
        "layer_union": layered,
    });
    let ok = s4.len() == 8
        && c4.len() == 18
        && sharp.a.len() == 7
        && lattice::verify_sharp(&sharp)
        && pred == vec![mi(&[3, 0]), mi(&[2, 1])]
        && layered == 8;
    if ok {
        Ok(witness)
    } else {
        Err(witness)
    }
}

/// Diagram regressions, predecessor contraction and shell-count convexity.
pub fn extension_suite(
    contraction_dmax: usize,
    mmax: u32,
    convex_dmax: u32,
    qmax: u32,
    cfg: &SuiteConfig,
) -> Vec<CheckReport> {
    let mut out = vec![timed(|| match diagram_checks() {
        Ok(w) => CheckReport::pass("diagram_regressions", w),
        Err(w) => CheckReport::fail("diagram_regressions", w),
    })];
    for d in 1..=contraction_dmax {
        for m in 2..=mmax {
            let name = format!("predecessor_contraction d={d} m={m}");
            out.push(timed(|| {
                let size = lattice::lambda_count(m, d as u32);
                let bits = u64::try_from(size).unwrap_or(u64::MAX);
                if pow2(bits) > cfg.budget {
                    return CheckReport::guarded(name.clone(), pow2(bits), cfg.budget);
                }
                lattice_result(
                    &name,
                    lattice::sweep_predecessor_contraction(d, m, 63),
                    |r| json!(r),
                )
            }));
        }
    }
    for d in 1..=convex_dmax {
        let name = format!("lambda_convexity d={d}");
        out.push(timed(|| {
            lattice_result(&name, lattice::check_convexity(d, qmax), |r| json!(r))
        }));
    }
    out
}

pub const FRAC_CASES: [(u32, u32, u32); 7] = [
    (2, 1, 2),
    (2, 1, 3),
    (2, 2, 3),
    (2, 2, 4),
    (2, 3, 4),
    (3, 1, 2),
    (3, 1, 3),
];

pub fn frac_suite(cases: &[(u32, u32, u32)], cfg: &SuiteConfig) -> Vec<CheckReport> {
    cases
        .iter()
        .map(|&(d, l, k)| {
            let name = format!("frac_inequality d={d} l={l} k={k}");
            timed(|| {
                let size = pow2(n_count(d, l));
                if size > cfg.budget {
                    return CheckReport::guarded(name.clone(), size, cfg.budget);
                }
                lattice_result(&name, lattice::check_frac_inequality(d, l, k), |r| json!(r))
            })
        })
        .collect()
}

pub fn deficiency_suite(dmax: usize, kmax: u32, cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for d in 1..=dmax {
        for k in 1..=kmax {
            let name = format!("deficiency d={d} k={k}");
            out.push(timed(|| {
                let size = pow2(u64::from(k + 1).pow(d as u32));
                if size > cfg.budget {
                    return CheckReport::guarded(name.clone(), size, cfg.budget);
                }
                lattice_result(&name, lattice::sweep_deficiency(d, k), |r| json!(r))
            }));
        }
    }
    out
}

fn split_check(name: &str, c: &CubeCollection, max_parts: Option<usize>) -> CheckReport {
    match multiplicity::greedy_split(c) {
        Ok(parts) => {
            let m = multiplicity::multiplicity(c).ok();
            let ok = multiplicity::verify_split(c, &parts)
                && max_parts.is_none_or(|mx| parts.len() <= mx);
            CheckReport::from_bool(
                name,
                ok,
                json!({"cells": c.len(), "multiplicity": m, "parts": parts.len(), "max_parts": max_parts}),
            )
        }
        Err(e) => CheckReport::fail(name, json!({"error": e.to_string()})),
    }
}

pub fn multiplicity_suite() -> Vec<CheckReport> {
    let mut out = Vec::new();
    out.push(timed(|| {
        let c = CubeCollection::new(2, 4, [vec![0, 0], vec![0, 1], vec![0, 2]]).expect("in grid");
        match multiplicity::multiplicity(&c) {
            Ok(m) => CheckReport::from_bool(
                "column_multiplicity",
                m.per_axis == vec![1, 3] && m.overall == 1,
                json!(m),
            ),
            Err(e) => CheckReport::fail("column_multiplicity", json!({"error": e.to_string()})),
        }
    }));
    for (d, z) in [(2usize, 5u32), (3, 4)] {
        out.push(timed(|| {
            split_check(
                &format!("full_grid_split d={d} z={z}"),
                &CubeCollection::full(d, z),
                Some(z as usize),
            )
        }));
    }
    let parabola = Polynomial::new(1, vec![(rat::int(1), vec![2])]).expect("one variable");
    let cubic = Polynomial::new(
        1,
        vec![(rat::rat(1, 2), vec![3]), (rat::rat(1, 2), vec![1])],
    )
    .expect("one variable");
    let bowl = Polynomial::new(
        2,
        vec![(rat::rat(1, 2), vec![2, 0]), (rat::rat(1, 2), vec![0, 2])],
    )
    .expect("two variables");
    for rule in [CellRule::Samples, CellRule::Span] {
        out.push(timed(|| {
            match multiplicity::polynomial_graph(&parabola, 10, 9, rule) {
                Ok(c) => split_check(&format!("parabola_split {rule:?}"), &c, Some(3)),
                Err(e) => CheckReport::fail(
                    format!("parabola_split {rule:?}"),
                    json!({"error": e.to_string()}),
                ),
            }
        }));
        out.push(timed(|| {
            match multiplicity::polynomial_graph(&cubic, 16, 9, rule) {
                Ok(c) => split_check(&format!("cubic_split {rule:?}"), &c, None),
                Err(e) => CheckReport::fail(
                    format!("cubic_split {rule:?}"),
                    json!({"error": e.to_string()}),
                ),
            }
        }));
        out.push(timed(|| {
            match multiplicity::polynomial_graph(&bowl, 6, 5, rule) {
                Ok(c) => split_check(&format!("paraboloid_split {rule:?}"), &c, None),
                Err(e) => CheckReport::fail(
                    format!("paraboloid_split {rule:?}"),
                    json!({"error": e.to_string()}),
                ),
            }
        }));
    }
    out
}

/// `(d, k, l)` for `d = 2`, `k in {2,3,4}`, `l < k`.
pub fn bl_sweep_cases() -> Vec<(usize, u32, u32)> {
    (2..=4)
        .flat_map(|k| (1..k).map(move |l| (2, k, l)))
        .collect()
}

pub fn bl_sweep_suite(cases: &[(usize, u32, u32)], cfg: &SuiteConfig) -> Vec<CheckReport> {
    cases
        .iter()
        .map(|&(d, k, l)| {
            let name = format!("monomial_rank_sweep d={d} k={k} l={l}");
            timed(|| {
                let size = pow2(n_count(d as u32, k));
                if size > cfg.budget {
                    return CheckReport::guarded(name.clone(), size, cfg.budget);
                }
                match blrank::monomial_rank_sweep(d, k, l) {
                    Ok(r) => CheckReport::pass(name.clone(), json!(r)),
                    Err(BlError::TooLarge { size, limit, .. }) => {
                        CheckReport::guarded(name.clone(), size, limit)
                    }
                    Err(e) => CheckReport::fail(
                        name.clone(),
                        json!({"error": e.to_string(), "detail": format!("{e:?}")}),
                    ),
                }
            })
        })
        .collect()
}

/// `count` seeded random subspaces per `(d, k, l)` with `d <= dmax`,
/// `2 <= k <= kmax`, `l < k`; dimensions cycle through `1..n_d(k)`.
pub fn bl_random_suite(
    dmax: usize,
    kmax: u32,
    count: u32,
    trials: u32,
    cfg: &SuiteConfig,
) -> Vec<CheckReport> {
    let cases: Vec<(usize, u32, u32)> = (1..=dmax)
        .flat_map(|d| (2..=kmax).flat_map(move |k| (1..k).map(move |l| (d, k, l))))
        .collect();
    cases
        .par_iter()
        .enumerate()
        .map(|(case, &(d, k, l))| {
            let name = format!("certify_rank d={d} k={k} l={l}");
            timed(|| {
                let n = n_count(d as u32, k) as usize;
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(case as u64);
                let mut bad = Vec::new();
                let mut degenerate = 0;
                let mut trials_used = 0u64;
                for i in 0..count {
                    let h = 1 + i as usize % (n - 1);
                    let v = blrank::random_subspace(&mut rng, n, h);
                    let point_seed: u64 = rng.gen();
                    match blrank::certify_rank(&v, d, k, l, trials, point_seed) {
                        Ok(Certification::Certified(c)) => {
                            trials_used += u64::from(c.trial) + 1;
                            if !blrank::verify_certificate(&v, d, k, l, &c) {
                                bad.push(json!({"index": i, "h": h, "subspace": v, "certificate": c}));
                            }
                        }
                        Ok(Certification::Degenerate { .. }) => degenerate += 1,
                        Err(e) => bad.push(json!({
                            "index": i, "h": h, "point_seed": point_seed, "subspace": v, "error": e.to_string(),
                        })),
                    }
                }
                let mut r = from_failures(&name, bad, count as usize);
                r.witness["degenerate"] = json!(degenerate);
                r.witness["points_tried"] = json!(trials_used);
                if r.status == Status::Pass && degenerate == count {
                    r.status = Status::Degenerate;
                }
                r
            })
        })
        .collect()
}

fn count_result<T>(
    name: &str,
    r: Result<T, CountError>,
    ok: impl FnOnce(T) -> CheckReport,
) -> CheckReport {
    match r {
        Ok(v) => ok(v),
        Err(CountError::ResourceGuard { estimate, limit }) => {
            CheckReport::guarded(name, estimate, limit)
        }
        Err(CountError::TooLarge { tuples, limit }) => CheckReport::guarded(name, tuples, limit),
        Err(e) => CheckReport::fail(name, json!({"error": e.to_string()})),
    }
}

fn brute_size(s: u32, d: usize, n: u64) -> u64 {
    n.checked_pow(2 * s * d as u32).unwrap_or(u64::MAX)
}

/// Oracle agreement, closed forms, the diagonal lower bound and worker-count
/// independence.
pub fn counting_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let cc = cfg.count_config();
    let mut out = Vec::new();
    let mut below = Vec::new();
    let mut tested = 0usize;
    let mut note = |s: u32, d: usize, n: u64, j: &BigUint| {
        tested += 1;
        if *j < counting::diagonal_count(s, d, n) {
            below.push(json!({"s": s, "d": d, "n": n, "j": j.to_string()}));
        }
    };

    let start = std::time::Instant::now();
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut guarded = 0;
    for s in 1..=2 {
        for d in 1..=2usize {
            for k in 1..=3 {
                for n in 1..=6 {
                    if brute_size(s, d, n) > cfg.budget {
                        guarded += 1;
                        continue;
                    }
                    checked += 1;
                    match (
                        counting::j_count(s, d, k, n, cc),
                        counting::j_brute(s, d, k, n),
                    ) {
                        (Ok(j), Ok(b)) => {
                            note(s, d, n, &j);
                            if j != BigUint::from(b) {
                                bad.push(json!({"s": s, "d": d, "k": k, "n": n, "count": j.to_string(), "brute": b}));
                            }
                        }
                        (a, b) => {
                            if matches!(a, Err(CountError::ResourceGuard { .. }))
                                || matches!(b, Err(CountError::TooLarge { .. }))
                            {
                                guarded += 1;
                                checked -= 1;
                            } else {
                                bad.push(json!({"s": s, "d": d, "k": k, "n": n, "count": format!("{a:?}"), "brute": format!("{b:?}")}));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut r = from_failures("count_matches_brute", bad, checked);
    r.witness["guarded"] = json!(guarded);
    if guarded > 0 && checked == 0 {
        r.status = Status::Guarded;
    }
    r.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    out.push(r);

    out.push(timed(|| {
        let mut bad = Vec::new();
        for n in 1..=60u64 {
            match counting::j_count(2, 1, 2, n, cc) {
                Ok(j) => {
                    note(2, 1, n, &j);
                    if j != BigUint::from(2 * n * n - n) {
                        bad.push(json!({"n": n, "j": j.to_string(), "expected": 2 * n * n - n}));
                    }
                }
                Err(CountError::ResourceGuard { estimate, limit }) => {
                    return CheckReport::guarded("quadratic_closed_form", estimate, limit)
                }
                Err(e) => bad.push(json!({"n": n, "error": e.to_string()})),
            }
        }
        from_failures("quadratic_closed_form", bad, 60)
    }));

    out.push(timed(|| {
        let mut bad = Vec::new();
        let mut checked = 0;
        for d in 1..=3usize {
            for k in [1u32, 2, 3] {
                for n in 1..=20u64 {
                    let want = BigUint::from(n).pow(d as u32);
                    match counting::j_count(1, d, k, n, cc) {
                        Ok(j) => {
                            checked += 1;
                            note(1, d, n, &j);
                            if j != want {
                                bad.push(json!({"d": d, "k": k, "n": n, "j": j.to_string()}));
                            }
                        }
                        Err(CountError::ResourceGuard { estimate, limit }) => {
                            return CheckReport::guarded("single_summand_diagonal", estimate, limit)
                        }
                        Err(e) => bad.push(json!({"d": d, "k": k, "n": n, "error": e.to_string()})),
                    }
                }
            }
        }
        from_failures("single_summand_diagonal", bad, checked)
    }));

    for (s, d, k, n) in [
        (2u32, 2usize, 2u32, 6u64),
        (3, 1, 2, 12),
        (2, 1, 3, 20),
        (2, 3, 2, 3),
    ] {
        let name = format!("thread_independence s={s} d={d} k={k} n={n}");
        out.push(timed(|| {
            let one = counting::representation_table(s, d, k, n, CountConfig { threads: 1, ..cc });
            count_result(&name, one, |one| {
                let four =
                    counting::representation_table(s, d, k, n, CountConfig { threads: 4, ..cc });
                count_result(&name, four, |four| {
                    let j = one.sum_of_squares();
                    let mass_ok = one.mass() == counting::diagonal_count(s, d, n);
                    CheckReport::from_bool(
                        name.clone(),
                        one == four && mass_ok,
                        json!({"j": j.to_string(), "keys": one.entries.len(), "mass_ok": mass_ok}),
                    )
                })
            })
        }));
    }

    let below_ok = below.is_empty();
    out.push(CheckReport::from_bool(
        "diagonal_lower_bound",
        below_ok,
        listed(below, tested),
    ));
    out
}

/// Dyadic growth of `J` against the lower-bound exponent; informational, so
/// only the diagonal bound can fail.
pub fn growth_suite(cases: &[(u32, usize, u32, u64)], cfg: &SuiteConfig) -> Vec<CheckReport> {
    cases
        .iter()
        .map(|&(s, d, k, nmax)| {
            let name = format!("growth s={s} d={d} k={k} nmax={nmax}");
            timed(|| {
                count_result(&name, counting::growth_report(s, d, k, nmax, cfg.count_config()), |rep| {
                    let ell = rep.lower_exponent.to_f64().unwrap_or(f64::NAN);
                    let last = rep.rows.last().and_then(|r| r.slope);
                    CheckReport::pass(
                        name.clone(),
                        json!({"report": rep, "last_slope": last, "last_gap": last.map(|x| x - ell)}),
                    )
                })
            })
        })
        .collect()
}

pub const GROWTH_CASES: [(u32, usize, u32, u64); 2] = [(2, 1, 2, 64), (3, 1, 2, 32)];

/// Every suite at the given scale; `dmax`/`kmax` bound the exponent and
/// iteration grids.
pub fn run_all(dmax: u32, kmax: u32, pgrid: u32, cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut out = exponent_suite(&ExponentRanges::uniform(dmax, kmax, pgrid));
    out.extend(identity_suite(dmax, kmax, pgrid));
    out.extend(extension_suite(3, 4, 5, 12, cfg));
    out.extend(frac_suite(&FRAC_CASES, cfg));
    out.extend(deficiency_suite(2, 3, cfg));
    out.extend(multiplicity_suite());
    out.extend(bl_sweep_suite(&bl_sweep_cases(), cfg));
    out.extend(bl_random_suite(3, 4, 100, 32, cfg));
    out.extend(counting_suite(cfg));
    out.extend(growth_suite(&GROWTH_CASES, cfg));
    out
}
