use std::collections::BTreeSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pvlab_core::blrank::{self, MonomialMap, Subspace};
use pvlab_core::counting::{self, CountConfig, CountTable};
use pvlab_core::exponents::{self, n_count};
use pvlab_core::iteration;
use pvlab_core::lattice::{self, graded_points, Ambient, IndexSet, MultiIndex};
use pvlab_core::linalg::{integer_rank, RatMatrix};
use pvlab_core::multiplicity::{self, CubeCollection};
use pvlab_core::rat::{self, Rat};

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

/// Rational in `[lo, lo + span]` with a small denominator.
fn rat_in(lo: i64, span: i64) -> impl Strategy<Value = Rat> {
    (1i64..=12, 0i64..=1000)
        .prop_map(move |(den, t)| rat::int(lo) + rat::rat(t * span * den / 1000, den))
}

fn subset_of(points: Vec<MultiIndex>) -> impl Strategy<Value = Vec<MultiIndex>> {
    let n = points.len();
    proptest::collection::vec(any::<bool>(), n).prop_map(move |mask| {
        points
            .iter()
            .zip(mask)
            .filter(|(_, keep)| *keep)
            .map(|(p, _)| p.clone())
            .collect()
    })
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn rat_text_round_trip(num in -10_000i64..10_000, den in 1i64..10_000) {
        let q = rat::rat(num, den);
        prop_assert_eq!(rat::parse(&rat::to_string(&q)).unwrap(), q);
    }

    #[test]
    fn gamma_nondecreasing_in_p(d in 1u32..=6, k in 2u32..=8, a in rat_in(2, 60), b in rat_in(2, 60)) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(exponents::gamma_exp(d, k, &lo) <= exponents::gamma_exp(d, k, &hi));
    }

    #[test]
    fn gamma_collapses_below_threshold(d in 2u32..=6, k in 2u32..=8, t in 0i64..=1000) {
        let thr = exponents::regime_threshold(d, k);
        let p = rat::int(2) + (&thr - rat::int(2)) * rat::rat(t, 1000);
        let vol = rat::int(i64::from(d)) * (rat::rat(1, 2) - p.recip());
        prop_assert_eq!(exponents::gamma_exp(d - 1, k, &p).max(vol), exponents::gamma_exp(d, k, &p));
    }

    #[test]
    fn residuals_vanish_in_regime(d in 1u32..=4, k in 2u32..=6, t in 1i64..=1000) {
        let thr = exponents::regime_threshold(d, k);
        let p = &thr + &thr * rat::rat(t, 1000);
        for c in iteration::verify_identities(d, k, &p).unwrap() {
            prop_assert!(c.passed, "{} failed: {}", c.name, c.witness);
        }
    }

    #[test]
    fn extension_laws(
        (t, u) in (subset_of(graded_points(2, 1, 3)), subset_of(graded_points(2, 1, 3))),
        target in 3u32..=5,
    ) {
        let amb = Ambient::Simplex { d: 2, l: 3 };
        let small = IndexSet::new(amb, t.clone()).unwrap();
        let big = IndexSet::new(amb, t.iter().chain(&u).cloned()).unwrap();
        let es = lattice::positive_extension(&small, target).unwrap();
        let eb = lattice::positive_extension(&big, target).unwrap();
        prop_assert!(es.members.is_subset(&eb.members));
        let same = lattice::positive_extension(&small, 3).unwrap();
        prop_assert!(small.members.is_subset(&same.members));
        let again = lattice::positive_extension(&same, target).unwrap();
        prop_assert_eq!(again, es);
    }

    #[test]
    fn layers_decompose_extension(b in subset_of(graded_points(3, 1, 3)), top in 3u32..=5) {
        let amb = Ambient::Simplex { d: 3, l: 3 };
        let set = IndexSet::new(amb, b).unwrap();
        let ext = lattice::positive_extension(&set, top).unwrap();
        let mut union = BTreeSet::new();
        let mut total = 0;
        for m in 1..=top {
            let layer = lattice::layer(&set, m).unwrap();
            total += layer.len();
            union.extend(layer.members);
        }
        prop_assert_eq!(total, union.len());
        prop_assert_eq!(union, ext.members);
        for m in 2..=top {
            let lower = lattice::layer(&set, m - 1).unwrap();
            let pred = lattice::predecessor(&lattice::layer(&set, m).unwrap()).unwrap();
            prop_assert!(lower.members.is_subset(&pred.members));
        }
    }

    #[test]
    fn greedy_split_partitions(
        cells in proptest::collection::btree_set(proptest::collection::vec(0u32..6, 2), 1..30),
    ) {
        let c = CubeCollection::new(2, 6, cells).unwrap();
        let parts = multiplicity::greedy_split(&c).unwrap();
        prop_assert_eq!(parts.len(), multiplicity::multiplicity(&c).unwrap().overall);
        prop_assert!(multiplicity::verify_split(&c, &parts));
    }

    #[test]
    fn generic_rank_dominates_monomial_rank(k in 2u32..=3, mask in 1u64..(1 << 9), seed in any::<u64>()) {
        let pts = graded_points(2, 1, k);
        let n = pts.len();
        let coords: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!coords.is_empty());
        let set: Vec<MultiIndex> = coords.iter().map(|&i| pts[i].clone()).collect();
        let v = Subspace::coordinate(n, &coords).unwrap();
        let map = MonomialMap::new(2, k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in 1..k {
            let generic = (0..4)
                .map(|_| {
                    let t = blrank::random_point(&mut rng, 2);
                    blrank::compressed_jet(&v, &map, l, &t).unwrap().rank()
                })
                .max()
                .unwrap();
            let j = integer_rank(blrank::j_matrix(&set, 2, l), set.len());
            prop_assert!(generic >= j, "l={} generic {} < {}", l, generic, j);
        }
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn fold_order_symmetric(d in 1usize..=2, k in 1u32..=3, n in 1u64..=5) {
        let r1 = CountTable::base(d, k, n, 1).unwrap();
        let r2 = r1.convolve(&r1, 1).unwrap();
        let left = r2.convolve(&r1, 1).unwrap();
        let right = r1.convolve(&r2, 2).unwrap();
        prop_assert_eq!(&left, &right);
        for (level, t) in [(1u32, &r1), (2, &r2), (3, &left)] {
            prop_assert_eq!(t.mass(), counting::diagonal_count(level, d, n));
            prop_assert!(t.entries.values().all(|c| *c >= BigUint::from(1u32)));
        }
    }

    #[test]
    fn counts_monotone(s in 1u32..=2, d in 1usize..=2, k in 1u32..=2, n in 1u64..=5, threads in 1usize..=4) {
        let c = CountConfig { threads, ..CountConfig::default() };
        let j = counting::j_count(s, d, k, n, c).unwrap();
        prop_assert!(j <= counting::j_count(s, d, k, n + 1, c).unwrap());
        prop_assert!(counting::j_count(s, d, k + 1, n, c).unwrap() <= j);
        prop_assert!(j >= counting::diagonal_count(s, d, n));
        prop_assert_eq!(j, counting::j_count(s, d, k, n, CountConfig::default()).unwrap());
    }

    #[test]
    fn bareiss_rank_matches_transpose(rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 1..5)) {
        let m = RatMatrix::from_i64_rows(&rows);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= rows.len().min(4));
    }
}

#[test]
fn shell_sizes_match_lambda_count() {
    for d in 1..=5usize {
        for q in 0..=8u32 {
            let size = lattice::shell_points(d, q).len();
            assert_eq!(BigUint::from(size), lattice::lambda_count(q, d as u32));
        }
    }
    assert_eq!(n_count(2, 4), 14);
}
