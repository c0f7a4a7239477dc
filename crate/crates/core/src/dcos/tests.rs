use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fast::{self, FastCosets};
use super::*;
use crate::perm::all_permutations;

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn counts(t: &CensusTable) -> Vec<u64> {
    t.counts.iter().map(|c| c.to_u64().unwrap()).collect()
}

fn brute_min(s: &SylowStructure, g: &Permutation) -> Permutation {
    s.elements()
        .unwrap()
        .map(|h| g.compose(&h).unwrap())
        .min_by(|a, b| a.images().cmp(b.images()))
        .unwrap()
}

#[test]
fn canonical_rep_of_group_element_is_identity() {
    let s = SylowStructure::new(9, 3).unwrap();
    let chain = s.build_chain();
    for h in s.elements().unwrap() {
        assert!(canonical_coset_rep(&chain, &h).unwrap().is_identity());
    }
}

#[test]
fn canonical_rep_matches_brute_force_n4() {
    let s = SylowStructure::new(4, 2).unwrap();
    let chain = s.build_chain();
    let fc = FastCosets::new(&s);
    for g in all_permutations(4) {
        let rep = canonical_coset_rep(&chain, &g).unwrap();
        assert_eq!(rep, brute_min(&s, &g));
        assert_eq!(fast::from_small(&fc.canonical(&fast::to_small(&g)), 4), rep);
    }
}

#[test]
fn canonical_rep_matches_brute_force_n9() {
    let s = SylowStructure::new(9, 3).unwrap();
    let chain = s.build_chain();
    let fc = FastCosets::new(&s);
    let elems: Vec<Permutation> = s.elements().unwrap().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..1_000 {
        let g = Permutation::random_uniform(9, &mut rng);
        let rep = canonical_coset_rep(&chain, &g).unwrap();
        assert_eq!(rep, brute_min(&s, &g));
        assert_eq!(canonical_coset_rep(&chain, &rep).unwrap(), rep);
        let h = &elems[i % elems.len()];
        assert_eq!(canonical_coset_rep(&chain, &g.compose(h).unwrap()).unwrap(), rep);
        assert_eq!(fast::from_small(&fc.canonical(&fast::to_small(&g)), 9), rep);
    }
}

#[test]
fn canonical_rep_degree_mismatch() {
    let chain = SylowStructure::new(4, 2).unwrap().build_chain();
    assert!(canonical_coset_rep(&chain, &Permutation::identity(5)).is_err());
}

#[test]
fn small_pack_agrees_with_permutation_pack() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 1..=16 {
        let g = Permutation::random_uniform(n, &mut rng);
        let sg = fast::to_small(&g);
        assert_eq!(fast::pack(&sg, n), g.pack().unwrap());
        assert_eq!(fast::unpack(fast::pack(&sg, n), n), sg);
        if n > 1 {
            let t = Permutation::from_cycles(n, &[vec![1, 2]]).unwrap();
            assert_eq!(
                fast::from_small(&fast::swap_values(&sg, 0), n),
                t.compose(&g).unwrap()
            );
        }
    }
}

#[test]
fn census_table_one_rows() {
    let rows: [(usize, &[u64]); 10] = [
        (1, &[1]),
        (2, &[1]),
        (3, &[1, 1]),
        (4, &[1, 1]),
        (5, &[1, 1, 1, 1]),
        (6, &[1, 2, 2, 2, 1]),
        (7, &[1, 3, 7, 13, 11]),
        (8, &[1, 1, 2, 4, 3, 3, 2]),
        (9, &[1, 1, 2, 5, 6, 10, 15, 11]),
        (10, &[1, 1, 3, 8, 13, 22, 32, 43, 22]),
    ];
    for (n, row) in rows {
        let t = census_exhaustive(n, 2, &CensusBudget::default()).unwrap();
        let got = counts(&t);
        assert_eq!(&got[..row.len()], row, "n={}", n);
        assert!(got[row.len()..].iter().all(|&c| c == 0));
        assert_eq!(got.len(), t.m + 1);
        assert!(t.mass_check());
        assert!(t.min_size_check());
    }
}

#[test]
fn census_small_primes() {
    let t = census_exhaustive(6, 3, &CensusBudget::default()).unwrap();
    assert_eq!(counts(&t), vec![8, 0, 8]);
    let t = census_exhaustive(5, 5, &CensusBudget::default()).unwrap();
    assert_eq!(counts(&t), vec![4, 4]);
    // trivial Sylow subgroup: every element is its own double coset
    let t = census_exhaustive(4, 5, &CensusBudget::default()).unwrap();
    assert_eq!(counts(&t), vec![24]);
}

#[test]
fn census_eleven_eleven() {
    let t = census_exhaustive(11, 11, &CensusBudget::default()).unwrap();
    assert_eq!(counts(&t), vec![10, 329_890]);
}

#[test]
fn census_totals_match_class_formula() {
    for n in 1..=10 {
        let t = census_exhaustive(n, 2, &CensusBudget::default()).unwrap();
        assert_eq!(t.total, total_via_classes(n, 2).unwrap(), "n={}", n);
    }
    for n in 1..=9 {
        let t = census_exhaustive(n, 3, &CensusBudget::default()).unwrap();
        assert_eq!(t.total, total_via_classes(n, 3).unwrap(), "n={}", n);
    }
}

#[test]
fn census_second_size_matches_formula() {
    for &(p, max) in &[(2u64, 10usize), (3, 9), (5, 9), (7, 9)] {
        for n in 1..=max {
            let t = census_exhaustive(n, p, &CensusBudget::default()).unwrap();
            assert_eq!(
                t.count(1),
                crate::closedform::second_size_count(n, p).unwrap(),
                "n={} p={}",
                n,
                p
            );
        }
    }
}

#[test]
fn census_budget_refusal() {
    let err = census_exhaustive(16, 2, &CensusBudget::default()).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { .. }));
    let tight = CensusBudget {
        coset_space_limit: 100,
    };
    assert!(census_exhaustive(7, 2, &tight).is_err());
    assert!(census_exhaustive(6, 2, &tight).is_ok());
    assert!(census_exhaustive(17, 17, &CensusBudget::default()).is_err());
}

#[test]
fn census_json_roundtrip() {
    let t = census_exhaustive(7, 2, &CensusBudget::default()).unwrap();
    let text = serde_json::to_string(&t).unwrap();
    assert_eq!(
        text,
        r#"{"n":7,"p":2,"m":4,"method":"exhaustive","counts":[{"k":0,"count":"1"},{"k":1,"count":"3"},{"k":2,"count":"7"},{"k":3,"count":"13"},{"k":4,"count":"11"}],"total":"35"}"#
    );
    let back: CensusTable = serde_json::from_str(&text).unwrap();
    assert_eq!(back, t);
}

#[test]
fn class_formula_examples() {
    assert_eq!(total_via_classes(6, 2).unwrap(), big(8));
    assert_eq!(total_via_classes(13, 13).unwrap(), big(36_846_288));
    assert_eq!(total_via_classes(18, 2).unwrap(), big(2_781_808));
    assert_eq!(total_via_classes(4, 5).unwrap(), big(24));
}

#[test]
fn double_coset_sizes() {
    let s = SylowStructure::new(8, 2).unwrap();
    assert_eq!(double_coset_size(&s, &Permutation::identity(8)).unwrap(), big(128));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let x = Permutation::random_uniform(8, &mut rng);
        let size = double_coset_size(&s, &x).unwrap();
        assert!(size >= big(128) && size <= big(128 * 128));
    }
    let s = SylowStructure::new(11, 11).unwrap();
    let hits = (0..2_000)
        .filter(|_| {
            let x = Permutation::random_uniform(11, &mut rng);
            double_coset_size(&s, &x).unwrap() == big(121)
        })
        .count();
    assert!(hits >= 1_995);
}

#[test]
fn double_coset_keys_n5() {
    let s = SylowStructure::new(5, 2).unwrap();
    let keyer = DoubleCosetKeyer::new(&s).unwrap();
    let elems: Vec<Permutation> = s.elements().unwrap().collect();
    let mut keys = HashSet::new();
    for x in all_permutations(5) {
        let k = keyer.key(&x);
        keys.insert(k);
        let y = elems[3].compose(&x).unwrap().compose(&elems[5]).unwrap();
        assert_eq!(keyer.key(&y), k);
    }
    assert_eq!(keys.len(), 4);
    assert!(DoubleCosetKeyer::new(&SylowStructure::new(17, 2).unwrap()).is_err());
}

#[test]
fn sampled_census_trivial_group() {
    let c = census_sampled(4, 5, 1_000, 1).unwrap();
    assert_eq!(c.mass.len(), 1);
    assert_eq!(c.mass[0].estimate, 1.0);
}

#[test]
fn sampled_census_row_seven() {
    let c = census_sampled(7, 2, 100_000, 7).unwrap();
    let total: f64 = c.mass.iter().map(|m| m.estimate).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let exact = 11.0 * 256.0 / 5040.0;
    let cell = &c.mass[4];
    assert!((cell.estimate - exact).abs() < 3.0 * cell.std_error);
}

#[test]
fn sampled_mass_converges_row_ten() {
    let t = census_exhaustive(10, 2, &CensusBudget::default()).unwrap();
    let exact = SampledCensus::exact_mass(&t);
    let c = census_sampled(10, 2, 1_000_000, 10).unwrap();
    for (cell, &want) in c.mass.iter().zip(&exact) {
        let se = crate::stats::std_error(want, c.samples);
        assert!((cell.estimate - want).abs() < 5.0 * se.max(1e-12), "k={}", cell.k);
    }
}

#[test]
fn sampled_census_is_reproducible() {
    let a = census_sampled(9, 2, 10_000, 3).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(2)
        .build()
        .unwrap()
        .install(|| census_sampled(9, 2, 10_000, 3).unwrap());
    assert_eq!(a, b);
}

#[test]
fn exact_mass_of_row_seven() {
    let t = census_exhaustive(7, 2, &CensusBudget::default()).unwrap();
    let mass = SampledCensus::exact_mass(&t);
    assert!((mass.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((mass[4] - 11.0 * 256.0 / 5040.0).abs() < 1e-12);
}

#[test]
fn lemma_d_examples() {
    let r = verify_lemma_d(6, 2).unwrap();
    assert_eq!(r.sylow_count, big(45));
    assert!(r.pass());
    let r = verify_lemma_d(9, 3).unwrap();
    assert_eq!(r.sylow_count, big(1120));
    assert!(r.pass());
    let r = verify_lemma_d(8, 2).unwrap();
    assert!(r.pass());
    // only Q = P has index 1; no Q meets P trivially
    assert_eq!(r.d[&0], big(1));
    assert_eq!(r.d.get(&7).cloned().unwrap_or_default(), big(0));
    for &(n, p) in &[(4usize, 2u64), (5, 2), (6, 3)] {
        assert!(verify_lemma_d(n, p).unwrap().pass(), "n={} p={}", n, p);
    }
}
