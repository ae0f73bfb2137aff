mod common;

use num_bigint::BigUint;
use proptest::prelude::*;
use tci_core::oracle::{brute_force_trichotomy, BruteVerdict};
use tci_core::*;

/// Families mixing generic and low-dimensional supports.
fn family() -> impl Strategy<Value = (usize, Vec<PointSet>, u64)> {
    (1usize..=3, 1usize..=4, any::<u64>()).prop_map(|(n, m, seed)| {
        let mut rng = common::rng(seed);
        let sets = (0..m)
            .map(|i| {
                if (seed >> i) & 1 == 0 {
                    common::random_flat_set(&mut rng, n, 3)
                } else {
                    common::random_set(&mut rng, n, 3, -2, 2)
                }
            })
            .collect();
        (n, sets, seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn defects_ignore_translation_and_unimodular_maps((n, sets, seed) in family()) {
        let mut rng = common::rng(seed ^ 0x5eed);
        let u = common::random_unimodular(&mut rng, n);
        let moved: Vec<PointSet> = sets
            .iter()
            .map(|s| s.translate(&common::random_point(&mut rng, n, -5, 5)).transform(&u).unwrap())
            .collect();
        let a = defect_report(&SupportFamily::new(sets).unwrap());
        let b = defect_report(&SupportFamily::new(moved).unwrap());
        prop_assert_eq!(a.defects, b.defects);
    }

    #[test]
    fn component_count_matches_brute_force((_, sets, _) in family()) {
        let family = SupportFamily::new(sets.clone()).unwrap();
        let verdict = component_count(&family).unwrap();
        let (ok, _) = khovanskii_condition(&family);
        prop_assert_eq!(ok, matches!(verdict, Verdict::Irreducible { .. }));
        match (verdict, brute_force_trichotomy(&sets).unwrap()) {
            (Verdict::Irreducible { .. }, BruteVerdict::Irreducible) | (Verdict::Empty { .. }, BruteVerdict::Empty) => {}
            (Verdict::Components { count, j0, lattice }, BruteVerdict::Components { j0: bj, count: bc }) => {
                prop_assert_eq!(j0.bits(), bj);
                prop_assert_eq!(lattice.rank(), j0.len());
                if let Some(c) = bc {
                    prop_assert_eq!(count, c);
                }
            }
            (v, b) => prop_assert!(false, "{v} vs {b:?}"),
        }
    }

    #[test]
    fn submodular_when_defects_are_nonnegative((_, sets, _) in family()) {
        let report = defect_report(&SupportFamily::new(sets).unwrap());
        if report.min_defect >= 0 {
            prop_assert!(report.is_submodular());
        }
    }

    #[test]
    fn doubling_a_support_never_turns_empty_into_irreducible((_, sets, seed) in family()) {
        let before = component_count(&SupportFamily::new(sets.clone()).unwrap()).unwrap();
        let mut doubled = sets.clone();
        let i = (seed as usize) % sets.len();
        doubled.push(sets[i].clone());
        let family = SupportFamily::new(doubled).unwrap();
        let after = component_count(&family).unwrap();
        let pair = IndexSubset::from_indices(&[i, sets.len()]);
        prop_assert_eq!(defect(&family, pair).unwrap(), dim_of_set(&sets[i]) as i64 - 2);
        if matches!(before, Verdict::Empty { .. }) {
            prop_assert_ne!(after.tag(), "irreducible");
        }
    }

    #[test]
    fn single_equation_counts((_, sets, _) in family()) {
        // one equation: irreducible iff dim >= 2, one component per coset when dim = 1
        let a = sets[0].clone();
        let verdict = component_count(&SupportFamily::new(vec![a.clone()]).unwrap()).unwrap();
        match dim_of_set(&a) {
            0 => prop_assert_eq!(verdict.tag(), "empty"),
            1 => {
                let Verdict::Components { count, .. } = verdict else { panic!("expected components") };
                let l = saturation(&Sublattice::span(a.ambient_rank(), &a.difference_generators()).unwrap());
                let shifted = a.translate(&LatticePoint::zero(a.ambient_rank()).sub(a.base_point()));
                let coords: Vec<_> = shifted.iter().map(|p| l.coordinates(p).unwrap().unwrap()[0].clone()).collect();
                let spread = coords.iter().max().unwrap() - coords.iter().min().unwrap();
                prop_assert_eq!(count, spread.to_biguint().unwrap());
            }
            _ => prop_assert_eq!(verdict.tag(), "irreducible"),
        }
    }
}

#[test]
fn components_fixture_counts() {
    let v = component_count(&SupportFamily::new(vec![PointSet::from_i64s(1, &[[0], [2]]).unwrap()]).unwrap()).unwrap();
    assert!(matches!(v, Verdict::Components { ref count, .. } if *count == BigUint::from(2u32)));
}
