mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use tci_core::oracle::{mixed_volume_by_polarization, volume_by_lattice_triangulation};
use tci_core::*;

fn point_set(n: usize, max_points: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, n), 1..=max_points)
        .prop_map(move |rows| PointSet::from_i64s(n, &rows).unwrap())
}

fn family(max_points: usize) -> impl Strategy<Value = (usize, Vec<PointSet>, u64)> {
    (1usize..=3).prop_flat_map(move |n| (Just(n), prop::collection::vec(point_set(n, max_points), n), any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn volume_agrees_with_independent_triangulation((_, sets, _) in family(7)) {
        for s in &sets {
            prop_assert_eq!(lattice_volume(s), volume_by_lattice_triangulation(s).unwrap());
        }
    }

    #[test]
    fn hull_vertices_are_extreme((_, sets, _) in family(7)) {
        for s in &sets {
            let verts = convex_hull(s).vertices().clone();
            prop_assert_eq!(lattice_volume(&verts), lattice_volume(s));
            for v in verts.iter() {
                let rest: Vec<LatticePoint> = verts.iter().filter(|w| *w != v).cloned().collect();
                if rest.is_empty() {
                    continue;
                }
                let without = PointSet::new(s.ambient_rank(), rest).unwrap();
                let hull = convex_hull(&without);
                prop_assert_ne!(hull.vertices(), &verts);
            }
        }
    }

    #[test]
    fn mixed_volume_agrees_with_literal_polarization((_, sets, _) in family(4)) {
        let literal: Vec<Vec<Vec<i128>>> = sets.iter().map(common::to_i128).collect();
        prop_assert_eq!(BigInt::from(mixed_volume(&sets).unwrap()), mixed_volume_by_polarization(&literal));
    }

    #[test]
    fn volume_is_invariant_under_affine_unimodular_maps((n, sets, seed) in family(6)) {
        let mut rng = common::rng(seed);
        let u = common::random_unimodular(&mut rng, n);
        let shift = common::random_point(&mut rng, n, -9, 9);
        let moved = sets[0].translate(&shift).transform(&u).unwrap();
        prop_assert_eq!(lattice_volume(&moved), lattice_volume(&sets[0]));
        let moved_all: Vec<PointSet> = sets.iter().map(|s| s.transform(&u).unwrap().translate(&shift)).collect();
        prop_assert_eq!(mixed_volume(&moved_all).unwrap(), mixed_volume(&sets).unwrap());
    }

    #[test]
    fn mixed_volume_is_monotone_in_each_argument((n, sets, seed) in family(4)) {
        let mut rng = common::rng(seed);
        let extra = common::random_set(&mut rng, n, 3, -4, 4);
        let mut bigger = sets.clone();
        let pts: Vec<LatticePoint> = sets[0].iter().chain(extra.iter()).cloned().collect();
        bigger[0] = PointSet::new(n, pts).unwrap();
        prop_assert!(mixed_volume(&bigger).unwrap() >= mixed_volume(&sets).unwrap());
    }
}
