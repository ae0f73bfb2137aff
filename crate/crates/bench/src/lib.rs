//! Deterministic inputs shared by the benchmarks.

use tci_core::{
    encode_derivative_tower, Characteristic, CoefficientMatrix, IntegerMatrix, PointSet, SupportFamily,
};

/// `n x n` matrix with entries from a fixed linear congruential sequence in `[-20, 20]`.
pub fn pseudo_random_matrix(n: usize, seed: u64) -> IntegerMatrix {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 33) % 41) as i64 - 20
                })
                .collect()
        })
        .collect();
    IntegerMatrix::from_i64_rows(&rows)
}

/// The simplex scaled by `d` in `Z^n`.
pub fn scaled_simplex(n: usize, d: i64) -> PointSet {
    let mut rows = vec![vec![0i64; n]];
    rows.extend((0..n).map(|i| (0..n).map(|j| if i == j { d } else { 0 }).collect()));
    PointSet::from_i64s(n, &rows).unwrap()
}

/// The cube `[0, d]^n`, given by its vertices.
pub fn cube(n: usize, d: i64) -> PointSet {
    let rows: Vec<Vec<i64>> = (0..1u32 << n)
        .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { d } else { 0 }).collect())
        .collect();
    PointSet::from_i64s(n, &rows).unwrap()
}

/// `m` equations in `Z^n` alternating segments and unit squares, so that
/// zero-defect subsets occur.
pub fn mixed_family(n: usize, m: usize) -> SupportFamily {
    let sets = (0..m)
        .map(|k| {
            let i = k % n;
            let j = (k + 1) % n;
            let unit = |c: usize| (0..n).map(|t| i64::from(t == c)).collect::<Vec<_>>();
            let mut rows = vec![vec![0i64; n], unit(i)];
            if k % 2 == 1 {
                rows.push(unit(j));
                rows.push(unit(i).iter().zip(unit(j)).map(|(a, b)| a + b).collect());
            }
            PointSet::from_i64s(n, &rows).unwrap()
        })
        .collect();
    SupportFamily::new(sets).unwrap()
}

/// Derivative tower on three strata of unit simplices in `Z^4`.
pub fn tower_matrix(r: usize) -> CoefficientMatrix {
    let mut rows = Vec::new();
    for x in [0i64, 1, 2] {
        rows.push(vec![x, 0, 0, 0]);
        rows.push(vec![x, 1, 0, 0]);
        rows.push(vec![x, 0, 1, 0]);
        rows.push(vec![x, 0, 0, 1]);
    }
    let a = PointSet::from_i64s(4, &rows).unwrap();
    encode_derivative_tower(&a, 0, r, Characteristic::Zero).unwrap()
}
