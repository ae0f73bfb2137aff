//! Random instance generators and small exact helpers shared by the
//! integration tests.

#![allow(dead_code)]

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tci_core::{IntegerMatrix, LatticePoint, PointSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Between `1` and `max_points` distinct points with coordinates in `[lo, hi]`.
pub fn random_set(rng: &mut ChaCha8Rng, n: usize, max_points: usize, lo: i64, hi: i64) -> PointSet {
    let k = rng.gen_range(1..=max_points);
    let rows: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(lo..=hi)).collect()).collect();
    PointSet::from_i64s(n, &rows).unwrap()
}

/// A set whose points lie on a random low-dimensional affine lattice,
/// which makes zero and negative defects common.
pub fn random_flat_set(rng: &mut ChaCha8Rng, n: usize, max_points: usize) -> PointSet {
    let dirs = rng.gen_range(0..=n.min(2));
    let gens: Vec<Vec<i64>> = (0..dirs).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect();
    let base: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
    let k = rng.gen_range(1..=max_points);
    let rows: Vec<Vec<i64>> = (0..k)
        .map(|_| {
            let mut p = base.clone();
            for g in &gens {
                let t = rng.gen_range(-2..=2);
                for (x, y) in p.iter_mut().zip(g) {
                    *x += t * y;
                }
            }
            p
        })
        .collect();
    PointSet::from_i64s(n, &rows).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> LatticePoint {
    LatticePoint::from_i64s(&(0..n).map(|_| rng.gen_range(lo..=hi)).collect::<Vec<_>>())
}

/// Product of random elementary integer row operations.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntegerMatrix {
    let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..(3 * n) {
        match rng.gen_range(0..3) {
            0 if n > 1 => {
                let a = rng.gen_range(0..n);
                let b = (a + rng.gen_range(1..n)) % n;
                let c = *[-2i64, -1, 1, 2].choose(rng).unwrap();
                let src = rows[b].clone();
                for (x, y) in rows[a].iter_mut().zip(&src) {
                    *x += c * y;
                }
            }
            1 if n > 1 => {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                rows.swap(a, b);
            }
            _ => {
                let a = rng.gen_range(0..n);
                rows[a].iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    IntegerMatrix::from_i64_rows(&rows)
}

pub fn to_i128(a: &PointSet) -> Vec<Vec<i128>> {
    a.iter()
        .map(|p| p.coords().iter().map(|c| i128::try_from(c).unwrap()).collect())
        .collect()
}

pub fn big_rows(m: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    m.to_rows()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free elimination.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Gcd of all `k x k` minors (zero when every minor vanishes).
pub fn gcd_of_minors(m: &[Vec<BigInt>], k: usize) -> BigInt {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut g = BigInt::zero();
    for rs in (0..rows).combinations(k) {
        for cs in (0..cols).combinations(k) {
            let sub: Vec<Vec<BigInt>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c].clone()).collect()).collect();
            g = g.gcd(&det(&sub));
            if g.is_one() {
                return g;
            }
        }
    }
    g.abs()
}
