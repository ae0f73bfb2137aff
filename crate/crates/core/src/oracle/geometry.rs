//! Brute-force rank, volume and defect computations over plain integer
//! arrays.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::sampling::to_i64_rows;
use super::OracleError;
use crate::lattice::{IntegerMatrix, PointSet};

/// Rank by fraction-free (Bareiss) elimination.
pub fn rank_rational(m: &IntegerMatrix) -> usize {
    rank_of_rows(&m.to_rows())
}

fn rank_of_rows(rows: &[Vec<BigInt>]) -> usize {
    let mut a = rows.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let v = &a[r][c] * &a[rank][col] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

fn rank_i128(rows: &[Vec<i128>]) -> usize {
    let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    rank_of_rows(&big)
}

fn det_i128(m: &[Vec<i128>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut prev = BigInt::from(1);
    let mut sign = BigInt::from(1);
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        BigInt::from(1)
    } else {
        sign * &a[n - 1][n - 1]
    }
}

/// Dimension of the affine hull of a finite set of integer points.
pub fn affine_dim(points: &[Vec<i128>]) -> usize {
    let Some(base) = points.first() else { return 0 };
    let diffs: Vec<Vec<i128>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rank_i128(&diffs)
}

/// Normal of the hyperplane through `k` points in `Z^k` (cofactor
/// expansion of the difference matrix), or `None` if they are affinely
/// dependent.
fn hyperplane_normal(pts: &[&Vec<i128>]) -> Option<Vec<i128>> {
    let k = pts[0].len();
    let diffs: Vec<Vec<i128>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect())
        .collect();
    let normal: Vec<i128> = (0..k)
        .map(|c| {
            let minor: Vec<Vec<i128>> = diffs
                .iter()
                .map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, &x)| x).collect())
                .collect();
            let d = det_i128(&minor);
            let d: i128 = d.try_into().expect("minor fits in i128");
            if c % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    normal.iter().any(|&x| x != 0).then_some(normal)
}

fn dot(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Facets of a full-dimensional point configuration in `Z^k`, each as the
/// sorted indices of the points on it plus its normal.
fn facets(points: &[Vec<i128>]) -> Vec<(Vec<usize>, Vec<i128>)> {
    let k = points[0].len();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let chosen: Vec<&Vec<i128>> = idx.iter().map(|&i| &points[i]).collect();
        if let Some(normal) = hyperplane_normal(&chosen) {
            let level = dot(&normal, chosen[0]);
            let sides: Vec<i128> = points.iter().map(|p| dot(&normal, p) - level).collect();
            let pos = sides.iter().any(|&s| s > 0);
            let neg = sides.iter().any(|&s| s < 0);
            if !(pos && neg) {
                let on: Vec<usize> = (0..points.len()).filter(|&i| sides[i] == 0).collect();
                if affine_dim(&on.iter().map(|&i| points[i].clone()).collect::<Vec<_>>()) + 1 == k && seen.insert(on.clone()) {
                    out.push((on, normal));
                }
            }
        }
        // next k-combination of 0..len
        let n = points.len();
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Triangulates a full-dimensional configuration in `Z^k` by coning from
/// point 0 over triangulations of the facets that miss it; facets are
/// handled in `Z^(k-1)` after dropping a coordinate the normal depends on.
fn triangulate(points: &[Vec<i128>]) -> Vec<Vec<usize>> {
    let k = points[0].len();
    if k == 0 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for (on, normal) in facets(points) {
        if on.contains(&0) {
            continue;
        }
        let drop = normal.iter().position(|&x| x != 0).expect("non-zero normal");
        let projected: Vec<Vec<i128>> = on
            .iter()
            .map(|&i| points[i].iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, &x)| x).collect())
            .collect();
        for simplex in triangulate(&projected) {
            let mut s = vec![0];
            s.extend(simplex.iter().map(|&j| on[j]));
            out.push(s);
        }
    }
    out
}

fn dedup_points(points: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    points.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Normalised volume (`k!` times Euclidean) of the convex hull of points in
/// `Z^k`; zero unless full-dimensional.
pub fn normalized_volume(points: &[Vec<i128>]) -> BigUint {
    let pts = dedup_points(points.to_vec());
    let Some(first) = pts.first() else {
        return BigUint::zero();
    };
    let k = first.len();
    if k == 0 {
        return BigUint::from(1u32);
    }
    if affine_dim(&pts) < k {
        return BigUint::zero();
    }
    triangulate(&pts)
        .iter()
        .map(|s| {
            let m: Vec<Vec<i128>> = s[1..]
                .iter()
                .map(|&i| pts[i].iter().zip(&pts[s[0]]).map(|(a, b)| a - b).collect())
                .collect();
            det_i128(&m).abs().to_biguint().expect("absolute value")
        })
        .sum()
}

fn to_i128(a: &PointSet) -> Result<Vec<Vec<i128>>, OracleError> {
    Ok(to_i64_rows(a)?
        .into_iter()
        .map(|r| r.into_iter().map(i128::from).collect())
        .collect())
}

/// Lattice volume via an independent triangulation.
pub fn volume_by_lattice_triangulation(a: &PointSet) -> Result<BigUint, OracleError> {
    Ok(normalized_volume(&to_i128(a)?))
}

fn literal_sum(sets: &[&Vec<Vec<i128>>]) -> Vec<Vec<i128>> {
    let k = sets[0][0].len();
    let mut acc: Vec<Vec<i128>> = vec![vec![0; k]];
    for s in sets {
        let mut next = BTreeSet::new();
        for a in &acc {
            for b in s.iter() {
                next.insert(a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<i128>>());
            }
        }
        acc = next.into_iter().collect();
    }
    acc
}

/// `Σ_S (-1)^{k-|S|} Vol(Σ_{j∈S} P_j) / k!` with literal Minkowski sums,
/// normalised so that `MVol(P, ..., P) = Vol(P)`.
pub fn mixed_volume_by_polarization(sets: &[Vec<Vec<i128>>]) -> BigInt {
    let k = sets.len();
    let mut total = BigInt::zero();
    for mask in 1u32..(1 << k) {
        let chosen: Vec<&Vec<Vec<i128>>> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| &sets[i]).collect();
        let v = BigInt::from(normalized_volume(&literal_sum(&chosen)));
        if (k - chosen.len()).is_multiple_of(2) {
            total += v;
        } else {
            total -= v;
        }
    }
    let k_factorial: BigInt = (1..=k).map(BigInt::from).product();
    let (q, r) = total.div_rem(&k_factorial);
    assert!(r.is_zero(), "polarization sum must be divisible by k!");
    q
}

/// The trichotomy recomputed from first principles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteVerdict {
    Irreducible,
    Empty,
    /// `j0` as a bitmask; `count` is computed only for small instances.
    Components { j0: u32, count: Option<BigUint> },
}

/// Largest literal Minkowski sum the brute-force count is attempted on.
pub const BRUTE_SUM_CAP: usize = 400;

/// Defect of every subset, indexed by bitmask, from literal Minkowski sums.
pub fn brute_force_defects(supports: &[PointSet]) -> Result<Vec<Option<i64>>, OracleError> {
    let sets: Vec<Vec<Vec<i128>>> = supports.iter().map(to_i128).collect::<Result<_, _>>()?;
    let m = sets.len();
    let mut out = vec![None; 1 << m];
    for (mask, slot) in out.iter_mut().enumerate().skip(1) {
        // translate each summand to its first point: same dimension, fewer points
        let chosen: Vec<Vec<Vec<i128>>> = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| {
                let b = sets[i][0].clone();
                sets[i].iter().map(|p| p.iter().zip(&b).map(|(x, y)| x - y).collect()).collect()
            })
            .collect();
        let refs: Vec<&Vec<Vec<i128>>> = chosen.iter().collect();
        let sum = literal_sum(&refs);
        *slot = Some(affine_dim(&sum) as i64 - chosen.len() as i64);
    }
    Ok(out)
}

/// Irreducible / empty / number of components, with `N` recomputed by
/// projecting to coordinates on which the span of `J0` is injective.
pub fn brute_force_trichotomy(supports: &[PointSet]) -> Result<BruteVerdict, OracleError> {
    let defects = brute_force_defects(supports)?;
    let min = defects.iter().flatten().min().copied().ok_or(OracleError::NoSupports)?;
    if min > 0 {
        return Ok(BruteVerdict::Irreducible);
    }
    if min < 0 {
        return Ok(BruteVerdict::Empty);
    }
    let j0 = defects
        .iter()
        .enumerate()
        .filter(|(_, d)| **d == Some(0))
        .fold(0u32, |acc, (mask, _)| acc | mask as u32);

    let sets: Vec<Vec<Vec<i128>>> = supports.iter().map(to_i128).collect::<Result<_, _>>()?;
    let members: Vec<usize> = (0..sets.len()).filter(|i| j0 >> i & 1 == 1).collect();
    let k = members.len();
    let size: usize = members.iter().map(|&i| sets[i].len()).product();
    if size > BRUTE_SUM_CAP {
        return Ok(BruteVerdict::Components { j0, count: None });
    }
    let n = sets[0][0].len();
    let diffs: Vec<Vec<i128>> = members
        .iter()
        .flat_map(|&i| {
            let b = sets[i][0].clone();
            sets[i].iter().map(move |p| p.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<i128>>())
        })
        .filter(|v| v.iter().any(|&x| x != 0))
        .collect();
    // a basis B of the span, chosen greedily among the differences
    let mut basis: Vec<Vec<i128>> = Vec::new();
    for v in &diffs {
        let mut trial = basis.clone();
        trial.push(v.clone());
        if rank_i128(&trial) == trial.len() {
            basis = trial;
        }
    }
    assert_eq!(basis.len(), k, "span of J0 differences must have rank |J0|");
    // coordinates with a non-zero k x k minor of B, and the gcd of all minors
    let mut cols: Vec<usize> = (0..k).collect();
    let mut chosen_cols = None;
    let mut minor_gcd = BigInt::zero();
    loop {
        let minor: Vec<Vec<i128>> = basis.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        let d = det_i128(&minor);
        if !d.is_zero() && chosen_cols.is_none() {
            chosen_cols = Some((cols.clone(), d.abs()));
        }
        minor_gcd = minor_gcd.gcd(&d);
        let Some(pos) = (0..k).rev().find(|&i| cols[i] < n - k + i) else {
            break;
        };
        cols[pos] += 1;
        for j in pos + 1..k {
            cols[j] = cols[j - 1] + 1;
        }
    }
    let (cols, det_s) = chosen_cols.expect("B has full rank");
    let projected: Vec<Vec<Vec<i128>>> = members
        .iter()
        .map(|&i| sets[i].iter().map(|p| cols.iter().map(|&c| p[c]).collect()).collect())
        .collect();
    let mv = mixed_volume_by_polarization(&projected) * &minor_gcd;
    let (q, r) = mv.div_rem(&det_s);
    assert!(r.is_zero(), "lattice renormalisation must be exact");
    Ok(BruteVerdict::Components {
        j0,
        count: Some(q.to_biguint().expect("mixed volume is non-negative")),
    })
}
