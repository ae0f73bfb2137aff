//! Lattice polytopes: exact convex hulls, normalized volume, mixed volume and
//! the Kouchnirenko–Bernstein root count.
//!
//! Hulls are computed with a placing (beneath–beyond) triangulation in exact
//! integer arithmetic. A lower-dimensional set is first projected onto a set
//! of coordinate axes that is injective on its affine hull, which preserves
//! the face structure.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{hermite_basis, minkowski_sum, LatticeError, LatticePoint, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VolumeError {
    #[error("expected {expected} polytopes (one per ambient dimension), got {found}")]
    Arity { expected: usize, found: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Convex hull of a finite point set, stored by its vertices only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    vertices: PointSet,
    dim: usize,
}

impl LatticePolytope {
    pub fn vertices(&self) -> &PointSet {
        &self.vertices
    }

    pub fn ambient_rank(&self) -> usize {
        self.vertices.ambient_rank()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Pivot axes of the difference lattice: projecting onto them is injective on
/// the affine hull of `points`.
fn chart_axes(points: &[LatticePoint]) -> Vec<usize> {
    let n = points[0].rank();
    let base = &points[0];
    let gens: Vec<Vec<BigInt>> = points[1..].iter().map(|p| p.sub(base).into_coords()).collect();
    hermite_basis(n, &gens)
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).expect("hermite rows are nonzero"))
        .collect()
}

fn project(points: &[LatticePoint], axes: &[usize]) -> Vec<Vec<BigInt>> {
    points
        .iter()
        .map(|p| axes.iter().map(|&a| p.coords()[a].clone()).collect())
        .collect()
}

fn det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    match n {
        0 => return BigInt::one(),
        1 => return a[0][0].clone(),
        2 => return &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0],
        _ => {}
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
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

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone)]
struct Halfspace {
    normal: Vec<BigInt>,
    offset: BigInt,
}

impl Halfspace {
    /// Hyperplane through `facet` (d points in d-space) with `inside` on the
    /// side `normal . x < offset`.
    fn through(pts: &[Vec<BigInt>], facet: &[usize], inside: usize) -> Halfspace {
        let d = pts[facet[0]].len();
        let f0 = &pts[facet[0]];
        let edges: Vec<Vec<BigInt>> = facet[1..]
            .iter()
            .map(|&i| pts[i].iter().zip(f0).map(|(a, b)| a - b).collect())
            .collect();
        let mut normal = Vec::with_capacity(d);
        for k in 0..d {
            let minor: Vec<Vec<BigInt>> = edges
                .iter()
                .map(|e| e.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, x)| x.clone()).collect())
                .collect();
            let m = det(minor);
            normal.push(if k % 2 == 0 { m } else { -m });
        }
        let mut offset = dot(&normal, f0);
        let side = dot(&normal, &pts[inside]);
        debug_assert_ne!(side, offset, "degenerate simplex in triangulation");
        if side > offset {
            for x in normal.iter_mut() {
                *x = -std::mem::take(x);
            }
            offset = -offset;
        }
        Halfspace { normal, offset }
    }

    /// Primitive representative, so coplanar facets compare equal.
    fn primitive(&self) -> Halfspace {
        let mut g = self.offset.abs();
        for x in &self.normal {
            g = g.gcd(x);
        }
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        Halfspace {
            normal: self.normal.iter().map(|x| x / &g).collect(),
            offset: &self.offset / &g,
        }
    }
}

/// Placing triangulation of a full-dimensional point configuration in `Z^d`.
struct Triangulation {
    simplices: Vec<Vec<usize>>,
    boundary: BTreeMap<Vec<usize>, Halfspace>,
}

impl Triangulation {
    fn build(pts: &[Vec<BigInt>]) -> Triangulation {
        let d = pts[0].len();
        assert!(d >= 1);
        let mut initial = vec![0usize];
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for (i, p) in pts.iter().enumerate().skip(1) {
            if initial.len() == d + 1 {
                break;
            }
            let mut trial = rows.clone();
            trial.push(p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect());
            if hermite_basis(d, &trial).len() == trial.len() {
                rows = trial;
                initial.push(i);
            }
        }
        assert_eq!(initial.len(), d + 1, "configuration is not full-dimensional");

        let mut t = Triangulation {
            simplices: Vec::new(),
            boundary: BTreeMap::new(),
        };
        t.add_simplex(pts, initial.clone());
        for i in 0..pts.len() {
            if initial.contains(&i) {
                continue;
            }
            let visible: Vec<Vec<usize>> = t
                .boundary
                .iter()
                .filter(|(_, h)| dot(&h.normal, &pts[i]) > h.offset)
                .map(|(f, _)| f.clone())
                .collect();
            for f in visible {
                let mut s = f;
                s.push(i);
                t.add_simplex(pts, s);
            }
        }
        t
    }

    fn add_simplex(&mut self, pts: &[Vec<BigInt>], mut simplex: Vec<usize>) {
        simplex.sort_unstable();
        for skip in 0..simplex.len() {
            let facet: Vec<usize> = simplex.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &v)| v).collect();
            if self.boundary.remove(&facet).is_none() {
                let h = Halfspace::through(pts, &facet, simplex[skip]);
                self.boundary.insert(facet, h);
            }
        }
        self.simplices.push(simplex);
    }

    fn normalized_volume(&self, pts: &[Vec<BigInt>]) -> BigInt {
        self.simplices
            .iter()
            .map(|s| {
                let v0 = &pts[s[0]];
                let m: Vec<Vec<BigInt>> = s[1..]
                    .iter()
                    .map(|&i| pts[i].iter().zip(v0).map(|(a, b)| a - b).collect())
                    .collect();
                det(m).abs()
            })
            .sum()
    }

    fn facet_hyperplanes(&self) -> Vec<Halfspace> {
        let mut planes: Vec<Halfspace> = self.boundary.values().map(Halfspace::primitive).collect();
        planes.sort_by(|a, b| (&a.normal, &a.offset).cmp(&(&b.normal, &b.offset)));
        planes.dedup_by(|a, b| a.normal == b.normal && a.offset == b.offset);
        planes
    }
}

pub fn convex_hull(a: &PointSet) -> LatticePolytope {
    let pts = a.points();
    let axes = chart_axes(pts);
    let dim = axes.len();
    if dim == 0 {
        return LatticePolytope {
            vertices: a.clone(),
            dim,
        };
    }
    let local = project(pts, &axes);
    let tri = Triangulation::build(&local);
    let planes = tri.facet_hyperplanes();
    let vertices: Vec<LatticePoint> = pts
        .iter()
        .zip(&local)
        .filter(|(_, q)| {
            let tight: Vec<Vec<BigInt>> = planes
                .iter()
                .filter(|h| dot(&h.normal, q) == h.offset)
                .map(|h| h.normal.clone())
                .collect();
            hermite_basis(dim, &tight).len() == dim
        })
        .map(|(p, _)| p.clone())
        .collect();
    LatticePolytope {
        vertices: PointSet::new(a.ambient_rank(), vertices).expect("a non-empty polytope has a vertex"),
        dim,
    }
}

/// `n!` times the Euclidean volume of `conv(A)` in the ambient lattice.
/// Zero for sets that are not full-dimensional.
pub fn lattice_volume(a: &PointSet) -> BigUint {
    let n = a.ambient_rank();
    if n == 0 {
        return BigUint::one();
    }
    let pts = a.points();
    if chart_axes(pts).len() < n {
        return BigUint::zero();
    }
    let coords: Vec<Vec<BigInt>> = pts.iter().map(|p| p.coords().to_vec()).collect();
    let vol = Triangulation::build(&coords).normalized_volume(&coords);
    vol.to_biguint().expect("volume is nonnegative")
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Mixed volume by inclusion–exclusion over the non-empty index subsets.
pub fn mixed_volume(sets: &[PointSet]) -> Result<BigUint, VolumeError> {
    let n = sets.first().map_or(0, PointSet::ambient_rank);
    if sets.is_empty() || sets.len() != n {
        return Err(VolumeError::Arity {
            expected: n,
            found: sets.len(),
        });
    }
    if let Some(s) = sets.iter().find(|s| s.ambient_rank() != n) {
        return Err(LatticeError::RankMismatch {
            expected: n,
            found: s.ambient_rank(),
        }
        .into());
    }
    let verts: Vec<PointSet> = sets.iter().map(|s| convex_hull(s).vertices().clone()).collect();
    let terms: Vec<BigInt> = (1u64..(1u64 << n))
        .into_par_iter()
        .map(|mask| {
            let mut idx = (0..n).filter(|i| mask & (1 << i) != 0);
            let first = idx.next().expect("mask is non-empty");
            let mut sum = verts[first].clone();
            for i in idx {
                sum = minkowski_sum(&sum, &verts[i]).expect("ranks checked");
                if sum.len() > 4 * (n + 1) {
                    sum = convex_hull(&sum).vertices().clone();
                }
            }
            let vol = BigInt::from(lattice_volume(&sum));
            if (n - mask.count_ones() as usize).is_multiple_of(2) {
                vol
            } else {
                -vol
            }
        })
        .collect();
    let total: BigInt = terms.into_iter().sum();
    let (q, r) = total.div_rem(&factorial(n));
    assert!(r.is_zero(), "mixed volume sum {total} not divisible by {n}!");
    assert!(q.sign() != Sign::Minus, "negative mixed volume {q}");
    Ok(q.to_biguint().expect("checked nonnegative"))
}

/// Generic number of torus solutions of a square system with these supports.
pub fn bkk_count(supports: &[PointSet]) -> Result<BigUint, VolumeError> {
    mixed_volume(supports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(n: usize, rows: &[&[i64]]) -> PointSet {
        PointSet::from_i64s(n, rows).unwrap()
    }

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn hull_collinear() {
        let h = convex_hull(&ps(1, &[&[0], &[1], &[2]]));
        assert_eq!(h.vertices(), &ps(1, &[&[0], &[2]]));
        let h = convex_hull(&ps(3, &[&[0, 0, 0], &[1, 1, 1], &[2, 2, 2], &[3, 3, 3]]));
        assert_eq!(h.vertices(), &ps(3, &[&[0, 0, 0], &[3, 3, 3]]));
        assert_eq!(h.dim(), 1);
    }

    #[test]
    fn hull_square_with_center() {
        let h = convex_hull(&ps(2, &[&[0, 0], &[2, 0], &[0, 2], &[2, 2], &[1, 1], &[1, 0]]));
        assert_eq!(h.vertices(), &ps(2, &[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]));
    }

    #[test]
    fn hull_planar_in_space() {
        let h = convex_hull(&ps(3, &[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1], &[0, 0, 1]]));
        assert_eq!(h.vertices().len(), 4);
        assert_eq!(h.dim(), 2);
    }

    #[test]
    fn volume_examples() {
        assert_eq!(lattice_volume(&ps(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])), big(1));
        assert_eq!(lattice_volume(&ps(1, &[&[0], &[3]])), big(3));
        assert_eq!(lattice_volume(&ps(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])), big(2));
        assert_eq!(lattice_volume(&ps(2, &[&[0, 0], &[1, 1], &[2, 2]])), big(0));
        // unit cube: 3! * 1
        let cube: Vec<Vec<i64>> = (0..8).map(|m| vec![m & 1, (m >> 1) & 1, (m >> 2) & 1]).collect();
        assert_eq!(lattice_volume(&PointSet::from_i64s(3, &cube).unwrap()), big(6));
    }

    #[test]
    fn mixed_volume_examples() {
        let tri = ps(2, &[&[0, 0], &[2, 0], &[0, 1]]);
        assert_eq!(mixed_volume(&[tri.clone(), tri.clone()]).unwrap(), lattice_volume(&tri));
        assert_eq!(mixed_volume(&[ps(2, &[&[0, 0], &[1, 0]]), ps(2, &[&[0, 0], &[0, 1]])]).unwrap(), big(1));
        assert_eq!(mixed_volume(&[ps(2, &[&[0, 0], &[1, 0]]), ps(2, &[&[0, 0], &[1, 1]])]).unwrap(), big(1));
    }

    #[test]
    fn bkk_examples() {
        let segs = [ps(3, &[&[0, 0, 0], &[2, 0, 0]]), ps(3, &[&[0, 0, 0], &[0, 3, 0]]), ps(3, &[&[0, 0, 0], &[0, 0, 4]])];
        assert_eq!(bkk_count(&segs).unwrap(), big(24));
        let with_point = [ps(2, &[&[0, 0], &[1, 0], &[0, 1]]), ps(2, &[&[5, 5]])];
        assert_eq!(bkk_count(&with_point).unwrap(), big(0));
        assert_eq!(bkk_count(&[ps(1, &[&[0], &[1], &[2]])]).unwrap(), big(2));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(mixed_volume(&[]), Err(VolumeError::Arity { .. })));
        assert!(matches!(
            mixed_volume(&[ps(2, &[&[0, 0]])]),
            Err(VolumeError::Arity { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn polarization_sign_identity() {
        // sum_l (-1)^{n-l} C(n,l) l^n = n!, the diagonal case of the
        // inclusion-exclusion over distinct index subsets.
        for n in 1..=8u32 {
            let mut total = BigInt::zero();
            let mut binom = BigInt::one();
            for l in 0..=n {
                if l > 0 {
                    binom = binom * BigInt::from(n - l + 1) / BigInt::from(l);
                }
                let term = &binom * BigInt::from(l).pow(n);
                if (n - l) % 2 == 0 {
                    total += term;
                } else {
                    total -= term;
                }
            }
            assert_eq!(total, factorial(n as usize));
        }
    }
}
