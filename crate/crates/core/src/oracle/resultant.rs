use rand::Rng;
use rayon::prelude::*;

use super::finite_field::{count_distinct_roots_closure, Elem, FiniteField, PrimeFieldPoly};
use super::sampling::to_i64_rows;
use super::{trial_rng, OracleError};
use crate::lattice::PointSet;

/// A bivariate Laurent polynomial as `(deg_x, deg_y, coefficient)` terms.
pub type Terms = Vec<(i64, i64, u64)>;

/// Per-trial distinct root counts; `None` marks a degenerate trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultantStats {
    pub prime: u64,
    pub counts: Vec<Option<u64>>,
}

impl ResultantStats {
    pub fn non_degenerate(&self) -> usize {
        self.counts.iter().flatten().count()
    }

    /// Fraction of non-degenerate trials whose count equals `target`.
    pub fn agreement(&self, target: u64) -> f64 {
        let hits = self.counts.iter().flatten().filter(|&&c| c == target).count();
        hits as f64 / self.non_degenerate().max(1) as f64
    }
}

type XPoly = Vec<Elem>;

fn trim(f: &FiniteField, mut a: XPoly) -> XPoly {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

fn xmul(f: &FiniteField, a: &[Elem], b: &[Elem]) -> XPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

fn xsub(f: &FiniteField, a: &[Elem], b: &[Elem]) -> XPoly {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n)
        .map(|i| f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    trim(f, out)
}

/// Determinant over `F_p[x]` by fraction-free elimination.
fn xdet(f: &FiniteField, mut m: Vec<Vec<XPoly>>) -> XPoly {
    let n = m.len();
    let mut sign_neg = false;
    let mut prev: XPoly = vec![f.one()];
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| !m[r][k].is_empty()) else {
            return Vec::new();
        };
        if piv != k {
            m.swap(piv, k);
            sign_neg = !sign_neg;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = xsub(f, &xmul(f, &m[i][j], &m[k][k]), &xmul(f, &m[i][k], &m[k][j]));
                let (q, r) = f.poly_divrem(&num, &prev);
                assert!(r.is_empty(), "fraction-free step must divide exactly");
                m[i][j] = q;
            }
            m[i][k] = Vec::new();
        }
        prev = m[k][k].clone();
    }
    let det = if n == 0 { vec![f.one()] } else { m[n - 1][n - 1].clone() };
    if sign_neg {
        det.iter().map(|c| f.neg(c)).collect()
    } else {
        det
    }
}

/// Coefficients in `y` (low first), each a polynomial in `x`, after
/// multiplying by the monomial that clears negative and surplus exponents.
fn as_y_poly(f: &FiniteField, terms: &Terms) -> Vec<XPoly> {
    let ax = terms.iter().map(|t| t.0).min().unwrap_or(0);
    let ay = terms.iter().map(|t| t.1).min().unwrap_or(0);
    let dy = terms.iter().map(|t| t.1 - ay).max().unwrap_or(0) as usize;
    let mut out: Vec<XPoly> = vec![Vec::new(); dy + 1];
    for &(a, b, c) in terms {
        let slot = &mut out[(b - ay) as usize];
        let deg = (a - ax) as usize;
        if slot.len() <= deg {
            slot.resize(deg + 1, f.zero());
        }
        slot[deg] = f.add(&slot[deg], &f.from_u64(c));
    }
    out.into_iter().map(|p| trim(f, p)).collect()
}

/// Sylvester resultant of two bivariate polynomials with respect to `y`.
pub fn sylvester_resultant_y(p: u64, f1: &Terms, f2: &Terms) -> Result<Vec<u64>, OracleError> {
    let field = FiniteField::prime(p)?;
    let g1 = as_y_poly(&field, f1);
    let g2 = as_y_poly(&field, f2);
    let (m1, m2) = (g1.len() - 1, g2.len() - 1);
    let size = m1 + m2;
    let mut mat: Vec<Vec<XPoly>> = vec![vec![Vec::new(); size]; size];
    for r in 0..m2 {
        for (i, c) in g1.iter().rev().enumerate() {
            mat[r][r + i] = c.clone();
        }
    }
    for r in 0..m1 {
        for (i, c) in g2.iter().rev().enumerate() {
            mat[m2 + r][r + i] = c.clone();
        }
    }
    Ok(xdet(&field, mat).into_iter().map(|c| c[0]).collect())
}

/// Distinct non-zero roots of `Res_y(f1, f2)`; `None` when `y` does not
/// occur or the resultant vanishes identically.
pub fn resultant_count_explicit(p: u64, f1: &Terms, f2: &Terms) -> Result<Option<u64>, OracleError> {
    let ys = |t: &Terms| t.iter().map(|x| x.1).max() != t.iter().map(|x| x.1).min();
    if !ys(f1) && !ys(f2) {
        return Ok(None);
    }
    let res = sylvester_resultant_y(p, f1, f2)?;
    if res.iter().all(|&c| c == 0) {
        return Ok(None);
    }
    let poly = PrimeFieldPoly::new(FiniteField::prime(p)?, res.into_iter().map(|c| vec![c]).collect())?;
    Ok(Some(count_distinct_roots_closure(&poly)?))
}

/// Basis `(a, b), (0, c)` of the lattice generated by `vectors`, or `None`
/// if it has rank below 2.
fn lattice_basis_2d(vectors: &[(i64, i64)]) -> Option<((i64, i64), i64)> {
    fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a.abs(), a.signum(), 0)
        } else {
            let (g, x, y) = egcd(b, a.rem_euclid(b));
            (g, y, x - a.div_euclid(b) * y)
        }
    }
    fn gcd(a: i64, b: i64) -> i64 {
        egcd(a, b).0
    }
    let mut row = (0i64, 0i64);
    let mut c = 0i64;
    for &v in vectors {
        if v.0 == 0 {
            c = gcd(c, v.1);
        } else if row.0 == 0 {
            c = gcd(c, row.1);
            row = v;
        } else {
            let (g, x, y) = egcd(row.0, v.0);
            let merged = (x * row.0 + y * v.0, x * row.1 + y * v.1);
            let cross = (v.0 / g) * row.1 - (row.0 / g) * v.1;
            c = gcd(c, cross);
            row = merged;
        }
    }
    if row.0 == 0 || c == 0 {
        return None;
    }
    Some(((row.0, row.1 % c), c))
}

/// For random coefficient draws, counts the torus solutions of the system
/// with supports `a1, a2` through a resultant.
///
/// Each support is translated to start at the origin and rewritten in a
/// basis of the lattice its differences generate; the reduced system's
/// solutions have pairwise distinct coordinates for generic draws once a
/// random unimodular change of coordinates is applied, so the distinct roots
/// of the resultant in `y` count them. Every reduced solution lifts to
/// `index` torus solutions, which multiplies the count.
pub fn resultant_count_2d(a1: &PointSet, a2: &PointSet, p: u64, trials: usize, seed: u64) -> Result<ResultantStats, OracleError> {
    FiniteField::prime(p)?;
    if a1.ambient_rank() != 2 || a2.ambient_rank() != 2 {
        return Err(OracleError::NotBivariate);
    }
    let shift = |rows: Vec<Vec<i64>>| -> Vec<(i64, i64)> {
        let base = rows[0].clone();
        rows.iter().map(|r| (r[0] - base[0], r[1] - base[1])).collect()
    };
    let s1 = shift(to_i64_rows(a1)?);
    let s2 = shift(to_i64_rows(a2)?);
    let all: Vec<(i64, i64)> = s1.iter().chain(&s2).copied().collect();
    let Some(((a, b), c)) = lattice_basis_2d(&all) else {
        return Ok(ResultantStats {
            prime: p,
            counts: vec![None; trials],
        });
    };
    let index = (a * c).unsigned_abs();
    let coords = |v: &(i64, i64)| {
        let alpha = v.0 / a;
        let beta = (v.1 - alpha * b) / c;
        debug_assert_eq!((alpha * a, alpha * b + beta * c), *v);
        (alpha, beta)
    };
    let r1: Vec<(i64, i64)> = s1.iter().map(coords).collect();
    let r2: Vec<(i64, i64)> = s2.iter().map(coords).collect();
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let s: i64 = rng.gen_range(-2..=2);
            let u: i64 = rng.gen_range(-2..=2);
            // (a, b) -> [[1, s], [0, 1]] [[1, 0], [u, 1]] (a, b)
            let map = |pt: &(i64, i64)| {
                let (x, y) = (pt.0, u * pt.0 + pt.1);
                (x + s * y, y)
            };
            let mut draw = |sup: &[(i64, i64)]| -> Terms {
                sup.iter()
                    .map(|pt| {
                        let (x, y) = map(pt);
                        (x, y, rng.gen_range(1..p))
                    })
                    .collect()
            };
            let f1 = draw(&r1);
            let f2 = draw(&r2);
            Ok(resultant_count_explicit(p, &f1, &f2)?.map(|k| k * index))
        })
        .collect::<Result<Vec<_>, OracleError>>()?;
    Ok(ResultantStats { prime: p, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_meets_line() {
        // y - x, y - 1
        let f1: Terms = vec![(0, 1, 1), (1, 0, 100)];
        let f2: Terms = vec![(0, 1, 1), (0, 0, 100)];
        let res = sylvester_resultant_y(101, &f1, &f2).unwrap();
        // +-(x - 1)
        assert_eq!(res.len(), 2);
        assert_eq!((res[0] + res[1]) % 101, 0);
        assert_eq!(resultant_count_explicit(101, &f1, &f2).unwrap(), Some(1));
    }

    #[test]
    fn unit_simplices_give_one() {
        let tri = PointSet::from_i64s(2, &[[0, 0], [1, 0], [0, 1]]).unwrap();
        let st = resultant_count_2d(&tri, &tri, 101, 30, 11).unwrap();
        assert!(st.agreement(1) >= 0.9);
    }

    #[test]
    fn mixed_volume_two() {
        // y^2 = a, x = b style supports: MVol 2, one common x without a shear
        let a1 = PointSet::from_i64s(2, &[[0, 0], [0, 2]]).unwrap();
        let a2 = PointSet::from_i64s(2, &[[0, 0], [1, 0]]).unwrap();
        let st = resultant_count_2d(&a1, &a2, 101, 40, 2).unwrap();
        assert!(st.agreement(2) >= 0.9);
    }

    #[test]
    fn index_two_lattice() {
        // both supports in {(a, b) : a + b even}
        let a1 = PointSet::from_i64s(2, &[[0, 0], [1, 1], [2, 0]]).unwrap();
        let a2 = PointSet::from_i64s(2, &[[0, 0], [1, -1], [0, 2]]).unwrap();
        let st = resultant_count_2d(&a1, &a2, 103, 40, 9).unwrap();
        assert!(st.counts.iter().flatten().all(|c| c % 2 == 0));
    }

    #[test]
    fn basis_2d() {
        assert_eq!(lattice_basis_2d(&[(2, 0), (0, 2), (1, 1)]), Some(((1, 1), 2)));
        assert_eq!(lattice_basis_2d(&[(0, 3), (0, 6)]), None);
        assert_eq!(lattice_basis_2d(&[(4, 6), (6, 9)]), None);
    }

    #[test]
    fn pure_x_is_degenerate() {
        let f: Terms = vec![(0, 0, 1), (1, 0, 2)];
        assert_eq!(resultant_count_explicit(101, &f, &f).unwrap(), None);
    }
}
