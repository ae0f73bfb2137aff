//! Exact integer-lattice arithmetic.
//!
//! Points of the character lattice `M = Z^n`, finite support sets, sublattices
//! in canonical Hermite form, and the Smith normal form with its unimodular
//! transforms. Every quantity is a `BigInt`; nothing here can overflow.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("point set must be non-empty")]
    EmptySet,
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("sublattice is not saturated; the quotient would have torsion")]
    NotSaturated,
    #[error("matrix data has {found} entries, expected {rows}x{cols}")]
    Shape { rows: usize, cols: usize, found: usize },
}

/// An exponent vector, i.e. a character of the torus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint(Vec<BigInt>);

impl LatticePoint {
    pub fn new(coords: Vec<BigInt>) -> Self {
        LatticePoint(coords)
    }

    pub fn from_i64s(coords: &[i64]) -> Self {
        LatticePoint(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        LatticePoint(vec![BigInt::zero(); rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.rank(), other.rank());
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        debug_assert_eq!(self.rank(), other.rank());
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Row-vector times matrix.
    pub fn mul_matrix(&self, m: &IntegerMatrix) -> LatticePoint {
        debug_assert_eq!(self.rank(), m.rows());
        let mut out = vec![BigInt::zero(); m.cols()];
        for (i, x) in self.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += x * m.get(i, j);
            }
        }
        LatticePoint(out)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A finite non-empty set of lattice points of a common ambient rank.
///
/// Points are kept sorted lexicographically and deduplicated, so iteration
/// order (and every column index derived from it) is canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    ambient_rank: usize,
    points: Vec<LatticePoint>,
}

impl PointSet {
    pub fn new(ambient_rank: usize, points: Vec<LatticePoint>) -> Result<Self, LatticeError> {
        if points.is_empty() {
            return Err(LatticeError::EmptySet);
        }
        if let Some(p) = points.iter().find(|p| p.rank() != ambient_rank) {
            return Err(LatticeError::RankMismatch {
                expected: ambient_rank,
                found: p.rank(),
            });
        }
        let mut points = points;
        points.sort();
        points.dedup();
        Ok(PointSet {
            ambient_rank,
            points,
        })
    }

    pub fn from_i64s<R: AsRef<[i64]>>(ambient_rank: usize, rows: &[R]) -> Result<Self, LatticeError> {
        PointSet::new(
            ambient_rank,
            rows.iter().map(|r| LatticePoint::from_i64s(r.as_ref())).collect(),
        )
    }

    pub fn singleton(point: LatticePoint) -> Self {
        PointSet {
            ambient_rank: point.rank(),
            points: vec![point],
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// Position of `p` in the canonical ordering.
    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    /// Lexicographically smallest point.
    pub fn base_point(&self) -> &LatticePoint {
        &self.points[0]
    }

    pub fn translate(&self, by: &LatticePoint) -> PointSet {
        let points = self.points.iter().map(|p| p.add(by)).collect();
        PointSet {
            ambient_rank: self.ambient_rank,
            points,
        }
    }

    /// Applies `x -> x * m` to every point (row-vector convention).
    pub fn transform(&self, m: &IntegerMatrix) -> Result<PointSet, LatticeError> {
        if m.rows() != self.ambient_rank {
            return Err(LatticeError::RankMismatch {
                expected: self.ambient_rank,
                found: m.rows(),
            });
        }
        PointSet::new(m.cols(), self.points.iter().map(|p| p.mul_matrix(m)).collect())
    }

    /// The generators `b - b0` for the lexicographically smallest `b0`.
    pub fn difference_generators(&self) -> Vec<LatticePoint> {
        let base = self.base_point();
        self.points[1..].iter().map(|p| p.sub(base)).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LatticePoint> {
        self.points.iter()
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a LatticePoint;
    type IntoIter = std::slice::Iter<'a, LatticePoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LatticeError> {
        if entries.len() != rows * cols {
            return Err(LatticeError::Shape {
                rows,
                cols,
                found: entries.len(),
            });
        }
        Ok(IntegerMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from rows; all rows must have `cols` entries.
    pub fn from_rows(cols: usize, rows: &[Vec<BigInt>]) -> Result<Self, LatticeError> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LatticeError::Shape {
                    rows: rows.len(),
                    cols,
                    found: r.len(),
                });
            }
            entries.extend(r.iter().cloned());
        }
        Ok(IntegerMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let entries = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.as_ref().len(), cols, "ragged matrix rows");
                r.as_ref().iter().map(|&x| BigInt::from(x))
            })
            .collect();
        IntegerMatrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn from_points(cols: usize, points: &[LatticePoint]) -> Self {
        let entries = points
            .iter()
            .flat_map(|p| {
                assert_eq!(p.rank(), cols);
                p.coords().iter().cloned()
            })
            .collect();
        IntegerMatrix {
            rows: points.len(),
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_point(&self, r: usize) -> LatticePoint {
        LatticePoint::new(self.row(r).to_vec())
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut t = IntegerMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.entries[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[dst] += factor * row[src]`
    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = self.get(src, c) * factor;
            self.entries[dst * self.cols + c] += v;
        }
    }

    /// `col[dst] += factor * col[src]`
    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = self.get(r, src) * factor;
            self.entries[r * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let idx = r * self.cols + c;
            self.entries[idx] = -std::mem::take(&mut self.entries[idx]);
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination. Panics if not square.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
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
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal, `d1 | d2 | ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (form, _) = smith_with_inverse(a);
    form
}

/// Smith form together with `V^{-1}`, tracked alongside `V` so no inversion is
/// needed afterwards.
///
/// Pivot rule: smallest nonzero absolute value in the active block, ties by
/// (row, col). Outputs are fully deterministic.
fn smith_with_inverse(a: &IntegerMatrix) -> (SmithForm, IntegerMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);
    let mut v_inv = IntegerMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = d.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => x.abs() < d.get(bi, bj).abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return (SmithForm { u, d, v }, v_inv);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -(d.get(i, t) / d.get(t, t));
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -(d.get(t, j) / d.get(t, t));
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                // V <- V E  implies  V^{-1} <- E^{-1} V^{-1}
                v_inv.add_row_multiple(t, j, &(-&q));
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let pivot = d.get(t, t).clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    (SmithForm { u, d, v }, v_inv)
}

/// Canonical row-style Hermite basis of the lattice spanned by `gens`.
///
/// Pivots are positive, entries above a pivot lie in `[0, pivot)`, zero rows
/// are dropped. Two generator sets span the same lattice iff their Hermite
/// bases are equal.
pub fn hermite_basis(cols: usize, gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        // Euclid down column c among rows r..
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                if best.is_none_or(|b| rows[i][c].abs() < rows[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(r, b);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = &rows[i][c] / &rows[r][c];
                for k in c..cols {
                    let v = &q * &rows[r][k];
                    rows[i][k] -= v;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            for i in 0..r {
                let q = rows[i][c].div_floor(&rows[r][c]);
                if q.is_zero() {
                    continue;
                }
                for k in c..cols {
                    let v = &q * &rows[r][k];
                    rows[i][k] -= v;
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

fn hermite_of_points(cols: usize, points: &[LatticePoint]) -> Vec<LatticePoint> {
    let gens: Vec<Vec<BigInt>> = points.iter().map(|p| p.coords().to_vec()).collect();
    hermite_basis(cols, &gens).into_iter().map(LatticePoint::new).collect()
}

/// Rank of the lattice generated by `B - B`.
pub fn dim_of_set(b: &PointSet) -> usize {
    hermite_of_points(b.ambient_rank(), &b.difference_generators()).len()
}

/// Rank of the integer span of arbitrary generators.
pub fn span_rank(cols: usize, gens: &[LatticePoint]) -> usize {
    hermite_of_points(cols, gens).len()
}

pub fn minkowski_sum(a: &PointSet, b: &PointSet) -> Result<PointSet, LatticeError> {
    if a.ambient_rank() != b.ambient_rank() {
        return Err(LatticeError::RankMismatch {
            expected: a.ambient_rank(),
            found: b.ambient_rank(),
        });
    }
    let mut pts = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            pts.push(p.add(q));
        }
    }
    PointSet::new(a.ambient_rank(), pts)
}

/// `B - B`; always contains the origin.
pub fn difference_set(b: &PointSet) -> PointSet {
    let mut pts = Vec::with_capacity(b.len() * b.len());
    for p in b {
        for q in b {
            pts.push(p.sub(q));
        }
    }
    PointSet::new(b.ambient_rank(), pts).expect("difference set of a non-empty set is non-empty")
}

/// A sublattice of `Z^n`, stored by its canonical Hermite basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: Vec<LatticePoint>,
}

/// Unimodular change of basis adapted to a sublattice `L` of rank `r`:
/// the first `r` rows of `basis` span the saturation of `L`, and
/// `x * coords` gives the coordinates of `x` in that basis.
#[derive(Debug, Clone)]
struct AdaptedFrame {
    rank: usize,
    basis: IntegerMatrix,
    coords: IntegerMatrix,
}

impl Sublattice {
    pub fn span(ambient_rank: usize, generators: &[LatticePoint]) -> Result<Self, LatticeError> {
        if let Some(g) = generators.iter().find(|g| g.rank() != ambient_rank) {
            return Err(LatticeError::RankMismatch {
                expected: ambient_rank,
                found: g.rank(),
            });
        }
        Ok(Sublattice {
            ambient_rank,
            basis: hermite_of_points(ambient_rank, generators),
        })
    }

    pub fn full(ambient_rank: usize) -> Self {
        let id = IntegerMatrix::identity(ambient_rank);
        Sublattice {
            ambient_rank,
            basis: (0..ambient_rank).map(|i| id.row_point(i)).collect(),
        }
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Sublattice {
            ambient_rank,
            basis: Vec::new(),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[LatticePoint] {
        &self.basis
    }

    pub fn contains(&self, x: &LatticePoint) -> bool {
        let mut gens = self.basis.clone();
        gens.push(x.clone());
        Sublattice::span(self.ambient_rank, &gens).map(|s| s == *self).unwrap_or(false)
    }

    fn frame(&self) -> AdaptedFrame {
        let b = IntegerMatrix::from_points(self.ambient_rank, &self.basis);
        let (form, v_inv) = smith_with_inverse(&b);
        AdaptedFrame {
            rank: self.rank(),
            basis: v_inv,
            coords: form.v,
        }
    }

    /// The smallest saturated sublattice containing `self`.
    pub fn saturation(&self) -> Sublattice {
        let frame = self.frame();
        let gens: Vec<LatticePoint> = (0..frame.rank).map(|i| frame.basis.row_point(i)).collect();
        Sublattice {
            ambient_rank: self.ambient_rank,
            basis: hermite_of_points(self.ambient_rank, &gens),
        }
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation() == *self
    }

    /// Coordinates of `x` in the Smith-adapted basis of a saturated lattice,
    /// or `None` if `x` is not in the lattice.
    pub fn coordinates(&self, x: &LatticePoint) -> Result<Option<Vec<BigInt>>, LatticeError> {
        if !self.is_saturated() {
            return Err(LatticeError::NotSaturated);
        }
        let frame = self.frame();
        let c = x.mul_matrix(&frame.coords).into_coords();
        if c[frame.rank..].iter().any(|v| !v.is_zero()) {
            return Ok(None);
        }
        Ok(Some(c[..frame.rank].to_vec()))
    }
}

impl fmt::Display for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ">")
    }
}

/// Saturation as a free function, mirroring the other operations.
pub fn saturation(l: &Sublattice) -> Sublattice {
    l.saturation()
}

/// Images of `a` in `M / L`, in coordinates of the Smith-adapted complement
/// basis. `L` must be saturated so the quotient is free.
pub fn quotient_project(a: &PointSet, l: &Sublattice) -> Result<PointSet, LatticeError> {
    if a.ambient_rank() != l.ambient_rank() {
        return Err(LatticeError::RankMismatch {
            expected: l.ambient_rank(),
            found: a.ambient_rank(),
        });
    }
    if !l.is_saturated() {
        return Err(LatticeError::NotSaturated);
    }
    let frame = l.frame();
    let q = a.ambient_rank() - frame.rank;
    let pts = a
        .iter()
        .map(|p| LatticePoint::new(p.mul_matrix(&frame.coords).into_coords().split_off(frame.rank)))
        .collect();
    PointSet::new(q, pts)
}

/// Expresses points of a saturated `L` in the adapted basis of `L`, giving a
/// point set in `Z^{rank L}`. Fails if some point is outside `L`.
pub fn express_in_sublattice(a: &PointSet, l: &Sublattice) -> Result<Option<PointSet>, LatticeError> {
    let mut pts = Vec::with_capacity(a.len());
    for p in a {
        match l.coordinates(p)? {
            Some(c) => pts.push(LatticePoint::new(c)),
            None => return Ok(None),
        }
    }
    PointSet::new(l.rank(), pts).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(n: usize, rows: &[&[i64]]) -> PointSet {
        PointSet::from_i64s(n, rows).unwrap()
    }

    fn lat(n: usize, rows: &[&[i64]]) -> Sublattice {
        let g: Vec<LatticePoint> = rows.iter().map(|r| LatticePoint::from_i64s(r)).collect();
        Sublattice::span(n, &g).unwrap()
    }

    fn check_smith(a: &IntegerMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
        s
    }

    #[test]
    fn smith_identity() {
        let id = IntegerMatrix::identity(2);
        let s = check_smith(&id);
        assert_eq!(s.u, id);
        assert_eq!(s.d, id);
        assert_eq!(s.v, id);
    }

    #[test]
    fn smith_two_by_two() {
        let s = check_smith(&IntegerMatrix::from_i64_rows(&[[2, 4], [6, 8]]));
        assert_eq!(s.d, IntegerMatrix::from_i64_rows(&[[2, 0], [0, 4]]));
    }

    #[test]
    fn smith_zero_and_rectangular() {
        let z = IntegerMatrix::zeros(2, 2);
        assert_eq!(check_smith(&z).d, z);
        let s = check_smith(&IntegerMatrix::from_i64_rows(&[[0, 3, 6], [2, 4, 0]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
        let s = check_smith(&IntegerMatrix::zeros(0, 3));
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn dim_examples() {
        assert_eq!(dim_of_set(&ps(2, &[&[3, 5]])), 0);
        assert_eq!(dim_of_set(&ps(2, &[&[0, 0], &[2, 0], &[4, 0]])), 1);
        assert_eq!(dim_of_set(&ps(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])), 2);
    }

    #[test]
    fn empty_set_rejected() {
        assert_eq!(PointSet::new(2, vec![]), Err(LatticeError::EmptySet));
        assert!(matches!(
            PointSet::from_i64s(2, &[vec![1, 2], vec![1]]),
            Err(LatticeError::RankMismatch { .. })
        ));
    }

    #[test]
    fn minkowski_examples() {
        let b = ps(2, &[&[1, 2], &[3, -1]]);
        assert_eq!(minkowski_sum(&ps(2, &[&[0, 0]]), &b).unwrap(), b);
        assert_eq!(minkowski_sum(&ps(1, &[&[0], &[1]]), &ps(1, &[&[0], &[1]])).unwrap(), ps(1, &[&[0], &[1], &[2]]));
        assert_eq!(
            minkowski_sum(&ps(2, &[&[0, 0], &[1, 0]]), &ps(2, &[&[0, 0], &[0, 1]])).unwrap(),
            ps(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
        );
        assert!(minkowski_sum(&ps(1, &[&[0]]), &b).is_err());
    }

    #[test]
    fn difference_examples() {
        assert_eq!(difference_set(&ps(2, &[&[4, 4]])), ps(2, &[&[0, 0]]));
        assert_eq!(difference_set(&ps(1, &[&[0], &[3]])), ps(1, &[&[-3], &[0], &[3]]));
        let sq = difference_set(&ps(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]));
        let mut grid = Vec::new();
        for x in -1..=1 {
            for y in -1..=1 {
                grid.push(vec![x, y]);
            }
        }
        assert_eq!(sq, PointSet::from_i64s(2, &grid).unwrap());
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(lat(2, &[&[2, 0]]).saturation(), lat(2, &[&[1, 0]]));
        assert_eq!(lat(2, &[&[2, 2]]).saturation(), lat(2, &[&[1, 1]]));
        assert_eq!(lat(2, &[&[1, 0], &[0, 2]]).saturation(), Sublattice::full(2));
        let s = lat(3, &[&[2, 4, 6], &[0, 3, 3]]).saturation();
        assert_eq!(s.rank(), 2);
        assert_eq!(s.saturation(), s);
    }

    #[test]
    fn quotient_examples() {
        let a = ps(2, &[&[0, 0], &[1, 0], &[0, 1]]);
        let q = quotient_project(&a, &lat(2, &[&[1, 0]])).unwrap();
        assert_eq!(q.ambient_rank(), 1);
        assert_eq!(q.len(), 2);
        assert_eq!(dim_of_set(&q), 1);

        let q = quotient_project(&a, &Sublattice::full(2)).unwrap();
        assert_eq!(q.ambient_rank(), 0);
        assert_eq!(q.len(), 1);

        let q = quotient_project(&ps(2, &[&[0, 0], &[1, 0]]), &lat(2, &[&[1, 1]])).unwrap();
        assert_eq!(q.len(), 2);
        let d = q.points()[1].sub(&q.points()[0]);
        assert!(d.coords()[0].abs().is_one());

        assert_eq!(quotient_project(&a, &lat(2, &[&[2, 0]])), Err(LatticeError::NotSaturated));
    }

    #[test]
    fn coordinates_in_sublattice() {
        let l = lat(3, &[&[1, 1, 0], &[0, 0, 1]]);
        let c = l.coordinates(&LatticePoint::from_i64s(&[2, 2, 5])).unwrap();
        assert!(c.is_some());
        assert_eq!(l.coordinates(&LatticePoint::from_i64s(&[1, 0, 0])).unwrap(), None);
    }

    #[test]
    fn hermite_is_canonical() {
        let a = hermite_basis(2, &[vec![BigInt::from(4), BigInt::from(6)], vec![BigInt::from(2), BigInt::from(2)]]);
        let b = hermite_basis(2, &[vec![BigInt::from(2), BigInt::from(2)], vec![BigInt::from(0), BigInt::from(2)]]);
        assert_eq!(a, b);
    }
}
