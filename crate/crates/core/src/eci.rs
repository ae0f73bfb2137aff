//! Adjusted collections for engineered complete intersections.
//!
//! A coefficient matrix `c` over a support `A` encodes the system
//! `c_1 * f = ... = c_d * f = 0`, where `*` multiplies coefficients entrywise.
//! Columns are addressed by their index in the (sorted) support.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{determinant, invert, mat_mul, Characteristic, FieldScalar};
use crate::khovanskii::{khovanskii_condition, KhovanskiiError, SupportFamily, MAX_EQUATIONS};
use crate::lattice::{LatticeError, PointSet};
use crate::verdict::Verdict;

/// A subset of a support, as sorted column indices.
pub type Delta = BTreeSet<usize>;

/// Column counts up to which `SearchMode::AllOrders` is accepted.
pub const MAX_EXHAUSTIVE_COLUMNS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EciError {
    #[error("a coefficient matrix needs at least one row")]
    NoRows,
    #[error("row {row} has {found} entries, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("characteristic mismatch: expected {expected}, found {found}")]
    CharacteristicMismatch { expected: Characteristic, found: Characteristic },
    #[error("rows of different length ({0} vs {1})")]
    SupportMismatch(usize, usize),
    #[error("column index {index} out of range for a support of size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("{expected} subsets required, {found} given")]
    DeltaCount { expected: usize, found: usize },
    #[error("order is not a permutation of the support")]
    InvalidOrder,
    #[error("rows are linearly dependent: combination {combination:?} vanishes")]
    DependentRows { combination: Vec<FieldScalar> },
    #[error("transform must be an invertible {expected}x{expected} matrix")]
    BadTransform { expected: usize },
    #[error("value tuple has length {found}, expected {expected}")]
    LambdaArity { expected: usize, found: usize },
    #[error("fibre {index} of the coefficient functions is empty")]
    EmptyFibre { index: usize },
    #[error("the value matrix of the prescribed fibres is singular")]
    SingularLambda,
    #[error("the value matrix extended by column {column} is singular")]
    SingularLambdaChi { column: usize },
    #[error("exhaustive order search is limited to {MAX_EXHAUSTIVE_COLUMNS} columns, support has {0}")]
    ExhaustiveTooLarge(usize),
    #[error("no coefficient matrices given")]
    NoMatrices,
    #[error("certificate does not match the matrices: {0}")]
    MalformedCertificate(String),
    #[error(transparent)]
    Khovanskii(#[from] KhovanskiiError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `d` coefficient vectors `c_1..c_d` on a common support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientMatrix {
    support: PointSet,
    characteristic: Characteristic,
    rows: Vec<Vec<FieldScalar>>,
}

impl CoefficientMatrix {
    pub fn new(support: PointSet, characteristic: Characteristic, rows: Vec<Vec<FieldScalar>>) -> Result<Self, EciError> {
        if rows.is_empty() {
            return Err(EciError::NoRows);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != support.len() {
                return Err(EciError::RowLength {
                    row: i,
                    expected: support.len(),
                    found: row.len(),
                });
            }
            if let Some(x) = row.iter().find(|x| x.characteristic() != characteristic) {
                return Err(EciError::CharacteristicMismatch {
                    expected: characteristic,
                    found: x.characteristic(),
                });
            }
        }
        Ok(CoefficientMatrix {
            support,
            characteristic,
            rows,
        })
    }

    /// Integer rows reduced into the characteristic.
    pub fn from_i64_rows(support: PointSet, characteristic: Characteristic, rows: &[&[i64]]) -> Result<Self, EciError> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| FieldScalar::from_i64(x, characteristic)).collect())
            .collect();
        CoefficientMatrix::new(support, characteristic, rows)
    }

    pub fn support(&self) -> &PointSet {
        &self.support
    }

    pub fn characteristic(&self) -> Characteristic {
        self.characteristic
    }

    pub fn rows(&self) -> &[Vec<FieldScalar>] {
        &self.rows
    }

    /// Number of equations `d`.
    pub fn d(&self) -> usize {
        self.rows.len()
    }

    pub fn columns(&self) -> usize {
        self.support.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &FieldScalar {
        &self.rows[row][col]
    }

    pub fn column(&self, col: usize) -> Vec<FieldScalar> {
        self.rows.iter().map(|r| r[col].clone()).collect()
    }

    /// `transform * rows`, with `transform` square of size `d`.
    pub fn apply_transform(&self, transform: &[Vec<FieldScalar>]) -> Result<CoefficientMatrix, EciError> {
        let d = self.d();
        if transform.len() != d || transform.iter().any(|r| r.len() != d) {
            return Err(EciError::BadTransform { expected: d });
        }
        if let Some(x) = transform.iter().flatten().find(|x| x.characteristic() != self.characteristic) {
            return Err(EciError::CharacteristicMismatch {
                expected: self.characteristic,
                found: x.characteristic(),
            });
        }
        Ok(CoefficientMatrix {
            support: self.support.clone(),
            characteristic: self.characteristic,
            rows: mat_mul(transform, &self.rows, self.characteristic),
        })
    }

    pub fn rank(&self) -> usize {
        let order: Vec<usize> = (0..self.columns()).collect();
        eliminate(&self.rows, &order, self.characteristic).pivots.len()
    }

    /// Greedy maximal subfamily of rows independent of the rows kept before
    /// them; returns the kept row indices.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut kept: Vec<usize> = Vec::new();
        let order: Vec<usize> = (0..self.columns()).collect();
        for i in 0..self.d() {
            let mut trial: Vec<Vec<FieldScalar>> = kept.iter().map(|&k| self.rows[k].clone()).collect();
            trial.push(self.rows[i].clone());
            if eliminate(&trial, &order, self.characteristic).pivots.len() == trial.len() {
                kept.push(i);
            }
        }
        kept
    }

    /// The matrix restricted to the given rows.
    pub fn select_rows(&self, rows: &[usize]) -> Result<CoefficientMatrix, EciError> {
        CoefficientMatrix::new(
            self.support.clone(),
            self.characteristic,
            rows.iter().map(|&r| self.rows[r].clone()).collect(),
        )
    }

    /// The support points addressed by a column subset.
    pub fn delta_points(&self, delta: &Delta) -> Result<PointSet, EciError> {
        let pts = delta.iter().map(|&i| self.support.points()[i].clone()).collect();
        Ok(PointSet::new(self.support.ambient_rank(), pts)?)
    }

    fn check_indices(&self, delta: &Delta) -> Result<(), EciError> {
        match delta.iter().find(|&&i| i >= self.columns()) {
            Some(&index) => Err(EciError::IndexOutOfRange {
                index,
                len: self.columns(),
            }),
            None => Ok(()),
        }
    }
}

/// Entrywise product `(c * f)[chi] = c[chi] f[chi]`.
pub fn star_product(c: &[FieldScalar], f: &[FieldScalar]) -> Result<Vec<FieldScalar>, EciError> {
    if c.len() != f.len() {
        return Err(EciError::SupportMismatch(c.len(), f.len()));
    }
    c.iter()
        .zip(f)
        .map(|(a, b)| {
            if a.same_field(b) {
                Ok(a * b)
            } else {
                Err(EciError::CharacteristicMismatch {
                    expected: a.characteristic(),
                    found: b.characteristic(),
                })
            }
        })
        .collect()
}

/// Whether rows `c_i` are adjusted to `deltas`: `c_i` is nonzero on `Δ_i`
/// and vanishes on every `Δ_j` with `j < i`.
pub fn is_adjusted(m: &CoefficientMatrix, deltas: &[Delta]) -> Result<bool, EciError> {
    if deltas.len() != m.d() {
        return Err(EciError::DeltaCount {
            expected: m.d(),
            found: deltas.len(),
        });
    }
    for delta in deltas {
        m.check_indices(delta)?;
    }
    for (i, row) in m.rows.iter().enumerate() {
        if deltas[i].iter().any(|&chi| row[chi].is_zero()) {
            return Ok(false);
        }
        if deltas[..i].iter().flatten().any(|&chi| !row[chi].is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reduced row echelon form under a column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    /// Invertible `d x d` matrix with `transform * c = rows`.
    pub transform: Vec<Vec<FieldScalar>>,
    pub rows: Vec<Vec<FieldScalar>>,
    /// Pivot column of each row, increasing in the order.
    pub pivots: Vec<usize>,
}

fn is_permutation(order: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    order.len() == n && order.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

/// Gauss–Jordan on `rows` visiting columns in `order`; rows that become zero
/// sink to the bottom with their vanishing combinations in `transform`.
fn eliminate(rows: &[Vec<FieldScalar>], order: &[usize], ch: Characteristic) -> Echelon {
    let d = rows.len();
    let mut a = rows.to_vec();
    let mut t: Vec<Vec<FieldScalar>> = (0..d)
        .map(|i| (0..d).map(|j| FieldScalar::from_i64((i == j) as i64, ch)).collect())
        .collect();
    let mut pivots = Vec::new();
    for &col in order {
        let r = pivots.len();
        if r == d {
            break;
        }
        let Some(p) = (r..d).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        t.swap(r, p);
        let s = a[r][col].inv().expect("nonzero pivot");
        a[r] = a[r].iter().map(|x| x * &s).collect();
        t[r] = t[r].iter().map(|x| x * &s).collect();
        for i in 0..d {
            if i == r || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            let (ar, tr) = (a[r].clone(), t[r].clone());
            for (x, y) in a[i].iter_mut().zip(&ar) {
                *x = &*x - &(&f * y);
            }
            for (x, y) in t[i].iter_mut().zip(&tr) {
                *x = &*x - &(&f * y);
            }
        }
        pivots.push(col);
    }
    Echelon {
        transform: t,
        rows: a,
        pivots,
    }
}

/// Reduced row echelon form of `m` with columns visited in `order`.
pub fn row_echelon(m: &CoefficientMatrix, order: &[usize]) -> Result<Echelon, EciError> {
    if !is_permutation(order, m.columns()) {
        return Err(EciError::InvalidOrder);
    }
    let e = eliminate(&m.rows, order, m.characteristic);
    if e.pivots.len() < m.d() {
        return Err(EciError::DependentRows {
            combination: e.transform[e.pivots.len()].clone(),
        });
    }
    Ok(e)
}

/// Subsets `Δ_1..Δ_d` together with the row transform adjusting `c` to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjustedCollection {
    pub deltas: Vec<Delta>,
    pub transform: Vec<Vec<FieldScalar>>,
}

impl AdjustedCollection {
    pub fn adjusted_rows(&self, m: &CoefficientMatrix) -> Result<CoefficientMatrix, EciError> {
        m.apply_transform(&self.transform)
    }

    /// Transform invertible, adjusted rows adjusted to the deltas, deltas
    /// pairwise disjoint.
    pub fn verify(&self, m: &CoefficientMatrix) -> Result<bool, EciError> {
        let adjusted = self.adjusted_rows(m)?;
        if invert(&self.transform, m.characteristic).is_none() {
            return Ok(false);
        }
        if !is_adjusted(&adjusted, &self.deltas)? {
            return Ok(false);
        }
        let total: usize = self.deltas.iter().map(BTreeSet::len).sum();
        let union: BTreeSet<usize> = self.deltas.iter().flatten().copied().collect();
        Ok(total == union.len())
    }

    pub fn point_sets(&self, m: &CoefficientMatrix) -> Result<Vec<PointSet>, EciError> {
        self.deltas.iter().map(|d| m.delta_points(d)).collect()
    }
}

/// `Δ_i = {χ : χ_i ⪯ χ ≺ χ_{i+1}, ĉ_i[χ] ≠ 0}` for the echelon form under
/// `order`, with pivots `χ_1 ≺ ... ≺ χ_d`.
pub fn maximal_adjusted_collection(m: &CoefficientMatrix, order: &[usize]) -> Result<AdjustedCollection, EciError> {
    let e = row_echelon(m, order)?;
    let mut deltas = vec![Delta::new(); m.d()];
    let mut current: Option<usize> = None;
    for &col in order {
        let next = current.map_or(0, |c| c + 1);
        if next < m.d() && e.pivots[next] == col {
            current = Some(next);
        }
        if let Some(i) = current {
            if !e.rows[i][col].is_zero() {
                deltas[i].insert(col);
            }
        }
    }
    let coll = AdjustedCollection {
        deltas,
        transform: e.transform,
    };
    debug_assert!(coll.verify(m).unwrap_or(false));
    Ok(coll)
}

/// `{χ : c_i[χ] = λ_i for all i}`.
pub fn fibres_of_coefficients(m: &CoefficientMatrix, lambda: &[FieldScalar]) -> Result<Delta, EciError> {
    if lambda.len() != m.d() {
        return Err(EciError::LambdaArity {
            expected: m.d(),
            found: lambda.len(),
        });
    }
    Ok((0..m.columns())
        .filter(|&col| m.rows.iter().zip(lambda).all(|(row, l)| &row[col] == l))
        .collect())
}

/// Adjusts `c` to the coefficient fibres `Δ_{λ_1}, ..., Δ_{λ_{d-1}}` and the
/// prescribed `Δ_d`.
///
/// The first `d - 1` rows are normalised so that `ĉ_i` equals the indicator
/// of fibre `i` on the fibres, then `ĉ_d = c_d - Σ λ_{i,d} ĉ_i`.
pub fn fibre_adjust(m: &CoefficientMatrix, lambdas: &[Vec<FieldScalar>], delta_d: &Delta) -> Result<AdjustedCollection, EciError> {
    let d = m.d();
    let ch = m.characteristic;
    if lambdas.len() + 1 != d {
        return Err(EciError::DeltaCount {
            expected: d,
            found: lambdas.len() + 1,
        });
    }
    m.check_indices(delta_d)?;
    let mut deltas = Vec::with_capacity(d);
    for (index, lambda) in lambdas.iter().enumerate() {
        let fibre = fibres_of_coefficients(m, lambda)?;
        if fibre.is_empty() {
            return Err(EciError::EmptyFibre { index });
        }
        deltas.push(fibre);
    }
    deltas.push(delta_d.clone());

    // Λ[i][j] = λ_{j,i} for i, j < d - 1
    let lam: Vec<Vec<FieldScalar>> = (0..d - 1)
        .map(|i| (0..d - 1).map(|j| lambdas[j][i].clone()).collect())
        .collect();
    let lam_inv = invert(&lam, ch).ok_or(EciError::SingularLambda)?;
    for &col in delta_d {
        let ext: Vec<Vec<FieldScalar>> = (0..d)
            .map(|i| {
                let mut row: Vec<FieldScalar> = (0..d - 1).map(|j| lambdas[j][i].clone()).collect();
                row.push(m.rows[i][col].clone());
                row
            })
            .collect();
        if determinant(&ext, ch).is_zero() {
            return Err(EciError::SingularLambdaChi { column: col });
        }
    }

    let zero = FieldScalar::zero(ch);
    let mut transform: Vec<Vec<FieldScalar>> = lam_inv
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.push(zero.clone());
            r
        })
        .collect();
    let mut last: Vec<FieldScalar> = (0..d - 1)
        .map(|k| {
            (0..d - 1).fold(zero.clone(), |acc, i| &acc - &(&lambdas[i][d - 1] * &lam_inv[i][k]))
        })
        .collect();
    last.push(FieldScalar::one(ch));
    transform.push(last);

    let coll = AdjustedCollection { deltas, transform };
    assert!(coll.verify(m)?, "fibre adjustment produced a non-adjusted collection");
    Ok(coll)
}

/// How column orders are explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Ordered pivot tuples with a nonsingular minor; every other column is
    /// placed in the unique interval that keeps it in a delta.
    PivotSequences,
    /// Every permutation of the columns (small supports only).
    AllOrders,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_states: u64,
    pub mode: SearchMode,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_states: 1_000_000,
            mode: SearchMode::PivotSequences,
        }
    }
}

/// One matrix's share of a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateEntry {
    pub matrix_index: usize,
    /// Column order realising the collection as a maximal one; absent for
    /// collections obtained by fibre adjustment.
    pub order: Option<Vec<usize>>,
    pub collection: AdjustedCollection,
}

/// Adjusted collections, one per matrix, whose union satisfies the
/// Khovanskii condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EciCertificate {
    pub entries: Vec<CertificateEntry>,
}

fn check_matrices(matrices: &[CoefficientMatrix]) -> Result<(), EciError> {
    let first = matrices.first().ok_or(EciError::NoMatrices)?;
    for m in matrices {
        if m.characteristic != first.characteristic {
            return Err(EciError::CharacteristicMismatch {
                expected: first.characteristic,
                found: m.characteristic,
            });
        }
        if m.support.ambient_rank() != first.support.ambient_rank() {
            return Err(LatticeError::RankMismatch {
                expected: first.support.ambient_rank(),
                found: m.support.ambient_rank(),
            }
            .into());
        }
    }
    Ok(())
}

/// Re-derives every claim a certificate makes: each order reproduces its
/// collection, each collection is adjusted, and the pooled deltas satisfy
/// the Khovanskii condition.
pub fn verify_certificate(matrices: &[CoefficientMatrix], cert: &EciCertificate) -> Result<bool, EciError> {
    check_matrices(matrices)?;
    let indices: Vec<usize> = cert.entries.iter().map(|e| e.matrix_index).collect();
    if indices != (0..matrices.len()).collect::<Vec<_>>() {
        return Err(EciError::MalformedCertificate(format!(
            "expected one entry per matrix in order, found indices {indices:?}"
        )));
    }
    let mut pooled = Vec::new();
    for entry in &cert.entries {
        let m = &matrices[entry.matrix_index];
        if entry.collection.deltas.len() != m.d() {
            return Ok(false);
        }
        if entry.collection.deltas.iter().any(BTreeSet::is_empty) {
            return Ok(false);
        }
        if !entry.collection.verify(m)? {
            return Ok(false);
        }
        if let Some(order) = &entry.order {
            let again = maximal_adjusted_collection(m, order)?;
            if again.deltas != entry.collection.deltas {
                return Ok(false);
            }
        }
        pooled.extend(entry.collection.point_sets(m)?);
    }
    if pooled.len() > MAX_EQUATIONS {
        return Err(KhovanskiiError::TooManyEquations(pooled.len()).into());
    }
    Ok(khovanskii_condition(&SupportFamily::new(pooled)?).0)
}

#[derive(Debug, Clone)]
struct Candidate {
    order: Vec<usize>,
    collection: AdjustedCollection,
    sets: Vec<PointSet>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Permutations of `0..k` in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..k).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// Candidates for one pivot set, one per ordering of the pivots.
fn candidates_for_pivot_set(m: &CoefficientMatrix, set: &[usize]) -> Result<Vec<Candidate>, EciError> {
    let ch = m.characteristic;
    let d = m.d();
    let minor: Vec<Vec<FieldScalar>> = m.rows.iter().map(|r| set.iter().map(|&c| r[c].clone()).collect()).collect();
    let Some(inv) = invert(&minor, ch) else {
        return Ok(Vec::new());
    };
    // base[k] is 1 on set[k] and 0 on the other pivots
    let base = mat_mul(&inv, &m.rows, ch);
    let mut out = Vec::new();
    for perm in permutations(d) {
        let pivots: Vec<usize> = perm.iter().map(|&k| set[k]).collect();
        let mut deltas = vec![Delta::new(); d];
        let mut zero_cols = Vec::new();
        for col in 0..m.columns() {
            match (0..d).rev().find(|&i| !base[perm[i]][col].is_zero()) {
                Some(i) => {
                    deltas[i].insert(col);
                }
                None => zero_cols.push(col),
            }
        }
        let mut order = Vec::with_capacity(m.columns());
        for (i, delta) in deltas.iter().enumerate() {
            order.push(pivots[i]);
            order.extend(delta.iter().filter(|&&c| c != pivots[i]));
        }
        order.extend(zero_cols);
        let transform: Vec<Vec<FieldScalar>> = perm.iter().map(|&k| inv[k].clone()).collect();
        let collection = AdjustedCollection { deltas, transform };
        let sets = collection.point_sets(m)?;
        out.push(Candidate { order, collection, sets });
    }
    Ok(out)
}

/// Distinct maximal collections of one matrix, in canonical enumeration
/// order, together with the number of states visited.
fn matrix_candidates(m: &CoefficientMatrix, opts: &SearchOptions, budget: u64) -> Result<(Vec<Candidate>, u64, bool), EciError> {
    let mut states = 0u64;
    let mut raw: Vec<Candidate> = Vec::new();
    let mut exhausted = false;
    match opts.mode {
        SearchMode::PivotSequences => {
            let sets = combinations(m.columns(), m.d());
            let per_set = (1..=m.d() as u64).product::<u64>();
            let affordable = (budget / per_set.max(1)) as usize;
            if affordable < sets.len() {
                exhausted = true;
            }
            let take = sets.len().min(affordable);
            let found: Vec<Result<Vec<Candidate>, EciError>> =
                sets[..take].par_iter().map(|s| candidates_for_pivot_set(m, s)).collect();
            states += take as u64 * per_set;
            for f in found {
                raw.extend(f?);
            }
        }
        SearchMode::AllOrders => {
            if m.columns() > MAX_EXHAUSTIVE_COLUMNS {
                return Err(EciError::ExhaustiveTooLarge(m.columns()));
            }
            let orders = permutations(m.columns());
            if (budget as usize) < orders.len() {
                exhausted = true;
            }
            let take = orders.len().min(budget as usize);
            let found: Vec<Result<Candidate, EciError>> = orders[..take]
                .par_iter()
                .map(|order| {
                    let collection = maximal_adjusted_collection(m, order)?;
                    let sets = collection.point_sets(m)?;
                    Ok(Candidate {
                        order: order.clone(),
                        collection,
                        sets,
                    })
                })
                .collect();
            states += take as u64;
            for f in found {
                raw.push(f?);
            }
        }
    }
    let mut seen: HashSet<Vec<Delta>> = HashSet::new();
    let unique: Vec<Candidate> = raw
        .into_iter()
        .filter(|c| seen.insert(c.collection.deltas.clone()))
        .collect();
    // a collection failing on its own fails inside any pooled family
    let viable: Vec<Candidate> = unique
        .into_par_iter()
        .filter(|c| {
            c.sets.iter().all(|s| !s.is_empty())
                && SupportFamily::new(c.sets.clone()).is_ok_and(|f| khovanskii_condition(&f).0)
        })
        .collect();
    Ok((viable, states, exhausted))
}

/// Searches column orders for adjusted collections whose union satisfies
/// the Khovanskii condition.
///
/// Success yields `Irreducible` with a re-verified certificate. The
/// condition is only sufficient, so failure yields `Inconclusive`.
pub fn search_irreducibility_certificate(matrices: &[CoefficientMatrix], opts: &SearchOptions) -> Result<Verdict, EciError> {
    check_matrices(matrices)?;
    for m in matrices {
        let order: Vec<usize> = (0..m.columns()).collect();
        row_echelon(m, &order)?;
    }
    let total_d: usize = matrices.iter().map(CoefficientMatrix::d).sum();
    if total_d > MAX_EQUATIONS {
        return Err(KhovanskiiError::TooManyEquations(total_d).into());
    }

    let mut states = 0u64;
    let mut exhausted = false;
    let mut per_matrix = Vec::with_capacity(matrices.len());
    for m in matrices {
        let (cands, used, ex) = matrix_candidates(m, opts, opts.max_states.saturating_sub(states))?;
        states += used;
        exhausted |= ex;
        if cands.is_empty() {
            let reason = if exhausted {
                "search budget exhausted".to_string()
            } else {
                "no column order yields a collection satisfying the Khovanskii condition".to_string()
            };
            return Ok(Verdict::Inconclusive {
                reason,
                explored_states: states,
            });
        }
        per_matrix.push(cands);
    }

    // odometer over one candidate per matrix, first matrix slowest
    let mut idx = vec![0usize; matrices.len()];
    loop {
        if states >= opts.max_states {
            return Ok(Verdict::Inconclusive {
                reason: "search budget exhausted".to_string(),
                explored_states: states,
            });
        }
        states += 1;
        let pooled: Vec<PointSet> = idx
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| per_matrix[i][k].sets.iter().cloned())
            .collect();
        if khovanskii_condition(&SupportFamily::new(pooled)?).0 {
            let cert = EciCertificate {
                entries: idx
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| CertificateEntry {
                        matrix_index: i,
                        order: Some(per_matrix[i][k].order.clone()),
                        collection: per_matrix[i][k].collection.clone(),
                    })
                    .collect(),
            };
            assert!(
                verify_certificate(matrices, &cert)?,
                "search produced a certificate that fails re-verification"
            );
            return Ok(Verdict::Irreducible {
                certificate: Some(cert),
            });
        }
        let mut pos = matrices.len();
        loop {
            if pos == 0 {
                let reason = if exhausted {
                    "search budget exhausted".to_string()
                } else {
                    "no combination of column orders yields a collection satisfying the Khovanskii condition".to_string()
                };
                return Ok(Verdict::Inconclusive {
                    reason,
                    explored_states: states,
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_matrix[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Groups the columns of `m` by their value tuple `(c_1[χ], ..., c_d[χ])`.
pub fn coefficient_fibres(m: &CoefficientMatrix) -> BTreeMap<Vec<FieldScalar>, Delta> {
    let mut out: BTreeMap<Vec<FieldScalar>, Delta> = BTreeMap::new();
    for col in 0..m.columns() {
        out.entry(m.column(col)).or_default().insert(col);
    }
    out
}
