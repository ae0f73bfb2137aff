//! Encoders for critical loci as engineered complete intersections, and the
//! stratified sufficient condition driven by a label function `l: A -> k`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::eci::{
    fibre_adjust, search_irreducibility_certificate, CertificateEntry, CoefficientMatrix, Delta, EciCertificate,
    EciError, SearchOptions,
};
use crate::field::{Characteristic, FieldScalar};
use crate::khovanskii::{khovanskii_condition, SupportFamily};
use crate::lattice::{dim_of_set, LatticePoint, PointSet};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriticalError {
    #[error("variable index {index} out of range for rank {rank}")]
    VariableOutOfRange { index: usize, rank: usize },
    #[error("gradient pattern needs two distinct variables")]
    RepeatedVariable,
    #[error("label function is not defined at {0}")]
    MissingLabel(LatticePoint),
    #[error("label function is defined at {0}, which is outside the support")]
    ExtraLabel(LatticePoint),
    #[error("label {value} lives in characteristic {found}, expected {expected}")]
    LabelCharacteristic {
        value: FieldScalar,
        expected: Characteristic,
        found: Characteristic,
    },
    #[error(transparent)]
    Eci(#[from] EciError),
}

/// Which derivatives vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativePattern {
    /// `f = ∂_x f = ... = ∂_x^r f = 0`.
    Tower { x: usize, r: usize },
    /// `∂_x f = ∂_y f = 0`.
    Gradient { x: usize, y: usize },
}

impl DerivativePattern {
    pub fn validate(&self, rank: usize) -> Result<(), CriticalError> {
        let check = |index: usize| {
            if index < rank {
                Ok(())
            } else {
                Err(CriticalError::VariableOutOfRange { index, rank })
            }
        };
        match *self {
            DerivativePattern::Tower { x, .. } => check(x),
            DerivativePattern::Gradient { x, y } => {
                check(x)?;
                check(y)?;
                if x == y {
                    Err(CriticalError::RepeatedVariable)
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn encode(&self, a: &PointSet, ch: Characteristic) -> Result<CoefficientMatrix, CriticalError> {
        match *self {
            DerivativePattern::Tower { x, r } => encode_derivative_tower(a, x, r, ch),
            DerivativePattern::Gradient { x, y } => encode_gradient(a, x, y, ch),
        }
    }
}

/// `d (d - 1) ... (d - k + 1)` as an exact integer.
fn falling_factorial(d: &BigInt, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, j| acc * (d - BigInt::from(j)))
}

/// Rows `c_i[χ] = p_i(deg_x χ)` for `i = 1..r+1`, with `p_i` the falling
/// factorial of length `i - 1`, so that `c_i * f = x^{i-1} ∂_x^{i-1} f`.
pub fn encode_derivative_tower(a: &PointSet, x: usize, r: usize, ch: Characteristic) -> Result<CoefficientMatrix, CriticalError> {
    DerivativePattern::Tower { x, r }.validate(a.ambient_rank())?;
    let rows = (0..=r)
        .map(|i| {
            a.iter()
                .map(|p| FieldScalar::from_integer(&falling_factorial(&p.coords()[x], i), ch))
                .collect()
        })
        .collect();
    Ok(CoefficientMatrix::new(a.clone(), ch, rows)?)
}

/// Rows `deg_x χ` and `deg_y χ`, encoding `x ∂_x f = y ∂_y f = 0`.
pub fn encode_gradient(a: &PointSet, x: usize, y: usize, ch: Characteristic) -> Result<CoefficientMatrix, CriticalError> {
    DerivativePattern::Gradient { x, y }.validate(a.ambient_rank())?;
    let rows = [x, y]
        .iter()
        .map(|&v| a.iter().map(|p| FieldScalar::from_integer(&p.coords()[v], ch)).collect())
        .collect();
    Ok(CoefficientMatrix::new(a.clone(), ch, rows)?)
}

/// Coefficient lists (constant term first) of the falling factorials used
/// by the tower encoding, `p_1, ..., p_d`.
pub fn falling_factorial_polys(d: usize, ch: Characteristic) -> Vec<Vec<FieldScalar>> {
    let mut polys: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
    for j in 0..d.saturating_sub(1) {
        let prev = polys.last().expect("non-empty");
        // multiply by (t - j)
        let mut next = vec![BigInt::from(0); prev.len() + 1];
        for (k, c) in prev.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * BigInt::from(j);
        }
        polys.push(next);
    }
    polys
        .into_iter()
        .take(d)
        .map(|p| p.iter().map(|c| FieldScalar::from_integer(c, ch)).collect())
        .collect()
}

fn eval_poly(coeffs: &[FieldScalar], t: &FieldScalar) -> FieldScalar {
    coeffs
        .iter()
        .rev()
        .fold(FieldScalar::zero(t.characteristic()), |acc, c| &(&acc * t) + c)
}

/// A total function from a support to the field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelFunction {
    characteristic: Characteristic,
    values: BTreeMap<LatticePoint, FieldScalar>,
}

impl LabelFunction {
    pub fn new(support: &PointSet, characteristic: Characteristic, values: BTreeMap<LatticePoint, FieldScalar>) -> Result<Self, CriticalError> {
        if let Some(p) = support.iter().find(|p| !values.contains_key(*p)) {
            return Err(CriticalError::MissingLabel(p.clone()));
        }
        if let Some(p) = values.keys().find(|p| !support.contains(p)) {
            return Err(CriticalError::ExtraLabel(p.clone()));
        }
        if let Some(v) = values.values().find(|v| v.characteristic() != characteristic) {
            return Err(CriticalError::LabelCharacteristic {
                value: v.clone(),
                expected: characteristic,
                found: v.characteristic(),
            });
        }
        Ok(LabelFunction { characteristic, values })
    }

    /// `χ ↦ deg_x χ` reduced into the characteristic.
    pub fn degree(support: &PointSet, x: usize, characteristic: Characteristic) -> Result<Self, CriticalError> {
        if x >= support.ambient_rank() {
            return Err(CriticalError::VariableOutOfRange {
                index: x,
                rank: support.ambient_rank(),
            });
        }
        let values = support
            .iter()
            .map(|p| (p.clone(), FieldScalar::from_integer(&p.coords()[x], characteristic)))
            .collect();
        LabelFunction::new(support, characteristic, values)
    }

    pub fn characteristic(&self) -> Characteristic {
        self.characteristic
    }

    pub fn get(&self, p: &LatticePoint) -> Option<&FieldScalar> {
        self.values.get(p)
    }

    /// Value-to-points map, in increasing value order.
    pub fn fibres(&self) -> BTreeMap<FieldScalar, Vec<LatticePoint>> {
        let mut out: BTreeMap<FieldScalar, Vec<LatticePoint>> = BTreeMap::new();
        for (p, v) in &self.values {
            out.entry(v.clone()).or_default().push(p.clone());
        }
        out
    }
}

/// Outcome of a hypothesis check, with the first failure explained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisCheck {
    pub ok: bool,
    pub reason: Option<String>,
}

impl HypothesisCheck {
    fn pass() -> Self {
        HypothesisCheck { ok: true, reason: None }
    }

    fn fail(reason: String) -> Self {
        HypothesisCheck {
            ok: false,
            reason: Some(reason),
        }
    }
}

/// Checks the stratified hypotheses for `m`, `l`, `deltas` and polynomials
/// `p_1..p_d` given by coefficient lists (constant term first):
///
/// 1. `deg p_i = i - 1`;
/// 2. every `Δ_i` is non-empty and `c_i[χ] = p_i(l(χ))` on the union;
/// 3. `l` is constant on `Δ_i` for `i < d`;
/// 4. `l` takes disjoint value sets on distinct deltas.
pub fn check_stratified_hypotheses(m: &CoefficientMatrix, l: &LabelFunction, deltas: &[Delta], polys: &[Vec<FieldScalar>]) -> HypothesisCheck {
    let d = m.d();
    if deltas.len() != d {
        return HypothesisCheck::fail(format!("{} subsets given for {d} rows", deltas.len()));
    }
    if polys.len() != d {
        return HypothesisCheck::fail(format!("{} polynomials given for {d} rows", polys.len()));
    }
    for (i, p) in polys.iter().enumerate() {
        let degree = p.iter().rposition(|c| !c.is_zero());
        if degree != Some(i) {
            return HypothesisCheck::fail(format!("polynomial {} must have degree {i}", i + 1));
        }
        if p.iter().any(|c| c.characteristic() != m.characteristic()) {
            return HypothesisCheck::fail(format!("polynomial {} is over the wrong field", i + 1));
        }
    }
    if l.characteristic() != m.characteristic() {
        return HypothesisCheck::fail("label function is over the wrong field".into());
    }
    let mut labels: Vec<Vec<FieldScalar>> = Vec::with_capacity(d);
    for (i, delta) in deltas.iter().enumerate() {
        if delta.is_empty() {
            return HypothesisCheck::fail(format!("subset {} is empty", i + 1));
        }
        let mut vals = Vec::new();
        for &col in delta {
            let Some(point) = m.support().points().get(col) else {
                return HypothesisCheck::fail(format!("column {col} is outside the support"));
            };
            let Some(v) = l.get(point) else {
                return HypothesisCheck::fail(format!("label missing at {point}"));
            };
            for (k, p) in polys.iter().enumerate() {
                if m.entry(k, col) != &eval_poly(p, v) {
                    return HypothesisCheck::fail(format!("row {} differs from p_{}(l) at {point}", k + 1, k + 1));
                }
            }
            vals.push(v.clone());
        }
        if i + 1 < d && vals.iter().any(|v| v != &vals[0]) {
            return HypothesisCheck::fail(format!("label is not constant on subset {}", i + 1));
        }
        labels.push(vals);
    }
    for i in 0..d {
        for j in i + 1..d {
            if labels[i].iter().any(|v| labels[j].contains(v)) {
                return HypothesisCheck::fail(format!("subsets {} and {} share a label value", i + 1, j + 1));
            }
        }
    }
    HypothesisCheck::pass()
}

/// Picks `d` fibres of `l` of dimension greater than `d` (largest first,
/// ties by smaller label), adjusts the rows to them and tests the Khovanskii
/// condition.
pub fn auto_certificate_stratified(m: &CoefficientMatrix, l: &LabelFunction) -> Result<Verdict, CriticalError> {
    let d = m.d();
    let inconclusive = |reason: String| Verdict::Inconclusive {
        reason,
        explored_states: 1,
    };
    let n = m.support().ambient_rank();
    let mut strata: Vec<(usize, FieldScalar, Vec<LatticePoint>)> = l
        .fibres()
        .into_iter()
        .map(|(v, pts)| {
            let dim = dim_of_set(&PointSet::new(n, pts.clone()).expect("non-empty fibre"));
            (dim, v, pts)
        })
        .filter(|(dim, _, _)| *dim > d)
        .collect();
    strata.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    if strata.len() < d {
        return Ok(inconclusive(format!(
            "only {} fibres of the label function have dimension above {d}",
            strata.len()
        )));
    }
    let chosen = &strata[..d];
    let column_of = |p: &LatticePoint| m.support().index_of(p).expect("label fibre lies in the support");
    let mut lambdas = Vec::with_capacity(d - 1);
    for (_, value, pts) in &chosen[..d - 1] {
        let column = m.column(column_of(&pts[0]));
        if pts.iter().any(|p| m.column(column_of(p)) != column) {
            return Ok(inconclusive(format!("coefficients are not constant on the fibre l = {value}")));
        }
        lambdas.push(column);
    }
    let delta_d: Delta = chosen[d - 1].2.iter().map(column_of).collect();
    let collection = match fibre_adjust(m, &lambdas, &delta_d) {
        Ok(c) => c,
        Err(e @ (EciError::SingularLambda | EciError::SingularLambdaChi { .. })) => {
            return Ok(inconclusive(format!("fibre adjustment failed: {e}")));
        }
        Err(e) => return Err(e.into()),
    };
    let sets = collection.point_sets(m)?;
    let family = SupportFamily::new(sets).map_err(EciError::from)?;
    if let (false, witness) = khovanskii_condition(&family) {
        return Ok(inconclusive(format!(
            "adjusted fibres violate the Khovanskii condition at {}",
            witness.expect("violation has a witness")
        )));
    }
    Ok(Verdict::Irreducible {
        certificate: Some(EciCertificate {
            entries: vec![CertificateEntry {
                matrix_index: 0,
                order: None,
                collection,
            }],
        }),
    })
}

/// Result of analysing a derivative pattern on one support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalAnalysis {
    /// The full encoding.
    pub matrix: CoefficientMatrix,
    /// Rows kept after discarding those implied by earlier rows.
    pub kept_rows: Vec<usize>,
    pub verdict: Verdict,
}

/// Encodes the pattern, discards equations implied by earlier ones (e.g.
/// `x^2 ∂_x^2 f`, whose coefficients all vanish in characteristic 2), and
/// searches for an irreducibility certificate of the remaining system.
pub fn analyze_critical_locus(a: &PointSet, pattern: DerivativePattern, ch: Characteristic, opts: &SearchOptions) -> Result<CriticalAnalysis, CriticalError> {
    let matrix = pattern.encode(a, ch)?;
    let kept_rows = matrix.independent_rows();
    let verdict = if kept_rows.is_empty() {
        Verdict::Inconclusive {
            reason: "every equation of the pattern vanishes identically".into(),
            explored_states: 0,
        }
    } else {
        let reduced = matrix.select_rows(&kept_rows)?;
        search_irreducibility_certificate(&[reduced], opts)?
    };
    Ok(CriticalAnalysis {
        matrix,
        kept_rows,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Characteristic = Characteristic::Zero;

    fn powers(k: i64) -> PointSet {
        let rows: Vec<Vec<i64>> = (0..k).map(|i| vec![i]).collect();
        PointSet::from_i64s(1, &rows).unwrap()
    }

    fn row(ch: Characteristic, xs: &[i64]) -> Vec<FieldScalar> {
        xs.iter().map(|&x| FieldScalar::from_i64(x, ch)).collect()
    }

    fn delta(cols: &[usize]) -> Delta {
        cols.iter().copied().collect()
    }

    #[test]
    fn tower_examples() {
        let a = powers(4);
        let m = encode_derivative_tower(&a, 0, 1, Q).unwrap();
        assert_eq!(m.rows().to_vec(), vec![row(Q, &[1, 1, 1, 1]), row(Q, &[0, 1, 2, 3])]);
        let m2 = encode_derivative_tower(&a, 0, 2, Q).unwrap();
        assert_eq!(m2.rows()[2], row(Q, &[0, 0, 2, 6]));
        let f2 = Characteristic::Prime(2);
        let m3 = encode_derivative_tower(&a, 0, 1, f2).unwrap();
        assert_eq!(m3.rows().to_vec(), vec![row(f2, &[1, 1, 1, 1]), row(f2, &[0, 1, 0, 1])]);
        let m0 = encode_derivative_tower(&a, 0, 0, Q).unwrap();
        assert_eq!(m0.rows().to_vec(), vec![row(Q, &[1, 1, 1, 1])]);
        assert!(encode_derivative_tower(&a, 1, 1, Q).is_err());
    }

    #[test]
    fn gradient_examples() {
        let a = PointSet::from_i64s(2, &[[0, 0], [1, 0], [0, 1]]).unwrap();
        let m = encode_gradient(&a, 0, 1, Q).unwrap();
        // support order is 1, y, x
        assert_eq!(m.rows().to_vec(), vec![row(Q, &[0, 0, 1]), row(Q, &[0, 1, 0])]);
        let xy = PointSet::from_i64s(2, &[[1, 1]]).unwrap();
        assert_eq!(encode_gradient(&xy, 0, 1, Q).unwrap().rows().to_vec(), vec![row(Q, &[1]), row(Q, &[1])]);
        let f3 = Characteristic::Prime(3);
        let x3 = PointSet::from_i64s(2, &[[3, 0]]).unwrap();
        assert!(encode_gradient(&x3, 0, 1, f3).unwrap().rows()[0][0].is_zero());
        assert_eq!(encode_gradient(&xy, 1, 1, Q), Err(CriticalError::RepeatedVariable));
    }

    #[test]
    fn falling_factorial_coefficients() {
        let p = falling_factorial_polys(3, Q);
        assert_eq!(p[0], row(Q, &[1]));
        assert_eq!(p[1], row(Q, &[0, 1]));
        assert_eq!(p[2], row(Q, &[0, -1, 1]));
    }

    #[test]
    fn stratified_hypotheses() {
        let a = powers(4);
        let m = encode_derivative_tower(&a, 0, 1, Q).unwrap();
        let l = LabelFunction::degree(&a, 0, Q).unwrap();
        let polys = falling_factorial_polys(2, Q);
        assert!(check_stratified_hypotheses(&m, &l, &[delta(&[0]), delta(&[1, 2, 3])], &polys).ok);
        let shared = check_stratified_hypotheses(&m, &l, &[delta(&[1]), delta(&[1, 2])], &polys);
        assert!(!shared.ok);
        let mut bad_rows = m.rows().to_vec();
        bad_rows[1][2] = FieldScalar::from_i64(5, Q);
        let bad = CoefficientMatrix::new(a.clone(), Q, bad_rows).unwrap();
        let r = check_stratified_hypotheses(&bad, &l, &[delta(&[0]), delta(&[1, 2, 3])], &polys);
        assert!(!r.ok);
        assert!(r.reason.unwrap().contains("row 2"));
    }

    #[test]
    fn auto_certificate_on_large_strata() {
        // three strata deg_x = 0, 1, 2, each a unit 3-simplex in the other axes
        let mut pts = Vec::new();
        for k in 0..3 {
            for e in [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]] {
                pts.push(vec![k, e[0], e[1], e[2]]);
            }
        }
        let a = PointSet::from_i64s(4, &pts).unwrap();
        let m = encode_derivative_tower(&a, 0, 1, Q).unwrap();
        let l = LabelFunction::degree(&a, 0, Q).unwrap();
        let v = auto_certificate_stratified(&m, &l).unwrap();
        let cert = v.certificate().expect("irreducible with certificate");
        assert!(crate::eci::verify_certificate(std::slice::from_ref(&m), cert).unwrap());

        // d = 3 needs three strata of dimension >= 4
        let m3 = encode_derivative_tower(&a, 0, 2, Q).unwrap();
        assert!(matches!(auto_certificate_stratified(&m3, &l).unwrap(), Verdict::Inconclusive { .. }));
    }

    #[test]
    fn auto_certificate_needs_enough_fibres() {
        let a = PointSet::from_i64s(3, &[[0, 0, 0], [0, 1, 0], [0, 0, 1], [0, 1, 1]]).unwrap();
        let m = encode_derivative_tower(&a, 0, 1, Q).unwrap();
        let l = LabelFunction::degree(&a, 0, Q).unwrap();
        assert!(matches!(auto_certificate_stratified(&m, &l).unwrap(), Verdict::Inconclusive { .. }));
    }

    #[test]
    fn char_two_second_derivative_is_dropped() {
        let a = PointSet::from_i64s(3, &[[0, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 0], [1, 1, 0], [1, 0, 1], [3, 0, 0]]).unwrap();
        let f2 = Characteristic::Prime(2);
        let res = analyze_critical_locus(&a, DerivativePattern::Tower { x: 0, r: 2 }, f2, &SearchOptions::default()).unwrap();
        assert_eq!(res.kept_rows, vec![0, 1]);
        assert_eq!(res.verdict.tag(), "irreducible");
    }

    #[test]
    fn label_function_validation() {
        let a = powers(2);
        let mut vals = BTreeMap::new();
        vals.insert(LatticePoint::from_i64s(&[0]), FieldScalar::from_i64(0, Q));
        assert!(matches!(LabelFunction::new(&a, Q, vals.clone()), Err(CriticalError::MissingLabel(_))));
        vals.insert(LatticePoint::from_i64s(&[1]), FieldScalar::from_i64(0, Q));
        vals.insert(LatticePoint::from_i64s(&[5]), FieldScalar::from_i64(0, Q));
        assert!(matches!(LabelFunction::new(&a, Q, vals), Err(CriticalError::ExtraLabel(_))));
    }
}
