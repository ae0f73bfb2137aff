use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::eci::CoefficientMatrix;
use crate::field::FieldScalar;
use crate::lattice::PointSet;

/// A term `mult * c_sym * x^exps` of a polynomial with indeterminate
/// coefficients `c_sym`.
#[derive(Debug, Clone)]
struct Term {
    sym: usize,
    mult: BigInt,
    exps: Vec<BigInt>,
}

/// Differentiates the generic `f = Σ c_χ χ` directly and checks that row `i`
/// of `m` lists the coefficient of `c_χ χ` in `x^i ∂_x^i f`, for `i = 0..=r`.
///
/// Only characteristic-zero matrices are compared.
pub fn symbolic_tower_check(a: &PointSet, x: usize, r: usize, m: &CoefficientMatrix) -> bool {
    if m.d() != r + 1 || m.support() != a || x >= a.ambient_rank() {
        return false;
    }
    let generic: Vec<Term> = a
        .iter()
        .enumerate()
        .map(|(sym, p)| Term {
            sym,
            mult: BigInt::one(),
            exps: p.coords().to_vec(),
        })
        .collect();
    let mut current = generic;
    for i in 0..=r {
        // x^i ∂^i f: raise the x exponent back by i
        let mut by_monomial: BTreeMap<Vec<BigInt>, BTreeMap<usize, BigInt>> = BTreeMap::new();
        for t in &current {
            let mut e = t.exps.clone();
            e[x] += BigInt::from(i);
            *by_monomial.entry(e).or_default().entry(t.sym).or_insert_with(BigInt::zero) += &t.mult;
        }
        for (col, p) in a.iter().enumerate() {
            let expected = by_monomial
                .get(p.coords())
                .and_then(|forms| forms.get(&col))
                .cloned()
                .unwrap_or_else(BigInt::zero);
            let others_vanish = by_monomial
                .get(p.coords())
                .is_none_or(|forms| forms.iter().all(|(s, v)| *s == col || v.is_zero()));
            let matches = match m.entry(i, col) {
                FieldScalar::Rational(q) => q.is_integer() && q.numer() == &expected,
                FieldScalar::Modular { .. } => false,
            };
            if !matches || !others_vanish {
                return false;
            }
        }
        current = current
            .into_iter()
            .filter_map(|mut t| {
                t.mult *= &t.exps[x];
                if t.mult.is_zero() {
                    return None;
                }
                t.exps[x] -= 1;
                Some(t)
            })
            .collect();
    }
    true
}
