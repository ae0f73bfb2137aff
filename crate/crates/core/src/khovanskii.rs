//! Defects of support families, the Khovanskii condition, and the count of
//! geometric components of a generic system with prescribed supports.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::lattice::{express_in_sublattice, hermite_basis, LatticeError, LatticePoint, PointSet, Sublattice};
use crate::polytope::{mixed_volume, VolumeError};
use crate::verdict::Verdict;

/// Subset enumeration is exponential in the number of equations.
pub const MAX_EQUATIONS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KhovanskiiError {
    #[error("a support family needs at least one support")]
    EmptyFamily,
    #[error("{0} equations exceed the limit of {MAX_EQUATIONS}")]
    TooManyEquations(usize),
    #[error("index subset must be non-empty")]
    EmptySubset,
    #[error("index {index} out of range for {len} supports")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

/// A set of equation indices, stored as a bitmask (bit `i` = equation `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSubset(u32);

impl IndexSubset {
    pub fn from_bits(bits: u32) -> Self {
        IndexSubset(bits)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        IndexSubset(indices.iter().fold(0, |acc, &i| acc | (1 << i)))
    }

    pub fn full(m: usize) -> Self {
        IndexSubset(((1u64 << m) - 1) as u32)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn union(self, other: IndexSubset) -> IndexSubset {
        IndexSubset(self.0 | other.0)
    }

    pub fn intersection(self, other: IndexSubset) -> IndexSubset {
        IndexSubset(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: IndexSubset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Zero-based indices in increasing order.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    /// Every non-empty subset of `{0..m}`, by increasing bitmask.
    pub fn all_nonempty(m: usize) -> impl Iterator<Item = IndexSubset> {
        (1u32..=IndexSubset::full(m).0).map(IndexSubset)
    }
}

impl PartialOrd for IndexSubset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Smaller subsets first, then lexicographic on the sorted index lists.
impl Ord for IndexSubset {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.indices().cmp(&other.indices()))
    }
}

/// Displays one-based indices, e.g. `{1,2}`.
impl fmt::Display for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `A_1, ..., A_m` in a common lattice `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportFamily {
    ambient_rank: usize,
    supports: Vec<PointSet>,
}

impl SupportFamily {
    pub fn new(supports: Vec<PointSet>) -> Result<Self, KhovanskiiError> {
        let first = supports.first().ok_or(KhovanskiiError::EmptyFamily)?;
        let n = first.ambient_rank();
        if supports.len() > MAX_EQUATIONS {
            return Err(KhovanskiiError::TooManyEquations(supports.len()));
        }
        if let Some(s) = supports.iter().find(|s| s.ambient_rank() != n) {
            return Err(LatticeError::RankMismatch {
                expected: n,
                found: s.ambient_rank(),
            }
            .into());
        }
        Ok(SupportFamily {
            ambient_rank: n,
            supports,
        })
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn supports(&self) -> &[PointSet] {
        &self.supports
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    fn check_subset(&self, j: IndexSubset) -> Result<(), KhovanskiiError> {
        if j.is_empty() {
            return Err(KhovanskiiError::EmptySubset);
        }
        if let Some(&i) = j.indices().iter().find(|&&i| i >= self.len()) {
            return Err(KhovanskiiError::IndexOutOfRange { index: i, len: self.len() });
        }
        Ok(())
    }

    /// `dim(sum_{j in J} A_j)` for every subset, indexed by bitmask.
    ///
    /// The dimension of a Minkowski sum is the rank of the union of the
    /// summands' difference generators, so each entry extends the Hermite
    /// basis of a smaller subset instead of forming the sum.
    fn sum_dimensions(&self) -> Vec<usize> {
        let m = self.len();
        let own: Vec<Vec<Vec<BigInt>>> = self
            .supports
            .iter()
            .map(|s| {
                let gens: Vec<Vec<BigInt>> = s.difference_generators().into_iter().map(LatticePoint::into_coords).collect();
                hermite_basis(self.ambient_rank, &gens)
            })
            .collect();
        let mut bases: Vec<Vec<Vec<BigInt>>> = vec![Vec::new(); 1 << m];
        let mut dims = vec![0usize; 1 << m];
        for mask in 1usize..(1 << m) {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let basis = if rest == 0 {
                own[low].clone()
            } else {
                let mut gens = bases[rest].clone();
                gens.extend(own[low].iter().cloned());
                hermite_basis(self.ambient_rank, &gens)
            };
            dims[mask] = basis.len();
            bases[mask] = basis;
        }
        dims
    }
}

/// `dim(sum_{j in J} A_j) - |J|`.
pub fn defect(family: &SupportFamily, j: IndexSubset) -> Result<i64, KhovanskiiError> {
    family.check_subset(j)?;
    let gens: Vec<Vec<BigInt>> = j
        .indices()
        .iter()
        .flat_map(|&i| family.supports[i].difference_generators())
        .map(LatticePoint::into_coords)
        .collect();
    Ok(hermite_basis(family.ambient_rank, &gens).len() as i64 - j.len() as i64)
}

/// All defects of a family, with the extremal subsets picked out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectReport {
    pub defects: BTreeMap<IndexSubset, i64>,
    pub min_defect: i64,
    /// Canonically smallest subset attaining `min_defect`.
    pub witness: IndexSubset,
    /// Greatest zero-defect subset, present exactly when every defect is
    /// nonnegative and some defect is zero.
    pub j0: Option<IndexSubset>,
}

impl DefectReport {
    pub fn compute(family: &SupportFamily) -> DefectReport {
        let dims = family.sum_dimensions();
        let defects: BTreeMap<IndexSubset, i64> = IndexSubset::all_nonempty(family.len())
            .map(|j| (j, dims[j.bits() as usize] as i64 - j.len() as i64))
            .collect();
        let (&witness, &min_defect) = defects
            .iter()
            .min_by(|a, b| a.1.cmp(b.1).then_with(|| a.0.cmp(b.0)))
            .expect("family is non-empty");
        let j0 = (min_defect == 0).then(|| {
            defects
                .iter()
                .filter(|(_, &d)| d == 0)
                .fold(IndexSubset::default(), |acc, (j, _)| acc.union(*j))
        });
        DefectReport {
            defects,
            min_defect,
            witness,
            j0,
        }
    }

    pub fn get(&self, j: IndexSubset) -> Option<i64> {
        self.defects.get(&j).copied()
    }

    /// `delta(J u J') <= delta(J) + delta(J') - delta(J n J')` over all pairs
    /// with non-empty intersection; meaningful when every defect is >= 0.
    pub fn is_submodular(&self) -> bool {
        for (&a, &da) in &self.defects {
            for (&b, &db) in &self.defects {
                let meet = a.intersection(b);
                if meet.is_empty() {
                    continue;
                }
                let dm = self.defects[&meet];
                if self.defects[&a.union(b)] > da + db - dm {
                    return false;
                }
            }
        }
        true
    }
}

pub fn defect_report(family: &SupportFamily) -> DefectReport {
    DefectReport::compute(family)
}

/// Whether every non-empty subset has positive defect; otherwise a
/// violating subset of least defect (smallest, then lexicographic).
pub fn khovanskii_condition(family: &SupportFamily) -> (bool, Option<IndexSubset>) {
    let dims = family.sum_dimensions();
    let violation = IndexSubset::all_nonempty(family.len())
        .map(|j| (dims[j.bits() as usize] as i64 - j.len() as i64, j))
        .filter(|(d, _)| *d <= 0)
        .min();
    (violation.is_none(), violation.map(|(_, j)| j))
}

/// Khovanskii condition for bare point sets (e.g. adjusted collections).
pub fn sets_satisfy_khovanskii(sets: &[PointSet]) -> Result<(bool, Option<IndexSubset>), KhovanskiiError> {
    Ok(khovanskii_condition(&SupportFamily::new(sets.to_vec())?))
}

/// Number of geometric components of the generic system with these supports.
///
/// * every defect positive: irreducible;
/// * some defect negative: empty;
/// * otherwise: `MVol_L` of the supports indexed by `J0`, in the saturated
///   lattice `L` spanned by their own difference vectors.
pub fn component_count(family: &SupportFamily) -> Result<Verdict, KhovanskiiError> {
    let report = DefectReport::compute(family);
    if report.min_defect > 0 {
        return Ok(Verdict::Irreducible { certificate: None });
    }
    if report.min_defect < 0 {
        return Ok(Verdict::Empty {
            witness: report.witness,
        });
    }
    let j0 = report.j0.expect("zero minimum defect yields J0");
    assert_eq!(report.defects[&j0], 0, "J0 must have zero defect");
    for (&j, &d) in &report.defects {
        if j0.is_subset_of(j) && j != j0 {
            assert!(d > 0, "superset {j} of J0 has defect {d}");
        }
    }

    let n = family.ambient_rank();
    let mut gens = Vec::new();
    for &i in &j0.indices() {
        gens.extend(family.supports[i].difference_generators());
    }
    let lattice = Sublattice::span(n, &gens)?.saturation();
    assert_eq!(lattice.rank(), j0.len(), "rank of L differs from |J0|");

    let local = j0
        .indices()
        .iter()
        .map(|&i| {
            let s = &family.supports[i];
            let shifted = s.translate(&LatticePoint::zero(n).sub(s.base_point()));
            Ok(express_in_sublattice(&shifted, &lattice)?.expect("shifted support lies in L"))
        })
        .collect::<Result<Vec<PointSet>, KhovanskiiError>>()?;
    let count = mixed_volume(&local)?;
    Ok(Verdict::Components {
        count,
        j0,
        lattice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn ps(n: usize, rows: &[&[i64]]) -> PointSet {
        PointSet::from_i64s(n, rows).unwrap()
    }

    fn fam(sets: Vec<PointSet>) -> SupportFamily {
        SupportFamily::new(sets).unwrap()
    }

    fn j(idx: &[usize]) -> IndexSubset {
        IndexSubset::from_indices(idx)
    }

    #[test]
    fn defect_examples() {
        let sq = fam(vec![ps(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])]);
        assert_eq!(defect(&sq, j(&[0])).unwrap(), 1);
        let seg = ps(2, &[&[0, 0], &[1, 0]]);
        assert_eq!(defect(&fam(vec![seg.clone(), seg.clone()]), j(&[0, 1])).unwrap(), -1);
        let f = fam(vec![seg, ps(2, &[&[0, 0], &[0, 1]])]);
        assert_eq!(defect(&f, j(&[0, 1])).unwrap(), 0);
        assert_eq!(defect(&f, IndexSubset::default()), Err(KhovanskiiError::EmptySubset));
        assert!(matches!(defect(&f, j(&[2])), Err(KhovanskiiError::IndexOutOfRange { .. })));
    }

    #[test]
    fn condition_examples() {
        let sq = fam(vec![ps(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])]);
        assert_eq!(khovanskii_condition(&sq), (true, None));
        let seg = ps(2, &[&[0, 0], &[1, 0]]);
        let par = fam(vec![seg.clone(), ps(2, &[&[3, 1], &[4, 1]])]);
        assert_eq!(khovanskii_condition(&par), (false, Some(j(&[0, 1]))));
        let tri1 = ps(3, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let tri2 = ps(3, &[&[1, 0, 0], &[2, 0, 0], &[1, 1, 0]]);
        assert_eq!(khovanskii_condition(&fam(vec![tri1, tri2])), (true, None));
    }

    #[test]
    fn parallel_segments_minimum_witness() {
        let seg = ps(2, &[&[0, 0], &[1, 0]]);
        let report = defect_report(&fam(vec![seg.clone(), seg]));
        assert_eq!(report.min_defect, -1);
        assert_eq!(report.witness, j(&[0, 1]));
    }

    #[test]
    fn component_examples() {
        match component_count(&fam(vec![ps(1, &[&[0], &[2]])])).unwrap() {
            Verdict::Components { count, j0, lattice } => {
                assert_eq!(count, BigUint::from(2u32));
                assert_eq!(j0, j(&[0]));
                assert_eq!(lattice, Sublattice::full(1));
            }
            v => panic!("unexpected {v:?}"),
        }
        let seg = ps(2, &[&[0, 0], &[1, 0]]);
        assert!(matches!(
            component_count(&fam(vec![seg.clone(), seg.clone()])).unwrap(),
            Verdict::Empty { .. }
        ));
        assert!(matches!(
            component_count(&fam(vec![ps(2, &[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])])).unwrap(),
            Verdict::Irreducible { .. }
        ));
        match component_count(&fam(vec![seg])).unwrap() {
            Verdict::Components { count, j0, lattice } => {
                assert_eq!(count, BigUint::from(1u32));
                assert_eq!(j0, j(&[0]));
                assert_eq!(lattice, Sublattice::span(2, &[LatticePoint::from_i64s(&[1, 0])]).unwrap());
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn unshifted_supports_use_own_differences() {
        // A1 = {1, x}, A2 = {z, yz}: the cross differences would span rank 3
        let f = fam(vec![ps(3, &[&[0, 0, 0], &[1, 0, 0]]), ps(3, &[&[0, 0, 1], &[0, 1, 1]])]);
        match component_count(&f).unwrap() {
            Verdict::Components { count, j0, lattice } => {
                assert_eq!(j0, j(&[0, 1]));
                assert_eq!(lattice.rank(), 2);
                assert_eq!(count, BigUint::from(1u32));
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn j0_is_union_of_zero_defect_subsets() {
        // δ({1}) = 0, δ({2}) = 1, δ({1,2}) = 0
        let f = fam(vec![ps(2, &[&[0, 0], &[2, 0]]), ps(2, &[&[0, 0], &[1, 0], &[0, 1]])]);
        let r = defect_report(&f);
        assert_eq!(r.j0, Some(j(&[0, 1])));
        assert!(r.is_submodular());
        match component_count(&f).unwrap() {
            Verdict::Components { count, .. } => assert_eq!(count, BigUint::from(2u32)),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn subset_ordering() {
        let mut v = vec![j(&[1, 2]), j(&[0, 2]), j(&[3]), j(&[0, 1, 2])];
        v.sort();
        assert_eq!(v, vec![j(&[3]), j(&[0, 2]), j(&[1, 2]), j(&[0, 1, 2])]);
        assert_eq!(j(&[0, 1]).to_string(), "{1,2}");
    }

    #[test]
    fn family_validation() {
        assert_eq!(SupportFamily::new(vec![]), Err(KhovanskiiError::EmptyFamily));
        assert!(SupportFamily::new(vec![ps(1, &[&[0]]), ps(2, &[&[0, 0]])]).is_err());
        let many = vec![ps(1, &[&[0]]); MAX_EQUATIONS + 1];
        assert_eq!(SupportFamily::new(many), Err(KhovanskiiError::TooManyEquations(17)));
    }
}
