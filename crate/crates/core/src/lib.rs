//! Exact lattice geometry for generic sparse polynomial systems: Smith
//! forms, lattice mixed volumes, defects and the Khovanskii condition,
//! component counts, adjusted collections for engineered complete
//! intersections, critical-locus encoders, and brute-force oracles.

#![allow(clippy::needless_range_loop)]

pub mod critical;
pub mod eci;
pub mod field;
pub mod khovanskii;
pub mod lattice;
pub mod oracle;
pub mod polytope;
pub mod verdict;

pub use critical::{
    analyze_critical_locus, auto_certificate_stratified, check_stratified_hypotheses, encode_derivative_tower,
    encode_gradient, falling_factorial_polys, CriticalAnalysis, CriticalError, DerivativePattern, HypothesisCheck,
    LabelFunction,
};
pub use eci::{
    fibre_adjust, fibres_of_coefficients, is_adjusted, maximal_adjusted_collection, row_echelon,
    search_irreducibility_certificate, star_product, verify_certificate, AdjustedCollection, CertificateEntry,
    CoefficientMatrix, Delta, EciCertificate, EciError, Echelon, SearchMode, SearchOptions,
};
pub use field::{parse_scalar, Characteristic, FieldError, FieldScalar};
pub use khovanskii::{
    component_count, defect, defect_report, khovanskii_condition, DefectReport, IndexSubset, KhovanskiiError,
    SupportFamily,
};
pub use lattice::{
    dim_of_set, express_in_sublattice, minkowski_sum, quotient_project, saturation, smith_normal_form, IntegerMatrix,
    LatticeError, LatticePoint, PointSet, SmithForm, Sublattice,
};
pub use polytope::{bkk_count, convex_hull, lattice_volume, mixed_volume, LatticePolytope, VolumeError};
pub use verdict::Verdict;
