//! Library side of the `tci` binary: problem parsing, task execution and
//! report assembly.

pub mod problem;
pub mod report;

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use sha2::{Digest, Sha256};
use tci_core::oracle::{
    count_distinct_roots_closure, resultant_count_2d, sample_common_solutions, trial_rng, PrimeFieldPoly,
};
use tci_core::{
    analyze_critical_locus, bkk_count, component_count, defect_report, khovanskii_condition, mixed_volume,
    parse_scalar, search_irreducibility_certificate, verify_certificate, AdjustedCollection, CertificateEntry,
    Characteristic, CoefficientMatrix, EciCertificate, IndexSubset, LatticePoint, PointSet, SearchOptions,
    SupportFamily, Verdict,
};
use thiserror::Error;

pub use problem::{parse_problem, Problem, Task};
pub use report::Report;

#[derive(Debug, Error)]
pub enum CliError {
    /// Schema or consistency violation at a JSON pointer into the input.
    #[error("invalid input at {}: {message}", if pointer.is_empty() { "<root>" } else { pointer })]
    Invalid { pointer: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    pub fn invalid(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Invalid {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Overrides the characteristics listed in the problem when non-empty.
    pub characteristics: Vec<u64>,
    pub max_states: u64,
    pub seed: u64,
    pub oracle_trials: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            characteristics: Vec::new(),
            max_states: SearchOptions::default().max_states,
            seed: 0,
            oracle_trials: 20,
        }
    }
}

/// Outcome classes mapped to process exit codes.
pub const EXIT_DEFINITIVE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

const DEFAULT_ORACLE_PRIME: u64 = 101;

fn characteristics(problem: &Problem, opts: &RunOptions) -> Result<Vec<Characteristic>, CliError> {
    if opts.characteristics.is_empty() {
        return Ok(problem.characteristics.clone());
    }
    opts.characteristics
        .iter()
        .map(|&c| Characteristic::new(c).map_err(|_| CliError::Usage(format!("--char {c}: expected 0 or a prime"))))
        .collect()
}

fn to_i64(x: &BigInt) -> Result<i64, CliError> {
    x.to_i64().ok_or_else(|| CliError::Compute(format!("{x} does not fit in 64 bits")))
}

fn point_rows(a: &PointSet) -> Result<Vec<Vec<i64>>, CliError> {
    a.iter().map(|p| p.coords().iter().map(to_i64).collect()).collect()
}

fn one_based(j: IndexSubset) -> Vec<usize> {
    j.indices().iter().map(|i| i + 1).collect()
}

fn family(problem: &Problem) -> Result<SupportFamily, CliError> {
    SupportFamily::new(problem.supports.clone()).map_err(CliError::compute)
}

fn defect_table(family: &SupportFamily) -> Vec<report::DefectEntry> {
    defect_report(family)
        .defects
        .iter()
        .map(|(&j, &d)| report::DefectEntry {
            subset: one_based(j),
            defect: d,
        })
        .collect()
}

fn empty_report(task: Task, input: &[u8], seed: u64) -> Report {
    Report {
        tool: "tci".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        task: task.name().into(),
        input_sha256: hex::encode(Sha256::digest(input)),
        seed,
        verdict: None,
        mixed_volume: None,
        n: None,
        j0: None,
        lattice_basis: None,
        witness: None,
        khovanskii: None,
        defects: None,
        characteristics: None,
        oracle: None,
        stability_hash: String::new(),
        wall_time_ms: 0,
    }
}

/// Runs `task` (or the problem's own task when `None`) on raw problem bytes.
pub fn execute(task: Option<Task>, input: &[u8], opts: &RunOptions) -> Result<Report, CliError> {
    let start = Instant::now();
    let problem = parse_problem(input)?;
    let task = task
        .or(problem.task)
        .ok_or_else(|| CliError::invalid("", "missing required property 'task' (or use a task subcommand)"))?;
    let mut report = empty_report(task, input, opts.seed);
    match task {
        Task::Mvol => run_mvol(&problem, &mut report)?,
        Task::Khovanskii => run_khovanskii(&problem, &mut report)?,
        Task::Components => run_components(&problem, &mut report)?,
        Task::EciCheck => run_eci(&problem, opts, &mut report)?,
        Task::CriticalLocus => run_critical(&problem, opts, &mut report)?,
        Task::Oracle => run_oracle(&problem, opts, &mut report)?,
    }
    report.stability_hash = report.compute_stability_hash();
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn run_mvol(problem: &Problem, report: &mut Report) -> Result<(), CliError> {
    if problem.supports.len() != problem.ambient_rank {
        return Err(CliError::invalid(
            "/supports",
            format!(
                "mixed volume needs ambient_rank = {} supports, found {}",
                problem.ambient_rank,
                problem.supports.len()
            ),
        ));
    }
    report.mixed_volume = Some(mixed_volume(&problem.supports).map_err(CliError::compute)?.to_string());
    Ok(())
}

fn run_khovanskii(problem: &Problem, report: &mut Report) -> Result<(), CliError> {
    let family = family(problem)?;
    let (satisfied, witness) = khovanskii_condition(&family);
    report.khovanskii = Some(report::KhovanskiiReport {
        satisfied,
        witness: witness.map(one_based),
    });
    report.defects = Some(defect_table(&family));
    Ok(())
}

fn run_components(problem: &Problem, report: &mut Report) -> Result<(), CliError> {
    let family = family(problem)?;
    let verdict = component_count(&family).map_err(CliError::compute)?;
    report.verdict = Some(verdict.tag().into());
    match verdict {
        Verdict::Components { count, j0, lattice } => {
            report.n = Some(count.to_string());
            report.j0 = Some(one_based(j0));
            report.lattice_basis = Some(
                lattice
                    .basis()
                    .iter()
                    .map(|b| b.coords().iter().map(to_i64).collect())
                    .collect::<Result<_, _>>()?,
            );
        }
        Verdict::Empty { witness } => report.witness = Some(one_based(witness)),
        _ => {}
    }
    report.defects = Some(defect_table(&family));
    Ok(())
}

fn search_options(opts: &RunOptions) -> SearchOptions {
    SearchOptions {
        max_states: opts.max_states,
        ..SearchOptions::default()
    }
}

fn certificate_report(matrices: &[CoefficientMatrix], cert: &EciCertificate) -> Result<report::CertificateReport, CliError> {
    let entries = cert
        .entries
        .iter()
        .map(|e| {
            let m = &matrices[e.matrix_index];
            let delta_points = e
                .collection
                .point_sets(m)
                .map_err(CliError::compute)?
                .iter()
                .map(point_rows)
                .collect::<Result<_, _>>()?;
            Ok(report::CertificateEntryReport {
                matrix_index: e.matrix_index,
                order: e.order.clone(),
                transform: e
                    .collection
                    .transform
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect())
                    .collect(),
                deltas: e.collection.deltas.iter().map(|d| d.iter().copied().collect()).collect(),
                delta_points,
            })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(report::CertificateReport { entries })
}

fn characteristic_report(
    ch: Characteristic,
    matrices: &[CoefficientMatrix],
    verdict: &Verdict,
    kept_rows: Option<Vec<usize>>,
) -> Result<report::CharacteristicReport, CliError> {
    let (explored_states, reason) = match verdict {
        Verdict::Inconclusive { reason, explored_states } => (Some(*explored_states), Some(reason.clone())),
        _ => (None, None),
    };
    Ok(report::CharacteristicReport {
        characteristic: ch.as_u64(),
        verdict: verdict.tag().into(),
        kept_rows,
        explored_states,
        reason,
        certificate: verdict.certificate().map(|c| certificate_report(matrices, c)).transpose()?,
    })
}

fn overall(subs: &[report::CharacteristicReport]) -> String {
    if subs.iter().all(|s| s.verdict == "irreducible") {
        "irreducible".into()
    } else {
        "inconclusive".into()
    }
}

fn eci_matrices(problem: &Problem, ch: Characteristic) -> Result<Vec<CoefficientMatrix>, CliError> {
    if problem.eci.is_empty() {
        return Err(CliError::invalid("", "eci-check needs a non-empty 'eci' list"));
    }
    problem
        .eci
        .iter()
        .map(|spec| {
            CoefficientMatrix::new(problem.supports[spec.support_index].clone(), ch, spec.rows_in(ch)?)
                .map_err(CliError::compute)
        })
        .collect()
}

fn run_eci(problem: &Problem, opts: &RunOptions, report: &mut Report) -> Result<(), CliError> {
    let mut subs = Vec::new();
    for ch in characteristics(problem, opts)? {
        let matrices = eci_matrices(problem, ch)?;
        let verdict = search_irreducibility_certificate(&matrices, &search_options(opts)).map_err(CliError::compute)?;
        subs.push(characteristic_report(ch, &matrices, &verdict, None)?);
    }
    report.verdict = Some(overall(&subs));
    report.characteristics = Some(subs);
    Ok(())
}

fn pattern(problem: &Problem) -> Result<&problem::PatternSpec, CliError> {
    problem
        .pattern
        .as_ref()
        .ok_or_else(|| CliError::invalid("", "critical-locus needs a 'pattern'"))
}

fn run_critical(problem: &Problem, opts: &RunOptions, report: &mut Report) -> Result<(), CliError> {
    let spec = pattern(problem)?;
    let support = &problem.supports[spec.support_index];
    let mut subs = Vec::new();
    for ch in characteristics(problem, opts)? {
        let analysis = analyze_critical_locus(support, spec.pattern, ch, &search_options(opts)).map_err(CliError::compute)?;
        let kept = if analysis.kept_rows.is_empty() {
            Vec::new()
        } else {
            vec![analysis.matrix.select_rows(&analysis.kept_rows).map_err(CliError::compute)?]
        };
        subs.push(characteristic_report(ch, &kept, &analysis.verdict, Some(analysis.kept_rows.clone()))?);
    }
    report.verdict = Some(overall(&subs));
    report.characteristics = Some(subs);
    Ok(())
}

fn oracle_prime(problem: &Problem, opts: &RunOptions) -> Result<u64, CliError> {
    Ok(characteristics(problem, opts)?
        .into_iter()
        .map(Characteristic::as_u64)
        .find(|&p| p != 0)
        .unwrap_or(DEFAULT_ORACLE_PRIME))
}

fn run_oracle(problem: &Problem, opts: &RunOptions, report: &mut Report) -> Result<(), CliError> {
    let p = oracle_prime(problem, opts)?;
    let n = problem.ambient_rank;
    let supports = &problem.supports;
    if supports.len() != n {
        return Err(CliError::invalid(
            "/supports",
            format!("the oracle needs a square system: {n} supports, found {}", supports.len()),
        ));
    }
    let bkk = bkk_count(supports).map_err(CliError::compute)?;
    let trials = opts.oracle_trials;
    let (method, counts): (&str, Vec<Option<u64>>) = match n {
        1 => {
            let rows = point_rows(&supports[0])?;
            let lo = rows.iter().map(|r| r[0]).min().expect("non-empty");
            let degree = (rows.iter().map(|r| r[0]).max().expect("non-empty") - lo) as usize;
            let counts = (0..trials as u64)
                .map(|t| {
                    let mut rng = trial_rng(opts.seed, t);
                    let mut coeffs = vec![0i64; degree + 1];
                    for r in &rows {
                        coeffs[(r[0] - lo) as usize] = rng.gen_range(1..p as i64);
                    }
                    let f = PrimeFieldPoly::from_i64s(p, &coeffs).map_err(CliError::compute)?;
                    Ok(Some(count_distinct_roots_closure(&f).map_err(CliError::compute)?))
                })
                .collect::<Result<_, CliError>>()?;
            ("roots", counts)
        }
        2 => {
            let stats = resultant_count_2d(&supports[0], &supports[1], p, trials, opts.seed).map_err(CliError::compute)?;
            ("resultant", stats.counts)
        }
        _ => {
            let stats = sample_common_solutions(supports, p, trials, opts.seed).map_err(CliError::compute)?;
            ("sampling", stats.counts.into_iter().map(Some).collect())
        }
    };
    let target = bkk.to_u64();
    let hits = counts.iter().flatten().filter(|&&c| Some(c) == target).count();
    let valid = counts.iter().flatten().count();
    report.oracle = Some(report::OracleReport {
        method: method.into(),
        prime: p,
        trials,
        bkk: bkk.to_string(),
        agreement: if valid == 0 { 0.0 } else { hits as f64 / valid as f64 },
        counts,
    });
    Ok(())
}

/// Rebuilds the certificates stored in `report_bytes` against the problem
/// and re-verifies them. Returns `(characteristic, valid)` per certificate.
pub fn verify_report(task: Option<Task>, input: &[u8], report_bytes: &[u8]) -> Result<Vec<(u64, bool)>, CliError> {
    let problem = parse_problem(input)?;
    let report: Report = serde_json::from_slice(report_bytes)
        .map_err(|e| CliError::Usage(format!("--verify-certificate: not a report file: {e}")))?;
    let task = task.or(problem.task).unwrap_or(match report.task.as_str() {
        "critical-locus" => Task::CriticalLocus,
        _ => Task::EciCheck,
    });
    let subs = report.characteristics.unwrap_or_default();
    let mut out = Vec::new();
    for sub in &subs {
        let Some(cert) = &sub.certificate else { continue };
        let ch = Characteristic::new(sub.characteristic)
            .map_err(|_| CliError::Usage(format!("report lists characteristic {}", sub.characteristic)))?;
        let matrices = match task {
            Task::CriticalLocus => {
                let spec = pattern(&problem)?;
                let full = spec
                    .pattern
                    .encode(&problem.supports[spec.support_index], ch)
                    .map_err(CliError::compute)?;
                let kept = full.independent_rows();
                if sub.kept_rows.as_ref() != Some(&kept) {
                    out.push((sub.characteristic, false));
                    continue;
                }
                vec![full.select_rows(&kept).map_err(CliError::compute)?]
            }
            _ => eci_matrices(&problem, ch)?,
        };
        let valid = match rebuild_certificate(cert, ch) {
            Some(c) => verify_certificate(&matrices, &c).unwrap_or(false) && delta_points_match(&matrices, cert),
            None => false,
        };
        out.push((sub.characteristic, valid));
    }
    if out.is_empty() {
        return Err(CliError::Usage("--verify-certificate: the report contains no certificate".into()));
    }
    Ok(out)
}

fn rebuild_certificate(cert: &report::CertificateReport, ch: Characteristic) -> Option<EciCertificate> {
    let entries = cert
        .entries
        .iter()
        .map(|e| {
            let transform = e
                .transform
                .iter()
                .map(|r| r.iter().map(|s| parse_scalar(s, ch).ok()).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()?;
            Some(CertificateEntry {
                matrix_index: e.matrix_index,
                order: e.order.clone(),
                collection: AdjustedCollection {
                    deltas: e.deltas.iter().map(|d| d.iter().copied().collect()).collect(),
                    transform,
                },
            })
        })
        .collect::<Option<Vec<_>>>()?;
    Some(EciCertificate { entries })
}

fn delta_points_match(matrices: &[CoefficientMatrix], cert: &report::CertificateReport) -> bool {
    cert.entries.iter().all(|e| {
        let Some(m) = matrices.get(e.matrix_index) else { return false };
        e.deltas.len() == e.delta_points.len()
            && e.deltas.iter().zip(&e.delta_points).all(|(cols, pts)| {
                cols.len() == pts.len()
                    && cols.iter().zip(pts).all(|(&c, p)| {
                        m.support().points().get(c) == Some(&LatticePoint::from_i64s(p))
                    })
            })
    })
}
