//! Report files and their canonical hashing.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectEntry {
    /// 1-based indices.
    pub subset: Vec<usize>,
    pub defect: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhovanskiiReport {
    pub satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntryReport {
    pub matrix_index: usize,
    pub order: Option<Vec<usize>>,
    pub transform: Vec<Vec<String>>,
    /// Column indices into the sorted support.
    pub deltas: Vec<Vec<usize>>,
    pub delta_points: Vec<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub entries: Vec<CertificateEntryReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicReport {
    pub characteristic: u64,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kept_rows: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub explored_states: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<CertificateReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub method: String,
    pub prime: u64,
    pub trials: usize,
    pub bkk: String,
    /// `null` marks a degenerate trial.
    pub counts: Vec<Option<u64>>,
    pub agreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub task: String,
    pub input_sha256: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mixed_volume: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j0: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lattice_basis: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub khovanskii: Option<KhovanskiiReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub defects: Option<Vec<DefectEntry>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub characteristics: Option<Vec<CharacteristicReport>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<OracleReport>,
    pub stability_hash: String,
    pub wall_time_ms: u64,
}

impl Report {
    /// Sha-256 of the canonical JSON of every field except the hash itself
    /// and the wall time.
    pub fn compute_stability_hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("reports serialise");
        let obj = value.as_object_mut().expect("report is an object");
        obj.remove("stability_hash");
        obj.remove("wall_time_ms");
        let bytes = serde_json::to_vec(&value).expect("values serialise");
        hex::encode(Sha256::digest(&bytes))
    }

    /// `true` when some sub-result is inconclusive.
    pub fn is_inconclusive(&self) -> bool {
        self.verdict.as_deref() == Some("inconclusive")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialise") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        out.push(format!("task: {}", self.task));
        if let Some(v) = &self.verdict {
            out.push(format!("verdict: {v}"));
        }
        if let Some(m) = &self.mixed_volume {
            out.push(format!("mixed volume: {m}"));
        }
        if let Some(n) = &self.n {
            out.push(format!("components: {n}"));
        }
        if let Some(j0) = &self.j0 {
            out.push(format!("J0: {}", braces(j0)));
        }
        if let Some(b) = &self.lattice_basis {
            out.push(format!("lattice basis: {b:?}"));
        }
        if let Some(w) = &self.witness {
            out.push(format!("witness: {}", braces(w)));
        }
        if let Some(k) = &self.khovanskii {
            let w = k.witness.as_deref().map(braces).unwrap_or_default();
            out.push(format!("khovanskii condition: {} {w}", k.satisfied).trim_end().to_string());
        }
        if let Some(ds) = &self.defects {
            out.push("defects:".into());
            out.extend(ds.iter().map(|d| format!("  {} {}", braces(&d.subset), d.defect)));
        }
        for c in self.characteristics.iter().flatten() {
            let mut line = format!("characteristic {}: {}", c.characteristic, c.verdict);
            if let Some(k) = &c.kept_rows {
                line += &format!(", kept rows {k:?}");
            }
            if let Some(s) = c.explored_states {
                line += &format!(", {s} states");
            }
            if let Some(r) = &c.reason {
                line += &format!(" ({r})");
            }
            out.push(line);
            if let Some(cert) = &c.certificate {
                for e in &cert.entries {
                    out.push(format!("  matrix {}: deltas {:?}", e.matrix_index, e.delta_points));
                }
            }
        }
        if let Some(o) = &self.oracle {
            out.push(format!(
                "oracle {} over F_{}: bkk {}, agreement {:.3} over {} trials",
                o.method, o.prime, o.bkk, o.agreement, o.trials
            ));
        }
        out.push(format!("input sha256: {}", self.input_sha256));
        out.join("\n") + "\n"
    }
}

fn braces(xs: &[usize]) -> String {
    let parts: Vec<String> = xs.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}
