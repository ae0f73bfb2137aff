//! Problem files: parsing and validation with JSON-pointer diagnostics.

use serde_json::{Map, Value};
use tci_core::{parse_scalar, Characteristic, DerivativePattern, FieldScalar, PointSet};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Mvol,
    Khovanskii,
    Components,
    EciCheck,
    CriticalLocus,
    Oracle,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Mvol => "mvol",
            Task::Khovanskii => "khovanskii",
            Task::Components => "components",
            Task::EciCheck => "eci-check",
            Task::CriticalLocus => "critical-locus",
            Task::Oracle => "oracle",
        }
    }

    fn parse(s: &str) -> Option<Task> {
        [
            Task::Mvol,
            Task::Khovanskii,
            Task::Components,
            Task::EciCheck,
            Task::CriticalLocus,
            Task::Oracle,
        ]
        .into_iter()
        .find(|t| t.name() == s)
    }
}

/// Coefficient rows for one support; scalars are kept as written and
/// reduced per characteristic.
#[derive(Debug, Clone)]
pub struct EciSpec {
    pub support_index: usize,
    pub rows: Vec<Vec<String>>,
    pointer: String,
}

impl EciSpec {
    pub fn rows_in(&self, ch: Characteristic) -> Result<Vec<Vec<FieldScalar>>, CliError> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| {
                        parse_scalar(s, ch).map_err(|e| {
                            CliError::invalid(format!("{}/rows/{i}/{j}", self.pointer), format!("{e} in characteristic {ch}"))
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct PatternSpec {
    pub pattern: DerivativePattern,
    pub support_index: usize,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub ambient_rank: usize,
    pub characteristics: Vec<Characteristic>,
    pub supports: Vec<PointSet>,
    pub eci: Vec<EciSpec>,
    pub pattern: Option<PatternSpec>,
    pub task: Option<Task>,
}

fn expect_object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| CliError::invalid(ptr, "expected an object"))
}

fn expect_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| CliError::invalid(ptr, "expected an array"))
}

fn expect_int(v: &Value, ptr: &str) -> Result<i64, CliError> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(n.as_i64().expect("checked")),
        Value::Number(n) if n.is_u64() => Err(CliError::invalid(ptr, "integer out of range")),
        Value::Number(_) => Err(CliError::invalid(ptr, "floats are not accepted; use an integer")),
        _ => Err(CliError::invalid(ptr, "expected an integer")),
    }
}

fn expect_index(v: &Value, ptr: &str) -> Result<usize, CliError> {
    let x = expect_int(v, ptr)?;
    usize::try_from(x).map_err(|_| CliError::invalid(ptr, "expected a non-negative integer"))
}

fn check_keys(obj: &Map<String, Value>, ptr: &str, allowed: &[&str], required: &[&str]) -> Result<(), CliError> {
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::invalid(format!("{ptr}/{}", escape(k)), "unknown property"));
    }
    if let Some(k) = required.iter().find(|k| !obj.contains_key(**k)) {
        return Err(CliError::invalid(ptr, format!("missing required property '{k}'")));
    }
    Ok(())
}

/// RFC 6901 escaping of one reference token.
fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn scalar(v: &Value, ptr: &str) -> Result<String, CliError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(_) => expect_int(v, ptr)?.to_string(),
        _ => return Err(CliError::invalid(ptr, "expected an integer or a \"num/den\" string")),
    };
    parse_scalar(&text, Characteristic::Zero).map_err(|e| CliError::invalid(ptr, e))?;
    Ok(text)
}

fn characteristic(v: &Value, ptr: &str) -> Result<Characteristic, CliError> {
    let c = expect_int(v, ptr)?;
    let c = u64::try_from(c).map_err(|_| CliError::invalid(ptr, "characteristic must be 0 or a prime"))?;
    Characteristic::new(c).map_err(|_| CliError::invalid(ptr, "characteristic must be 0 or a prime"))
}

pub fn parse_problem(bytes: &[u8]) -> Result<Problem, CliError> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| CliError::invalid("", format!("malformed JSON: {e}")))?;
    let obj = expect_object(&root, "")?;
    check_keys(
        obj,
        "",
        &["ambient_rank", "characteristics", "supports", "eci", "pattern", "task"],
        &["ambient_rank", "supports"],
    )?;

    let n = expect_index(&obj["ambient_rank"], "/ambient_rank")?;
    let characteristics = match obj.get("characteristics") {
        None => vec![Characteristic::Zero],
        Some(v) => {
            let arr = expect_array(v, "/characteristics")?;
            if arr.is_empty() {
                return Err(CliError::invalid("/characteristics", "expected at least one characteristic"));
            }
            arr.iter()
                .enumerate()
                .map(|(i, c)| characteristic(c, &format!("/characteristics/{i}")))
                .collect::<Result<_, _>>()?
        }
    };

    let supports_v = expect_array(&obj["supports"], "/supports")?;
    if supports_v.is_empty() {
        return Err(CliError::invalid("/supports", "expected at least one support"));
    }
    let mut supports = Vec::with_capacity(supports_v.len());
    for (i, s) in supports_v.iter().enumerate() {
        let ptr = format!("/supports/{i}");
        let pts = expect_array(s, &ptr)?;
        if pts.is_empty() {
            return Err(CliError::invalid(&ptr, "a support must contain at least one point"));
        }
        let mut rows = Vec::with_capacity(pts.len());
        for (j, p) in pts.iter().enumerate() {
            let pptr = format!("{ptr}/{j}");
            let coords = expect_array(p, &pptr)?;
            if coords.len() != n {
                return Err(CliError::invalid(
                    &pptr,
                    format!("point has {} coordinates, ambient_rank is {n}", coords.len()),
                ));
            }
            let row: Vec<i64> = coords
                .iter()
                .enumerate()
                .map(|(k, c)| expect_int(c, &format!("{pptr}/{k}")))
                .collect::<Result<_, _>>()?;
            if rows.contains(&row) {
                return Err(CliError::invalid(&pptr, "duplicate point"));
            }
            rows.push(row);
        }
        supports.push(PointSet::from_i64s(n, &rows).map_err(|e| CliError::invalid(&ptr, e.to_string()))?);
    }

    let mut eci = Vec::new();
    if let Some(v) = obj.get("eci") {
        for (i, e) in expect_array(v, "/eci")?.iter().enumerate() {
            let ptr = format!("/eci/{i}");
            let eo = expect_object(e, &ptr)?;
            check_keys(eo, &ptr, &["support_index", "rows"], &["support_index", "rows"])?;
            let support_index = expect_index(&eo["support_index"], &format!("{ptr}/support_index"))?;
            if support_index >= supports.len() {
                return Err(CliError::invalid(format!("{ptr}/support_index"), "no such support"));
            }
            // columns follow the support's points in the order written
            let written = expect_array(&supports_v[support_index], "")?;
            let order = column_permutation(&supports[support_index], written);
            let rows_v = expect_array(&eo["rows"], &format!("{ptr}/rows"))?;
            if rows_v.is_empty() {
                return Err(CliError::invalid(format!("{ptr}/rows"), "expected at least one row"));
            }
            let mut rows = Vec::new();
            for (r, row) in rows_v.iter().enumerate() {
                let rptr = format!("{ptr}/rows/{r}");
                let entries = expect_array(row, &rptr)?;
                if entries.len() != written.len() {
                    return Err(CliError::invalid(
                        &rptr,
                        format!("row has {} entries, support has {} points", entries.len(), written.len()),
                    ));
                }
                let parsed: Vec<String> = entries
                    .iter()
                    .enumerate()
                    .map(|(k, x)| scalar(x, &format!("{rptr}/{k}")))
                    .collect::<Result<_, _>>()?;
                rows.push(order.iter().map(|&k| parsed[k].clone()).collect());
            }
            eci.push(EciSpec {
                support_index,
                rows,
                pointer: ptr,
            });
        }
    }

    let pattern = match obj.get("pattern") {
        None => None,
        Some(v) => Some(parse_pattern(v, n, supports.len())?),
    };

    let task = match obj.get("task") {
        None => None,
        Some(Value::String(s)) => Some(Task::parse(s).ok_or_else(|| {
            CliError::invalid(
                "/task",
                "expected one of mvol, khovanskii, components, eci-check, critical-locus, oracle",
            )
        })?),
        Some(_) => return Err(CliError::invalid("/task", "expected a string")),
    };

    Ok(Problem {
        ambient_rank: n,
        characteristics,
        supports,
        eci,
        pattern,
        task,
    })
}

/// For each sorted support column, the index of that point as written.
fn column_permutation(sorted: &PointSet, written: &[Value]) -> Vec<usize> {
    sorted
        .iter()
        .map(|p| {
            written
                .iter()
                .position(|w| {
                    w.as_array()
                        .is_some_and(|c| c.iter().zip(p.coords()).all(|(a, b)| a.as_i64().map(Into::into).as_ref() == Some(b)))
                })
                .expect("every sorted point was written")
        })
        .collect()
}

fn parse_pattern(v: &Value, n: usize, supports: usize) -> Result<PatternSpec, CliError> {
    let obj = expect_object(v, "/pattern")?;
    let kind = match obj.get("kind") {
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err(CliError::invalid("/pattern/kind", "expected a string")),
        None => return Err(CliError::invalid("/pattern", "missing required property 'kind'")),
    };
    let support_index = match obj.get("support_index") {
        None => 0,
        Some(s) => expect_index(s, "/pattern/support_index")?,
    };
    if support_index >= supports {
        return Err(CliError::invalid("/pattern/support_index", "no such support"));
    }
    let var = |key: &str| -> Result<usize, CliError> {
        let ptr = format!("/pattern/{key}");
        let x = expect_index(obj.get(key).ok_or_else(|| CliError::invalid("/pattern", format!("missing required property '{key}'")))?, &ptr)?;
        if x >= n {
            return Err(CliError::invalid(ptr, format!("variable index must be below ambient_rank {n}")));
        }
        Ok(x)
    };
    let pattern = match kind {
        "tower" => {
            check_keys(obj, "/pattern", &["kind", "x", "r", "support_index"], &["x", "r"])?;
            DerivativePattern::Tower {
                x: var("x")?,
                r: expect_index(&obj["r"], "/pattern/r")?,
            }
        }
        "gradient" => {
            check_keys(obj, "/pattern", &["kind", "x", "y", "support_index"], &["x", "y"])?;
            let (x, y) = (var("x")?, var("y")?);
            if x == y {
                return Err(CliError::invalid("/pattern/y", "gradient variables must differ"));
            }
            DerivativePattern::Gradient { x, y }
        }
        _ => return Err(CliError::invalid("/pattern/kind", "expected \"tower\" or \"gradient\"")),
    };
    Ok(PatternSpec { pattern, support_index })
}
