use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Deserialize;

use super::BenchError;
use crate::vscore::{relative_error, v_score, VScoreInput};

/// Relative tolerance between a stored V-score and its recomputation.
pub const V_SCORE_CONSISTENCY: f64 = 1e-10;

/// One persisted benchmark result.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchRecord {
    pub hamiltonian: String,
    pub method: String,
    pub energy: f64,
    pub variance: f64,
    pub n_dof: usize,
    pub e_infty: f64,
    pub v_score: f64,
    /// Exact ground energy, when one is known.
    pub e0: Option<f64>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl BenchRecord {
    /// Builds a record with its V-score computed from the other fields.
    pub fn new(
        hamiltonian: impl Into<String>,
        method: impl Into<String>,
        energy: f64,
        variance: f64,
        n_dof: usize,
        e_infty: f64,
        e0: Option<f64>,
    ) -> Result<Self, BenchError> {
        let v = v_score(&VScoreInput {
            energy,
            variance,
            n_dof,
            e_infty,
        })?;
        let record = BenchRecord {
            hamiltonian: hamiltonian.into(),
            method: method.into(),
            energy,
            variance,
            n_dof,
            e_infty,
            v_score: v,
            e0,
            metadata: BTreeMap::new(),
        };
        record.validate().map_err(|reason| BenchError::SchemaViolation { line: 0, reason })?;
        Ok(record)
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    /// `(E - E_0) / (E_inf - E_0)` when `e0` is present.
    pub fn relative_error(&self) -> Option<f64> {
        self.e0.and_then(|e0| relative_error(self.energy, e0, self.e_infty).ok())
    }

    /// Checks the record invariants, describing the first violation.
    pub fn validate(&self) -> Result<(), String> {
        if self.hamiltonian.is_empty() || self.method.is_empty() {
            return Err("hamiltonian and method must be nonempty".into());
        }
        let finite = [self.energy, self.variance, self.e_infty, self.v_score]
            .iter()
            .chain(self.e0.iter())
            .all(|x| x.is_finite());
        if !finite {
            return Err("numeric fields must be finite".into());
        }
        if self.n_dof == 0 {
            return Err("n_dof must be positive".into());
        }
        if self.variance < 0.0 {
            return Err(format!("negative variance {}", self.variance));
        }
        if self.energy == self.e_infty {
            return Err("energy equals e_infty".into());
        }
        let expected = v_score(&VScoreInput {
            energy: self.energy,
            variance: self.variance,
            n_dof: self.n_dof,
            e_infty: self.e_infty,
        })
        .map_err(|e| e.to_string())?;
        if (self.v_score - expected).abs() > V_SCORE_CONSISTENCY * expected.abs() {
            return Err(format!("v_score {} disagrees with recomputed {expected}", self.v_score));
        }
        Ok(())
    }

    /// One JSON object in canonical key order, floats with 17 significant digits.
    pub fn to_json_line(&self) -> String {
        let s = |x: &str| serde_json::to_string(x).expect("strings serialize");
        let e0 = self.e0.map_or_else(|| "null".to_string(), |e| format!("{e:.16e}"));
        format!(
            "{{\"hamiltonian\":{},\"method\":{},\"energy\":{:.16e},\"variance\":{:.16e},\"n_dof\":{},\"e_infty\":{:.16e},\"v_score\":{:.16e},\"e0\":{},\"metadata\":{}}}",
            s(&self.hamiltonian),
            s(&self.method),
            self.energy,
            self.variance,
            self.n_dof,
            self.e_infty,
            self.v_score,
            e0,
            serde_json::to_string(&self.metadata).expect("string maps serialize"),
        )
    }
}

fn check_all(records: &[BenchRecord]) -> Result<(), BenchError> {
    for (i, r) in records.iter().enumerate() {
        r.validate()
            .map_err(|reason| BenchError::SchemaViolation { line: i + 1, reason })?;
    }
    Ok(())
}

fn write_to(file: File, records: &[BenchRecord], path: &Path) -> Result<(), BenchError> {
    let io = |e: std::io::Error| BenchError::io(path, e);
    let mut w = BufWriter::new(file);
    for r in records {
        writeln!(w, "{}", r.to_json_line()).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Replaces the file at `path` with `records`, one per line.
pub fn write_records(records: &[BenchRecord], path: &Path) -> Result<(), BenchError> {
    check_all(records)?;
    let file = File::create(path).map_err(|e| BenchError::io(path, e))?;
    write_to(file, records, path)
}

/// Appends `records` to the file at `path`, creating it when missing.
pub fn append_records(records: &[BenchRecord], path: &Path) -> Result<(), BenchError> {
    check_all(records)?;
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| BenchError::io(path, e))?;
    write_to(file, records, path)
}

/// Parses line-delimited records. Blank lines are skipped. An unterminated
/// final line that does not parse is taken to be a write in progress and ignored.
pub fn parse_records(text: &str) -> Result<Vec<BenchRecord>, BenchError> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    let partial = if text.ends_with('\n') { None } else { lines.pop() };
    let parse = |line: &str, number: usize| -> Result<BenchRecord, BenchError> {
        let record: BenchRecord = serde_json::from_str(line).map_err(|e| BenchError::SchemaViolation {
            line: number,
            reason: e.to_string(),
        })?;
        record
            .validate()
            .map_err(|reason| BenchError::SchemaViolation { line: number, reason })?;
        Ok(record)
    };
    let mut records = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if !line.trim().is_empty() {
            records.push(parse(line, i + 1)?);
        }
    }
    if let Some(last) = partial.filter(|l| !l.trim().is_empty()) {
        if let Ok(r) = parse(last, lines.len() + 1) {
            records.push(r);
        }
    }
    Ok(records)
}

pub fn read_records(path: &Path) -> Result<Vec<BenchRecord>, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    parse_records(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BenchRecord {
        BenchRecord::new("tfim_chain_4_O_Gamma=1", "ed", -4.758770483143634, 0.0, 4, 0.0, Some(-4.758770483143634))
            .unwrap()
            .with_metadata("seed", 7)
    }

    #[test]
    fn json_line_has_canonical_key_order() {
        let line = sample().to_json_line();
        let keys = ["hamiltonian", "method", "energy", "variance", "n_dof", "e_infty", "v_score", "e0", "metadata"];
        let positions: Vec<usize> = keys.iter().map(|k| line.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{line}");
        assert!(line.contains("\"energy\":-4.7587704831436337e0"), "{line}");
    }

    #[test]
    fn line_round_trips() {
        let r = sample();
        assert_eq!(parse_records(&(r.to_json_line() + "\n")).unwrap(), vec![r]);
    }

    #[test]
    fn negative_variance_reports_its_line() {
        let good = sample().to_json_line();
        let bad = good.replace("\"variance\":0.0000000000000000e0", "\"variance\":-1.0e-3");
        let err = parse_records(&format!("{good}\n{bad}\n")).unwrap_err();
        assert!(matches!(err, BenchError::SchemaViolation { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn inconsistent_v_score_is_rejected() {
        let mut r = BenchRecord::new("h", "m", -1.0, 0.5, 2, 0.0, None).unwrap();
        r.v_score *= 1.0 + 1e-9;
        let err = parse_records(&(r.to_json_line() + "\n")).unwrap_err();
        assert!(matches!(err, BenchError::SchemaViolation { line: 1, .. }));
    }

    #[test]
    fn trailing_partial_line_is_ignored() {
        let line = sample().to_json_line();
        let text = format!("{line}\n{}", &line[..line.len() / 2]);
        assert_eq!(parse_records(&text).unwrap().len(), 1);
        // A complete final record without its newline still counts.
        assert_eq!(parse_records(&format!("{line}\n{line}")).unwrap().len(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let line = sample().to_json_line().replacen('{', "{\"extra\":1,", 1);
        assert!(parse_records(&(line + "\n")).is_err());
    }

    #[test]
    fn empty_text_is_empty_dataset() {
        assert!(parse_records("").unwrap().is_empty());
    }

    #[test]
    fn construction_rejects_zero_point_energy() {
        assert!(BenchRecord::new("h", "m", 0.0, 1.0, 2, 0.0, None).is_err());
    }
}
