//! Run reports: JSON with a fixed key order and a one-line-per-condition text form.

use std::fmt::Write as _;

use qbh_core::numeric::GENERATOR;
use qbh_core::{CriterionReport, ToleranceConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub name: String,
    pub gating: bool,
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    pub evaluated: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionEntry {
    pub name: String,
    pub pass: bool,
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    pub skipped: usize,
    pub notes: Vec<String>,
    /// Recorded for documentation; does not enter the overall verdict.
    pub informative: bool,
    pub tolerance: f64,
    pub samples: usize,
    pub conditions: Vec<ConditionEntry>,
}

impl CriterionEntry {
    pub fn new(report: &CriterionReport, informative: bool) -> Self {
        Self {
            name: report.name.clone(),
            pass: report.pass,
            max_residual: report.max_residual(),
            worst_point: report.worst_point().map(<[f64]>::to_vec),
            skipped: report.skipped,
            notes: report.notes.clone(),
            informative,
            tolerance: report.tolerance,
            samples: report.samples,
            conditions: report
                .conditions
                .iter()
                .map(|c| ConditionEntry {
                    name: c.name.clone(),
                    gating: c.gating,
                    max_residual: c.max_residual,
                    worst_point: c.worst_point.clone(),
                    evaluated: c.evaluated,
                    skipped: c.skipped,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub residual: f64,
    pub fd: f64,
    pub independence: f64,
    pub guard_eps: f64,
    pub max_skip_fraction: f64,
}

impl From<&ToleranceConfig> for Tolerances {
    fn from(t: &ToleranceConfig) -> Self {
        Self {
            residual: t.residual,
            fd: t.fd,
            independence: t.independence,
            guard_eps: t.guard_eps,
            max_skip_fraction: t.max_skip_fraction,
        }
    }
}

/// A derived expression worth showing, such as `rho` or `XH`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub digest: String,
    pub pass: bool,
    pub criteria: Vec<CriterionEntry>,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub version: String,
    pub generator: String,
    pub outputs: Vec<NamedValue>,
    pub error: Option<String>,
    /// Not serialized, so repeated runs emit identical bytes.
    #[serde(skip)]
    pub wall_time_ms: f64,
}

impl PartialEq for RunReport {
    fn eq(&self, other: &Self) -> bool {
        self.command == other.command
            && self.digest == other.digest
            && self.pass == other.pass
            && self.criteria == other.criteria
            && self.samples == other.samples
            && self.seed == other.seed
            && self.tolerances == other.tolerances
            && self.version == other.version
            && self.generator == other.generator
            && self.outputs == other.outputs
            && self.error == other.error
    }
}

impl RunReport {
    pub fn new(
        command: String,
        digest: String,
        samples: usize,
        seed: u64,
        tol: &ToleranceConfig,
    ) -> Self {
        Self {
            command,
            digest,
            pass: true,
            criteria: Vec::new(),
            samples,
            seed,
            tolerances: tol.into(),
            version: VERSION.to_string(),
            generator: GENERATOR.to_string(),
            outputs: Vec::new(),
            error: None,
            wall_time_ms: 0.0,
        }
    }

    pub fn push(&mut self, report: &CriterionReport) {
        self.criteria.push(CriterionEntry::new(report, false));
        self.refresh();
    }

    pub fn push_informative(&mut self, report: &CriterionReport) {
        self.criteria.push(CriterionEntry::new(report, true));
    }

    /// Records a derived value once; repeats of the same pair are dropped.
    pub fn output(&mut self, name: &str, value: impl Into<String>) {
        let v = NamedValue {
            name: name.to_string(),
            value: value.into(),
        };
        if !self.outputs.contains(&v) {
            self.outputs.push(v);
        }
    }

    pub fn fail(&mut self, error: String) {
        self.error = Some(error);
        self.pass = false;
    }

    fn refresh(&mut self) {
        self.pass = self.error.is_none() && self.criteria.iter().all(|c| c.informative || c.pass);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = |pass: bool| if pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{}: {}", self.command, verdict(self.pass));
        let _ = writeln!(
            out,
            "  digest {}  samples {}  seed {}  tolerance {:e}",
            &self.digest[..16],
            self.samples,
            self.seed,
            self.tolerances.residual
        );
        for c in &self.criteria {
            let tag = if c.informative { " (informative)" } else { "" };
            let _ = writeln!(
                out,
                "{}: {}{tag}  tolerance {:e}",
                c.name,
                verdict(c.pass),
                c.tolerance
            );
            let width = c.conditions.iter().map(|k| k.name.len()).max().unwrap_or(0);
            for k in &c.conditions {
                let mark = if k.gating { ' ' } else { '~' };
                let at = match &k.worst_point {
                    Some(p) => format!("at {}", point(p)),
                    None => "no point evaluated".to_string(),
                };
                let _ = writeln!(
                    out,
                    "  {mark} {:<width$}  {:>10.3e}  {at}",
                    k.name, k.max_residual
                );
            }
            for n in &c.notes {
                let _ = writeln!(out, "    note: {n}");
            }
        }
        for v in &self.outputs {
            let _ = writeln!(out, "{} = {}", v.name, v.value);
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        let _ = writeln!(out, "wall time {:.1} ms", self.wall_time_ms);
        out
    }
}

fn point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

/// SHA-256 of the problem text followed by the effective settings.
pub fn digest(source: &str, settings: &str) -> String {
    let mut h = Sha256::new();
    h.update(source.as_bytes());
    h.update([0u8]);
    h.update(settings.as_bytes());
    hex::encode(h.finalize())
}
