use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::chart::Point;
use crate::error::DomainError;
use crate::multivector::VectorField;

use super::VerifyConfig;

/// Worst residual of one condition over the sampled points.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub name: String,
    pub max_residual: f64,
    /// First point attaining the maximum, in sampling order.
    pub worst_point: Option<Vec<f64>>,
    pub evaluated: usize,
    pub skipped: usize,
    /// Informative conditions are reported but do not decide the verdict.
    pub gating: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub name: String,
    pub pass: bool,
    pub conditions: Vec<ConditionReport>,
    pub samples: usize,
    pub skipped: usize,
    pub tolerance: f64,
    pub notes: Vec<String>,
}

impl CriterionReport {
    fn gating(&self) -> impl Iterator<Item = &ConditionReport> {
        self.conditions.iter().filter(|c| c.gating)
    }

    /// Largest residual among gating conditions (0 if there are none).
    pub fn max_residual(&self) -> f64 {
        self.gating().map(|c| c.max_residual).fold(0.0, f64::max)
    }

    /// Worst point of the gating condition with the largest residual.
    pub fn worst_point(&self) -> Option<&[f64]> {
        let mut best: Option<&ConditionReport> = None;
        for c in self.gating() {
            if best.is_none_or(|b| c.max_residual > b.max_residual) {
                best = Some(c);
            }
        }
        best.and_then(|c| c.worst_point.as_deref())
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Whether every gating condition whose name starts with `prefix` is within tolerance.
    pub fn passes_group(&self, prefix: &str) -> bool {
        let mut any = false;
        for c in self.gating().filter(|c| c.name.starts_with(prefix)) {
            any = true;
            if !(c.evaluated > 0 && c.max_residual <= self.tolerance) {
                return false;
            }
        }
        any
    }
}

/// Running maximum with first-attaining index.
#[derive(Debug, Clone, Default)]
pub(crate) struct Tracker {
    max: Option<(f64, usize)>,
    evaluated: usize,
    skipped: usize,
}

impl Tracker {
    pub fn record(&mut self, index: usize, residual: f64) {
        self.evaluated += 1;
        match self.max {
            Some((m, _)) if residual <= m => {}
            _ => self.max = Some((residual, index)),
        }
    }

    pub fn max(&self) -> Option<f64> {
        self.max.map(|(m, _)| m)
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    /// Errors and non-finite values (NaN marks a degenerate point) count as skips.
    pub fn record_result(&mut self, index: usize, r: Result<f64, DomainError>) {
        match r {
            Ok(v) if v.is_finite() => self.record(index, v),
            _ => self.skip(),
        }
    }
}

pub(crate) struct ReportBuilder<'a> {
    name: String,
    cfg: &'a VerifyConfig,
    tolerance: f64,
    conditions: Vec<ConditionReport>,
    notes: Vec<String>,
}

impl<'a> ReportBuilder<'a> {
    pub fn new(name: &str, cfg: &'a VerifyConfig) -> Self {
        Self::with_tolerance(name, cfg, cfg.tol.residual)
    }

    pub fn with_tolerance(name: &str, cfg: &'a VerifyConfig, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            cfg,
            tolerance,
            conditions: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Evaluates `residual` at every sampled point.
    pub fn condition(
        &mut self,
        name: &str,
        gating: bool,
        mut residual: impl FnMut(&Point) -> Result<f64, DomainError>,
    ) {
        let mut tracker = Tracker::default();
        for (i, p) in self.cfg.points.iter().enumerate() {
            tracker.record_result(i, residual(p));
        }
        self.push(name, gating, tracker);
    }

    /// Evaluates `residual` only at the points whose mask entry is true.
    pub fn condition_on(
        &mut self,
        name: &str,
        gating: bool,
        mask: &[bool],
        mut residual: impl FnMut(&Point) -> Result<f64, DomainError>,
    ) {
        let mut tracker = Tracker::default();
        for (i, p) in self.cfg.points.iter().enumerate() {
            if mask[i] {
                tracker.record_result(i, residual(p));
            } else {
                tracker.skip();
            }
        }
        self.push(name, gating, tracker);
    }

    pub fn push(&mut self, name: &str, gating: bool, tracker: Tracker) {
        if tracker.skipped > 0 {
            self.notes.push(format!(
                "{name}: {} of {} points skipped",
                tracker.skipped,
                self.cfg.points.len()
            ));
        }
        let (max_residual, worst_point) = match tracker.max {
            Some((m, i)) => (m, Some(self.cfg.points[i].values().to_vec())),
            None => (0.0, None),
        };
        self.conditions.push(ConditionReport {
            name: name.to_string(),
            max_residual,
            worst_point,
            evaluated: tracker.evaluated,
            skipped: tracker.skipped,
            gating,
        });
    }

    pub fn finish(self) -> CriterionReport {
        let samples = self.cfg.points.len();
        let max_skip = self.cfg.tol.max_skip_fraction;
        let mut notes = self.notes;
        let mut pass = true;
        for c in self.conditions.iter().filter(|c| c.gating) {
            if c.evaluated == 0 {
                pass = false;
                notes.push(format!("{}: no point evaluated", c.name));
            } else if c.skipped as f64 > max_skip * samples as f64 {
                pass = false;
                notes.push(format!("{}: skip fraction above {max_skip}", c.name));
            }
            if c.max_residual > self.tolerance {
                pass = false;
            }
        }
        let skipped = self.conditions.iter().map(|c| c.skipped).max().unwrap_or(0);
        CriterionReport {
            name: self.name,
            pass,
            conditions: self.conditions,
            samples,
            skipped,
            tolerance: self.tolerance,
            notes,
        }
    }
}

/// Largest absolute component of `field` at `point`.
pub(crate) fn field_max_abs(field: &VectorField, point: &Point) -> Result<f64, DomainError> {
    let mut m = 0.0f64;
    for v in field.values_at(point)? {
        m = m.max(v.abs());
    }
    Ok(m)
}

pub(crate) fn slice_max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}
