//! Coordinate charts and points on them.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::ChartError;

/// An ordered list of coordinate names over an open box of real n-space.
///
/// Cloning is cheap; the names are shared.
#[derive(Clone, PartialEq, Eq)]
pub struct CoordinateChart {
    names: Arc<[String]>,
}

impl CoordinateChart {
    pub fn new<I, S>(names: I) -> Result<Self, ChartError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ChartError::Empty);
        }
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(ChartError::InvalidName(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(ChartError::DuplicateName(name.clone()));
            }
        }
        Ok(Self {
            names: names.into(),
        })
    }

    /// Chart with coordinates `x1 … xn`.
    pub fn numbered(prefix: &str, n: usize) -> Result<Self, ChartError> {
        Self::new((1..=n).map(|i| alloc::format!("{prefix}{i}")))
    }

    pub fn dimension(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn point(&self, values: &[f64]) -> Result<Point, ChartError> {
        Point::new(self.clone(), values.to_vec())
    }
}

impl fmt::Debug for CoordinateChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// A point of a chart: one finite value per coordinate.
#[derive(Clone, PartialEq)]
pub struct Point {
    chart: CoordinateChart,
    values: Vec<f64>,
}

impl Point {
    pub fn new(chart: CoordinateChart, values: Vec<f64>) -> Result<Self, ChartError> {
        if values.len() != chart.dimension() {
            return Err(ChartError::DimensionMismatch {
                expected: chart.dimension(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ChartError::NonFinite(chart.name(i).to_string()));
        }
        Ok(Self { chart, values })
    }

    pub fn chart(&self) -> &CoordinateChart {
        &self.chart
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Copy of this point with coordinate `index` shifted by `delta`.
    pub(crate) fn shifted(&self, index: usize, delta: f64) -> Point {
        let mut values = self.values.clone();
        values[index] += delta;
        Point {
            chart: self.chart.clone(),
            values,
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (name, v)) in self.chart.names().iter().zip(&self.values).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={v}")?;
        }
        f.write_str(")")
    }
}
