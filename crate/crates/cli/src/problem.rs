//! Problem files: INI-style sections, `#` comments, one `key = value` per line.
//!
//! ```text
//! [space]
//! coordinates = x y z
//!
//! [field X1]
//! x = exp(z)
//! y = 1
//!
//! [function H]
//! expr = y
//!
//! [domain]
//! box = x:-1:1 y:-1:1 z:0.1:1
//! guard = z            # |z| >= guard_eps
//! guard = x^2 >= 0.25  # |x^2| >= 0.25
//! samples = 200
//! seed = 1
//!
//! [tolerances]
//! residual = 1e-9
//! ```

use std::fmt;
use std::path::Path;

use qbh_core::{
    parse_expression, CoordinateChart, SampleDomain, ScalarExpr, ToleranceConfig, VectorField,
};

pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemError {
    pub line: Option<usize>,
    pub message: String,
}

impl ProblemError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ProblemError {}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub chart: CoordinateChart,
    /// In file order.
    pub fields: Vec<(String, VectorField)>,
    pub functions: Vec<(String, ScalarExpr)>,
    pub domain: SampleDomain,
    pub tolerances: ToleranceConfig,
    /// The file text, hashed into report digests.
    pub source: String,
}

impl ProblemSpec {
    pub fn field(&self, name: &str) -> Option<&VectorField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn function(&self, name: &str) -> Option<&ScalarExpr> {
        self.functions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
    }
}

pub fn load_problem(path: &Path) -> Result<ProblemSpec, ProblemError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ProblemError::general(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text)
}

enum Section {
    Space,
    Field(usize),
    Function(usize),
    Domain,
    Tolerances,
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

#[derive(Default)]
struct Raw {
    coordinates: Option<(usize, String)>,
    fields: Vec<(String, usize, Vec<Entry>)>,
    functions: Vec<(String, usize, Option<Entry>)>,
    domain: Vec<Entry>,
    tolerances: Vec<Entry>,
}

fn header(line: usize, inner: &str, raw: &mut Raw) -> Result<Section, ProblemError> {
    let mut words = inner.split_whitespace();
    let kind = words.next().unwrap_or("");
    let name = words.next();
    if words.next().is_some() {
        return Err(ProblemError::at(
            line,
            format!("malformed section header [{inner}]"),
        ));
    }
    let named = |what: &str| {
        name.map(str::to_string)
            .ok_or_else(|| ProblemError::at(line, format!("[{what}] needs a name")))
    };
    match kind {
        "space" | "domain" | "tolerances" if name.is_some() => {
            Err(ProblemError::at(line, format!("[{kind}] takes no name")))
        }
        "space" => Ok(Section::Space),
        "domain" => Ok(Section::Domain),
        "tolerances" => Ok(Section::Tolerances),
        "field" => {
            let name = named("field")?;
            if raw.fields.iter().any(|(n, _, _)| *n == name) {
                return Err(ProblemError::at(line, format!("duplicate field `{name}`")));
            }
            raw.fields.push((name, line, Vec::new()));
            Ok(Section::Field(raw.fields.len() - 1))
        }
        "function" => {
            let name = named("function")?;
            if raw.functions.iter().any(|(n, _, _)| *n == name) {
                return Err(ProblemError::at(
                    line,
                    format!("duplicate function `{name}`"),
                ));
            }
            raw.functions.push((name, line, None));
            Ok(Section::Function(raw.functions.len() - 1))
        }
        _ => Err(ProblemError::at(line, format!("unknown section [{inner}]"))),
    }
}

fn scan(text: &str) -> Result<Raw, ProblemError> {
    let mut raw = Raw::default();
    let mut section: Option<Section> = None;
    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let content = full.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| ProblemError::at(line, "unterminated section header"))?;
            section = Some(header(line, inner.trim(), &mut raw)?);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ProblemError::at(line, "expected `key = value`"))?;
        let entry = Entry {
            line,
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        };
        match &section {
            None => return Err(ProblemError::at(line, "entry outside any section")),
            Some(Section::Space) => {
                if entry.key != "coordinates" {
                    return Err(ProblemError::at(
                        line,
                        format!("unknown key `{}` in [space]", entry.key),
                    ));
                }
                if raw.coordinates.is_some() {
                    return Err(ProblemError::at(line, "coordinates declared twice"));
                }
                raw.coordinates = Some((line, entry.value));
            }
            Some(Section::Field(k)) => raw.fields[*k].2.push(entry),
            Some(Section::Function(k)) => {
                if entry.key != "expr" {
                    return Err(ProblemError::at(
                        line,
                        format!("unknown key `{}` in [function]", entry.key),
                    ));
                }
                let slot = &mut raw.functions[*k].2;
                if slot.is_some() {
                    return Err(ProblemError::at(line, "function defined twice"));
                }
                *slot = Some(entry);
            }
            Some(Section::Domain) => raw.domain.push(entry),
            Some(Section::Tolerances) => raw.tolerances.push(entry),
        }
    }
    Ok(raw)
}

fn expression(entry: &Entry, chart: &CoordinateChart) -> Result<ScalarExpr, ProblemError> {
    parse_expression(&entry.value, chart).map_err(|e| ProblemError::at(entry.line, e.to_string()))
}

fn number<T: std::str::FromStr>(entry: &Entry) -> Result<T, ProblemError> {
    entry.value.parse().map_err(|_| {
        ProblemError::at(
            entry.line,
            format!("invalid number `{}` for `{}`", entry.value, entry.key),
        )
    })
}

pub fn parse_problem(text: &str) -> Result<ProblemSpec, ProblemError> {
    let raw = scan(text)?;
    let (coord_line, coords) = raw
        .coordinates
        .as_ref()
        .ok_or_else(|| ProblemError::general("missing [space] coordinates"))?;
    let chart = CoordinateChart::new(coords.split_whitespace())
        .map_err(|e| ProblemError::at(*coord_line, e.to_string()))?;
    let n = chart.dimension();

    let mut fields = Vec::new();
    for (name, _, entries) in &raw.fields {
        let mut components = vec![None; n];
        for e in entries {
            let index = chart.index_of(&e.key).ok_or_else(|| {
                ProblemError::at(e.line, format!("`{}` is not a coordinate", e.key))
            })?;
            if components[index].is_some() {
                return Err(ProblemError::at(
                    e.line,
                    format!("component `{}` given twice", e.key),
                ));
            }
            components[index] = Some(expression(e, &chart)?);
        }
        let components = components
            .into_iter()
            .map(|c| c.unwrap_or_else(ScalarExpr::zero))
            .collect();
        let field = VectorField::new(&chart, components)
            .map_err(|e| ProblemError::general(e.to_string()))?;
        fields.push((name.clone(), field));
    }

    let mut functions = Vec::new();
    for (name, line, entry) in &raw.functions {
        let entry = entry
            .as_ref()
            .ok_or_else(|| ProblemError::at(*line, format!("function `{name}` has no expr")))?;
        functions.push((name.clone(), expression(entry, &chart)?));
    }

    let mut tolerances = ToleranceConfig::default();
    for e in &raw.tolerances {
        let slot = match e.key.as_str() {
            "residual" => &mut tolerances.residual,
            "fd" => &mut tolerances.fd,
            "independence" => &mut tolerances.independence,
            "guard_eps" => &mut tolerances.guard_eps,
            "max_skip_fraction" => &mut tolerances.max_skip_fraction,
            other => {
                return Err(ProblemError::at(
                    e.line,
                    format!("unknown key `{other}` in [tolerances]"),
                ))
            }
        };
        *slot = number(e)?;
    }
    tolerances
        .validate()
        .map_err(|e| ProblemError::general(e.to_string()))?;

    let mut intervals: Option<(usize, Vec<(f64, f64)>)> = None;
    let mut guards = Vec::new();
    let mut samples = DEFAULT_SAMPLES;
    let mut seed = 0u64;
    for e in &raw.domain {
        match e.key.as_str() {
            "box" => {
                let mut slots: Vec<Option<(f64, f64)>> = vec![None; n];
                for item in e.value.split_whitespace() {
                    let parts: Vec<&str> = item.split(':').collect();
                    let [name, lo, hi] = parts[..] else {
                        return Err(ProblemError::at(
                            e.line,
                            format!("box entry `{item}` is not name:lo:hi"),
                        ));
                    };
                    let index = chart.index_of(name).ok_or_else(|| {
                        ProblemError::at(e.line, format!("`{name}` is not a coordinate"))
                    })?;
                    let bound = |s: &str| {
                        s.parse::<f64>()
                            .map_err(|_| ProblemError::at(e.line, format!("invalid bound `{s}`")))
                    };
                    if slots[index].is_some() {
                        return Err(ProblemError::at(e.line, format!("`{name}` bounded twice")));
                    }
                    slots[index] = Some((bound(lo)?, bound(hi)?));
                }
                let found = slots.iter().filter(|s| s.is_some()).count();
                if found != n {
                    return Err(ProblemError::at(
                        e.line,
                        format!("box bounds {found} of {n} coordinates"),
                    ));
                }
                intervals = Some((e.line, slots.into_iter().flatten().collect()));
            }
            "guard" => {
                let (text, min_abs) = match e.value.rsplit_once(">=") {
                    Some((lhs, rhs)) => {
                        let bound = rhs.trim().parse::<f64>().map_err(|_| {
                            ProblemError::at(
                                e.line,
                                format!("invalid guard bound `{}`", rhs.trim()),
                            )
                        })?;
                        (lhs.trim(), Some(bound))
                    }
                    None => (e.value.as_str(), None),
                };
                let expr = parse_expression(text, &chart)
                    .map_err(|err| ProblemError::at(e.line, err.to_string()))?;
                guards.push((expr, min_abs));
            }
            "samples" => samples = number(e)?,
            "seed" => seed = number(e)?,
            other => {
                return Err(ProblemError::at(
                    e.line,
                    format!("unknown key `{other}` in [domain]"),
                ))
            }
        }
    }
    let (box_line, intervals) =
        intervals.ok_or_else(|| ProblemError::general("missing [domain] box"))?;
    let mut domain = SampleDomain::new(&chart, intervals, samples, seed)
        .map_err(|e| ProblemError::at(box_line, e.to_string()))?;
    for (expr, min_abs) in guards {
        domain = domain.with_guard(expr, min_abs.unwrap_or(tolerances.guard_eps));
    }

    Ok(ProblemSpec {
        chart,
        fields,
        functions,
        domain,
        tolerances,
        source: text.to_string(),
    })
}
