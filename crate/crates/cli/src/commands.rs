//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qbh_core::criteria::{
    check_automorphism, check_compatibility, check_delta, check_jacobi, check_linear_candidate,
    check_poisson_pair, hamiltonian_condition, hojman_check, linear_realization, oracle_agreement,
    structure_coefficients, structure_residuals, FreeCoefficients,
};
use qbh_core::error::DomainSetupError;
use qbh_core::{
    build_qbh, parse_expression, CriteriaError, CriterionReport, DecomposableBivector, QbhError,
    QbhOptions, ScalarExpr, VectorField, VerifyConfig,
};

use crate::fixtures::{fixture, FIXTURES};
use crate::problem::{load_problem, ProblemError, ProblemSpec};
use crate::report::{digest, RunReport};

#[derive(Parser, Debug)]
#[command(
    name = "qbh",
    version,
    about = "Check decomposable Poisson tensors and build quasi-bi-Hamiltonian systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one criterion on a problem file
    Check {
        #[arg(value_enum)]
        which: CheckKind,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form structure coefficients compared against span expansion
    Coeffs {
        #[arg(value_enum)]
        which: CoeffsKind,
        #[command(flatten)]
        common: Common,
    },
    /// Assemble a system from a problem file
    Build {
        #[arg(value_enum)]
        which: BuildKind,
        /// Report a non-integral F or a vanishing rho instead of failing
        #[arg(long)]
        inexact: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Shipped fixtures
    Example {
        #[command(subcommand)]
        action: ExampleAction,
    },
}

#[derive(Subcommand, Debug)]
enum ExampleAction {
    List,
    Run {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CheckKind {
    Poisson,
    Automorphism,
    Compat,
    Delta,
    Hamiltonian,
    Jacobi,
    Hojman,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CoeffsKind {
    Lemma4,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BuildKind {
    Qbh,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Problem file
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, env = "QBH_FORMAT", default_value = "text")]
    format: Format,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Residual tolerance
    #[arg(long)]
    tolerance: Option<f64>,
    /// Binds the roles X1, X2, X3, XH in order
    #[arg(long = "field", value_name = "NAME")]
    fields: Vec<String>,
    /// Function name or expression for H
    #[arg(long = "H", value_name = "NAME")]
    h: Option<String>,
    /// Function name or expression for F
    #[arg(long = "F", value_name = "NAME")]
    f: Option<String>,
}

/// Result of one invocation: exit code, the report if a problem was loaded,
/// and the text to print.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<RunReport>,
    pub rendered: String,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_RESIDUAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;

#[derive(Debug, Clone)]
pub struct RunError {
    pub code: i32,
    pub message: String,
}

impl RunError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<ProblemError> for RunError {
    fn from(e: ProblemError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<DomainSetupError> for RunError {
    fn from(e: DomainSetupError) -> Self {
        let code = match e {
            DomainSetupError::GuardTooRestrictive { .. } => EXIT_SINGULAR,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CriteriaError> for RunError {
    fn from(e: CriteriaError) -> Self {
        let code = match e {
            CriteriaError::AllPointsSkipped { .. }
            | CriteriaError::DegenerateBasis { .. }
            | CriteriaError::SingularFactor { .. } => EXIT_SINGULAR,
            CriteriaError::PreconditionResidual { .. } => EXIT_RESIDUAL,
            CriteriaError::DimensionMismatch(_) | CriteriaError::Field(_) => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<QbhError> for RunError {
    fn from(e: QbhError) -> Self {
        let code = match &e {
            QbhError::Criteria(inner) => return inner.clone().into(),
            QbhError::NonVanishingRho { .. } => EXIT_SINGULAR,
            QbhError::NoTestFunctions => EXIT_INPUT,
            QbhError::DeltaViolated(_)
            | QbhError::HamiltonianConditionViolated(_)
            | QbhError::NotAnIntegral { .. }
            | QbhError::NotPoisson(_) => EXIT_RESIDUAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

const ROLES: [&str; 4] = ["X1", "X2", "X3", "XH"];

/// A loaded problem with overrides applied and points sampled.
struct Session<'a> {
    problem: ProblemSpec,
    common: &'a Common,
    cfg: VerifyConfig,
    report: RunReport,
}

impl Session<'_> {
    fn bound_name(&self, role: &str) -> String {
        let i = ROLES.iter().position(|r| *r == role).expect("known role");
        self.common
            .fields
            .get(i)
            .cloned()
            .unwrap_or_else(|| role.to_string())
    }

    fn role(&mut self, role: &str) -> Result<VectorField, RunError> {
        let name = self.bound_name(role);
        if let Some(f) = self.problem.field(&name) {
            return Ok(f.clone());
        }
        if role == "XH" && self.common.fields.len() < 4 {
            // dH contracted with X1^X2
            let h = self.function(&self.common.h.clone(), "H")?;
            let xh =
                DecomposableBivector::new(self.role("X1")?, self.role("X2")?).hamiltonian_field(&h);
            let shown = self.show_field(&xh);
            self.report.output("XH", shown);
            return Ok(xh);
        }
        Err(RunError::input(format!(
            "no field `{name}` for role {role}"
        )))
    }

    fn function(&self, flag: &Option<String>, default: &str) -> Result<ScalarExpr, RunError> {
        match flag {
            Some(text) => match self.problem.function(text) {
                Some(f) => Ok(f.clone()),
                None => parse_expression(text, &self.problem.chart)
                    .map_err(|e| RunError::input(format!("--{default} `{text}`: {e}"))),
            },
            None => self.problem.function(default).cloned().ok_or_else(|| {
                RunError::input(format!("no function `{default}`; pass --{default}"))
            }),
        }
    }

    fn show(&self, e: &ScalarExpr) -> String {
        e.display(&self.problem.chart).to_string()
    }

    fn show_field(&self, f: &VectorField) -> String {
        let parts: Vec<String> = f.components().iter().map(|c| self.show(c)).collect();
        format!("({})", parts.join(", "))
    }

    fn push(&mut self, r: &CriterionReport) {
        self.report.push(r);
    }

    fn oracle(&mut self) -> Result<(), RunError> {
        let mut fields: Vec<(String, VectorField)> = self.problem.fields.clone();
        if self.problem.field("XH").is_none() && self.problem.function("H").is_some() {
            let h = self.function(&None, "H")?;
            if let (Some(x1), Some(x2)) = (self.problem.field("X1"), self.problem.field("X2")) {
                let xh = DecomposableBivector::new(x1.clone(), x2.clone()).hamiltonian_field(&h);
                fields.push(("XH".to_string(), xh));
            }
        }
        let fields: Vec<(&str, &VectorField)> =
            fields.iter().map(|(n, f)| (n.as_str(), f)).collect();
        let functions: Vec<(&str, &ScalarExpr)> = self
            .problem
            .functions
            .iter()
            .map(|(n, f)| (n.as_str(), f))
            .collect();
        let r = oracle_agreement(&fields, &functions, &self.cfg);
        self.push(&r);
        Ok(())
    }

    fn check(&mut self, which: CheckKind) -> Result<(), RunError> {
        match which {
            CheckKind::Poisson => {
                let (x1, x2) = (self.role("X1")?, self.role("X2")?);
                let r = check_poisson_pair(&x1, &x2, &self.cfg)?;
                self.push(&r);
            }
            CheckKind::Automorphism => {
                let (x1, x2, xh) = (self.role("X1")?, self.role("X2")?, self.role("XH")?);
                let r = check_automorphism(&xh, &x1, &x2, &self.cfg)?;
                self.push(&r);
            }
            CheckKind::Compat => {
                let (x1, x2, x3, xh) = (
                    self.role("X1")?,
                    self.role("X2")?,
                    self.role("X3")?,
                    self.role("XH")?,
                );
                let r = check_compatibility(&x1, &x2, &xh, &x3, &self.cfg)?;
                self.push(&r);
            }
            CheckKind::Delta => {
                let (x1, x2, x3) = (self.role("X1")?, self.role("X2")?, self.role("X3")?);
                let r = check_delta(&x1, &x2, &x3, &self.cfg)?;
                self.push(&r);
            }
            CheckKind::Hamiltonian => {
                let (x1, x2) = (self.role("X1")?, self.role("X2")?);
                let h = self.function(&self.common.h.clone(), "H")?;
                let (expr, r) = hamiltonian_condition(&x1, &x2, &h, &self.cfg)?;
                self.push(&r);
                let shown = self.show(&expr.simplify());
                self.report.output("X1(X2(H))", shown);
            }
            CheckKind::Jacobi => {
                let (x1, x2, xh) = (self.role("X1")?, self.role("X2")?, self.role("XH")?);
                let r = check_jacobi(&x1, &x2, &xh, &self.cfg)?;
                self.push(&r);
            }
            CheckKind::Hojman => {
                let (x1, x3) = (self.role("X1")?, self.role("X3")?);
                let h = self.function(&self.common.h.clone(), "H")?;
                self.hojman(&x1, &x3, &h, "rho")?;
            }
        }
        Ok(())
    }

    fn hojman(
        &mut self,
        x1: &VectorField,
        x3: &VectorField,
        h: &ScalarExpr,
        label: &str,
    ) -> Result<(), RunError> {
        let out = hojman_check(x1, x3, h, &self.cfg)?;
        self.push(&out.report);
        let rho = self.show(&out.rho.simplify());
        self.report.output(label, rho);
        Ok(())
    }

    fn coefficients(&mut self) -> Result<(), RunError> {
        let (x1, x2, x3) = (self.role("X1")?, self.role("X2")?, self.role("X3")?);
        let h = self.function(&self.common.h.clone(), "H")?;
        let free = FreeCoefficients::delta(&x1, &x2, &h);
        let comparison = structure_coefficients(&x1, &x2, &x3, &h, &free, &self.cfg)?;
        self.report.push_informative(&comparison.report);
        let residuals =
            structure_residuals(&comparison.coefficients, &x1, &x2, &x3, &h, &self.cfg)?;
        self.push(&residuals);
        for (name, value) in comparison.coefficients.named() {
            let shown = self.show(value);
            self.report.output(name, shown);
        }
        let flagged = comparison.discrepancies().join(" ");
        if !flagged.is_empty() {
            self.report
                .output("closed forms differing from span expansion", flagged);
        }
        Ok(())
    }

    fn qbh(&mut self, inexact: bool) -> Result<(), RunError> {
        let (x1, x2, x3) = (self.role("X1")?, self.role("X2")?, self.role("X3")?);
        let h = self.function(&self.common.h.clone(), "H")?;
        let f = self.function(&self.common.f.clone(), "F")?;
        let options = QbhOptions {
            require_exact: !inexact,
        };
        match build_qbh(&x1, &x2, &x3, &h, &f, &self.cfg, options) {
            Ok(sys) => {
                self.push(&sys.report);
                let values = [
                    ("XH", self.show_field(&sys.xh)),
                    ("XF", self.show_field(&sys.xf)),
                    ("rho", self.show(&sys.rho.simplify())),
                    ("{H,F}", self.show(&sys.bracket_hf.simplify())),
                    ("exact", sys.exact.to_string()),
                    ("bi-Hamiltonian", sys.bi_hamiltonian.to_string()),
                ];
                for (name, value) in values {
                    self.report.output(name, value);
                }
                Ok(())
            }
            Err(e) => {
                match &e {
                    QbhError::DeltaViolated(r)
                    | QbhError::HamiltonianConditionViolated(r)
                    | QbhError::NotPoisson(r) => self.push(r),
                    _ => {}
                }
                Err(e.into())
            }
        }
    }

    fn example(&mut self, name: &str) -> Result<(), RunError> {
        match name {
            "exp-realization" => {
                for k in [
                    CheckKind::Delta,
                    CheckKind::Poisson,
                    CheckKind::Automorphism,
                    CheckKind::Compat,
                    CheckKind::Hamiltonian,
                ] {
                    self.check(k)?;
                }
                self.coefficients()?;
                self.qbh(false)?;
            }
            "rotation" => {
                for k in [
                    CheckKind::Delta,
                    CheckKind::Poisson,
                    CheckKind::Compat,
                    CheckKind::Hamiltonian,
                ] {
                    self.check(k)?;
                }
                self.coefficients()?;
                self.printed_solution()?;
            }
            "so3-jacobi" | "heisenberg-jacobi" => self.check(CheckKind::Jacobi)?,
            "linear-abelian" => {
                self.check(CheckKind::Delta)?;
                let real = linear_realization(&[vec![1.0]])?;
                let x3 = self.role("X3")?;
                if real.chart != self.problem.chart {
                    return Err(RunError::input("linear-abelian expects coordinates x1 x2"));
                }
                let r = check_linear_candidate(&real, x3.components(), &self.cfg)?;
                self.push(&r);
            }
            "hojman-2d" => {
                let (x1, x3) = (self.role("X1")?, self.role("X3")?);
                for (f, label) in [("H", "rho for H"), ("H2", "rho for H2")] {
                    let h = self.function(&Some(f.to_string()), f)?;
                    self.hojman(&x1, &x3, &h, label)?;
                }
            }
            _ => return Err(RunError::input(format!("no pipeline for fixture `{name}`"))),
        }
        self.oracle()
    }

    /// Residuals of the closed form printed with the rotation construction.
    /// Recorded only; it is not expected to realize the algebra.
    fn printed_solution(&mut self) -> Result<(), RunError> {
        let (x1, x2) = (self.role("X1")?, self.role("X2")?);
        let p = self
            .problem
            .field("P")
            .cloned()
            .ok_or_else(|| RunError::input("no field `P`"))?;
        let mut r = check_delta(&x1, &x2, &p, &self.cfg)?;
        r.name = "printed solution as X3".to_string();
        r.notes.push(format!(
            "printed solution {} the algebra (max residual {:e})",
            if r.pass {
                "satisfies"
            } else {
                "does not satisfy"
            },
            r.max_residual()
        ));
        self.report.push_informative(&r);
        Ok(())
    }
}

fn session<'a>(
    command: String,
    mut problem: ProblemSpec,
    common: &'a Common,
    extra: &str,
) -> Result<Session<'a>, (RunError, Option<Box<RunReport>>)> {
    let mut tol = problem.tolerances;
    if let Some(t) = common.tolerance {
        tol.residual = t;
    }
    let fail = |e: RunError| (e, None);
    tol.validate().map_err(|e| fail(e.into()))?;
    if let Some(n) = common.samples {
        problem.domain = problem
            .domain
            .clone()
            .with_samples(n)
            .map_err(|e| fail(e.into()))?;
    }
    if let Some(s) = common.seed {
        problem.domain = problem.domain.clone().with_seed(s);
    }
    if common.fields.len() > ROLES.len() {
        return Err(fail(RunError::input(
            "at most four --field bindings (X1, X2, X3, XH)",
        )));
    }
    let settings = format!(
        "command={command};samples={};seed={};tolerance={:e};fields={:?};H={:?};F={:?};{extra}",
        problem.domain.samples(),
        problem.domain.seed(),
        tol.residual,
        common.fields,
        common.h,
        common.f,
    );
    let mut report = RunReport::new(
        command,
        digest(&problem.source, &settings),
        problem.domain.samples(),
        problem.domain.seed(),
        &tol,
    );
    match VerifyConfig::sample(&problem.domain, tol) {
        Ok(cfg) => Ok(Session {
            problem,
            common,
            cfg,
            report,
        }),
        Err(e) => {
            let e: RunError = e.into();
            report.fail(e.message.clone());
            Err((e, Some(Box::new(report))))
        }
    }
}

fn load(common: &Common) -> Result<ProblemSpec, RunError> {
    let path = common
        .input
        .as_ref()
        .ok_or_else(|| RunError::input("--input PATH is required"))?;
    Ok(load_problem(path)?)
}

fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    }
}

fn execute(
    command: String,
    problem: Result<ProblemSpec, RunError>,
    common: &Common,
    extra: &str,
    body: impl FnOnce(&mut Session) -> Result<(), RunError>,
) -> Outcome {
    let start = Instant::now();
    let failed = |e: RunError, report: Option<RunReport>| {
        let rendered = match &report {
            Some(r) => render(r, common.format),
            None => format!("error: {}\n", e.message),
        };
        Outcome {
            code: e.code,
            report,
            rendered,
        }
    };
    let problem = match problem {
        Ok(p) => p,
        Err(e) => return failed(e, None),
    };
    let mut s = match session(command, problem, common, extra) {
        Ok(s) => s,
        Err((e, report)) => return failed(e, report.map(|r| *r)),
    };
    let result = body(&mut s);
    let mut report = s.report;
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let code = match result {
        Ok(()) if report.pass => EXIT_PASS,
        Ok(()) => EXIT_RESIDUAL,
        Err(e) => {
            report.fail(e.message);
            e.code
        }
    };
    Outcome {
        code,
        rendered: render(&report, common.format),
        report: Some(report),
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_PASS
            };
            return Outcome {
                code,
                report: None,
                rendered: e.render().to_string(),
            };
        }
    };
    match cli.command {
        Command::Check { which, common } => {
            let name = format!(
                "check {}",
                which.to_possible_value().expect("named").get_name()
            );
            execute(name, load(&common), &common, "", |s| s.check(which))
        }
        Command::Coeffs {
            which: CoeffsKind::Lemma4,
            common,
        } => execute("coeffs lemma4".into(), load(&common), &common, "", |s| {
            s.coefficients()
        }),
        Command::Build {
            which: BuildKind::Qbh,
            inexact,
            common,
        } => {
            let extra = format!("inexact={inexact}");
            execute("build qbh".into(), load(&common), &common, &extra, |s| {
                s.qbh(inexact)
            })
        }
        Command::Example {
            action: ExampleAction::List,
        } => {
            let width = FIXTURES.iter().map(|f| f.name.len()).max().unwrap_or(0);
            let rendered = FIXTURES
                .iter()
                .map(|f| format!("{:<width$}  {}\n", f.name, f.summary))
                .collect();
            Outcome {
                code: EXIT_PASS,
                report: None,
                rendered,
            }
        }
        Command::Example {
            action: ExampleAction::Run { name, common },
        } => {
            let problem = match (fixture(&name), &common.input) {
                (None, _) => Err(RunError::input(format!(
                    "unknown fixture `{name}`; see `example list`"
                ))),
                (Some(_), Some(path)) => load_problem(path).map_err(RunError::from),
                (Some(f), None) => Ok(f.problem()),
            };
            execute(format!("example run {name}"), problem, &common, "", |s| {
                s.example(&name)
            })
        }
    }
}
