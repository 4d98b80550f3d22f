//! The `analyze`, `verify`, `identities` and `parse` pipelines.

use std::time::Instant;

use csbi_core::csbi::{csbi_continuous, csbi_discrete, lemma2_identity, lemma4_identity};
use csbi_core::quadrature::{csbi_continuous_numeric, csbi_discrete_numeric, lemma2_numeric, lemma4_numeric};
use csbi_core::stability::{stability_by_roots, DEFAULT_STABILITY_TOL};
use csbi_core::transfer_function::{DEFAULT_BOUNDARY_TOL, DEFAULT_CANCELLATION_TOL};
use csbi_core::{
    format_tf, parse_tf, CsbiError, CsbiResult64, CsbiStatus, DivergenceSign, Domain, LogBase, LoopTf64, QuadError,
    QuadOptions64, QuadStatus, QuadratureReport64,
};

use crate::report::{
    AnalysisReport, Analytic, Crosschecks, Cplx, IdentityFailure, IdentitySummary, LemmaSummary, Num, Numeric,
    ParseReport, Stability, Structure,
};
use crate::sampling;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NON_FINITE: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;

/// Structured error for the error stream; always exit code 1.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CliError {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
}

impl CliError {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError { kind: kind.to_string(), message: message.into(), position: None }
    }
}

impl From<csbi_core::ParseError> for CliError {
    fn from(e: csbi_core::ParseError) -> Self {
        CliError { kind: e.kind.name().to_string(), message: e.to_string(), position: Some(e.position) }
    }
}

impl From<CsbiError> for CliError {
    fn from(e: CsbiError) -> Self {
        CliError::new("AnalysisError", e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeFlags {
    pub boundary_tol: f64,
    pub log_base: Option<LogBase>,
    pub cancel: bool,
}

impl Default for AnalyzeFlags {
    fn default() -> Self {
        AnalyzeFlags { boundary_tol: DEFAULT_BOUNDARY_TOL, log_base: None, cancel: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyFlags {
    pub analyze: AnalyzeFlags,
    pub quad: QuadOptions64,
    pub agree_tol: f64,
}

impl Default for VerifyFlags {
    fn default() -> Self {
        VerifyFlags { analyze: AnalyzeFlags::default(), quad: QuadOptions64::default(), agree_tol: 1e-3 }
    }
}

/// Parsed loop, analytic result and the partially filled report.
struct Analysis {
    l: LoopTf64,
    result: CsbiResult64,
    report: AnalysisReport,
    base: LogBase,
}

fn analyze_inner(tf_text: &str, flags: &AnalyzeFlags) -> Result<Analysis, CliError> {
    if !(flags.boundary_tol >= 0.0) {
        return Err(CliError::new("InvalidOptions", "--boundary-tol must be non-negative"));
    }
    let mut l: LoopTf64 = parse_tf(tf_text)?;
    let mut warnings = Vec::new();
    if flags.cancel {
        let pairs = l.detect_cancellations(DEFAULT_CANCELLATION_TOL);
        if !pairs.is_empty() {
            l = l
                .cancel_common_factors(DEFAULT_CANCELLATION_TOL)
                .map_err(|e| CliError::new("AnalysisError", e.to_string()))?;
            warnings.push(format!("CancellationApplied: removed {} zero/pole pair(s)", pairs.len()));
        }
    }
    let result = match l.domain() {
        Domain::Continuous => csbi_continuous(&l, flags.boundary_tol)?,
        Domain::Discrete => csbi_discrete(&l, flags.boundary_tol)?,
    };
    let base = flags.log_base.unwrap_or(result.log_base);
    let mut report = AnalysisReport::skeleton(&l, DEFAULT_CANCELLATION_TOL, Analytic::of(&result, base));
    if let Ok(cl) = l.close_loop() {
        let verdict = result.stability.clone().unwrap_or_else(|| stability_by_roots(&cl, DEFAULT_STABILITY_TOL));
        if !verdict.method_agreement {
            warnings.push("StabilityMethodDisagreement: coefficient-table test disagrees with pole locations; pole locations are used".into());
        }
        if cl.pole_clusters > 0 {
            warnings.push(format!("MultipleRootCluster: {} closed-loop pole cluster(s) closer than 1e-7", cl.pole_clusters));
        }
        report.stability = Some(Stability::of(&verdict, &cl.poles));
    }
    report.warnings = result.warnings.iter().cloned().chain(warnings).collect();
    Ok(Analysis { l, result, report, base })
}

fn analytic_exit(status: CsbiStatus) -> i32 {
    match status {
        CsbiStatus::Finite => EXIT_OK,
        CsbiStatus::PlusInfinity | CsbiStatus::MinusInfinity | CsbiStatus::Undefined => EXIT_NON_FINITE,
        CsbiStatus::Refused => EXIT_REFUSED,
    }
}

/// Closed-form analysis only.
pub fn cmd_analyze(tf_text: &str, flags: &AnalyzeFlags) -> Result<(AnalysisReport, i32), CliError> {
    let start = Instant::now();
    let a = analyze_inner(tf_text, flags)?;
    let mut report = a.report;
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((report, analytic_exit(a.result.status)))
}

/// Whether the closed form and the quadrature oracle tell the same story.
pub fn agrees(analytic: &CsbiResult64, numeric: &QuadratureReport64, agree_tol: f64) -> bool {
    match (analytic.status, numeric.status) {
        (CsbiStatus::Finite, QuadStatus::Converged) => match (analytic.value, numeric.value) {
            (Some(a), Some(n)) => (a - n).abs() <= agree_tol.max(3.0 * numeric.abs_error_estimate),
            _ => false,
        },
        (CsbiStatus::PlusInfinity, QuadStatus::DivergenceSuspected) => {
            numeric.divergence_sign == Some(DivergenceSign::Plus)
        }
        (CsbiStatus::MinusInfinity, QuadStatus::DivergenceSuspected) => {
            numeric.divergence_sign == Some(DivergenceSign::Minus)
        }
        _ => false,
    }
}

/// Closed form, quadrature oracle and cross-checks.
pub fn cmd_verify(tf_text: &str, flags: &VerifyFlags) -> Result<(AnalysisReport, i32), CliError> {
    let start = Instant::now();
    if !(flags.agree_tol > 0.0) {
        return Err(CliError::new("InvalidOptions", "--agree-tol must be positive"));
    }
    flags.quad.validate().map_err(|e| CliError::new("InvalidOptions", e.to_string()))?;
    let a = analyze_inner(tf_text, &flags.analyze)?;
    let mut report = a.report;
    let factor: f64 = a.result.log_base.factor_to(a.base);
    let mut crosschecks = Crosschecks::compute(&a.l, &a.result, a.base);
    if let Ok(cl) = a.l.close_loop() {
        let numeric = match a.l.domain() {
            Domain::Continuous => csbi_continuous_numeric(&cl, &flags.quad),
            Domain::Discrete => csbi_discrete_numeric(&cl, &flags.quad),
        };
        match numeric {
            Ok(q) => {
                crosschecks.agreement_flags.analytic_numeric = agrees(&a.result, &q, flags.agree_tol);
                report.numeric = Some(Numeric::of(&q, factor));
            }
            Err(QuadError::BudgetExhausted { best_estimate, abs_error_estimate, evaluations }) => {
                report.warnings.push(format!(
                    "NumericBudgetExhausted: stopped after {evaluations} evaluations with error estimate {abs_error_estimate:e}"
                ));
                report.numeric = Some(Numeric::exhausted(best_estimate, abs_error_estimate, evaluations, factor));
            }
            Err(e) => return Err(CliError::new("InvalidOptions", e.to_string())),
        }
    }
    let flags_ok = crosschecks.agreement_flags.analytic_numeric
        && crosschecks.agreement_flags.middleton != Some(false)
        && crosschecks.agreement_flags.sung != Some(false);
    report.crosschecks = Some(crosschecks);
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let code = match a.result.status {
        CsbiStatus::Refused => EXIT_REFUSED,
        CsbiStatus::Undefined => EXIT_NON_FINITE,
        _ if flags_ok => EXIT_OK,
        _ => EXIT_DISAGREE,
    };
    Ok((report, code))
}

pub fn cmd_parse(tf_text: &str) -> Result<ParseReport, CliError> {
    let l: LoopTf64 = parse_tf(tf_text)?;
    Ok(ParseReport {
        input_echo: format_tf(&l),
        domain: l.domain().name(),
        structure: Structure::of(&l, DEFAULT_CANCELLATION_TOL),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityFlags {
    pub count: usize,
    pub seed: u64,
    /// Forces `a = b` in every Lemma 2 case.
    pub equal_pair: bool,
    pub quad: QuadOptions64,
}

impl Default for IdentityFlags {
    fn default() -> Self {
        IdentityFlags { count: 100, seed: 0, equal_pair: false, quad: QuadOptions64::default().with_abs_tol(1e-7) }
    }
}

/// Agreement band for the identity sweep.
pub fn identity_tolerance(value: f64) -> f64 {
    1e-4f64.max(1e-3 * value.abs())
}

/// Randomized closed-form vs quadrature comparison of the two primitive integrals.
pub fn cmd_identities(flags: &IdentityFlags) -> Result<(IdentitySummary, i32), CliError> {
    let start = Instant::now();
    if flags.count == 0 {
        return Err(CliError::new("InvalidOptions", "--count must be at least 1"));
    }
    flags.quad.validate().map_err(|e| CliError::new("InvalidOptions", e.to_string()))?;
    let mut rng = sampling::rng(flags.seed);
    let mut failures = Vec::new();
    let mut l2 = LemmaSummary { cases: 0, passes: 0, max_deviation: Num(0.0) };
    let mut l4 = LemmaSummary { cases: 0, passes: 0, max_deviation: Num(0.0) };

    for _ in 0..flags.count {
        let a = sampling::complex_in_box(&mut rng, 5.0);
        let b = if flags.equal_pair { a } else { sampling::complex_in_box(&mut rng, 5.0) };
        let exact = lemma2_identity(a, b);
        let numeric = lemma2_numeric(a, b, &flags.quad).ok().and_then(|r| r.value);
        let dev = numeric.map_or(f64::INFINITY, |n| (n - exact).abs());
        l2.cases += 1;
        l2.max_deviation = Num(l2.max_deviation.0.max(dev));
        if dev <= identity_tolerance(exact) {
            l2.passes += 1;
        } else {
            failures.push(IdentityFailure {
                lemma: "lemma2",
                a: a.into(),
                b: Some(Cplx::from(b)),
                analytic: Num(exact),
                numeric: numeric.map(Num),
                deviation: Num(dev),
            });
        }

        let a = sampling::complex_in_disk(&mut rng, 4.0);
        let exact = lemma4_identity(a);
        let numeric = lemma4_numeric(a, &flags.quad).ok().and_then(|r| r.value);
        let dev = numeric.map_or(f64::INFINITY, |n| (n - exact).abs());
        l4.cases += 1;
        l4.max_deviation = Num(l4.max_deviation.0.max(dev));
        if dev <= identity_tolerance(exact) {
            l4.passes += 1;
        } else {
            failures.push(IdentityFailure {
                lemma: "lemma4",
                a: a.into(),
                b: None,
                analytic: Num(exact),
                numeric: numeric.map(Num),
                deviation: Num(dev),
            });
        }
    }
    let code = if failures.is_empty() { EXIT_OK } else { EXIT_DISAGREE };
    let summary = IdentitySummary {
        count: flags.count,
        seed: flags.seed,
        max_deviation: Num(l2.max_deviation.0.max(l4.max_deviation.0)),
        lemma2: l2,
        lemma4: l4,
        failures,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((summary, code))
}
