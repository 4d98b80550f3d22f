//! Serializable projections of the core results.

use csbi_core::csbi::{middleton_crosscheck, sung_crosscheck};
use csbi_core::{
    format_tf, Complex64, CsbiResult64, DivergenceSign, Domain, LogBase, LoopTf64, QuadStatus, QuadratureReport64,
    StabilityVerdict64,
};
use serde::ser::{Serialize, Serializer};
use serde::Serialize as DeriveSerialize;
use serde_json::value::RawValue;

/// A float written with 17 significant digits; non-finite values become strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v.is_infinite() {
            s.serialize_str(if v > 0.0 { "inf" } else { "-inf" })
        } else {
            let raw = RawValue::from_string(format!("{v:.16e}")).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        }
    }
}

/// `[re, im]`
#[derive(Debug, Clone, Copy, PartialEq, DeriveSerialize)]
pub struct Cplx(pub Num, pub Num);

impl From<Complex64> for Cplx {
    fn from(c: Complex64) -> Self {
        Cplx(Num(c.re), Num(c.im))
    }
}

fn cplx(v: &[Complex64]) -> Vec<Cplx> {
    v.iter().map(|&c| c.into()).collect()
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct Cancellation {
    pub zero: Cplx,
    pub pole: Cplx,
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct Structure {
    pub relative_degree: usize,
    pub integrator_count: usize,
    pub gain: Num,
    pub zeros: Vec<Cplx>,
    pub poles: Vec<Cplx>,
    pub cancellations: Vec<Cancellation>,
}

impl Structure {
    pub fn of(l: &LoopTf64, cancel_tol: f64) -> Self {
        Structure {
            relative_degree: l.relative_degree(),
            integrator_count: l.integrator_count(),
            gain: Num(l.gain()),
            zeros: cplx(l.zeros()),
            poles: cplx(l.finite_poles()),
            cancellations: l
                .detect_cancellations(cancel_tol)
                .into_iter()
                .map(|(z, p)| Cancellation { zero: z.into(), pole: p.into() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct Stability {
    pub stable: bool,
    pub margin: Num,
    pub method_agreement: bool,
    pub marginal: bool,
    pub offenders: Vec<Cplx>,
    pub closed_loop_poles: Vec<Cplx>,
}

impl Stability {
    pub fn of(v: &StabilityVerdict64, poles: &[Complex64]) -> Self {
        Stability {
            stable: v.stable,
            margin: Num(v.margin),
            method_agreement: v.method_agreement,
            marginal: v.marginal,
            offenders: cplx(&v.offenders),
            closed_loop_poles: cplx(poles),
        }
    }
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct Terms {
    pub nmp_zero_sum: Num,
    pub correction: Num,
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct Analytic {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case_tag: Option<&'static str>,
    pub terms: Terms,
    /// Convention the value is computed in.
    pub log_base: &'static str,
    /// Base of the numbers in this report.
    pub reported_log_base: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refusal: Option<&'static str>,
}

impl Analytic {
    pub fn of(r: &CsbiResult64, report_base: LogBase) -> Self {
        let f: f64 = r.log_base.factor_to(report_base);
        Analytic {
            status: r.status.name(),
            value: r.value.map(|v| Num(v * f)),
            case_tag: r.case_tag.map(|t| t.name()),
            terms: Terms {
                nmp_zero_sum: Num(r.terms.nmp_zero_sum * f),
                correction: Num(r.terms.correction * f),
            },
            log_base: r.log_base.name(),
            reported_log_base: report_base.name(),
            refusal: r.refusal.map(|x| x.name()),
        }
    }
}

pub fn sign_name(s: DivergenceSign) -> &'static str {
    match s {
        DivergenceSign::Plus => "Plus",
        DivergenceSign::Minus => "Minus",
    }
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct Numeric {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Num>,
    pub abs_error_estimate: Num,
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_sign: Option<&'static str>,
    pub notes: Vec<String>,
}

impl Numeric {
    pub fn of(q: &QuadratureReport64, factor: f64) -> Self {
        Numeric {
            status: match q.status {
                QuadStatus::Converged => "Converged",
                QuadStatus::DivergenceSuspected => "DivergenceSuspected",
            },
            value: q.value.map(|v| Num(v * factor)),
            abs_error_estimate: Num(q.abs_error_estimate * factor.abs()),
            evaluations: q.evaluations,
            divergence_sign: q.divergence_sign.map(sign_name),
            notes: q.notes.clone(),
        }
    }

    /// Report for a run that stopped at the evaluation budget.
    pub fn exhausted(best: f64, err: f64, evaluations: usize, factor: f64) -> Self {
        Numeric {
            status: "BudgetExhausted",
            value: None,
            abs_error_estimate: Num(err * factor.abs()),
            evaluations,
            divergence_sign: None,
            notes: vec![format!("best estimate {}", best * factor)],
        }
    }
}

#[derive(Debug, Clone, Default, DeriveSerialize)]
pub struct AgreementFlags {
    pub analytic_numeric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub middleton: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sung: Option<bool>,
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct Crosschecks {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub middleton: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sung: Option<Num>,
    pub agreement_flags: AgreementFlags,
}

/// Tolerances for the closed-form cross-checks.
pub const MIDDLETON_TOL: f64 = 1e-9;
pub const SUNG_TOL: f64 = 1e-12;

impl Crosschecks {
    /// Runs the applicable cross-checks; flags compare against the analytic value in its own base.
    pub fn compute(l: &LoopTf64, analytic: &CsbiResult64, report_base: LogBase) -> Self {
        let f: f64 = analytic.log_base.factor_to(report_base);
        let mut out = Crosschecks { middleton: None, sung: None, agreement_flags: AgreementFlags::default() };
        match l.domain() {
            Domain::Continuous => {
                if let Ok(m) = l.close_loop().map_err(|_| ()).and_then(|cl| middleton_crosscheck(&cl).map_err(|_| ())) {
                    out.middleton = Some(Num(m * f));
                    // Only a unit DC gain makes the two forms coincide.
                    if l.integrator_count() >= 1 {
                        out.agreement_flags.middleton =
                            analytic.value.map(|v| (v - m).abs() <= MIDDLETON_TOL * (1.0 + v.abs()));
                    }
                }
            }
            Domain::Discrete => {
                if let Ok(s) = sung_crosscheck(l) {
                    out.sung = Some(Num(s * f));
                    out.agreement_flags.sung = analytic.value.map(|v| (v - s).abs() <= SUNG_TOL);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct AnalysisReport {
    pub input_echo: String,
    pub domain: &'static str,
    pub structure: Structure,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<Stability>,
    pub analytic: Analytic,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<Numeric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crosschecks: Option<Crosschecks>,
    pub warnings: Vec<String>,
    pub elapsed_ms: f64,
}

impl AnalysisReport {
    pub fn skeleton(l: &LoopTf64, cancel_tol: f64, analytic: Analytic) -> Self {
        AnalysisReport {
            input_echo: format_tf(l),
            domain: l.domain().name(),
            structure: Structure::of(l, cancel_tol),
            stability: None,
            analytic,
            numeric: None,
            crosschecks: None,
            warnings: Vec::new(),
            elapsed_ms: 0.0,
        }
    }
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct ParseReport {
    pub input_echo: String,
    pub domain: &'static str,
    pub structure: Structure,
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct IdentityFailure {
    pub lemma: &'static str,
    pub a: Cplx,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Cplx>,
    pub analytic: Num,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<Num>,
    pub deviation: Num,
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct LemmaSummary {
    pub cases: usize,
    pub passes: usize,
    pub max_deviation: Num,
}

#[derive(Debug, Clone, DeriveSerialize)]
pub struct IdentitySummary {
    pub count: usize,
    pub seed: u64,
    pub lemma2: LemmaSummary,
    pub lemma4: LemmaSummary,
    pub max_deviation: Num,
    pub failures: Vec<IdentityFailure>,
    pub elapsed_ms: f64,
}
