//! Closed-form CSBI values from the structure of the open loop.
//!
//! Continuous results are in natural log, discrete results in base 2. The
//! continuous value depends on how many pure integrators `L` carries:
//!
//! | integrators | value |
//! |---|---|
//! | ≥ 2 | `Σ Re z_u⁻¹` |
//! | 1 | `Σ Re z_u⁻¹ − ∏(−p_i) / (2K ∏(−z_i))` |
//! | 0 | finite only if `∏(−p_i) = −2K∏(−z_i)`, otherwise `±∞` |
//!
//! The discrete value is `Σ log₂|z_u| + log₂|K|` for `ν ≥ 1` and
//! `Σ log₂|z_u| + log₂|K/(1+K)|` for `ν = 0`.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::stability::{stability_by_roots, StabilityVerdict, DEFAULT_STABILITY_TOL};
use crate::transfer_function::{ClosedLoop, Domain, LoopTf, TfError, DEFAULT_BOUNDARY_TOL, DEFAULT_CANCELLATION_TOL};

/// Relative tolerance on `∏(−p) + 2K∏(−z) = 0`.
pub const RARE_CONDITION_TOL: f64 = 1e-9;
/// Relative distance from the rare condition that triggers a warning.
pub const RARE_NEAR_MISS_TOL: f64 = 1e-4;
/// `|T(0)|` within this of 1 counts as unit DC gain.
const UNIT_DC_TOL: f64 = 1e-9;

pub const WARN_CANCELLATION: &str = "CancellationDetected";
pub const WARN_UNSTABLE: &str = "UnstableHypothesisViolated";
pub const WARN_SIGN_CONVENTION: &str = "DivergenceSignConvention";
pub const WARN_RARE_NEAR_MISS: &str = "RareConditionNearMiss";
pub const WARN_DEGENERATE: &str = "DegenerateLeadingTerm";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CsbiStatus {
    Finite,
    PlusInfinity,
    MinusInfinity,
    Undefined,
    Refused,
}

impl CsbiStatus {
    pub fn name(self) -> &'static str {
        match self {
            CsbiStatus::Finite => "Finite",
            CsbiStatus::PlusInfinity => "PlusInfinity",
            CsbiStatus::MinusInfinity => "MinusInfinity",
            CsbiStatus::Undefined => "Undefined",
            CsbiStatus::Refused => "Refused",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    ContMultiIntegrator,
    ContSingleIntegrator,
    ContNoIntegratorRare,
    ContNoIntegratorUnbounded,
    ContBiproperKNeg1,
    DiscStrictlyProper,
    DiscBiproper,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::ContMultiIntegrator => "ContMultiIntegrator",
            CaseTag::ContSingleIntegrator => "ContSingleIntegrator",
            CaseTag::ContNoIntegratorRare => "ContNoIntegratorRare",
            CaseTag::ContNoIntegratorUnbounded => "ContNoIntegratorUnbounded",
            CaseTag::ContBiproperKNeg1 => "ContBiproperKNeg1",
            CaseTag::DiscStrictlyProper => "DiscStrictlyProper",
            CaseTag::DiscBiproper => "DiscBiproper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Refusal {
    UnstableClosedLoop,
    BoundaryZero,
    NonCausal,
}

impl Refusal {
    pub fn name(self) -> &'static str {
        match self {
            Refusal::UnstableClosedLoop => "UnstableClosedLoop",
            Refusal::BoundaryZero => "BoundaryZero",
            Refusal::NonCausal => "NonCausal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogBase {
    Natural,
    Base2,
}

impl LogBase {
    pub fn name(self) -> &'static str {
        match self {
            LogBase::Natural => "natural",
            LogBase::Base2 => "2",
        }
    }

    /// Multiplier taking a value in `self` to a value in `target`.
    pub fn factor_to<T: Scalar>(self, target: LogBase) -> T {
        match (self, target) {
            (LogBase::Natural, LogBase::Base2) => T::one() / T::LN_2(),
            (LogBase::Base2, LogBase::Natural) => T::LN_2(),
            _ => T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CsbiTerms<T> {
    pub nmp_zero_sum: T,
    pub correction: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsbiResult<T> {
    pub status: CsbiStatus,
    /// Present iff `status == Finite`; equals `nmp_zero_sum + correction`.
    pub value: Option<T>,
    /// `None` for refusals and for `K = 0`.
    pub case_tag: Option<CaseTag>,
    pub terms: CsbiTerms<T>,
    pub warnings: Vec<String>,
    pub log_base: LogBase,
    pub refusal: Option<Refusal>,
    pub stability: Option<StabilityVerdict<T>>,
}

impl<T: Scalar> CsbiResult<T> {
    fn empty(log_base: LogBase) -> Self {
        CsbiResult {
            status: CsbiStatus::Undefined,
            value: None,
            case_tag: None,
            terms: CsbiTerms::default(),
            warnings: Vec::new(),
            log_base,
            refusal: None,
            stability: None,
        }
    }

    fn refuse(mut self, why: Refusal) -> Self {
        self.status = CsbiStatus::Refused;
        self.refusal = Some(why);
        self
    }

    fn finite(mut self, tag: CaseTag, nmp_zero_sum: T, correction: T) -> Self {
        self.status = CsbiStatus::Finite;
        self.case_tag = Some(tag);
        self.terms = CsbiTerms { nmp_zero_sum, correction };
        self.value = Some(nmp_zero_sum + correction);
        self
    }

    /// The value expressed in `base` (`None` unless finite).
    pub fn value_in(&self, base: LogBase) -> Option<T> {
        self.value.map(|v| v * self.log_base.factor_to::<T>(base))
    }

    pub fn is_finite(&self) -> bool {
        self.status == CsbiStatus::Finite
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsbiError {
    #[error("expected a {expected} transfer function")]
    WrongDomain { expected: &'static str },
    #[error("T(0) = 0; the logarithmic derivative at the origin does not exist")]
    ZeroAtOrigin,
    #[error("relative degree is zero; the formula needs at least one excess pole")]
    RelativeDegreeZero,
    #[error(transparent)]
    Tf(#[from] TfError),
}

/// Value of `∫ ln|(jω − a)/(jω − b)|² dω` over the real line.
pub fn lemma2_identity<T: Scalar>(a: Complex<T>, b: Complex<T>) -> T {
    T::TAU() * (a.re.abs() - b.re.abs())
}

/// Value of `∫_{−π}^{π} log₂|e^{jω} − a|² dω`.
pub fn lemma4_identity<T: Scalar>(a: Complex<T>) -> T {
    let m = a.norm();
    if m <= T::one() {
        T::zero()
    } else {
        T::TAU() * (m * m).log2()
    }
}

fn neg_product<T: Scalar>(roots: &[Complex<T>]) -> Complex<T> {
    roots.iter().fold(Complex::new(T::one(), T::zero()), |acc, r| acc * -r)
}

fn cancellation_warning<T: Scalar>(l: &LoopTf<T>) -> Option<String> {
    let pairs = l.detect_cancellations(T::lit(DEFAULT_CANCELLATION_TOL));
    if pairs.is_empty() {
        return None;
    }
    let list: Vec<String> = pairs
        .iter()
        .map(|(z, p)| format!("zero {} ~ pole {}", fmt_c(*z), fmt_c(*p)))
        .collect();
    Some(format!("{WARN_CANCELLATION}: {}", list.join(", ")))
}

fn fmt_c<T: Scalar>(c: Complex<T>) -> String {
    if c.im == T::zero() {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

fn signed_infinity<T: Scalar>(mut r: CsbiResult<T>, tag: CaseTag, log_t0: T, nmp: T) -> CsbiResult<T> {
    r.status = if log_t0 > T::zero() { CsbiStatus::PlusInfinity } else { CsbiStatus::MinusInfinity };
    r.case_tag = Some(tag);
    // The correction carries the constant ln|T(0)| that multiplies the divergent ∫dω/ω².
    r.terms = CsbiTerms { nmp_zero_sum: nmp, correction: log_t0 };
    r.warnings.push(format!(
        "{WARN_SIGN_CONVENTION}: sign taken from ln(|K∏(−z)| / |∏(−p)+K∏(−z)|) = ln|T(0)| = {log_t0}; \
         the verbal rule with the reversed inequality would give the opposite sign"
    ));
    r
}

/// Closed-form continuous CSBI of `T = L/(1+L)`.
///
/// Zeros within `boundary_tol` of the imaginary axis refuse the computation,
/// as does an unstable closed loop.
pub fn csbi_continuous<T: Scalar>(l: &LoopTf<T>, boundary_tol: T) -> Result<CsbiResult<T>, CsbiError> {
    if l.domain() != Domain::Continuous {
        return Err(CsbiError::WrongDomain { expected: "continuous" });
    }
    let mut r = CsbiResult::empty(LogBase::Natural);
    let k = l.gain();
    if k == T::zero() {
        r.warnings.push("K = 0: T vanishes identically".to_string());
        return Ok(r);
    }
    let classes = l.classify_zeros(boundary_tol);
    if !classes.boundary.is_empty() {
        return Ok(r.refuse(Refusal::BoundaryZero));
    }
    r.warnings.extend(cancellation_warning(l));
    let cl = match l.close_loop() {
        Ok(cl) => cl,
        Err(TfError::DegenerateClosedLoop) => {
            r.warnings.push("1 + L vanishes identically".to_string());
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    let verdict = stability_by_roots(&cl, T::lit(DEFAULT_STABILITY_TOL));
    let stable = verdict.stable;
    r.stability = Some(verdict);
    if !stable {
        return Ok(r.refuse(Refusal::UnstableClosedLoop));
    }

    let nmp = classes.nmp.iter().fold(T::zero(), |s, z| s + z.inv().re);
    let p_prod = neg_product(l.finite_poles());
    let z_prod = neg_product(l.zeros());

    match l.integrator_count() {
        0 => {}
        1 => {
            let correction = -(p_prod / z_prod).re / (T::lit(2.0) * k);
            return Ok(r.finite(CaseTag::ContSingleIntegrator, nmp, correction));
        }
        _ => return Ok(r.finite(CaseTag::ContMultiIntegrator, nmp, T::zero())),
    }

    if cl.degenerate_leading {
        r.warnings.push(format!(
            "{WARN_DEGENERATE}: K = -1 with relative degree 0 lowers the closed-loop degree to {}",
            cl.den_poly.degree()
        ));
        let t0 = cl.value_at_zero();
        if (t0.abs() - T::one()).abs() <= T::lit(UNIT_DC_TOL) {
            r.case_tag = Some(CaseTag::ContBiproperKNeg1);
            r.terms.nmp_zero_sum = nmp;
            return Ok(r);
        }
        return Ok(signed_infinity(r, CaseTag::ContBiproperKNeg1, t0.abs().ln(), nmp));
    }

    // No integrators: T(0) = Z/(P + Z) with P = ∏(−p), Z = K∏(−z).
    let p0 = p_prod.re;
    let z0 = k * z_prod.re;
    let scale = p0.abs().max((T::lit(2.0) * z0).abs());
    let miss = (p0 + T::lit(2.0) * z0).abs() / scale;
    if miss <= T::lit(RARE_CONDITION_TOL) {
        let pole_sum = l.finite_poles().iter().fold(T::zero(), |s, p| s + p.inv().re);
        let mp_sum = classes.mp.iter().fold(T::zero(), |s, z| s + z.inv().re);
        return Ok(r.finite(CaseTag::ContNoIntegratorRare, nmp, pole_sum - mp_sum - nmp));
    }
    if miss <= T::lit(RARE_NEAR_MISS_TOL) {
        r.warnings.push(format!(
            "{WARN_RARE_NEAR_MISS}: |∏(−p) + 2K∏(−z)| / scale = {miss}; |T(0)| is close to 1 and numerical integration converges slowly"
        ));
    }
    let log_t0 = (z0.abs() / (p0 + z0).abs()).ln();
    Ok(signed_infinity(r, CaseTag::ContNoIntegratorUnbounded, log_t0, nmp))
}

/// Closed-form discrete CSBI (base 2) of `T = L/(1+L)`.
///
/// An unstable closed loop does not block the formula; the result carries
/// an `UnstableHypothesisViolated` warning instead.
pub fn csbi_discrete<T: Scalar>(l: &LoopTf<T>, boundary_tol: T) -> Result<CsbiResult<T>, CsbiError> {
    if l.domain() != Domain::Discrete {
        return Err(CsbiError::WrongDomain { expected: "discrete" });
    }
    let mut r = CsbiResult::empty(LogBase::Base2);
    let k = l.gain();
    if k == T::zero() {
        r.warnings.push("K = 0: T vanishes identically".to_string());
        return Ok(r);
    }
    let classes = l.classify_zeros(boundary_tol);
    if !classes.boundary.is_empty() {
        return Ok(r.refuse(Refusal::BoundaryZero));
    }
    r.warnings.extend(cancellation_warning(l));
    let cl = match l.close_loop() {
        Ok(cl) => cl,
        Err(TfError::NonCausalClosedLoop) => return Ok(r.refuse(Refusal::NonCausal)),
        Err(TfError::DegenerateClosedLoop) => {
            r.warnings.push("1 + L vanishes identically".to_string());
            return Ok(r);
        }
        Err(e) => return Err(e.into()),
    };
    let verdict = stability_by_roots(&cl, T::lit(DEFAULT_STABILITY_TOL));
    if !verdict.stable {
        let poles: Vec<String> = verdict.offenders.iter().map(|p| fmt_c(*p)).collect();
        r.warnings.push(format!(
            "{WARN_UNSTABLE}: closed-loop poles on or outside the unit circle: {}; the closed-form value assumes stability",
            poles.join(", ")
        ));
    }
    r.stability = Some(verdict);

    let nmp = classes.nmp.iter().fold(T::zero(), |s, z| s + z.norm().log2());
    if l.relative_degree() >= 1 {
        Ok(r.finite(CaseTag::DiscStrictlyProper, nmp, k.abs().log2()))
    } else {
        Ok(r.finite(CaseTag::DiscBiproper, nmp, (k / (T::one() + k)).abs().log2()))
    }
}

/// `Σ Re z_u⁻¹ + T'(0) / (2 T(0))`, with `T'(0)` from the polynomial coefficients.
///
/// Equals the continuous CSBI whenever `T(0) = 1`.
pub fn middleton_crosscheck<T: Scalar>(t: &ClosedLoop<T>) -> Result<T, CsbiError> {
    if t.domain != Domain::Continuous {
        return Err(CsbiError::WrongDomain { expected: "continuous" });
    }
    let (n0, n1) = (t.num_poly.coeff(0), t.num_poly.coeff(1));
    let (d0, d1) = (t.den_poly.coeff(0), t.den_poly.coeff(1));
    if n0 == T::zero() {
        return Err(CsbiError::ZeroAtOrigin);
    }
    let tol = T::lit(DEFAULT_BOUNDARY_TOL);
    let zsum = t
        .zeros
        .iter()
        .filter(|z| z.re > tol)
        .fold(Complex::new(T::zero(), T::zero()), |s, z| s + z.inv());
    debug_assert!(zsum.im.abs() <= T::lit(1e-9) * (T::one() + zsum.norm()));
    // T'(0)/T(0) = n1/n0 − d1/d0
    let log_derivative = n1 / n0 - d1 / d0;
    Ok(zsum.re + log_derivative / T::lit(2.0))
}

/// `log₂(|K| ∏|z_u|)` for a discrete loop with at least one excess pole.
pub fn sung_crosscheck<T: Scalar>(l: &LoopTf<T>) -> Result<T, CsbiError> {
    if l.domain() != Domain::Discrete {
        return Err(CsbiError::WrongDomain { expected: "discrete" });
    }
    if l.relative_degree() == 0 {
        return Err(CsbiError::RelativeDegreeZero);
    }
    let classes = l.classify_zeros(T::lit(DEFAULT_BOUNDARY_TOL));
    let product = classes.nmp.iter().fold(l.gain().abs(), |p, z| p * z.norm());
    Ok(product.log2())
}
