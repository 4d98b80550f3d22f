//! Numerical oracle for the Bode integrals, computed directly from `|T|`.
//!
//! Continuous time: `(1/2π)∫ ln|T(jω)| dω/ω²` is folded onto `ω > 0`. The
//! head `(0, ω_s]` is integrated as is; the tail `[ω_s, ∞)` is mapped with
//! `u = 1/ω` onto `(0, 1/ω_s]` where it becomes `∫ ln|T(j/u)| du`. The
//! `ν·ln u` part of the tail is integrated in closed form so the remaining
//! integrand is bounded.
//!
//! All log-magnitudes are accumulated from factored roots in the form
//! `ln|1 − jωρ|` so that nothing cancels catastrophically as `ω → 0`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;
use thiserror::Error;

use crate::polynomial::{conjugate_groups, RootGroup, CONJUGATE_TOL};
use crate::scalar::Scalar;
use crate::transfer_function::{ClosedLoop, Domain};

/// `|T|` outside `[1e-12, 1e12]` at a node marks a nearby log singularity.
const SINGULAR_LOG_MAG: f64 = 27.631021115928547; // ln(1e12)
/// Intervals narrower than this (relative to the integration range) are not split.
const MIN_WIDTH: f64 = 1e-10;
/// `|T(0)|` must be within this of 1 for the weighted integral to be bounded.
pub const UNIT_DC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub max_evaluations: usize,
    /// Boundary between direct and inverted-frequency integration.
    pub split_frequency: T,
    /// Integrate over half the axis and double, using `|T(−jω)| = |T(jω)|`.
    pub use_symmetry: bool,
}

impl<T: Scalar> Default for QuadOptions<T> {
    fn default() -> Self {
        QuadOptions {
            abs_tol: T::lit(1e-6),
            max_evaluations: 2_000_000,
            split_frequency: T::one(),
            use_symmetry: true,
        }
    }
}

impl<T: Scalar> QuadOptions<T> {
    pub fn new(abs_tol: T, max_evaluations: usize, split_frequency: T) -> Result<Self, QuadError> {
        let opts = QuadOptions { abs_tol, max_evaluations, split_frequency, use_symmetry: true };
        opts.validate()?;
        Ok(opts)
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn full_axis(mut self) -> Self {
        self.use_symmetry = false;
        self
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > T::zero()) {
            return Err(QuadError::InvalidOptions("abs_tol must be positive".into()));
        }
        if self.max_evaluations < 1000 {
            return Err(QuadError::InvalidOptions("max_evaluations must be at least 1000".into()));
        }
        if !(self.split_frequency > T::zero()) || !self.split_frequency.is_finite() {
            return Err(QuadError::InvalidOptions("split_frequency must be positive and finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadStatus {
    Converged,
    DivergenceSuspected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureReport<T> {
    pub status: QuadStatus,
    /// Present only when converged.
    pub value: Option<T>,
    pub abs_error_estimate: T,
    pub evaluations: usize,
    pub divergence_sign: Option<DivergenceSign>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid quadrature options: {0}")]
    InvalidOptions(String),
    #[error("expected a {expected} transfer function")]
    WrongDomain { expected: &'static str },
    #[error("evaluation budget exhausted after {evaluations} evaluations; best estimate {best_estimate} ± {abs_error_estimate:e}")]
    BudgetExhausted {
        best_estimate: f64,
        abs_error_estimate: f64,
        evaluations: usize,
    },
}

// ---------------------------------------------------------------------------
// Adaptive Gauss–Kronrod (7/15) engine.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for nodes `XGK[1]`, `XGK[3]`, `XGK[5]` and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integrand value at a node, with a flag for a nearby log singularity.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sample<T> {
    pub value: T,
    pub near_singular: bool,
}

impl<T> Sample<T> {
    fn regular(value: T) -> Self {
        Sample { value, near_singular: false }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    near_singular: bool,
}

impl<T: Scalar> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Scalar> Eq for Segment<T> {}
impl<T: Scalar> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn log_bound<T: Scalar>(width: T) -> T {
    width * (T::one() + width.ln().abs())
}

fn gauss_kronrod<T: Scalar, F: FnMut(T) -> Sample<T>>(f: &mut F, a: T, b: T) -> Segment<T> {
    let center = (a + b) / T::lit(2.0);
    let half = (b - a) / T::lit(2.0);
    let mut values = [T::zero(); 15];
    let mut singular = false;
    let mut hit = false;
    let mut eval = |x: T| -> T {
        let s = f(x);
        singular |= s.near_singular;
        if s.value.is_finite() {
            s.value
        } else {
            hit = true;
            T::zero()
        }
    };
    values[7] = eval(center);
    for k in 0..7 {
        let dx = half * T::lit(XGK[k]);
        values[k] = eval(center - dx);
        values[14 - k] = eval(center + dx);
    }
    let mut kronrod = values[7] * T::lit(WGK[7]);
    let mut gauss = values[7] * T::lit(WG[3]);
    let mut abs_sum = values[7].abs() * T::lit(WGK[7]);
    for k in 0..7 {
        let pair = values[k] + values[14 - k];
        kronrod += pair * T::lit(WGK[k]);
        abs_sum += (values[k].abs() + values[14 - k].abs()) * T::lit(WGK[k]);
        if k % 2 == 1 {
            gauss += pair * T::lit(WG[k / 2]);
        }
    }
    let mean = kronrod / T::lit(2.0);
    let mut asc = (values[7] - mean).abs() * T::lit(WGK[7]);
    for k in 0..7 {
        asc += ((values[k] - mean).abs() + (values[14 - k] - mean).abs()) * T::lit(WGK[k]);
    }
    let h = half.abs();
    let (result, res_abs, res_asc) = (kronrod * half, abs_sum * h, asc * h);
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    err = err.max(floor);
    // A node landed on the singularity and was zeroed: keep bisecting.
    if hit {
        err = err.max(log_bound((b - a).abs()));
    }
    Segment { a, b, value: result, error: err, near_singular: singular || hit }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Adaptive<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
    pub exhausted: bool,
}

/// Globally adaptive bisection until the summed error estimate is below `tol`.
pub(crate) fn integrate<T: Scalar, F: FnMut(T) -> Sample<T>>(
    mut f: F,
    a: T,
    b: T,
    tol: T,
    budget: usize,
) -> Adaptive<T> {
    let min_width = T::lit(MIN_WIDTH) * (b - a).abs().max(T::lit(MIN_WIDTH));
    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    let first = gauss_kronrod(&mut f, a, b);
    let mut evaluations = 15;
    let mut total_error = first.error;
    heap.push(first);
    let mut exhausted = false;
    while total_error > tol {
        let Some(seg) = heap.pop() else { break };
        if (seg.b - seg.a).abs() <= min_width {
            let mut seg = seg;
            if seg.near_singular {
                // Integrable-log bound on what remains unresolved.
                let bound = log_bound((seg.b - seg.a).abs());
                total_error = total_error - seg.error + seg.error.max(bound);
                seg.error = seg.error.max(bound);
            }
            frozen.push(seg);
            continue;
        }
        if evaluations + 30 > budget {
            heap.push(seg);
            exhausted = true;
            break;
        }
        let mid = (seg.a + seg.b) / T::lit(2.0);
        let left = gauss_kronrod(&mut f, seg.a, mid);
        let right = gauss_kronrod(&mut f, mid, seg.b);
        evaluations += 30;
        total_error = total_error - seg.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            total_error = heap.iter().chain(frozen.iter()).fold(T::zero(), |s, g| s + g.error);
        }
    }
    // Sum in interval order so the result does not depend on heap layout.
    let mut all: Vec<Segment<T>> = heap.into_vec();
    all.extend(frozen);
    all.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let value = all.iter().fold(T::zero(), |s, g| s + g.value);
    let error = all.iter().fold(T::zero(), |s, g| s + g.error);
    Adaptive { value, error, evaluations, converged: error <= tol, exhausted }
}

// ---------------------------------------------------------------------------
// Log-magnitude building blocks.

/// `ln|1 − jωρ|` for a single root, valid for either sign of `ω`.
#[inline]
fn ln_one_minus_j<T: Scalar>(omega: T, rho: Complex<T>) -> T {
    // |1 − jωρ|² = 1 + 2ω Im ρ + ω²|ρ|²
    let t = omega * (T::lit(2.0) * rho.im + omega * rho.norm_sqr());
    t.ln_1p() / T::lit(2.0)
}

/// `ln|1 − jωρ| + ln|1 − jωρ̄|` for a conjugate pair (or `ln|1 − jωρ|` for a real root).
#[inline]
fn ln_group<T: Scalar>(omega: T, group: &RootGroup<T>) -> T {
    match *group {
        RootGroup::Real(r) => (omega * omega * r * r).ln_1p() / T::lit(2.0),
        RootGroup::Pair(rho) => {
            let w2 = omega * omega;
            let n2 = rho.norm_sqr();
            let t = w2 * (T::lit(2.0) * (rho.re * rho.re - rho.im * rho.im) + w2 * n2 * n2);
            if t > -T::lit(0.5) {
                t.ln_1p() / T::lit(2.0)
            } else {
                // Near a resonance: form the product directly.
                let a = T::one() + omega * (T::lit(2.0) * rho.im + omega * n2);
                let b = T::one() - omega * (T::lit(2.0) * rho.im - omega * n2);
                (a * b).ln() / T::lit(2.0)
            }
        }
    }
}

fn invert<T: Scalar>(g: &RootGroup<T>) -> RootGroup<T> {
    match *g {
        RootGroup::Real(r) => RootGroup::Real(T::one() / r),
        RootGroup::Pair(c) => RootGroup::Pair(Complex::new(T::one(), T::zero()) / c),
    }
}

fn invert_roots<T: Scalar>(roots: &[Complex<T>]) -> Vec<Complex<T>> {
    roots.iter().map(|r| Complex::new(T::one(), T::zero()) / r).collect()
}

fn groups_or_none<T: Scalar>(roots: &[Complex<T>]) -> Option<Vec<RootGroup<T>>> {
    conjugate_groups(roots, T::lit(CONJUGATE_TOL) * T::lit(100.0)).ok()
}

/// Zero/pole factors of `T`, arranged for the head and tail integrands.
struct Factored<T> {
    zeros: Vec<Complex<T>>,
    poles: Vec<Complex<T>>,
    zero_groups: Option<Vec<RootGroup<T>>>,
    pole_groups: Option<Vec<RootGroup<T>>>,
}

impl<T: Scalar> Factored<T> {
    fn new(t: &ClosedLoop<T>) -> Self {
        Factored {
            zero_groups: groups_or_none(&t.zeros),
            pole_groups: groups_or_none(&t.poles),
            zeros: t.zeros.clone(),
            poles: t.poles.clone(),
        }
    }

    /// `Σ_z ln|1 − jωρ_z| − Σ_r ln|1 − jωρ_r|` over the given root sets, paired when possible.
    fn sum(zeros: &[Complex<T>], poles: &[Complex<T>], zg: Option<&[RootGroup<T>]>, pg: Option<&[RootGroup<T>]>, omega: T, paired: bool) -> T {
        let part = |roots: &[Complex<T>], groups: Option<&[RootGroup<T>]>| -> T {
            match groups {
                Some(g) if paired => g.iter().fold(T::zero(), |s, g| s + ln_group(omega, g)),
                _ => roots.iter().fold(T::zero(), |s, r| s + ln_one_minus_j(omega, *r)),
            }
        };
        part(zeros, zg) - part(poles, pg)
    }
}

fn sign_of<T: Scalar>(x: T) -> DivergenceSign {
    if x > T::zero() {
        DivergenceSign::Plus
    } else {
        DivergenceSign::Minus
    }
}

fn divergent<T: Scalar>(sign: DivergenceSign, evaluations: usize, notes: Vec<String>) -> QuadratureReport<T> {
    QuadratureReport {
        status: QuadStatus::DivergenceSuspected,
        value: None,
        abs_error_estimate: T::infinity(),
        evaluations,
        divergence_sign: Some(sign),
        notes,
    }
}

struct Accumulator<T> {
    value: T,
    error: T,
    evaluations: usize,
    budget: usize,
    exhausted: bool,
}

impl<T: Scalar> Accumulator<T> {
    fn new(budget: usize) -> Self {
        Accumulator { value: T::zero(), error: T::zero(), evaluations: 0, budget, exhausted: false }
    }

    fn add<F: FnMut(T) -> Sample<T>>(&mut self, f: F, a: T, b: T, tol: T) {
        let remaining = self.budget.saturating_sub(self.evaluations).max(15);
        let r = integrate(f, a, b, tol, remaining);
        self.value += r.value;
        self.error += r.error;
        self.evaluations += r.evaluations;
        self.exhausted |= r.exhausted || !r.converged;
    }

    fn finish(self, scale: T, opts: &QuadOptions<T>, notes: Vec<String>) -> Result<QuadratureReport<T>, QuadError> {
        let value = self.value * scale;
        let error = self.error * scale.abs();
        if self.exhausted || error > opts.abs_tol {
            return Err(QuadError::BudgetExhausted {
                best_estimate: value.to_f64_lossy(),
                abs_error_estimate: error.to_f64_lossy(),
                evaluations: self.evaluations,
            });
        }
        Ok(QuadratureReport {
            status: QuadStatus::Converged,
            value: Some(value),
            abs_error_estimate: error,
            evaluations: self.evaluations,
            divergence_sign: None,
            notes,
        })
    }
}

// ---------------------------------------------------------------------------
// Continuous-time weighted integral.

/// `(1/2π) ∫ ln|T(jω)| dω/ω²` over the whole axis, or a divergence diagnosis.
pub fn csbi_continuous_numeric<T: Scalar>(
    t: &ClosedLoop<T>,
    opts: &QuadOptions<T>,
) -> Result<QuadratureReport<T>, QuadError> {
    opts.validate()?;
    if t.domain != Domain::Continuous {
        return Err(QuadError::WrongDomain { expected: "continuous" });
    }
    let mut notes = Vec::new();
    if t.num_poly.is_zero() {
        notes.push("T vanishes identically; ln|T| = -inf everywhere".to_string());
        return Ok(divergent(DivergenceSign::Minus, 0, notes));
    }
    let den0 = t.den_poly.coeff(0);
    if den0 == T::zero() {
        notes.push("closed loop has a pole at the origin; |T(0)| is infinite".to_string());
        return Ok(divergent(DivergenceSign::Plus, 0, notes));
    }
    let t0 = t.value_at_zero();
    let c0 = t0.abs().ln();
    if (t0.abs() - T::one()).abs() > T::lit(UNIT_DC_TOL) {
        notes.push(format!(
            "|T(0)| = {} differs from 1; the 1/w^2 weight makes the integral diverge with the sign of ln|T(0)| = {}",
            t0.abs(),
            c0
        ));
        let (probe_evals, probe_note) = divergence_probe(t, opts, c0);
        notes.push(probe_note);
        return Ok(divergent(sign_of(c0), probe_evals, notes));
    }
    if c0 != T::zero() {
        notes.push(format!("|T(0)| - 1 = {} is within tolerance; treated as exactly 1", t0.abs() - T::one()));
    }

    let f = Factored::new(t);
    let inv_zeros = invert_roots(&f.zeros);
    let inv_poles = invert_roots(&f.poles);
    let inv_zg: Option<Vec<_>> = f.zero_groups.as_ref().map(|g| g.iter().map(invert).collect());
    let inv_pg: Option<Vec<_>> = f.pole_groups.as_ref().map(|g| g.iter().map(invert).collect());
    let ln_gain = t.gain.abs().ln();
    let nu = T::from_isize(t.relative_degree()).unwrap();
    let split = opts.split_frequency;
    let cut = T::one() / split;
    let singular = T::lit(SINGULAR_LOG_MAG);

    // Head: g(ω) = ln|T(jω)| / ω², with ln|T(0)| = 0.
    let head = |sign: T, paired: bool| {
        let (iz, ip) = (&inv_zeros, &inv_poles);
        let (zg, pg) = (inv_zg.as_deref(), inv_pg.as_deref());
        move |w: T| {
            let omega = sign * w;
            let lm = Factored::sum(iz, ip, zg, pg, omega, paired);
            Sample { value: lm / (w * w), near_singular: lm.abs() > singular }
        }
    };
    // Tail in u = 1/|ω|: ln|T(±j/u)| − ν ln u = ln|K_T| + Σ ln|1 ± juz| − Σ ln|1 ± jur|.
    let tail = |sign: T, paired: bool| {
        let (zs, ps) = (&f.zeros, &f.poles);
        let (zg, pg) = (f.zero_groups.as_deref(), f.pole_groups.as_deref());
        move |u: T| {
            let lm = ln_gain + Factored::sum(zs, ps, zg, pg, -sign * u, paired);
            Sample { value: lm, near_singular: (lm - ln_gain).abs() > singular }
        }
    };
    let tail_log_part = nu * (cut * cut.ln() - cut);

    let pi = T::PI();
    let mut acc = Accumulator::new(opts.max_evaluations);
    let scale;
    if opts.use_symmetry {
        let tol = opts.abs_tol * pi / T::lit(2.0);
        acc.add(head(T::one(), true), T::zero(), split, tol);
        acc.add(tail(T::one(), true), T::zero(), cut, tol);
        acc.value += tail_log_part;
        scale = T::one() / pi;
    } else {
        let tol = opts.abs_tol * pi / T::lit(2.0);
        for sign in [T::one(), -T::one()] {
            acc.add(head(sign, false), T::zero(), split, tol);
            acc.add(tail(sign, false), T::zero(), cut, tol);
            acc.value += tail_log_part;
        }
        scale = T::one() / (T::lit(2.0) * pi);
    }
    acc.finish(scale, opts, notes)
}

/// Integrates the head with lower cutoffs ε, ε/2, ε/4 and checks for `1/ε` growth.
fn divergence_probe<T: Scalar>(t: &ClosedLoop<T>, opts: &QuadOptions<T>, c0: T) -> (usize, String) {
    let smallest = t
        .zeros
        .iter()
        .chain(t.poles.iter())
        .map(|r| r.norm())
        .fold(opts.split_frequency, T::min);
    let eps0 = T::lit(1e-3) * smallest;
    let inv_zeros = invert_roots(&t.zeros);
    let inv_poles = invert_roots(&t.poles);
    let g = |w: T| {
        let lm = c0 + Factored::sum(&inv_zeros, &inv_poles, None, None, w, false);
        Sample::regular(lm / (w * w))
    };
    let budget = (opts.max_evaluations / 4).max(3000);
    let mut evals = 0;
    let mut vals = Vec::new();
    for k in 0..3 {
        let eps = eps0 / T::lit(f64::from(1u32 << k));
        let tol = (c0.abs() / eps).max(T::one()) * T::lit(1e-8);
        let r = integrate(g, eps, opts.split_frequency, tol, budget);
        evals += r.evaluations;
        vals.push(r.value);
    }
    let (d1, d2) = (vals[1] - vals[0], vals[2] - vals[1]);
    let ratio = d2 / d1;
    let growing = (ratio - T::lit(2.0)).abs() < T::lit(0.2) && sign_of(d1) == sign_of(c0);
    let note = format!(
        "divergence probe: cutoff {eps0} halved twice, head increments {d1} and {d2} (ratio {ratio}); {}",
        if growing { "1/cutoff growth confirmed" } else { "growth pattern inconclusive" }
    );
    (evals, note)
}

// ---------------------------------------------------------------------------
// Discrete-time integral.

/// `(1/2π) ∫_{−π}^{π} log₂|T(e^{jω})| dω`.
pub fn csbi_discrete_numeric<T: Scalar>(
    t: &ClosedLoop<T>,
    opts: &QuadOptions<T>,
) -> Result<QuadratureReport<T>, QuadError> {
    opts.validate()?;
    if t.domain != Domain::Discrete {
        return Err(QuadError::WrongDomain { expected: "discrete" });
    }
    let notes = Vec::new();
    if t.num_poly.is_zero() {
        return Ok(divergent(DivergenceSign::Minus, 0, vec!["T vanishes identically".to_string()]));
    }
    let ln_gain = t.gain.abs().ln();
    let singular = T::lit(SINGULAR_LOG_MAG);
    let integrand = |w: T| {
        let x = Complex::new(w.cos(), w.sin());
        let lm = t.zeros.iter().fold(ln_gain, |s, z| s + (x - z).norm().ln())
            - t.poles.iter().fold(T::zero(), |s, r| s + (x - r).norm().ln());
        Sample { value: lm / T::LN_2(), near_singular: lm.abs() > singular }
    };
    let pi = T::PI();
    let mut acc = Accumulator::new(opts.max_evaluations);
    let scale = if opts.use_symmetry {
        acc.add(integrand, T::zero(), pi, opts.abs_tol * pi);
        T::one() / pi
    } else {
        let tol = opts.abs_tol * pi;
        acc.add(integrand, -pi, T::zero(), tol);
        acc.add(integrand, T::zero(), pi, tol);
        T::one() / (T::lit(2.0) * pi)
    };
    acc.finish(scale, opts, notes)
}

// ---------------------------------------------------------------------------
// Primitive identities.

/// `∫_{−∞}^{∞} ln|(jω − a)/(jω − b)|² dω`, with `±ω` combined so the integrand decays like `1/ω²`.
pub fn lemma2_numeric<T: Scalar>(
    a: Complex<T>,
    b: Complex<T>,
    opts: &QuadOptions<T>,
) -> Result<QuadratureReport<T>, QuadError> {
    opts.validate()?;
    if a == b {
        return Ok(QuadratureReport {
            status: QuadStatus::Converged,
            value: Some(T::zero()),
            abs_error_estimate: T::zero(),
            evaluations: 0,
            divergence_sign: None,
            notes: vec!["identical factors cancel".to_string()],
        });
    }
    let two = T::lit(2.0);
    let singular = T::lit(SINGULAR_LOG_MAG);
    // ln(|jω − c|² |−jω − c|²) = ln((ω − Im c)² + Re c²) + ln((ω + Im c)² + Re c²)
    let head_term = |w: T, c: Complex<T>| {
        let l = ((w - c.im) * (w - c.im) + c.re * c.re).ln();
        let r = ((w + c.im) * (w + c.im) + c.re * c.re).ln();
        l + r
    };
    let head = |w: T| {
        let v = head_term(w, a) - head_term(w, b);
        Sample { value: v, near_singular: v.abs() > singular }
    };
    // Tail, ω = 1/u: u⁴·|jω − c|²|jω + c̄|² = 1 + 2u²(Re²c − Im²c) + u⁴|c|⁴; divide by u² for dω.
    let tail_term = |u: T, c: Complex<T>| -> T {
        let n2 = c.norm_sqr();
        if u * c.norm() < T::lit(0.5) {
            let u2 = u * u;
            (u2 * (two * (c.re * c.re - c.im * c.im) + u2 * n2 * n2)).ln_1p()
        } else {
            let p = (T::one() - u * c.im) * (T::one() - u * c.im) + u * u * c.re * c.re;
            let q = (T::one() + u * c.im) * (T::one() + u * c.im) + u * u * c.re * c.re;
            (p * q).ln()
        }
    };
    let tail = |u: T| {
        let v = tail_term(u, a) - tail_term(u, b);
        Sample { value: v / (u * u), near_singular: v.abs() > singular }
    };
    let split = opts.split_frequency;
    let tol = opts.abs_tol / two;
    let mut acc = Accumulator::new(opts.max_evaluations);
    acc.add(head, T::zero(), split, tol);
    acc.add(tail, T::zero(), T::one() / split, tol);
    acc.finish(T::one(), opts, Vec::new())
}

/// `∫_{−π}^{π} log₂|e^{jω} − a|² dω`.
pub fn lemma4_numeric<T: Scalar>(a: Complex<T>, opts: &QuadOptions<T>) -> Result<QuadratureReport<T>, QuadError> {
    opts.validate()?;
    let singular = T::lit(SINGULAR_LOG_MAG);
    let f = |w: T| {
        let d = Complex::new(w.cos(), w.sin()) - a;
        let lm = d.norm_sqr().ln();
        Sample { value: lm / T::LN_2(), near_singular: lm.abs() > singular }
    };
    let pi = T::PI();
    let tol = opts.abs_tol / T::lit(2.0);
    let mut acc = Accumulator::new(opts.max_evaluations);
    acc.add(f, -pi, T::zero(), tol);
    acc.add(f, T::zero(), pi, tol);
    acc.finish(T::one(), opts, Vec::new())
}
