//! Factored open-loop transfer functions and their complementary sensitivity.
//!
//! An open loop is stored in zero/pole/gain form with both factored
//! polynomials monic:
//!
//! ```text
//! L(s) = K · ∏(s − z_i) / (s^κ · ∏(s − p_i))     (continuous, κ integrators)
//! L(z) = K · ∏(z − z_i) / ∏(z − p_i)             (discrete)
//! ```
//!
//! Closing the loop gives `T = L/(1+L) = K∏(x − z_i) / (D(x) + K∏(x − z_i))`
//! where `D` is the open-loop denominator.

use std::fmt;

use num_complex::Complex;
use thiserror::Error;

use crate::polynomial::{conjugate_groups, Poly, PolyError, RootSet, CONJUGATE_TOL};
use crate::scalar::Scalar;

/// Roots with modulus below this are treated as sitting at the origin.
pub const ORIGIN_TOL: f64 = 1e-9;
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-9;
pub const DEFAULT_CANCELLATION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Continuous,
    Discrete,
}

impl Domain {
    pub fn variable(self) -> char {
        match self {
            Domain::Continuous => 's',
            Domain::Discrete => 'z',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Continuous => "continuous",
            Domain::Discrete => "discrete",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TfError {
    #[error("zero at the origin ({re}{im:+}i) is not allowed")]
    OriginZero { re: f64, im: f64 },
    #[error("continuous-time finite pole at the origin must be counted as an integrator")]
    OriginPole,
    #[error("discrete-time transfer function cannot carry integrators")]
    DiscreteIntegrator,
    #[error("improper transfer function: {zeros} zeros but only {poles} poles")]
    ImproperTf { zeros: usize, poles: usize },
    #[error("non-finite gain, zero or pole")]
    NonFinite,
    #[error("biproper discrete loop with K = -1 has a non-causal closed loop")]
    NonCausalClosedLoop,
    #[error("1 + L(x) vanishes identically; the closed loop does not exist")]
    DegenerateClosedLoop,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Open-loop transfer function in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopTf<T> {
    domain: Domain,
    gain: T,
    zeros: Vec<Complex<T>>,
    finite_poles: Vec<Complex<T>>,
    integrator_count: usize,
}

impl<T: Scalar> LoopTf<T> {
    pub fn new(
        domain: Domain,
        gain: T,
        zeros: Vec<Complex<T>>,
        finite_poles: Vec<Complex<T>>,
        integrator_count: usize,
    ) -> Result<Self, TfError> {
        let finite = |r: &Complex<T>| r.re.is_finite() && r.im.is_finite();
        if !gain.is_finite() || !zeros.iter().all(finite) || !finite_poles.iter().all(finite) {
            return Err(TfError::NonFinite);
        }
        let origin = T::lit(ORIGIN_TOL);
        if let Some(z) = zeros.iter().find(|z| z.norm() < origin) {
            return Err(TfError::OriginZero {
                re: z.re.to_f64_lossy(),
                im: z.im.to_f64_lossy(),
            });
        }
        match domain {
            Domain::Continuous => {
                if finite_poles.iter().any(|p| p.norm() < origin) {
                    return Err(TfError::OriginPole);
                }
            }
            Domain::Discrete => {
                if integrator_count != 0 {
                    return Err(TfError::DiscreteIntegrator);
                }
            }
        }
        let n = finite_poles.len() + integrator_count;
        if zeros.len() > n {
            return Err(TfError::ImproperTf { zeros: zeros.len(), poles: n });
        }
        let tol = T::lit(CONJUGATE_TOL);
        conjugate_groups(&zeros, tol)?;
        conjugate_groups(&finite_poles, tol)?;
        Ok(LoopTf { domain, gain, zeros, finite_poles, integrator_count })
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Leading coefficient `K` (both factored polynomials monic).
    pub fn gain(&self) -> T {
        self.gain
    }

    pub fn zeros(&self) -> &[Complex<T>] {
        &self.zeros
    }

    pub fn finite_poles(&self) -> &[Complex<T>] {
        &self.finite_poles
    }

    pub fn integrator_count(&self) -> usize {
        self.integrator_count
    }

    /// Denominator degree `n`.
    pub fn pole_count(&self) -> usize {
        self.finite_poles.len() + self.integrator_count
    }

    /// Numerator degree `m`.
    pub fn zero_count(&self) -> usize {
        self.zeros.len()
    }

    /// `ν = n − m`.
    pub fn relative_degree(&self) -> usize {
        self.pole_count() - self.zero_count()
    }

    /// `K · ∏(x − z_i)`
    pub fn numerator(&self) -> Result<Poly<T>, TfError> {
        Ok(Poly::from_roots(&self.zeros, self.gain)?)
    }

    /// `x^κ · ∏(x − p_i)`
    pub fn denominator(&self) -> Result<Poly<T>, TfError> {
        let poles = Poly::from_roots(&self.finite_poles, T::one())?;
        Ok(&Poly::monomial(self.integrator_count) * &poles)
    }

    pub fn eval(&self, x: Complex<T>) -> Complex<T> {
        let num = self.zeros.iter().fold(Complex::new(self.gain, T::zero()), |acc, z| acc * (x - z));
        let den = self
            .finite_poles
            .iter()
            .fold(x.powu(self.integrator_count as u32), |acc, p| acc * (x - p));
        num / den
    }

    /// Forms `T = L/(1+L)` and factors its denominator.
    ///
    /// A continuous biproper loop with `K = −1` loses its leading term; the
    /// result is returned with [`ClosedLoop::degenerate_leading`] set. The
    /// discrete analogue is non-causal and rejected.
    pub fn close_loop(&self) -> Result<ClosedLoop<T>, TfError> {
        let n = self.pole_count();
        let biproper = self.relative_degree() == 0;
        let num = self.numerator()?;
        let den = &self.denominator()? + &num;
        let degenerate = biproper && !num.is_zero() && den.degree() < n;
        if degenerate && self.domain == Domain::Discrete {
            return Err(TfError::NonCausalClosedLoop);
        }
        let mut cl = ClosedLoop::from_polys(self.domain, num, den)?;
        cl.zeros = self.zeros.clone();
        cl.degenerate_leading = degenerate;
        Ok(cl)
    }

    /// Partitions the zeros into non-minimum phase, minimum phase and boundary sets.
    pub fn classify_zeros(&self, tol: T) -> ZeroClassification<T> {
        let mut out = ZeroClassification { nmp: vec![], mp: vec![], boundary: vec![] };
        for &z in &self.zeros {
            let bucket = match self.domain {
                Domain::Continuous if z.re > tol => &mut out.nmp,
                Domain::Continuous if z.re < -tol => &mut out.mp,
                Domain::Discrete if z.norm() > T::one() + tol => &mut out.nmp,
                Domain::Discrete if z.norm() < T::one() - tol => &mut out.mp,
                _ => &mut out.boundary,
            };
            bucket.push(z);
        }
        out
    }

    /// Greedily matches zeros with finite poles closer than `tol`. `self` is unchanged.
    pub fn detect_cancellations(&self, tol: T) -> Vec<(Complex<T>, Complex<T>)> {
        self.cancellation_indices(tol)
            .into_iter()
            .map(|(i, j)| (self.zeros[i], self.finite_poles[j]))
            .collect()
    }

    fn cancellation_indices(&self, tol: T) -> Vec<(usize, usize)> {
        let mut candidates: Vec<(T, usize, usize)> = Vec::new();
        for (i, z) in self.zeros.iter().enumerate() {
            for (j, p) in self.finite_poles.iter().enumerate() {
                let d = (z - p).norm();
                if d <= tol {
                    candidates.push((d, i, j));
                }
            }
        }
        candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut zero_used = vec![false; self.zeros.len()];
        let mut pole_used = vec![false; self.finite_poles.len()];
        let mut pairs = Vec::new();
        for (_, i, j) in candidates {
            if !zero_used[i] && !pole_used[j] {
                zero_used[i] = true;
                pole_used[j] = true;
                pairs.push((i, j));
            }
        }
        pairs.sort();
        pairs
    }

    /// Removes detected zero/pole pairs. The gain is kept as is, since both
    /// removed factors are monic.
    pub fn cancel_common_factors(&self, tol: T) -> Result<Self, TfError> {
        let pairs = self.cancellation_indices(tol);
        let zero_drop: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let pole_drop: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let zeros = self
            .zeros
            .iter()
            .enumerate()
            .filter(|(i, _)| !zero_drop.contains(i))
            .map(|(_, z)| *z)
            .collect();
        let poles = self
            .finite_poles
            .iter()
            .enumerate()
            .filter(|(j, _)| !pole_drop.contains(j))
            .map(|(_, p)| *p)
            .collect();
        LoopTf::new(self.domain, self.gain, zeros, poles, self.integrator_count)
    }
}

/// Complementary sensitivity `T = num/den` with factored denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop<T> {
    pub domain: Domain,
    /// Ratio of leading coefficients of `num_poly` and `den_poly`.
    pub gain: T,
    pub zeros: Vec<Complex<T>>,
    /// Closed-loop poles `r_i`.
    pub poles: Vec<Complex<T>>,
    pub num_poly: Poly<T>,
    pub den_poly: Poly<T>,
    /// Set when the biproper `K = −1` cancellation lowered the denominator degree.
    pub degenerate_leading: bool,
    pub pole_backward_error: T,
    pub pole_clusters: usize,
}

impl<T: Scalar> ClosedLoop<T> {
    /// Builds `T = num/den` directly from polynomials and factors both.
    pub fn from_polys(domain: Domain, num: Poly<T>, den: Poly<T>) -> Result<Self, TfError> {
        if den.is_zero() {
            return Err(TfError::DegenerateClosedLoop);
        }
        let factor = |p: &Poly<T>| -> Result<RootSet<T>, PolyError> {
            if p.degree() == 0 {
                Ok(RootSet {
                    roots: vec![],
                    residual_bound: T::zero(),
                    backward_error: T::zero(),
                    clusters: vec![],
                })
            } else {
                p.roots()
            }
        };
        let poles = factor(&den)?;
        let zeros = if num.is_zero() { vec![] } else { factor(&num)?.roots };
        Ok(ClosedLoop {
            domain,
            gain: num.leading() / den.leading(),
            zeros,
            poles: poles.roots,
            num_poly: num,
            den_poly: den,
            degenerate_leading: false,
            pole_backward_error: poles.backward_error,
            pole_clusters: poles.clusters.len(),
        })
    }

    pub fn eval(&self, x: Complex<T>) -> Complex<T> {
        self.num_poly.eval(x) / self.den_poly.eval(x)
    }

    /// `T(0) = num(0)/den(0)`, read off the constant coefficients.
    pub fn value_at_zero(&self) -> T {
        self.num_poly.coeff(0) / self.den_poly.coeff(0)
    }

    /// Denominator degree minus numerator degree of `T` (negative when improper).
    pub fn relative_degree(&self) -> isize {
        self.den_poly.degree() as isize - self.num_poly.degree() as isize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroClassification<T> {
    pub nmp: Vec<Complex<T>>,
    pub mp: Vec<Complex<T>>,
    pub boundary: Vec<Complex<T>>,
}
