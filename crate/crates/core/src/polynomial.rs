//! Real-coefficient univariate polynomials and their complex roots.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Scalar;

/// A sum coefficient at or below this fraction of its operands is cancellation noise.
pub const TRUNCATION_RATIO: f64 = 1e-12;
/// Relative tolerance for matching a complex root with its conjugate.
pub const CONJUGATE_TOL: f64 = 1e-9;
/// Roots closer than this are reported as a (near) multiple-root cluster.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Largest accepted normalized backward error of a computed root.
pub const MAX_BACKWARD_ERROR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("roots are not closed under conjugation: no partner for {re}{im:+}i")]
    ConjugationViolation { re: f64, im: f64 },
    #[error("root finding did not converge: backward error {backward_error:e} after {iterations} iterations")]
    NonConvergence { backward_error: f64, iterations: usize },
    #[error("a constant polynomial has no roots")]
    ConstantPolynomial,
}

/// Polynomial with real coefficients in ascending order: `coeffs[k]` multiplies `x^k`.
///
/// Always normalized: the zero polynomial is `[0]`, otherwise the last stored
/// coefficient is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

/// Roots of a polynomial, with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet<T> {
    pub roots: Vec<Complex<T>>,
    /// `max |monic(p)(r)|` over the reported roots.
    pub residual_bound: T,
    /// `max |p(r)| / Σ|c_k||r|^k`, the scale-free backward error.
    pub backward_error: T,
    /// Index pairs of roots closer than [`CLUSTER_TOL`] (possible multiple roots).
    pub clusters: Vec<(usize, usize)>,
}

impl<T: Scalar> RootSet<T> {
    pub fn has_clusters(&self) -> bool {
        !self.clusters.is_empty()
    }
}

/// A real root, or a conjugate pair represented by its upper half-plane member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootGroup<T> {
    Real(T),
    Pair(Complex<T>),
}

impl<T: Scalar> RootGroup<T> {
    pub fn multiplicity(&self) -> usize {
        match self {
            RootGroup::Real(_) => 1,
            RootGroup::Pair(_) => 2,
        }
    }
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        assert!(
            coeffs.iter().all(|c| c.is_finite()),
            "polynomial coefficients must be finite"
        );
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == T::zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Poly { coeffs }
    }

    /// Coefficient-wise `a ± b`. Leading coefficients that cancelled down to
    /// noise relative to the operands at the same power are dropped.
    fn combine(a: &Self, b: &Self, sign: T) -> Self {
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut coeffs: Vec<T> = (0..n).map(|k| a.coeff(k) + sign * b.coeff(k)).collect();
        let noise = |k: usize| T::lit(TRUNCATION_RATIO) * a.coeff(k).abs().max(b.coeff(k).abs());
        while coeffs.len() > 1 && coeffs.last().unwrap().abs() <= noise(coeffs.len() - 1) {
            coeffs.pop();
        }
        if coeffs.len() == 1 && coeffs[0].abs() <= noise(0) {
            coeffs[0] = T::zero();
        }
        Poly::new(coeffs)
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![T::zero()] }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = T::one();
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == T::zero()
    }

    pub fn leading(&self) -> T {
        *self.coeffs.last().expect("normalized polynomial is never empty")
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    /// Builds `leading · ∏(x − r)`. The roots must be closed under conjugation.
    pub fn from_roots(roots: &[Complex<T>], leading: T) -> Result<Self, PolyError> {
        conjugate_groups(roots, T::lit(CONJUGATE_TOL))?;
        let mut acc = vec![Complex::new(T::one(), T::zero())];
        for r in roots {
            let mut next = vec![Complex::new(T::zero(), T::zero()); acc.len() + 1];
            for (k, a) in acc.iter().enumerate() {
                next[k + 1] += *a;
                next[k] -= *a * *r;
            }
            acc = next;
        }
        let tol = T::lit(CONJUGATE_TOL);
        if let Some(bad) = acc.iter().find(|c| c.im.abs() >= tol * (c.norm() + T::one())) {
            return Err(PolyError::ConjugationViolation {
                re: bad.re.to_f64_lossy(),
                im: bad.im.to_f64_lossy(),
            });
        }
        Ok(Self::new(acc.into_iter().map(|c| c.re * leading).collect()))
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(T::one() / self.leading())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * T::from_usize(k).unwrap())
                .collect(),
        )
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, x: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * x + c)
    }

    pub fn eval_real(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    /// `Σ |c_k| |x|^k`, the natural scale for rounding errors of `eval(x)`.
    pub fn eval_abs(&self, x: Complex<T>) -> T {
        let r = x.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * r + c.abs())
    }

    /// All complex roots (with multiplicity), polished and conjugate-symmetric.
    pub fn roots(&self) -> Result<RootSet<T>, PolyError> {
        if self.degree() == 0 {
            return Err(PolyError::ConstantPolynomial);
        }
        let monic = self.monic();
        let origin = monic.coeffs.iter().take_while(|&&c| c == T::zero()).count();
        let reduced = Poly::new(monic.coeffs[origin..].to_vec());

        let (mut roots, iterations) = match reduced.degree() {
            0 => (Vec::new(), 0),
            1 => (vec![Complex::new(-reduced.coeffs[0], T::zero())], 0),
            2 => (quadratic_roots(reduced.coeffs[0], reduced.coeffs[1]), 0),
            _ => aberth(&reduced),
        };
        roots = enforce_conjugate_symmetry(roots);
        polish(&reduced, &mut roots);
        roots.extend(std::iter::repeat_n(Complex::new(T::zero(), T::zero()), origin));
        roots.sort_by(|a, b| {
            b.re.partial_cmp(&a.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
        });

        let mut residual_bound = T::zero();
        let mut backward_error = T::zero();
        for r in &roots {
            let v = monic.eval(*r).norm();
            residual_bound = residual_bound.max(v);
            let scale = monic.eval_abs(*r);
            if scale > T::zero() {
                backward_error = backward_error.max(v / scale);
            }
        }
        if !(backward_error <= T::lit(MAX_BACKWARD_ERROR)) {
            return Err(PolyError::NonConvergence {
                backward_error: backward_error.to_f64_lossy(),
                iterations,
            });
        }

        let mut clusters = Vec::new();
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let d = (roots[i] - roots[j]).norm();
                if d <= T::lit(CLUSTER_TOL) * (T::one() + roots[i].norm()) {
                    clusters.push((i, j));
                }
            }
        }
        Ok(RootSet { roots, residual_bound, backward_error, clusters })
    }
}

/// Splits roots into real roots and conjugate pairs.
///
/// A root counts as real when `|Im r| ≤ rel_tol·(1 + |r|)`. Every other root
/// must have a partner within `rel_tol·(1 + |r|)` of its conjugate.
pub fn conjugate_groups<T: Scalar>(
    roots: &[Complex<T>],
    rel_tol: T,
) -> Result<Vec<RootGroup<T>>, PolyError> {
    let mut used = vec![false; roots.len()];
    let mut groups = Vec::new();
    for (i, r) in roots.iter().enumerate() {
        if used[i] {
            continue;
        }
        let tol = rel_tol * (T::one() + r.norm());
        if r.im.abs() <= tol {
            used[i] = true;
            groups.push(RootGroup::Real(r.re));
            continue;
        }
        let partner = (0..roots.len())
            .filter(|&j| j != i && !used[j] && roots[j].im.signum() != r.im.signum())
            .map(|j| (j, (roots[j] - r.conj()).norm()))
            .filter(|&(_, d)| d <= tol)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let Some((j, _)) = partner else {
            return Err(PolyError::ConjugationViolation {
                re: r.re.to_f64_lossy(),
                im: r.im.to_f64_lossy(),
            });
        };
        used[i] = true;
        used[j] = true;
        let upper = if r.im > T::zero() { *r } else { roots[j] };
        let lower = if r.im > T::zero() { roots[j] } else { *r };
        let two = T::lit(2.0);
        groups.push(RootGroup::Pair((upper + lower.conj()) / two));
    }
    Ok(groups)
}

fn quadratic_roots<T: Scalar>(c0: T, c1: T) -> Vec<Complex<T>> {
    // x² + c1 x + c0
    let half = c1 / T::lit(2.0);
    let disc = half * half - c0;
    if disc >= T::zero() {
        let q = -(half + half.signum() * disc.sqrt());
        if q == T::zero() {
            return vec![Complex::new(T::zero(), T::zero()); 2];
        }
        vec![Complex::new(q, T::zero()), Complex::new(c0 / q, T::zero())]
    } else {
        let im = (-disc).sqrt();
        vec![Complex::new(-half, im), Complex::new(-half, -im)]
    }
}

/// Initial guesses from the upper convex hull of `(k, ln|c_k|)`.
fn newton_polygon_guesses<T: Scalar>(p: &Poly<T>) -> Vec<Complex<T>> {
    let n = p.degree();
    let pts: Vec<(usize, f64)> = p
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != T::zero())
        .map(|(k, c)| (k, c.abs().to_f64_lossy().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let sigma = 0.7;
    let tau = std::f64::consts::TAU;
    let mut guesses = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let count = j - i;
        let radius = ((li - lj) / count as f64).exp();
        for m in 0..count {
            let angle = tau * m as f64 / count as f64 + tau * i as f64 / n as f64 + sigma;
            guesses.push(Complex::new(
                T::lit(radius * angle.cos()),
                T::lit(radius * angle.sin()),
            ));
        }
    }
    guesses
}

fn aberth<T: Scalar>(p: &Poly<T>) -> (Vec<Complex<T>>, usize) {
    let n = p.degree();
    let dp = p.derivative();
    let mut z = newton_polygon_guesses(p);
    let mut done = vec![false; n];
    let eps = T::epsilon();
    let max_iter = 200 + 20 * n;
    let mut iter = 0;
    while iter < max_iter && done.iter().any(|d| !d) {
        iter += 1;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let pz = p.eval(z[k]);
            if pz.norm() <= T::lit(4.0) * eps * p.eval_abs(z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = pz / dp.eval(z[k]);
            let repulsion = (0..n)
                .filter(|&j| j != k)
                .fold(Complex::new(T::zero(), T::zero()), |acc, j| {
                    acc + Complex::new(T::one(), T::zero()) / (z[k] - z[j])
                });
            let step = ratio / (Complex::new(T::one(), T::zero()) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // Perturb off a degenerate configuration and retry next sweep.
                z[k] *= Complex::new(T::lit(1.0 + 1e-3), T::lit(1e-3));
                continue;
            }
            z[k] -= step;
            if step.norm() <= eps * z[k].norm() {
                done[k] = true;
            }
        }
    }
    (z, iter)
}

fn enforce_conjugate_symmetry<T: Scalar>(roots: Vec<Complex<T>>) -> Vec<Complex<T>> {
    let n = roots.len();
    let mut out = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let real_tol = T::lit(1e-10);
    for i in 0..n {
        let r = roots[i];
        if !used[i] && r.im.abs() <= real_tol * (T::one() + r.norm()) {
            used[i] = true;
            out.push(Complex::new(r.re, T::zero()));
        }
    }
    // Pair upper half-plane roots with their nearest lower half-plane partner.
    let mut order: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
    order.sort_by(|&a, &b| roots[b].im.partial_cmp(&roots[a].im).unwrap_or(std::cmp::Ordering::Equal));
    for &i in &order {
        if used[i] || roots[i].im < T::zero() {
            continue;
        }
        let partner = (0..n)
            .filter(|&j| !used[j] && j != i && roots[j].im < T::zero())
            .min_by(|&a, &b| {
                let da = (roots[a] - roots[i].conj()).norm();
                let db = (roots[b] - roots[i].conj()).norm();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            });
        used[i] = true;
        match partner {
            Some(j) => {
                used[j] = true;
                let avg = (roots[i] + roots[j].conj()) / T::lit(2.0);
                out.push(avg);
                out.push(avg.conj());
            }
            None => out.push(Complex::new(roots[i].re, T::zero())),
        }
    }
    for i in 0..n {
        if !used[i] {
            out.push(Complex::new(roots[i].re, T::zero()));
        }
    }
    out
}

/// Newton steps that are kept only when they reduce `|p(r)|`. Conjugate pairs
/// are polished through their upper member so the symmetry is preserved.
fn polish<T: Scalar>(p: &Poly<T>, roots: &mut [Complex<T>]) {
    let dp = p.derivative();
    let mut i = 0;
    while i < roots.len() {
        let is_pair = roots[i].im > T::zero()
            && i + 1 < roots.len()
            && roots[i + 1] == roots[i].conj();
        let mut r = roots[i];
        for _ in 0..3 {
            let pr = p.eval(r);
            let d = dp.eval(r);
            if d.norm() == T::zero() {
                break;
            }
            let mut cand = r - pr / d;
            if !is_pair {
                cand.im = T::zero();
            }
            if p.eval(cand).norm() < pr.norm() {
                r = cand;
            } else {
                break;
            }
        }
        roots[i] = r;
        if is_pair {
            roots[i + 1] = r.conj();
            i += 2;
        } else {
            i += 1;
        }
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        Poly::combine(self, rhs, T::one())
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        Poly::combine(self, rhs, -T::one())
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl<T: Scalar> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        self.scale(-T::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl<T: Scalar> $tr for Poly<T> {
            type Output = Poly<T>;
            fn $method(self, rhs: Poly<T>) -> Poly<T> {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
