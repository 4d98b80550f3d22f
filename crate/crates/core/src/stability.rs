//! Closed-loop stability: pole locations, cross-validated by coefficient tables.

use num_complex::Complex;

use crate::polynomial::Poly;
use crate::scalar::Scalar;
use crate::transfer_function::{ClosedLoop, Domain};

pub const DEFAULT_STABILITY_TOL: f64 = 1e-9;
/// Relative size below which a Routh pivot is treated as zero and replaced.
const ROUTH_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict<T> {
    /// True iff every pole lies strictly inside the stability region, further
    /// than the tolerance band from its boundary.
    pub stable: bool,
    /// Continuous: `min(−Re r_i)`; discrete: `min(1 − |r_i|)`. `+∞` with no poles.
    pub margin: T,
    /// Whether the Routh–Hurwitz (continuous) or Jury (discrete) table agrees.
    pub method_agreement: bool,
    /// Poles outside the region or inside the tolerance band.
    pub offenders: Vec<Complex<T>>,
    /// Some offender lies within the tolerance band of the boundary.
    pub marginal: bool,
}

/// Pole-location test with tolerance band `tol`; boundary poles count as unstable.
pub fn stability_by_roots<T: Scalar>(t: &ClosedLoop<T>, tol: T) -> StabilityVerdict<T> {
    let distance = |r: &Complex<T>| match t.domain {
        Domain::Continuous => -r.re,
        Domain::Discrete => T::one() - r.norm(),
    };
    let margin = t.poles.iter().map(distance).fold(T::infinity(), T::min);
    let offenders: Vec<Complex<T>> = t.poles.iter().filter(|r| distance(r) <= tol).copied().collect();
    let marginal = offenders.iter().any(|r| distance(r).abs() <= tol);
    let stable = offenders.is_empty();
    let table = match t.domain {
        Domain::Continuous => t.den_poly.degree() == 0 || routh_hurwitz(&t.den_poly),
        Domain::Discrete => t.den_poly.degree() == 0 || jury_test(&t.den_poly),
    };
    StabilityVerdict { stable, margin, method_agreement: table == stable, offenders, marginal }
}

/// Routh table of `p`, highest power first. Returns `None` when the
/// polynomial is constant.
#[derive(Debug, Clone, PartialEq)]
pub struct RouthTable<T> {
    pub rows: Vec<Vec<T>>,
    /// Rows whose pivot was zero and replaced by a small epsilon.
    pub epsilon_rows: Vec<usize>,
    /// Rows that vanished entirely and were rebuilt from the auxiliary polynomial.
    pub auxiliary_rows: Vec<usize>,
}

impl<T: Scalar> RouthTable<T> {
    pub fn first_column(&self) -> Vec<T> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    /// Number of sign changes in the first column: the count of right half-plane roots.
    pub fn sign_changes(&self) -> usize {
        let col = self.first_column();
        col.windows(2).filter(|w| (w[0] > T::zero()) != (w[1] > T::zero())).count()
    }
}

pub fn routh_table<T: Scalar>(p: &Poly<T>) -> Option<RouthTable<T>> {
    let n = p.degree();
    if n == 0 {
        return None;
    }
    let sign = p.leading().signum();
    let c: Vec<T> = (0..=n).rev().map(|k| p.coeff(k) * sign).collect();
    let width = n / 2 + 1;
    let row_from = |start: usize| -> Vec<T> {
        let mut r: Vec<T> = c.iter().skip(start).step_by(2).copied().collect();
        r.resize(width, T::zero());
        r
    };
    let mut rows = vec![row_from(0), row_from(1)];
    let mut epsilon_rows = Vec::new();
    let mut auxiliary_rows = Vec::new();
    let scale_of = |r: &[T]| r.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let eps = T::lit(ROUTH_EPS);
    let coeff_scale = scale_of(&c);

    for i in 1..=n {
        // Fix up row i before using it as a pivot row.
        let row_scale = scale_of(&rows[i]);
        if row_scale <= eps * coeff_scale {
            // Entire row vanished: differentiate the auxiliary polynomial of row i-1.
            let order = n + 1 - i; // power of the leading term in row i-1
            let prev = rows[i - 1].clone();
            let mut aux = vec![T::zero(); width];
            for (k, &a) in prev.iter().enumerate() {
                let power = order as isize - 2 * k as isize;
                if power > 0 {
                    aux[k] = a * T::from_isize(power).unwrap();
                }
            }
            rows[i] = aux;
            auxiliary_rows.push(i);
        }
        if rows[i][0].abs() <= eps * scale_of(&rows[i]).max(eps * coeff_scale) {
            rows[i][0] = eps * coeff_scale.max(T::min_positive_value());
            epsilon_rows.push(i);
        }
        if i == n {
            break;
        }
        let (a, b) = (&rows[i - 1], &rows[i]);
        let mut next = vec![T::zero(); width];
        for k in 0..width - 1 {
            next[k] = (b[0] * a[k + 1] - a[0] * b[k + 1]) / b[0];
        }
        rows.push(next);
    }
    Some(RouthTable { rows, epsilon_rows, auxiliary_rows })
}

/// True iff every root of `p` has a strictly negative real part.
pub fn routh_hurwitz<T: Scalar>(p: &Poly<T>) -> bool {
    let Some(table) = routh_table(p) else {
        return false;
    };
    table.epsilon_rows.is_empty()
        && table.auxiliary_rows.is_empty()
        && table.first_column().iter().all(|&v| v > T::zero())
}

/// Jury stability table in Schur–Cohn form: each row is the previous row
/// combined with its reversal, dropping one degree.
pub fn jury_rows<T: Scalar>(p: &Poly<T>) -> Vec<Vec<T>> {
    let mut rows = Vec::new();
    let mut row: Vec<T> = p.coeffs().to_vec();
    while row.len() > 1 {
        rows.push(row.clone());
        let n = row.len() - 1;
        let (a0, an) = (row[0], row[n]);
        // an·p(z) − a0·z^n p(1/z), divided by z
        let next: Vec<T> = (1..=n).map(|k| an * row[k] - a0 * row[n - k]).collect();
        row = next;
    }
    rows.push(row);
    rows
}

/// True iff every root of `p` lies strictly inside the unit circle.
pub fn jury_test<T: Scalar>(p: &Poly<T>) -> bool {
    if p.degree() == 0 {
        return false;
    }
    let rows = jury_rows(p);
    for row in &rows[..rows.len() - 1] {
        let n = row.len() - 1;
        let lead = row[n];
        if lead == T::zero() || !lead.is_finite() {
            return false;
        }
        if row[0].abs() >= lead.abs() {
            return false;
        }
    }
    let last = rows[rows.len() - 1][0];
    last != T::zero() && last.is_finite()
}
