//! Seeded random systems and identity arguments for sweeps and test suites.

use csbi_core::stability::stability_by_roots;
use csbi_core::{Complex64, Domain, LoopTf64, Poly64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SweepRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SweepRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Closed-loop stability margin required of sampled systems.
pub const MIN_MARGIN: f64 = 0.02;

fn signed<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let m = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        -m
    } else {
        m
    }
}

/// `a` with `|Re a| ≤ lim`, `|Im a| ≤ lim`.
pub fn complex_in_box<R: Rng>(rng: &mut R, lim: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-lim..=lim), rng.gen_range(-lim..=lim))
}

/// `a` with `|a| ≤ r_max`, uniform in modulus and angle.
pub fn complex_in_disk<R: Rng>(rng: &mut R, r_max: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..=r_max), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

/// Log-uniform magnitude in `[0.1, 10]` with random sign.
pub fn gain<R: Rng>(rng: &mut R) -> f64 {
    let g = 10f64.powf(rng.gen_range(-1.0..1.0));
    if rng.gen_bool(0.5) {
        -g
    } else {
        g
    }
}

/// Conjugate-closed roots with total degree exactly `deg`; `draw` returns the upper member.
fn roots<R: Rng>(rng: &mut R, deg: usize, mut draw: impl FnMut(&mut R) -> Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(deg);
    while out.len() < deg {
        let r = draw(rng);
        if out.len() + 2 <= deg && rng.gen_bool(0.5) {
            let r = Complex64::new(r.re, r.im.abs().max(0.1));
            out.push(r);
            out.push(r.conj());
        } else {
            out.push(Complex64::new(r.re, 0.0));
        }
    }
    out
}

/// Continuous-plane root in `[−5, 5]²` at least 0.1 from the imaginary axis.
fn s_root<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(signed(rng, 0.1, 5.0), rng.gen_range(0.0..5.0))
}

fn is_stable(l: &LoopTf64) -> bool {
    l.close_loop()
        .map(|cl| {
            let v = stability_by_roots(&cl, 1e-9);
            v.stable && v.margin > MIN_MARGIN
        })
        .unwrap_or(false)
}

/// Stable continuous loop with 1–3 integrators and `n ≤ 6`.
pub fn stable_continuous<R: Rng>(rng: &mut R) -> LoopTf64 {
    loop {
        let k = rng.gen_range(1..=3usize);
        let n = rng.gen_range(k..=6usize);
        let poles = roots(rng, n - k, s_root);
        let m = rng.gen_range(0..=n);
        let zeros = roots(rng, m, s_root);
        let Ok(l) = LoopTf64::new(Domain::Continuous, gain(rng), zeros, poles, k) else { continue };
        if is_stable(&l) {
            return l;
        }
    }
}

/// Stable continuous loop without integrators whose `|T(0)|` is at least `gap` from 1.
pub fn stable_no_integrator<R: Rng>(rng: &mut R, gap: f64) -> LoopTf64 {
    loop {
        let n = rng.gen_range(1..=4usize);
        let poles = roots(rng, n, s_root);
        let m = rng.gen_range(0..=n);
        let zeros = roots(rng, m, s_root);
        let Ok(l) = LoopTf64::new(Domain::Continuous, gain(rng), zeros, poles, 0) else { continue };
        let Ok(cl) = l.close_loop() else { continue };
        if is_stable(&l) && (cl.value_at_zero().abs() - 1.0).abs() > gap {
            return l;
        }
    }
}

/// Stable discrete loop with `ν ∈ {0, 1, 2}`, `n ≤ 6` and zeros off the unit circle.
pub fn stable_discrete<R: Rng>(rng: &mut R) -> LoopTf64 {
    loop {
        let nu = rng.gen_range(0..=2usize);
        let n = rng.gen_range(nu.max(1)..=6usize);
        let poles = roots(rng, n, |r| complex_in_disk(r, 1.5));
        let zeros = roots(rng, n - nu, |r| {
            let z = complex_in_disk(r, 3.0);
            if z.norm() < 0.05 {
                Complex64::new(0.5, 0.0)
            } else {
                z
            }
        });
        if zeros.iter().any(|z| (z.norm() - 1.0).abs() < 0.05) {
            continue;
        }
        let Ok(l) = LoopTf64::new(Domain::Discrete, gain(rng), zeros, poles, 0) else { continue };
        if is_stable(&l) {
            return l;
        }
    }
}

/// Arbitrary (not necessarily stable) proper loop with roots spread over several decades.
pub fn any_loop<R: Rng>(rng: &mut R) -> LoopTf64 {
    loop {
        let domain = if rng.gen_bool(0.5) { Domain::Continuous } else { Domain::Discrete };
        let k = if domain == Domain::Continuous { rng.gen_range(0..=3usize) } else { 0 };
        let l = rng.gen_range(0..=6usize);
        if k + l == 0 {
            continue;
        }
        let draw = |r: &mut R| {
            let mag = 10f64.powf(r.gen_range(-2.0..2.0));
            Complex64::from_polar(mag, r.gen_range(0.0..std::f64::consts::PI))
        };
        let poles = roots(rng, l, draw);
        let m = rng.gen_range(0..=k + l);
        let zeros = roots(rng, m, draw);
        if let Ok(tf) = LoopTf64::new(domain, gain(rng), zeros, poles, k) {
            return tf;
        }
    }
}

/// Random polynomial of degree 1–8 with coefficients in `[−5, 5]`.
pub fn polynomial<R: Rng>(rng: &mut R) -> Poly64 {
    loop {
        let deg = rng.gen_range(1..=8usize);
        let coeffs: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-5.0..=5.0)).collect();
        let p = Poly64::new(coeffs);
        if p.degree() >= 1 {
            return p;
        }
    }
}
