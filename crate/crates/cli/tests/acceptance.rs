//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use csbi_cli::commands::{cmd_identities, cmd_verify, IdentityFlags, VerifyFlags};
use csbi_cli::report::AnalysisReport;
use csbi_cli::sampling;
use csbi_core::csbi::{csbi_continuous, csbi_discrete, middleton_crosscheck, sung_crosscheck};
use csbi_core::quadrature::{csbi_continuous_numeric, csbi_discrete_numeric};
use csbi_core::stability::{jury_test, routh_hurwitz};
use csbi_core::transfer_function::DEFAULT_BOUNDARY_TOL;
use csbi_core::{format_tf, parse_tf, Complex64, Domain, LoopTf64, ParseErrorKind, QuadOptions64};

const L1: &str = "-1.164e-4*(s-10)*(s+0.0625)/(s^2*(s+10))";
const L2: &str = "-5.77*(s-10)*(s+1)/(s*(s+10)*(s+1))";
const L3: &str = "-2.0348*(s-1)/(s^2+3*s+2)";
const L4: &str = "2*(z+2)/(z+0.5)";

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn verify(text: &str) -> Result<AnalysisReport, String> {
    cmd_verify(text, &VerifyFlags::default()).map(|(r, _)| r).map_err(|e| e.message)
}

fn analytic(r: &AnalysisReport) -> f64 {
    r.analytic.value.map_or(f64::NAN, |v| v.0)
}

fn numeric(r: &AnalysisReport) -> f64 {
    r.numeric.as_ref().and_then(|n| n.value).map_or(f64::NAN, |v| v.0)
}

fn has_warning(r: &AnalysisReport, prefix: &str) -> bool {
    r.warnings.iter().any(|w| w.starts_with(prefix))
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, format!("runtime {t:?} exceeds {limit:?}"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = verify(L1)?;
    let (a, n) = (analytic(&r), numeric(&r));
    check((a - 0.1).abs() <= 1e-12, format!("analytic {a}"))?;
    check((n - 0.1).abs() <= 1e-3, format!("numeric {n}"))?;
    within(Duration::from_secs(5), start)?;
    Ok(format!("analytic {a:.15}, numeric {n:.10}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let r = verify(L2)?;
    let (a, n) = (analytic(&r), numeric(&r));
    check((a - 77.0 / 5770.0).abs() <= 1e-12, format!("analytic {a}"))?;
    check((n - 0.013345).abs() <= 1e-3, format!("numeric {n}"))?;
    check(has_warning(&r, "CancellationDetected"), "no cancellation warning")?;
    within(Duration::from_secs(5), start)?;
    Ok(format!("analytic {a:.15}, numeric {n:.10}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let r = verify(L3)?;
    check(r.analytic.status == "MinusInfinity", format!("analytic status {}", r.analytic.status))?;
    let q = r.numeric.as_ref().ok_or("no numeric section")?;
    check(q.status == "DivergenceSuspected", format!("numeric status {}", q.status))?;
    check(q.divergence_sign == Some("Minus"), format!("numeric sign {:?}", q.divergence_sign))?;
    check(has_warning(&r, "DivergenceSignConvention"), "no sign-convention warning")?;
    within(Duration::from_secs(10), start)?;
    Ok(format!("analytic MinusInfinity, numeric diverges Minus ({})", q.notes.join("; ")))
}

fn criterion_4() -> Outcome {
    let r = verify(L4)?;
    let expected = 1.0 + (2.0f64 / 3.0).log2();
    let (a, n) = (analytic(&r), numeric(&r));
    check((a - expected).abs() <= 1e-12, format!("analytic {a}"))?;
    check(has_warning(&r, "UnstableHypothesisViolated"), "no stability warning")?;
    let poles = &r.stability.as_ref().ok_or("no stability section")?.closed_loop_poles;
    check(poles.iter().any(|p| (p.0 .0 + 1.5).abs() < 1e-9 && p.1 .0.abs() < 1e-9), "closed-loop pole -1.5 missing")?;
    // The loop is unstable, so the integral itself is not the closed-form value.
    check(
        (n - expected).abs() <= 1e-3,
        format!("analytic {a:.12} and stability warning ok; numeric {n:.10} differs from {expected:.10} by {:.6}", (n - expected).abs()),
    )?;
    Ok(format!("analytic {a:.15}, numeric {n:.10}"))
}

fn criterion_5() -> Outcome {
    let flags = IdentityFlags { count: 200, seed: 5, ..IdentityFlags::default() };
    let (s, _) = cmd_identities(&flags).map_err(|e| e.message)?;
    check(s.lemma2.cases == 200 && s.lemma4.cases == 200, "wrong case count")?;
    check(s.failures.is_empty(), format!("{} failures, first {:?}", s.failures.len(), s.failures.first()))?;
    Ok(format!("400 cases, max deviation {:.3e}", s.max_deviation.0))
}

const SYSTEMS: usize = 100;
const CONT_SEED: u64 = 6;
const DISC_SEED: u64 = 7;

fn systems(domain: Domain) -> Vec<LoopTf64> {
    match domain {
        Domain::Continuous => {
            let mut rng = sampling::rng(CONT_SEED);
            (0..SYSTEMS).map(|_| sampling::stable_continuous(&mut rng)).collect()
        }
        Domain::Discrete => {
            let mut rng = sampling::rng(DISC_SEED);
            (0..SYSTEMS).map(|_| sampling::stable_discrete(&mut rng)).collect()
        }
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let opts = QuadOptions64::default();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for domain in [Domain::Continuous, Domain::Discrete] {
        for l in systems(domain) {
            let cl = l.close_loop().map_err(|e| e.to_string())?;
            let (a, q) = match domain {
                Domain::Continuous => (csbi_continuous(&l, DEFAULT_BOUNDARY_TOL), csbi_continuous_numeric(&cl, &opts)),
                Domain::Discrete => (csbi_discrete(&l, DEFAULT_BOUNDARY_TOL), csbi_discrete_numeric(&cl, &opts)),
            };
            let a = a.ok().and_then(|r| r.value);
            let n = q.ok().and_then(|q| q.value);
            match (a, n) {
                (Some(a), Some(n)) if (a - n).abs() <= 1e-3f64.max(1e-2 * a.abs()) => {
                    worst = worst.max((a - n).abs());
                }
                _ => failures.push(format!("{}: analytic {a:?} numeric {n:?}", format_tf(&l))),
            }
        }
    }
    check(failures.is_empty(), format!("{} failures, first {}", failures.len(), failures.first().map_or("", |s| s)))?;
    within(Duration::from_secs(600), start)?;
    Ok(format!("{} systems, max deviation {worst:.3e}", 2 * SYSTEMS))
}

fn criterion_7() -> Outcome {
    let (mut middleton, mut sung) = (0, 0);
    for l in systems(Domain::Continuous).into_iter().filter(|l| l.integrator_count() >= 1) {
        let a = csbi_continuous(&l, DEFAULT_BOUNDARY_TOL).ok().and_then(|r| r.value);
        let m = l.close_loop().ok().and_then(|cl| middleton_crosscheck(&cl).ok());
        match (a, m) {
            (Some(a), Some(m)) if (a - m).abs() <= 1e-9 => middleton += 1,
            _ => return Err(format!("{}: analytic {a:?} middleton {m:?}", format_tf(&l))),
        }
    }
    for l in systems(Domain::Discrete).into_iter().filter(|l| l.relative_degree() >= 1) {
        let a = csbi_discrete(&l, DEFAULT_BOUNDARY_TOL).ok().and_then(|r| r.value);
        let s = sung_crosscheck(&l).ok();
        match (a, s) {
            (Some(a), Some(s)) if (a - s).abs() <= 1e-12 => sung += 1,
            _ => return Err(format!("{}: analytic {a:?} sung {s:?}", format_tf(&l))),
        }
    }
    Ok(format!("{middleton} continuous and {sung} discrete cases"))
}

fn criterion_8() -> Outcome {
    let mut rng = sampling::rng(8);
    let mut compared = [0usize; 2];
    for (i, disc) in [false, true].into_iter().enumerate() {
        for _ in 0..1000 {
            let p = sampling::polynomial(&mut rng);
            let roots = p.roots().map_err(|e| format!("root finder failed on {:?}: {e}", p.coeffs()))?.roots;
            let dist = |r: &Complex64| if disc { 1.0 - r.norm() } else { -r.re };
            if roots.iter().any(|r| dist(r).abs() < 1e-3) {
                continue;
            }
            let by_roots = roots.iter().all(|r| dist(r) > 0.0);
            let table = if disc { jury_test(&p) } else { routh_hurwitz(&p) };
            check(table == by_roots, format!("{:?}: table {table}, roots {by_roots}", p.coeffs()))?;
            compared[i] += 1;
        }
    }
    Ok(format!("{} continuous and {} discrete polynomials compared", compared[0], compared[1]))
}

fn roots_match(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let mut left: Vec<Complex64> = b.to_vec();
    a.len() == b.len()
        && a.iter().all(|x| {
            let best = left
                .iter()
                .enumerate()
                .min_by(|p, q| (p.1 - x).norm().total_cmp(&(q.1 - x).norm()))
                .map(|(i, y)| (i, (y - x).norm()));
            match best {
                Some((i, d)) if d <= tol * (1.0 + x.norm()) => {
                    left.swap_remove(i);
                    true
                }
                _ => false,
            }
        })
}

fn criterion_9() -> Outcome {
    let mut rng = sampling::rng(9);
    for _ in 0..500 {
        let l = sampling::any_loop(&mut rng);
        let text = format_tf(&l);
        let back: LoopTf64 = parse_tf(&text).map_err(|e| format!("{text}: {e}"))?;
        let same = back.domain() == l.domain()
            && back.integrator_count() == l.integrator_count()
            && (back.gain() - l.gain()).abs() <= 1e-12 * l.gain().abs()
            && roots_match(back.zeros(), l.zeros(), 1e-9)
            && roots_match(back.finite_poles(), l.finite_poles(), 1e-9);
        check(same, format!("round trip changed {text}"))?;
    }

    let structures = [(L1, 2, 1, 2, 1), (L2, 1, 1, 2, 2), (L3, 0, 1, 1, 2), (L4, 0, 0, 1, 1)];
    for (text, ints, rel, zeros, poles) in structures {
        let l: LoopTf64 = parse_tf(text).map_err(|e| format!("{text}: {e}"))?;
        let got = (l.integrator_count(), l.relative_degree(), l.zeros().len(), l.finite_poles().len());
        check(got == (ints, rel, zeros, poles), format!("{text}: structure {got:?}"))?;
    }
    let gains = [(L1, -1.164e-4), (L2, -5.77), (L3, -2.0348), (L4, 2.0)];
    for (text, k) in gains {
        let g = parse_tf::<f64>(text).map_err(|e| e.to_string())?.gain();
        check((g - k).abs() <= 1e-15 * k.abs(), format!("{text}: gain {g}"))?;
    }
    check(parse_tf::<f64>(L4).map_err(|e| e.to_string())?.domain() == Domain::Discrete, "L4 not discrete")?;

    let malformed = [("abc", 0), ("(s+1", 4), ("s+1)", 3), ("1/(s+1)*", 8), ("2*(s+1)/(z+2)", 9)];
    for (text, pos) in malformed {
        match parse_tf::<f64>(text) {
            Ok(_) => return Err(format!("{text:?} parsed")),
            Err(e) => check(e.position == pos, format!("{text:?}: position {} (expected {pos}, {e})", e.position))?,
        }
    }
    let origin = parse_tf::<f64>("s/(s+1)").err().map(|e| e.kind);
    check(origin == Some(ParseErrorKind::OriginZero), format!("s/(s+1): {origin:?}"))?;
    Ok("500 round trips, 4 example structures, 6 malformed inputs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("L1 multi-integrator example", criterion_1),
        ("L2 single-integrator example", criterion_2),
        ("L3 divergent example", criterion_3),
        ("L4 discrete biproper example", criterion_4),
        ("primitive identity sweep", criterion_5),
        ("random closed form vs quadrature", criterion_6),
        ("cross-check consistency", criterion_7),
        ("stability table vs roots", criterion_8),
        ("parser", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}) [{secs:.2}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) [{secs:.2}s]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
