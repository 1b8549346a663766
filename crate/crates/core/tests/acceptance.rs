//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use ncmckay_core::chart::{ChartElement, ChartRing};
use ncmckay_core::endo;
use ncmckay_core::param::{ParamPoly, ParamSystem};
use ncmckay_core::scheme::{self, Bounds, DivisorData};
use ncmckay_core::suite::{checks, Suite, SuiteParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

/// Runs the named checks of `suite` for every `n` in `ns`.
fn run_checks(suite: Suite, names: &[&str], ns: std::ops::RangeInclusive<usize>, tune: impl Fn(&mut SuiteParams)) -> Verdict {
    let mut ran = 0;
    for n in ns {
        let mut p = SuiteParams::new(n);
        tune(&mut p);
        for c in checks(suite).into_iter().filter(|c| names.contains(&c.name)) {
            let r = c.run(&p);
            if !r.passed {
                return Err(format!("n={n} {}: {}", r.name, r.detail));
            }
            ran += 1;
        }
    }
    Ok(format!("{ran} checks"))
}

fn chart_consistency() -> Verdict {
    run_checks(Suite::Scheme, &["chart-commutator", "adjacent-y-commutator"], 0..=4, |_| {})
}

fn alpha_beta_glue() -> Verdict {
    run_checks(Suite::Tilting, &["alpha-beta-glue"], 0..=4, |_| {})
}

fn matrix_identities() -> Verdict {
    run_checks(Suite::Tilting, &["u-v-matrices", "uv-diagonals", "uv-commutator"], 0..=4, |_| {})?;
    // the n = 1 values written out
    let n = 1;
    let r0 = ChartRing::chart(n, 0).unwrap();
    let t = |c: &[i64]| ChartElement::constant(r0, ParamPoly::linear(ParamSystem::T, n, c));
    let xy = ChartElement::x(r0).mul(&ChartElement::y(r0)).unwrap();
    let (u, v) = (endo::make_u(n), endo::make_v(n));
    let mu = endo::matrix_form_chart0(&u);
    let uv = endo::matrix_form_chart0(&u.mul(&v));
    let comm = endo::matrix_form_chart0(&u.mul(&v).sub(&v.mul(&u)));
    let ok = mu[0][1] == ChartElement::x(r0)
        && mu[1][0] == xy.add(&t(&[0, 1])).unwrap()
        && uv[0][0] == xy
        && uv[1][1] == xy.add(&t(&[0, 1])).unwrap()
        && comm[0][0] == t(&[0, -1])
        && comm[1][1] == t(&[1, 1]);
    if ok {
        Ok("n <= 4; n = 1: [u, v] = diag(-t1, t0 + t1)".into())
    } else {
        Err(format!("n = 1 values: u = {mu:?}, [u, v] = {comm:?}"))
    }
}

fn idempotent_group_identities() -> Verdict {
    let a = run_checks(Suite::Tilting, &["idempotents", "group-element", "arrow-relations", "quiver-shape"], 0..=4, |_| {})?;
    let b = run_checks(Suite::Cbh, &["s-idempotents", "s-defining-rules", "s-quiver-relations"], 0..=4, |_| {})?;
    Ok(format!("{a} on End(T), {b} on S"))
}

fn homomorphism() -> Verdict {
    run_checks(Suite::Iso, &["phi-relation", "phi-multiplicative", "phi-mutation"], 0..=3, |p| {
        p.samples = 50;
        p.degree = 4;
    })
}

fn tilting_vanishing() -> Verdict {
    let bounds = Bounds::new(8, 3);
    let mut slices = 0;
    for n in 0..=3 {
        for a in 0..=n {
            for b in 0..=n {
                let reports = scheme::cech_h1_dims(&endo::summand(n, a), &endo::summand(n, b), &bounds).map_err(|e| e.to_string())?;
                if let Some(r) = reports.iter().find(|r| r.stable && r.h1_dim != 0) {
                    return Err(format!("n={n} (a,b)=({a},{b}) slice {:?}: h1 = {}", r.bidegree, r.h1_dim));
                }
                if let Some(r) = reports.iter().find(|r| !r.stable) {
                    return Err(format!("n={n} (a,b)=({a},{b}) slice {:?} unstable", r.bidegree));
                }
                slices += reports.len();
            }
        }
    }
    Ok(format!("{slices} slices, all stable and zero"))
}

fn ses() -> Verdict {
    run_checks(Suite::Sheaves, &["ses-exact"], 1..=3, |p| p.bounds = Bounds::new(6, 2))
}

fn injectivity() -> Verdict {
    run_checks(Suite::Iso, &["injectivity"], 0..=3, |p| p.degree = 4)
}

fn surjectivity() -> Verdict {
    run_checks(Suite::Iso, &["surjectivity"], 0..=3, |p| p.bounds = Bounds::new(6, 2))
}

fn solver_soundness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut count = 0;
    for i in 0..100 {
        let n = 1 + i % 3;
        let tgt = DivisorData::zero(n);
        let g = scheme::random_cochain(&mut rng, n, 4);
        let sol = scheme::cech_solve_large_twist(&g, &tgt).map_err(|e| e.to_string())?;
        if scheme::delta(&sol.components, &sol.source, &tgt).map_err(|e| e.to_string())? != g {
            return Err(format!("n={n}: cochain {:?} not reproduced", g.components));
        }
        count += 1;
    }
    Ok(format!("{count} random cochains, n <= 3"))
}

fn negative_control() -> Verdict {
    run_checks(Suite::Sheaves, &["negative-control"], 1..=3, |p| p.bounds = Bounds::new(6, 3))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("chart consistency", chart_consistency),
        ("alpha/beta well-definedness", alpha_beta_glue),
        ("matrix identities", matrix_identities),
        ("idempotent and group identities", idempotent_group_identities),
        ("homomorphism", homomorphism),
        ("tilting vanishing", tilting_vanishing),
        ("short exact sequences", ses),
        ("injectivity evidence", injectivity),
        ("surjectivity evidence", surjectivity),
        ("solver soundness", solver_soundness),
        ("negative control", negative_control),
    ];
    let results: Vec<(Verdict, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(_, f)| {
                s.spawn(move || {
                    let start = Instant::now();
                    (f(), start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| (Err("panicked".into()), 0.0))).collect()
    });
    let mut failed = 0;
    for (k, ((name, _), (verdict, secs))) in criteria.iter().zip(results).enumerate() {
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
