//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{E, PI};
use std::path::Path;

use hsconvex_cli::{load_config, render, run, Format, RunOptions};
use hsconvex_core::classes::{
    check_class, ClassId, ConvexityClassSpec, SamplingPlan, VerdictStatus,
};
use hsconvex_core::expr::{parse_expression, Expr};
use hsconvex_core::means::{map_validity_region, margins_strictly_decreasing, proposition1_check};
use hsconvex_core::quad::{gamma, integrate_1d, QuadratureConfig};
use hsconvex_core::theorems::{
    general_cauchy_check, verify, InequalityVerdict, Scenario, TheoremId,
};
use hsconvex_core::Interval;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn x(src: &str) -> Expr {
    parse_expression(src, "x").unwrap()
}

fn t(src: &str) -> Expr {
    parse_expression(src, "t").unwrap()
}

fn interval(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn scenario(f: &str, g: &str, h: &str, s: f64, a: f64, b: f64) -> Scenario {
    Scenario::new(x(f), t(h), s, interval(a, b))
        .unwrap()
        .with_g(x(g))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// ∫₀¹ (t^s + (1-t)^s)² dt by quadrature against the gamma closed form.
fn weight_integral_vs_gamma() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=10 {
        let s = k as f64 / 10.0;
        let q = integrate_1d(
            |t| Ok((t.powf(s) + (1.0 - t).powf(s)).powi(2)),
            Interval::unit(),
            &QuadratureConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        let closed = 2.0 / (1.0 + 2.0 * s)
            + PI.sqrt() / 2f64.powf(2.0 * s) * gamma(1.0 + s).unwrap() / gamma(1.5 + s).unwrap();
        let diff = (q.value - closed).abs();
        worst = worst.max(diff);
        ensure(diff <= 1e-8, || {
            format!("s = {s}: quadrature {} vs closed form {closed}", q.value)
        })?;
        if k == 10 {
            ensure(
                (q.value - 1.0).abs() <= 1e-10 && (closed - 1.0).abs() <= 1e-10,
                || {
                    format!(
                        "s = 1: quadrature {} closed form {closed}, expected 1",
                        q.value
                    )
                },
            )?;
        }
    }
    Ok(format!(
        "max |quadrature - closed form| = {worst:.2e} over s = 0.1..1"
    ))
}

fn gamma_accuracy() -> Outcome {
    let rel = |got: f64, want: f64| ((got - want) / want).abs();
    let half = rel(gamma(0.5).unwrap(), PI.sqrt());
    let five = rel(gamma(5.0).unwrap(), 24.0);
    ensure(half <= 1e-12, || {
        format!("Γ(0.5) relative error {half:.2e}")
    })?;
    ensure(five <= 1e-12, || format!("Γ(5) relative error {five:.2e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let v: f64 = rng.gen_range(0.5..8.0);
        let r = rel(gamma(v + 1.0).unwrap(), v * gamma(v).unwrap());
        worst = worst.max(r);
        ensure(r <= 1e-12, || {
            format!("recurrence at x = {v}: relative error {r:.2e}")
        })?;
    }
    Ok(format!(
        "Γ(0.5) {half:.1e}, Γ(5) {five:.1e}, recurrence max {worst:.1e} (relative)"
    ))
}

fn equality_edges() -> Outcome {
    let sc = scenario("x", "x", "t", 1.0, 0.0, 1.0).with_h2(t("t"));
    let mut parts = Vec::new();
    for (id, exact) in [
        (TheoremId::SarikayaProduct, 1.0 / 3.0),
        (TheoremId::T3Remark, 11.0 / 36.0),
    ] {
        let r = verify(id, &sc).map_err(|e| e.to_string())?;
        ensure(r.verdict == InequalityVerdict::Holds, || {
            format!("{id}: {}", r.verdict)
        })?;
        ensure((r.lhs - r.rhs).abs() <= r.error_budget, || {
            format!(
                "{id}: |lhs - rhs| = {:.2e} exceeds budget {:.2e}",
                (r.lhs - r.rhs).abs(),
                r.error_budget
            )
        })?;
        ensure(
            (r.lhs - exact).abs() <= r.error_budget && (r.rhs - exact).abs() <= r.error_budget,
            || format!("{id}: lhs {} rhs {} expected {exact}", r.lhs, r.rhs),
        )?;
        parts.push(format!("{id} |lhs-rhs| = {:.1e}", (r.lhs - r.rhs).abs()));
    }
    Ok(parts.join(", "))
}

/// Both sides for `f = g = x^k`, `h = t`, `s = 1` on `[a, b]`, from monomial
/// antiderivatives.
fn monomial_sides(id: TheoremId, k: i32, a: f64, b: f64) -> (f64, f64) {
    let len = b - a;
    let mom = |n: i32| (b.powi(n + 1) - a.powi(n + 1)) / (n + 1) as f64;
    let n = 2 * k;
    let mean_p = mom(n) / len;
    let mid_p = (0.5 * (a + b)).powi(n);
    let m = a.powi(n) + b.powi(n);
    // (1/L²)∬∫₀¹ (tx+(1-t)y)^n dt dx dy = Σ_j mom(j) mom(n-j) / ((n+1) L²)
    let triple = (0..=n).map(|j| mom(j) * mom(n - j)).sum::<f64>() / ((n + 1) as f64 * len * len);
    match id {
        // f^p g^q = x^k; weight integrals are L²/3 and L²/6
        TheoremId::T2 => (mom(k) / len, 0.5 * (a.powi(k) + b.powi(k))),
        // ∫(t² + t - t²) = ∫((1-t)² + t - t²) = 1/2
        TheoremId::T4Sum => (triple, mean_p),
        TheoremId::T5 => (triple, 0.5 * mean_p + 0.5 * mid_p),
        // 2 H(1/4) M ∫(t + 1 - t)² = M/2
        TheoremId::T6a => (mid_p, 0.5 * m),
        TheoremId::T6b => (2.0 * mid_p, mean_p + 0.5 * m),
        TheoremId::T7 => {
            let up = mom(k + 1) - a * mom(k);
            let down = b * mom(k) - mom(k + 1);
            let lhs = 2.0 * (b.powi(k) * up + a.powi(k) * down) / (len * len);
            (lhs, mean_p + 0.5 * m)
        }
        _ => unreachable!(),
    }
}

fn theorem_suite() -> Outcome {
    let ids = [
        TheoremId::T2,
        TheoremId::T4Sum,
        TheoremId::T5,
        TheoremId::T6a,
        TheoremId::T6b,
        TheoremId::T7,
    ];
    let mut failures = Vec::new();
    let mut checked = 0;
    for (f, k) in [("x^2", 2), ("x", 1)] {
        for (a, b) in [(0.0, 1.0), (1.0, 2.0)] {
            let sc = scenario(f, f, "t", 1.0, a, b);
            for id in ids {
                checked += 1;
                let r = verify(id, &sc).map_err(|e| format!("{id} f = {f} on [{a}, {b}]: {e}"))?;
                let (lhs, rhs) = monomial_sides(id, k, a, b);
                let margin = rhs - lhs;
                if r.verdict != InequalityVerdict::Holds {
                    failures.push(format!(
                        "{id} f=g={f} on [{a},{b}] {} (lhs {lhs:.6}, rhs {rhs:.6})",
                        r.verdict
                    ));
                } else if (r.margin - margin).abs() > 1e-6 {
                    failures.push(format!(
                        "{id} f=g={f} on [{a},{b}] margin {} vs {margin}",
                        r.margin
                    ));
                }
            }
        }
    }
    // named closed forms
    let sc = scenario("x", "x", "t", 1.0, 1.0, 2.0);
    let t6b = verify(TheoremId::T6b, &sc).map_err(|e| e.to_string())?;
    if (t6b.margin - 1.0 / 3.0).abs() > 1e-6 {
        failures.push(format!("T6B margin {} vs 1/3", t6b.margin));
    }
    let sc = scenario("x", "x", "t", 1.0, 0.0, 1.0);
    let t7 = verify(TheoremId::T7, &sc).map_err(|e| e.to_string())?;
    if (t7.margin - 1.0 / 6.0).abs() > 1e-6 {
        failures.push(format!("T7 margin {} vs 1/6", t7.margin));
    }
    if failures.is_empty() {
        Ok(format!(
            "{checked} cases HOLD with margins within 1e-6 of closed forms"
        ))
    } else {
        Err(format!(
            "{}/{checked} cases fail: {}",
            failures.len(),
            failures.join("; ")
        ))
    }
}

fn log_on_two_four() -> Outcome {
    let f = x("ln(x)");
    let iv = interval(2.0, 4.0);
    let plan = SamplingPlan::default();
    let mut parts = Vec::new();
    for spec in [
        ConvexityClassSpec::ordinary_convex(),
        ConvexityClassSpec::new(ClassId::HConvex, Some(t("t")), None).unwrap(),
    ] {
        let v = check_class(&f, &spec, iv, &plan).map_err(|e| e.to_string())?;
        ensure(v.status == VerdictStatus::Violated, || {
            format!("{spec}: {}", v.status)
        })?;
        let c = v
            .counterexample
            .ok_or_else(|| format!("{spec}: no counterexample"))?;
        let (px, py, pt) = (c.witness["x"], c.witness["y"], c.witness["t"]);
        // independent re-evaluation of the defining inequality
        let direct = (pt * px + (1.0 - pt) * py).ln() - (pt * px.ln() + (1.0 - pt) * py.ln());
        ensure((direct - c.violation).abs() <= 1e-12, || {
            format!(
                "{spec}: certificate {} does not re-verify ({direct})",
                c.violation
            )
        })?;
        ensure(c.violation >= 0.05, || {
            format!("{spec}: violation {}", c.violation)
        })?;
        let near = |p: f64, q: f64, tt: f64| {
            (p - 2.0).abs() <= 0.2 && (q - 4.0).abs() <= 0.2 && (tt - 0.5).abs() <= 0.2
        };
        ensure(near(px, py, pt) || near(py, px, 1.0 - pt), || {
            format!("{spec}: witness ({px}, {py}, {pt}) is not near (2, 4, 0.5)")
        })?;
        parts.push(format!(
            "{} violated by {:.4} at ({px:.3}, {py:.3}, {pt:.3})",
            spec.class(),
            c.violation
        ));
    }
    let spec = ConvexityClassSpec::hs2(t("t"), 0.5).unwrap();
    let v = check_class(&f, &spec, iv, &plan).map_err(|e| e.to_string())?;
    ensure(v.status == VerdictStatus::NoViolationFound, || {
        format!("HS2(t, 0.5): {}", v.status)
    })?;
    ensure(v.samples_checked == 33 * 33 * 33 + 20_000, || {
        format!("HS2 samples {}", v.samples_checked)
    })?;
    parts.push(format!(
        "HS2(t, 0.5) clean over {} samples",
        v.samples_checked
    ));
    Ok(parts.join("; "))
}

fn identric_bound() -> Outcome {
    let r = proposition1_check(3.0, 4.0, 1.0).map_err(|e| e.to_string())?;
    let expected = 256.0 / (27.0 * E) - 12f64.sqrt();
    ensure(r.verdict == InequalityVerdict::Violated, || {
        format!("(3,4,1): {}", r.verdict)
    })?;
    ensure(((r.lhs - r.rhs) - expected).abs() <= 1e-9, || {
        format!("(3,4,1): lhs - rhs = {} vs {expected}", r.lhs - r.rhs)
    })?;
    let hyp = r
        .hypothesis_results
        .values()
        .next()
        .ok_or("no hypothesis result attached")?;
    ensure(
        hyp.status == VerdictStatus::Violated && r.out_of_hypothesis,
        || "(3,4,1): hypothesis not flagged as violated".into(),
    )?;
    let half = proposition1_check(3.0, 4.0, 0.5).map_err(|e| e.to_string())?;
    ensure(half.verdict == InequalityVerdict::Holds, || {
        format!("(3,4,0.5): {}", half.verdict)
    })?;
    let grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let points = map_validity_region(3.0, 4.0, &grid).map_err(|e| e.to_string())?;
    ensure(margins_strictly_decreasing(&points), || {
        "sweep margins are not strictly decreasing".into()
    })?;
    Ok(format!(
        "lhs - rhs = {:.9} at s = 1 (out of hypothesis), HOLDS at s = 0.5, sweep decreasing",
        r.lhs - r.rhs
    ))
}

fn corollary_fixture() -> Outcome {
    let sc = scenario("x^2", "x^2", "t", 1.0, 0.0, 1.0);
    let r = verify(TheoremId::T1CorA, &sc).map_err(|e| e.to_string())?;
    ensure(r.verdict == InequalityVerdict::Violated, || {
        format!("{}", r.verdict)
    })?;
    ensure((r.lhs - 1.0 / 3.0).abs() <= 1e-12 && r.rhs == 0.0, || {
        format!("lhs {} rhs {}", r.lhs, r.rhs)
    })?;
    ensure(r.notes.iter().any(|n| n.contains("corollary")), || {
        "missing caveat note".into()
    })?;
    let again = verify(TheoremId::T1CorA, &sc).map_err(|e| e.to_string())?;
    ensure(again == r, || "second run differs".into())?;
    Ok(format!(
        "lhs {:.6} > rhs {}, caveat attached, repeatable",
        r.lhs, r.rhs
    ))
}

fn general_cauchy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 100_000;
    for _ in 0..n {
        let alpha: f64 = rng.gen_range(0.0..=1.0);
        let px: f64 = rng.gen_range(0.0..100.0);
        let py: f64 = rng.gen_range(0.0..100.0);
        if px == 0.0 || py == 0.0 {
            continue;
        }
        let ok = general_cauchy_check(alpha, px, py).map_err(|e| e.to_string())?;
        ensure(ok, || format!("fails at α = {alpha}, x = {px}, y = {py}"))?;
    }
    Ok(format!("{n} seeded triples satisfy the bound"))
}

fn determinism() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/paper_suite.json");
    let mut cfg = load_config(&path).map_err(|e| e.to_string())?;
    cfg.seed = 42;
    let json = |jobs: Option<usize>| -> Result<String, String> {
        let report = run(
            &cfg,
            &RunOptions {
                jobs,
                timing: false,
            },
        )
        .map_err(|e| e.to_string())?;
        render(&report, Format::Json).map_err(|e| e.to_string())
    };
    let first = json(None)?;
    let second = json(None)?;
    let serial = json(Some(1))?;
    ensure(first == second, || "two runs differ".into())?;
    ensure(first == serial, || {
        "serial run differs from concurrent run".into()
    })?;
    let report = hsconvex_cli::from_json(&first).map_err(|e| e.to_string())?;
    ensure(report.tasks.len() == 20, || {
        format!("{} tasks", report.tasks.len())
    })?;
    Ok(format!(
        "3 runs byte-identical ({} bytes, 20 tasks)",
        first.len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("quadrature vs gamma closed form", weight_integral_vs_gamma),
        ("gamma accuracy", gamma_accuracy),
        ("equality edges", equality_edges),
        ("theorem suite holds in hypothesis", theorem_suite),
        ("ln x on [2,4] class checks", log_on_two_four),
        ("identric vs geometric bound", identric_bound),
        ("corollary regression fixture", corollary_fixture),
        ("general Cauchy inequality", general_cauchy),
        ("end-to-end determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("acceptance {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
