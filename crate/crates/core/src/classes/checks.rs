use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    ClassError, ClassId, ConvexityClassSpec, Counterexample, SamplingPlan, Verdict, VerdictStatus,
    ViolationKind,
};
use crate::expr::{real_pow, Bindings, EvalError, Expr};
use crate::Interval;

fn witness(names: &[&str], values: &[f64]) -> BTreeMap<String, f64> {
    names
        .iter()
        .zip(values)
        .map(|(n, v)| (n.to_string(), *v))
        .collect()
}

fn eval_at(
    e: &Expr,
    v: f64,
    params: &Bindings,
    names: &[&str],
    point: &[f64],
) -> Result<f64, ClassError> {
    e.evaluate(v, params).map_err(|source| ClassError::Eval {
        witness: witness(names, point),
        source,
    })
}

/// Tracks the largest `lhs - rhs` above tolerance; ties keep the earliest sample.
struct Worst {
    tolerance: f64,
    found: Option<Counterexample>,
}

impl Worst {
    fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            found: None,
        }
    }

    fn consider(&mut self, kind: ViolationKind, names: &[&str], point: &[f64], lhs: f64, rhs: f64) {
        let violation = lhs - rhs;
        if violation <= self.tolerance {
            return;
        }
        if self
            .found
            .as_ref()
            .is_some_and(|c| violation <= c.violation)
        {
            return;
        }
        self.found = Some(Counterexample {
            kind,
            witness: witness(names, point),
            lhs,
            rhs,
            violation,
        });
    }
}

fn verdict(
    found: Option<Counterexample>,
    checked: usize,
    skipped: usize,
    plan: &SamplingPlan,
) -> Verdict {
    Verdict {
        status: if found.is_some() {
            VerdictStatus::Violated
        } else {
            VerdictStatus::NoViolationFound
        },
        counterexample: found,
        samples_checked: checked,
        samples_skipped: skipped,
        tolerance: plan.tolerance,
        warnings: Vec::new(),
    }
}

/// Grid points first, then `random_samples` uniform draws, for `dims` axes.
fn sample_points(dims: &[Interval], plan: &SamplingPlan) -> impl Iterator<Item = Vec<f64>> {
    let grids: Vec<Vec<f64>> = dims
        .iter()
        .map(|d| d.grid(plan.grid_points_per_axis))
        .collect();
    let n = plan.grid_points_per_axis;
    let d = dims.len();
    let grid_total = n.pow(d as u32);
    let dims = dims.to_vec();
    let grid = (0..grid_total).map(move |mut idx| {
        let mut p = vec![0.0; d];
        // last axis varies fastest
        for k in (0..d).rev() {
            p[k] = grids[k][idx % n];
            idx /= n;
        }
        p
    });
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let random = (0..plan.random_samples).map(move |_| {
        dims.iter()
            .map(|i| i.lerp(rng.gen::<f64>()))
            .collect::<Vec<_>>()
    });
    grid.chain(random)
}

fn weight(h: &Expr, t: f64, params: &Bindings) -> Result<f64, ClassError> {
    let v = eval_at(h, t, params, &["t"], &[t])?;
    if v < 0.0 {
        return Err(ClassError::NegativeWeight { t, value: v });
    }
    Ok(v)
}

fn weight_pow(h: &Expr, t: f64, s: f64, params: &Bindings) -> Result<f64, ClassError> {
    let v = weight(h, t, params)?;
    real_pow(v, s).map_err(|reason| ClassError::Eval {
        witness: witness(&["t"], &[t]),
        source: EvalError::Domain {
            reason,
            subexpression: format!("({h})^{s}"),
            operand: v,
            variable: "t".into(),
            at: t,
        },
    })
}

/// Both sides of the defining inequality of `spec` at `(x, y, t)`:
/// `lhs = f(tx + (1-t)y)` and `rhs` the class-specific bound.
pub fn defining_sides(
    f: &Expr,
    spec: &ConvexityClassSpec,
    x: f64,
    y: f64,
    t: f64,
) -> Result<(f64, f64), ClassError> {
    let params = spec.bindings();
    let names = ["x", "y", "t"];
    let point = [x, y, t];
    let z = t * x + (1.0 - t) * y;
    let lhs = eval_at(f, z, &params, &names, &point)?;
    let fx = eval_at(f, x, &params, &names, &point)?;
    let fy = eval_at(f, y, &params, &names, &point)?;
    let missing = |param| ClassError::MissingParameter {
        class: spec.class(),
        param,
    };
    let rhs = match spec.class() {
        ClassId::Hs1 => {
            let h = spec.h().ok_or_else(|| missing("h"))?;
            let s = spec.s().ok_or_else(|| missing("s"))?;
            let w = weight_pow(h, t, s, &params)?;
            w * fx + (1.0 - w) * fy
        }
        ClassId::Hs2 => {
            let h = spec.h().ok_or_else(|| missing("h"))?;
            let s = spec.s().ok_or_else(|| missing("s"))?;
            weight_pow(h, t, s, &params)? * fx + weight_pow(h, 1.0 - t, s, &params)? * fy
        }
        ClassId::HConvex => {
            let h = spec.h().ok_or_else(|| missing("h"))?;
            weight(h, t, &params)? * fx + weight(h, 1.0 - t, &params)? * fy
        }
        ClassId::SConvex2 => {
            let s = spec.s().ok_or_else(|| missing("s"))?;
            t.powf(s) * fx + (1.0 - t).powf(s) * fy
        }
        ClassId::PFunction => fx + fy,
        ClassId::GodunovaLevin => fx / t + fy / (1.0 - t),
        ClassId::OrdinaryConvex => t * fx + (1.0 - t) * fy,
    };
    Ok((lhs, rhs))
}

/// Searches for a violation of `spec`'s defining inequality for `f` on `interval`.
///
/// Samples `(x, y, t)` over `interval² × [0, 1]` (`t` inset for open-interval
/// classes). Classes that require `f >= 0` also check nonnegativity at every
/// sampled `x` and `y`. The returned certificate is the largest violation
/// found; a defining-inequality violation takes precedence over a
/// nonnegativity one.
pub fn check_class(
    f: &Expr,
    spec: &ConvexityClassSpec,
    interval: Interval,
    plan: &SamplingPlan,
) -> Result<Verdict, ClassError> {
    plan.validate()?;
    let params = spec.bindings();
    let t_range = if spec.class().open_t() {
        Interval::new(plan.t_open_inset, 1.0 - plan.t_open_inset)
            .map_err(|e| ClassError::InvalidPlan(e.to_string()))?
    } else {
        Interval::unit()
    };
    let mut defining = Worst::new(plan.tolerance);
    let mut sign = Worst::new(plan.tolerance);
    let mut checked = 0;
    for p in sample_points(&[interval, interval, t_range], plan) {
        let (x, y, t) = (p[0], p[1], p[2]);
        let (lhs, rhs) = defining_sides(f, spec, x, y, t)?;
        defining.consider(ViolationKind::Defining, &["x", "y", "t"], &p, lhs, rhs);
        if spec.class().requires_nonnegative() {
            for v in [x, y] {
                let fv = eval_at(f, v, &params, &["x"], &[v])?;
                sign.consider(ViolationKind::Nonnegativity, &["x"], &[v], 0.0, fv);
            }
        }
        checked += 1;
    }
    let mut out = verdict(defining.found.or(sign.found), checked, 0, plan);
    if matches!(spec.class(), ClassId::Hs1 | ClassId::Hs2) && interval.a() < 0.0 {
        out.warnings.push(format!(
            "{} is defined for functions on [0, inf); interval {interval} extends below 0",
            spec.class()
        ));
    }
    Ok(out)
}

/// Direction of the multiplicativity property being tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicativity {
    /// `h(xy) >= h(x) h(y)`
    Super,
    /// `h(xy) <= h(x) h(y)`
    Sub,
    /// `h(xy) == h(x) h(y)`, checked as both of the above.
    Exact,
}

fn check_pairs<F>(
    h: &Expr,
    params: &Bindings,
    domain: Interval,
    plan: &SamplingPlan,
    combine: fn(f64, f64) -> f64,
    mut sides: F,
) -> Result<Verdict, ClassError>
where
    F: FnMut(f64, f64, f64) -> Vec<(f64, f64)>,
{
    plan.validate()?;
    let names = ["x", "y"];
    let mut worst = Worst::new(plan.tolerance);
    let (mut checked, mut skipped) = (0, 0);
    for p in sample_points(&[domain, domain], plan) {
        let (x, y) = (p[0], p[1]);
        let z = combine(x, y);
        if !domain.contains(z) {
            skipped += 1;
            continue;
        }
        let hx = eval_at(h, x, params, &names, &p)?;
        let hy = eval_at(h, y, params, &names, &p)?;
        let hz = eval_at(h, z, params, &names, &p)?;
        for (lhs, rhs) in sides(hx, hy, hz) {
            worst.consider(ViolationKind::Defining, &names, &p, lhs, rhs);
        }
        checked += 1;
    }
    Ok(verdict(worst.found, checked, skipped, plan))
}

/// `h(xy) >= h(x) h(y)` over sampled pairs; pairs with `xy` outside `domain` are skipped.
pub fn check_supermultiplicative(
    h: &Expr,
    params: &Bindings,
    domain: Interval,
    plan: &SamplingPlan,
) -> Result<Verdict, ClassError> {
    check_multiplicativity(h, params, domain, plan, Multiplicativity::Super)
}

pub fn check_multiplicativity(
    h: &Expr,
    params: &Bindings,
    domain: Interval,
    plan: &SamplingPlan,
    mode: Multiplicativity,
) -> Result<Verdict, ClassError> {
    check_pairs(
        h,
        params,
        domain,
        plan,
        |x, y| x * y,
        |hx, hy, hxy| {
            let prod = hx * hy;
            match mode {
                Multiplicativity::Super => vec![(prod, hxy)],
                Multiplicativity::Sub => vec![(hxy, prod)],
                Multiplicativity::Exact => vec![(prod, hxy), (hxy, prod)],
            }
        },
    )
}

/// `h(x + y) >= h(x) + h(y)` over sampled pairs; pairs with `x + y` outside `domain` are skipped.
pub fn check_superadditive(
    h: &Expr,
    params: &Bindings,
    domain: Interval,
    plan: &SamplingPlan,
) -> Result<Verdict, ClassError> {
    check_pairs(
        h,
        params,
        domain,
        plan,
        |x, y| x + y,
        |hx, hy, hsum| vec![(hx + hy, hsum)],
    )
}

/// `(f(x) - f(y)) (g(x) - g(y)) >= 0`, encoded as `lhs = 0`, `rhs = product`.
pub fn check_similarly_ordered(
    f: &Expr,
    g: &Expr,
    params: &Bindings,
    interval: Interval,
    plan: &SamplingPlan,
) -> Result<Verdict, ClassError> {
    plan.validate()?;
    let names = ["x", "y"];
    let mut worst = Worst::new(plan.tolerance);
    let mut checked = 0;
    for p in sample_points(&[interval, interval], plan) {
        let (x, y) = (p[0], p[1]);
        let fx = eval_at(f, x, params, &names, &p)?;
        let fy = eval_at(f, y, params, &names, &p)?;
        let gx = eval_at(g, x, params, &names, &p)?;
        let gy = eval_at(g, y, params, &names, &p)?;
        worst.consider(
            ViolationKind::Defining,
            &names,
            &p,
            0.0,
            (fx - fy) * (gx - gy),
        );
        checked += 1;
    }
    Ok(verdict(worst.found, checked, 0, plan))
}

/// `e(v) >= 0` on grid and random points of `domain`.
pub fn check_nonnegative(
    e: &Expr,
    params: &Bindings,
    domain: Interval,
    plan: &SamplingPlan,
) -> Result<Verdict, ClassError> {
    plan.validate()?;
    let name = e.free_variable().to_string();
    let names = [name.as_str()];
    let mut worst = Worst::new(plan.tolerance);
    let mut checked = 0;
    for p in sample_points(&[domain], plan) {
        let v = eval_at(e, p[0], params, &names, &p)?;
        worst.consider(ViolationKind::Nonnegativity, &names, &p, 0.0, v);
        checked += 1;
    }
    Ok(verdict(worst.found, checked, 0, plan))
}
