//! Geometric and identric means, and a checker for the bound
//! `I(a, b) <= G(a, b)^(2/(s+1))` on `2 < a < b`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{
    check_class, validate_exponent, ClassError, ConvexityClassSpec, SamplingPlan,
};
use crate::expr::{Expr, Func, Node};
use crate::theorems::{Estimate, InequalityReport, InequalityVerdict, Normalization, Sides};
use crate::Interval;

/// Name used in reports for the identric/geometric bound.
pub const PROPOSITION: &str = "PROPOSITION_1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Class(#[from] ClassError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MeanKind {
    Geometric,
    Identric,
    /// `G(a, b)^p`
    GeneralizedGeometric {
        p: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    #[serde(flatten)]
    pub kind: MeanKind,
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

impl MeanValue {
    pub fn compute(kind: MeanKind, a: f64, b: f64) -> Result<Self, MeanError> {
        let value = match kind {
            MeanKind::Geometric => geometric_mean(a, b)?,
            MeanKind::Identric => identric_mean(a, b)?,
            MeanKind::GeneralizedGeometric { p } => geometric_mean(a, b)?.powf(p),
        };
        Ok(Self { kind, a, b, value })
    }
}

/// `√(ab)` for `a, b >= 0`.
pub fn geometric_mean(a: f64, b: f64) -> Result<f64, MeanError> {
    if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(MeanError::Domain(format!(
            "geometric mean needs finite nonnegative arguments, got {a} and {b}"
        )));
    }
    Ok((a * b).sqrt())
}

/// `(1/e)(b^b / a^a)^(1/(b-a))`, and `a` when `a == b`.
///
/// Evaluated as `ln I = ln a + (1+u) ln(1+u)/u - 1` with `u = (b-a)/a` and
/// `a <= b`, which neither overflows for large arguments nor cancels as
/// `b` approaches `a`.
pub fn identric_mean(a: f64, b: f64) -> Result<f64, MeanError> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(MeanError::Domain(format!(
            "identric mean needs finite positive arguments, got {a} and {b}"
        )));
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo == hi {
        return Ok(lo);
    }
    let u = (hi - lo) / lo;
    Ok((lo.ln() + (1.0 + u) * u.ln_1p() / u - 1.0).exp())
}

fn check_range(a: f64, b: f64) -> Result<(), MeanError> {
    if !(2.0 < a && a < b && b.is_finite()) {
        return Err(MeanError::Domain(format!(
            "need 2 < a < b < inf, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

fn sides(a: f64, b: f64, s: f64) -> Result<Sides, MeanError> {
    check_range(a, b)?;
    validate_exponent(s)?;
    let lhs = identric_mean(a, b)?;
    let rhs = geometric_mean(a, b)?.powf(2.0 / (s + 1.0));
    Ok(Sides {
        lhs: Estimate::exact(lhs),
        rhs: Estimate::exact(rhs),
        converged: true,
        inset: false,
        chain: None,
    })
}

/// Checks `I(a, b) <= G(a, b)^(2/(s+1))`, attaching the sampled check that
/// `ln x` is (h-s)-convex of the first kind on `[a, b]` with `h(t) = t`.
pub fn proposition1_check(a: f64, b: f64, s: f64) -> Result<InequalityReport, MeanError> {
    proposition1_check_with(a, b, s, &SamplingPlan::default())
}

pub fn proposition1_check_with(
    a: f64,
    b: f64,
    s: f64,
    plan: &SamplingPlan,
) -> Result<InequalityReport, MeanError> {
    let sides = sides(a, b, s)?;
    let ln = Expr::from_node(Node::call(Func::Ln, Node::Var), "x");
    let spec = ConvexityClassSpec::hs1(Expr::identity("t"), s)?;
    let interval = Interval::new(a, b).map_err(|e| MeanError::Domain(e.to_string()))?;
    let verdict = check_class(&ln, &spec, interval, plan)?;
    let hypotheses = BTreeMap::from([("ln(x) in HS1(t, s)".to_string(), verdict)]);
    Ok(
        InequalityReport::from_sides(PROPOSITION, &sides, Normalization::Statement)
            .with_hypotheses(hypotheses),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityPoint {
    pub s: f64,
    pub verdict: InequalityVerdict,
    pub margin: f64,
}

/// Sweeps the bound over `s_grid` in the given order. Hypotheses are not checked.
pub fn map_validity_region(
    a: f64,
    b: f64,
    s_grid: &[f64],
) -> Result<Vec<ValidityPoint>, MeanError> {
    check_range(a, b)?;
    s_grid
        .iter()
        .map(|&s| {
            let r = InequalityReport::from_sides(
                PROPOSITION,
                &sides(a, b, s)?,
                Normalization::Statement,
            );
            Ok(ValidityPoint {
                s,
                verdict: r.verdict,
                margin: r.margin,
            })
        })
        .collect()
}

/// Whether the margins strictly decrease as `s` increases.
pub fn margins_strictly_decreasing(points: &[ValidityPoint]) -> bool {
    let mut sorted = points.to_vec();
    sorted.sort_by(|p, q| p.s.total_cmp(&q.s));
    sorted
        .windows(2)
        .all(|w| w[1].s > w[0].s && w[1].margin < w[0].margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(got: f64, want: f64, tol: f64) {
        assert!((got - want).abs() <= tol, "got {got}, want {want}");
    }

    #[test]
    fn geometric_examples() {
        assert_eq!(geometric_mean(2.0, 8.0).unwrap(), 4.0);
        close(geometric_mean(3.0, 4.0).unwrap(), 3.464_102, 1e-6);
        assert_eq!(geometric_mean(0.0, 5.0).unwrap(), 0.0);
        assert!(geometric_mean(-1.0, 5.0).is_err());
    }

    #[test]
    fn identric_examples() {
        assert_eq!(identric_mean(3.0, 3.0).unwrap(), 3.0);
        close(
            identric_mean(1.0, E).unwrap(),
            E.powf(1.0 / (E - 1.0)),
            1e-14,
        );
        close(identric_mean(1.0, E).unwrap(), 1.789_57, 1e-5);
        close(identric_mean(3.0, 4.0).unwrap(), 256.0 / (27.0 * E), 1e-14);
        assert!(identric_mean(0.0, 1.0).is_err());
    }

    #[test]
    fn identric_agrees_with_the_direct_formula() {
        for (a, b) in [(2.5f64, 7.0f64), (10.0, 11.0), (0.1, 30.0)] {
            let direct = (b.powf(b) / a.powf(a)).powf(1.0 / (b - a)) / E;
            close(identric_mean(a, b).unwrap(), direct, 1e-12 * direct);
        }
    }

    #[test]
    fn identric_survives_large_arguments() {
        // b^b overflows here
        let v = identric_mean(500.0, 700.0).unwrap();
        assert!(v.is_finite() && v > 500.0 && v < 700.0);
    }

    #[test]
    fn generalized_geometric() {
        let m = MeanValue::compute(MeanKind::GeneralizedGeometric { p: 2.0 }, 3.0, 4.0).unwrap();
        close(m.value, 12.0, 1e-12);
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("GENERALIZED_GEOMETRIC"), "{json}");
        assert_eq!(serde_json::from_str::<MeanValue>(&json).unwrap(), m);
    }

    #[test]
    fn bound_fails_at_s_one() {
        let r = proposition1_check(3.0, 4.0, 1.0).unwrap();
        assert_eq!(r.verdict, InequalityVerdict::Violated);
        close(r.lhs, 3.488_042, 1e-6);
        close(r.rhs, 3.464_102, 1e-6);
        close(r.lhs - r.rhs, 256.0 / (27.0 * E) - 12f64.sqrt(), 1e-12);
        close(r.margin, -0.023_940, 1e-6);
        assert!(r.hypothesis_results["ln(x) in HS1(t, s)"].is_violated());
        assert!(r.out_of_hypothesis);
    }

    #[test]
    fn bound_holds_at_s_half() {
        let r = proposition1_check(3.0, 4.0, 0.5).unwrap();
        assert_eq!(r.verdict, InequalityVerdict::Holds);
        close(r.rhs, 12f64.sqrt().powf(4.0 / 3.0), 1e-12);
        close(r.rhs, 5.2415, 1e-4);
    }

    #[test]
    fn bound_near_the_diagonal_is_within_budget() {
        let r = proposition1_check(3.0, 3.0 + 1e-9, 1.0).unwrap();
        close(r.lhs, 3.0, 1e-8);
        assert!(r.margin.abs() <= r.error_budget);
        assert_ne!(r.verdict, InequalityVerdict::Violated);
    }

    #[test]
    fn preconditions() {
        assert!(proposition1_check(2.0, 4.0, 1.0).is_err());
        assert!(proposition1_check(4.0, 3.0, 1.0).is_err());
        assert!(proposition1_check(3.0, 4.0, 0.0).is_err());
        assert!(proposition1_check(3.0, 4.0, 1.1).is_err());
        assert!(map_validity_region(1.0, 4.0, &[]).is_err());
    }

    #[test]
    fn sweep() {
        let grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
        let points = map_validity_region(3.0, 4.0, &grid).unwrap();
        assert_eq!(points.len(), 10);
        assert!(margins_strictly_decreasing(&points));
        assert_eq!(points[9].verdict, InequalityVerdict::Violated);
        assert_eq!(points[0].verdict, InequalityVerdict::Holds);

        let one = map_validity_region(3.0, 4.0, &[1.0]).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].verdict, InequalityVerdict::Violated);
        assert!(map_validity_region(3.0, 4.0, &[]).unwrap().is_empty());
    }
}
