//! Iterated application of the 1D engine over a box.

use std::cell::Cell;

use super::kronrod::{adaptive, Raw};
use super::{QuadError, QuadratureConfig, QuadratureResult};
use crate::Interval;

type PointFn<'a> = dyn FnMut(&[f64]) -> Result<f64, crate::expr::EvalError> + 'a;

#[derive(Default)]
struct Stats {
    evaluations: usize,
    inset: bool,
}

pub(crate) fn integrate(
    f: &mut PointFn<'_>,
    dims: &[Interval],
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadError> {
    let mut stats = Stats::default();
    let mut prefix = Vec::with_capacity(dims.len());
    let raw = level(f, dims, &mut prefix, tol, cfg, &mut stats)?;
    Ok(QuadratureResult {
        value: raw.value,
        abs_error_estimate: raw.err,
        evaluations: stats.evaluations,
        converged: raw.converged && raw.err <= tol,
        endpoint_inset: stats.inset,
    })
}

fn leaf_eval(f: &mut PointFn<'_>, prefix: &mut Vec<f64>, x: f64) -> Result<f64, QuadError> {
    prefix.push(x);
    let r = f(prefix);
    let out = match r {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(QuadError::NonFinite {
            point: prefix.clone(),
            value: v,
        }),
        Err(source) => Err(QuadError::Integrand {
            point: prefix.clone(),
            source,
        }),
    };
    prefix.pop();
    out
}

/// Integrates over `dims[0]` with the remaining dimensions integrated inside.
///
/// The outer sweep gets half the tolerance; each inner integral gets the other
/// half divided by the outer length, so the combined estimate
/// `outer_err + len * max_inner_err` stays within `tol` when everything converges.
fn level(
    f: &mut PointFn<'_>,
    dims: &[Interval],
    prefix: &mut Vec<f64>,
    tol: f64,
    cfg: &QuadratureConfig,
    stats: &mut Stats,
) -> Result<Raw, QuadError> {
    let span = dims[0];
    let rest = &dims[1..];
    let inner_tol = tol / (2.0 * span.length());
    let outer_tol = if rest.is_empty() { tol } else { tol / 2.0 };

    let inner_max_err = Cell::new(0.0_f64);
    let inner_converged = Cell::new(true);

    let mut point = |x: f64, stats: &mut Stats| -> Result<f64, QuadError> {
        if rest.is_empty() {
            stats.evaluations += 1;
            leaf_eval(f, prefix, x)
        } else {
            prefix.push(x);
            let inner = level(f, rest, prefix, inner_tol, cfg, stats);
            prefix.pop();
            let inner = inner?;
            inner_max_err.set(inner_max_err.get().max(inner.err));
            inner_converged.set(inner_converged.get() && inner.converged);
            Ok(inner.value)
        }
    };

    // Move an endpoint inward when the integrand cannot be evaluated there.
    let shrink = cfg.singularity_shrink * span.length();
    let mut a = span.a();
    let mut b = span.b();
    if point(a, stats).is_err() {
        a += shrink;
        stats.inset = true;
    }
    if point(b, stats).is_err() {
        b -= shrink;
        stats.inset = true;
    }
    // Probe failures are not integration failures; forget their bookkeeping.
    inner_max_err.set(0.0);
    inner_converged.set(true);

    let mut outer_stats = Stats::default();
    let raw = adaptive(
        |x| point(x, &mut outer_stats),
        a,
        b,
        outer_tol,
        cfg.max_subdivisions,
    )?;
    stats.evaluations += outer_stats.evaluations;
    stats.inset |= outer_stats.inset;

    let err = raw.err + span.length() * inner_max_err.get();
    Ok(Raw {
        value: raw.value,
        err,
        evaluations: raw.evaluations,
        converged: raw.converged && inner_converged.get() && err <= tol,
    })
}
