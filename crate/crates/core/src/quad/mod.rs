//! Deterministic adaptive quadrature in one to three dimensions.
//!
//! The 1D engine uses the 7-point Gauss / 15-point Kronrod embedded pair on
//! each panel and always bisects the panel with the largest error estimate
//! (ties go to the leftmost panel). Multi-dimensional integrals are computed
//! by iterating the 1D engine, innermost coordinate last.
//!
//! Integrands are fallible: a domain error raised by the integrand is
//! propagated as [`QuadError::Integrand`] together with the sample point.

mod gamma;
mod kronrod;
mod montecarlo;
mod nested;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::EvalError;
use crate::Interval;

pub use gamma::{gamma, ln_gamma, GammaError};
pub use montecarlo::StratifiedMonteCarlo;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("integrand failed at {point:?}: {source}")]
    Integrand { point: Vec<f64>, source: EvalError },
    #[error("integrand returned non-finite value {value} at {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },
    #[error("invalid quadrature configuration: {0}")]
    Config(String),
}

/// Tolerances and limits for the adaptive engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub abs_tol_1d: f64,
    pub abs_tol_2d: f64,
    pub abs_tol_3d: f64,
    /// Panel budget for each one-dimensional sweep.
    pub max_subdivisions: usize,
    /// Relative endpoint inset used when the integrand is undefined at an endpoint.
    pub singularity_shrink: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol_1d: 1e-10,
            abs_tol_2d: 1e-8,
            abs_tol_3d: 1e-7,
            max_subdivisions: 2000,
            singularity_shrink: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), QuadError> {
        for (name, tol) in [
            ("abs_tol_1d", self.abs_tol_1d),
            ("abs_tol_2d", self.abs_tol_2d),
            ("abs_tol_3d", self.abs_tol_3d),
        ] {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(QuadError::Config(format!(
                    "{name} must be positive, got {tol}"
                )));
            }
        }
        if self.max_subdivisions == 0 {
            return Err(QuadError::Config(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.singularity_shrink > 0.0 && self.singularity_shrink < 1e-6) {
            return Err(QuadError::Config(format!(
                "singularity_shrink must lie in (0, 1e-6), got {}",
                self.singularity_shrink
            )));
        }
        Ok(())
    }
}

/// Outcome of one integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// True when at least one endpoint was moved inward because the integrand
    /// could not be evaluated there.
    pub endpoint_inset: bool,
}

/// Integrates `integrand` over `interval` to `cfg.abs_tol_1d`.
///
/// Exhausting the panel budget is not an error: the best estimate is
/// returned with `converged == false`.
pub fn integrate_1d<F>(
    mut integrand: F,
    interval: Interval,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64) -> Result<f64, EvalError>,
{
    cfg.validate()?;
    nested::integrate(
        &mut |p: &[f64]| integrand(p[0]),
        &[interval],
        cfg.abs_tol_1d,
        cfg,
    )
}

/// Iterated 2D integral; `y` is the inner coordinate.
pub fn integrate_2d<F>(
    mut integrand: F,
    x: Interval,
    y: Interval,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64, f64) -> Result<f64, EvalError>,
{
    cfg.validate()?;
    nested::integrate(
        &mut |p: &[f64]| integrand(p[0], p[1]),
        &[x, y],
        cfg.abs_tol_2d,
        cfg,
    )
}

/// Iterated 3D integral; `z` is the innermost coordinate.
pub fn integrate_3d<F>(
    mut integrand: F,
    x: Interval,
    y: Interval,
    z: Interval,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, QuadError>
where
    F: FnMut(f64, f64, f64) -> Result<f64, EvalError>,
{
    cfg.validate()?;
    nested::integrate(
        &mut |p: &[f64]| integrand(p[0], p[1], p[2]),
        &[x, y, z],
        cfg.abs_tol_3d,
        cfg,
    )
}

/// A strategy for computing the definite integrals a verification needs.
///
/// [`Adaptive`] is the verdict engine; [`StratifiedMonteCarlo`] is an
/// independent estimator for sanity checks, whose `abs_error_estimate` is a
/// standard error.
pub trait Integrator {
    fn integrate_1d(
        &self,
        f: &mut dyn FnMut(f64) -> Result<f64, EvalError>,
        x: Interval,
    ) -> Result<QuadratureResult, QuadError>;

    fn integrate_2d(
        &self,
        f: &mut dyn FnMut(f64, f64) -> Result<f64, EvalError>,
        x: Interval,
        y: Interval,
    ) -> Result<QuadratureResult, QuadError>;

    fn integrate_3d(
        &self,
        f: &mut dyn FnMut(f64, f64, f64) -> Result<f64, EvalError>,
        x: Interval,
        y: Interval,
        z: Interval,
    ) -> Result<QuadratureResult, QuadError>;
}

/// The adaptive engine behind the [`Integrator`] interface.
#[derive(Debug, Clone, Copy, Default)]
pub struct Adaptive(pub QuadratureConfig);

impl Integrator for Adaptive {
    fn integrate_1d(
        &self,
        f: &mut dyn FnMut(f64) -> Result<f64, EvalError>,
        x: Interval,
    ) -> Result<QuadratureResult, QuadError> {
        integrate_1d(f, x, &self.0)
    }

    fn integrate_2d(
        &self,
        f: &mut dyn FnMut(f64, f64) -> Result<f64, EvalError>,
        x: Interval,
        y: Interval,
    ) -> Result<QuadratureResult, QuadError> {
        integrate_2d(f, x, y, &self.0)
    }

    fn integrate_3d(
        &self,
        f: &mut dyn FnMut(f64, f64, f64) -> Result<f64, EvalError>,
        x: Interval,
        y: Interval,
        z: Interval,
    ) -> Result<QuadratureResult, QuadError> {
        integrate_3d(f, x, y, z, &self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::unit()
    }

    #[test]
    fn linear_on_unit_interval() {
        let r = integrate_1d(Ok, unit(), &QuadratureConfig::default()).unwrap();
        assert!((r.value - 0.5).abs() <= 1e-12);
        assert!(r.converged);
        assert!(r.abs_error_estimate <= 1e-10);
    }

    #[test]
    fn log_on_two_four() {
        // antiderivative x ln x - x
        let exact = 6.0 * std::f64::consts::LN_2 - 2.0;
        let r = integrate_1d(
            |x: f64| Ok(x.ln()),
            Interval::new(2.0, 4.0).unwrap(),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((r.value - exact).abs() < 1e-12, "{} vs {exact}", r.value);
        assert!((exact - 2.158883083).abs() < 1e-9);
    }

    #[test]
    fn squared_weight_sum_at_s_one_is_one() {
        let s = 1.0;
        let r = integrate_1d(
            |t: f64| Ok((t.powf(s) + (1.0 - t).powf(s)).powi(2)),
            unit(),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn two_dimensional_examples() {
        let cfg = QuadratureConfig::default();
        let one = integrate_2d(|_, _| Ok(1.0), unit(), unit(), &cfg).unwrap();
        assert!((one.value - 1.0).abs() < 1e-12);
        let sep = integrate_2d(|x, y| Ok(2.0 * x * y), unit(), unit(), &cfg).unwrap();
        assert!((sep.value - 0.5).abs() < 1e-12);
        let sum = integrate_2d(|x, y| Ok(x + y), unit(), unit(), &cfg).unwrap();
        assert!((sum.value - 1.0).abs() < 1e-12);
        assert!(sum.converged);
    }

    #[test]
    fn three_dimensional_examples() {
        let cfg = QuadratureConfig::default();
        let one = integrate_3d(|_, _, _| Ok(1.0), unit(), unit(), unit(), &cfg).unwrap();
        assert!((one.value - 1.0).abs() < 1e-12);
        // 1/9 + 1/12 + 1/9
        let mixed = integrate_3d(
            |x, y, t| Ok((t * x + (1.0 - t) * y).powi(2)),
            unit(),
            unit(),
            unit(),
            &cfg,
        )
        .unwrap();
        assert!((mixed.value - 11.0 / 36.0).abs() < 1e-12);
        let tiny = Interval::new(0.0, 1e-9).unwrap();
        let zero = integrate_3d(|_, _, _| Ok(0.0), tiny, tiny, unit(), &cfg).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(zero.converged);
    }

    #[test]
    fn integrand_error_carries_location() {
        let err = integrate_1d(
            |x| {
                if x > 0.5 {
                    Err(EvalError::UnboundParameter { name: "s".into() })
                } else {
                    Ok(x)
                }
            },
            unit(),
            &QuadratureConfig::default(),
        )
        .unwrap_err();
        match err {
            QuadError::Integrand { point, .. } => assert!(point[0] > 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate_1d(|_| Ok(f64::NAN), unit(), &QuadratureConfig::default());
        assert!(matches!(err, Err(QuadError::NonFinite { .. })));
    }

    #[test]
    fn endpoint_singularity_is_inset() {
        // 1/sqrt(t) is undefined at 0 but integrable: exact value 2.
        let r = integrate_1d(
            |t: f64| {
                if t == 0.0 {
                    Err(EvalError::UnboundParameter {
                        name: "pole".into(),
                    })
                } else {
                    Ok(1.0 / t.sqrt())
                }
            },
            unit(),
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!(r.endpoint_inset);
        assert!((r.value - 2.0).abs() < 1e-5, "{}", r.value);
    }

    #[test]
    fn budget_exhaustion_is_not_an_error() {
        let cfg = QuadratureConfig {
            max_subdivisions: 3,
            abs_tol_1d: 1e-15,
            ..QuadratureConfig::default()
        };
        let r = integrate_1d(|t: f64| Ok(t.sqrt()), unit(), &cfg).unwrap();
        assert!(!r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn config_validation() {
        let bad = QuadratureConfig {
            singularity_shrink: 1e-3,
            ..QuadratureConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig {
            abs_tol_2d: 0.0,
            ..QuadratureConfig::default()
        };
        assert!(integrate_2d(|_, _| Ok(1.0), unit(), unit(), &bad).is_err());
    }
}
