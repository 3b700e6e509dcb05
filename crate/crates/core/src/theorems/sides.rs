use std::cell::Cell;
use std::f64::consts::PI;

use super::{EndpointProducts, Estimate, Normalization, Scenario, TheoremError, TheoremId};
use crate::expr::{real_pow, Bindings, EvalError, Expr};
use crate::quad::{gamma, Adaptive, Integrator, QuadError, QuadratureResult};
use crate::Interval;

/// Both sides of one inequality, `lhs <= rhs` being the claim.
#[derive(Debug, Clone, PartialEq)]
pub struct Sides {
    pub lhs: Estimate,
    pub rhs: Estimate,
    /// Every integral reached its tolerance.
    pub converged: bool,
    /// Some integral had an endpoint moved inward.
    pub inset: bool,
    /// All members of a chained inequality, when there are more than two.
    pub chain: Option<Vec<f64>>,
}

/// Both sides of `id` for `sc` as printed in the statement (or per the
/// scenario's normalization), integrated adaptively.
pub fn evaluate_sides(id: TheoremId, sc: &Scenario) -> Result<Sides, TheoremError> {
    evaluate_sides_with(id, sc, sc.normalization, &Adaptive(sc.quad))
}

/// `∫₀¹ (t^s + (1-t)^s)² dt = 2/(1+2s) + √π 2^(-2s) Γ(1+s)/Γ(3/2+s)`.
pub fn weight_square_integral(s: f64) -> Result<f64, TheoremError> {
    let ratio = gamma(1.0 + s)? / gamma(1.5 + s)?;
    Ok(2.0 / (1.0 + 2.0 * s) + PI.sqrt() * 2f64.powf(-2.0 * s) * ratio)
}

struct Ctx<'a> {
    sc: &'a Scenario,
    integ: &'a dyn Integrator,
    params: Bindings,
    a: f64,
    b: f64,
    len: f64,
    converged: Cell<bool>,
    inset: Cell<bool>,
}

fn pow_err(base: f64, exponent: f64, label: &str, var: &str, at: f64) -> Result<f64, EvalError> {
    real_pow(base, exponent).map_err(|reason| EvalError::Domain {
        reason,
        subexpression: label.to_string(),
        operand: base,
        variable: var.to_string(),
        at,
    })
}

impl<'a> Ctx<'a> {
    fn new(sc: &'a Scenario, integ: &'a dyn Integrator) -> Self {
        Self {
            sc,
            integ,
            params: sc.bindings(),
            a: sc.interval.a(),
            b: sc.interval.b(),
            len: sc.interval.length(),
            converged: Cell::new(true),
            inset: Cell::new(false),
        }
    }

    fn f(&self, x: f64) -> Result<f64, EvalError> {
        self.sc.f.evaluate(x, &self.params)
    }

    fn g(&self, x: f64) -> Result<f64, EvalError> {
        self.sc.g().evaluate(x, &self.params)
    }

    fn p(&self, x: f64) -> Result<f64, EvalError> {
        Ok(self.f(x)? * self.g(x)?)
    }

    fn raw(e: &Expr, u: f64, params: &Bindings) -> Result<f64, EvalError> {
        e.evaluate(u, params)
    }

    /// `h(u)^s`
    fn hs(&self, u: f64) -> Result<f64, EvalError> {
        let v = Self::raw(&self.sc.h, u, &self.params)?;
        pow_err(v, self.sc.s, "h^s", self.sc.h.free_variable(), u)
    }

    fn value(&self, what: &str, r: Result<f64, EvalError>) -> Result<Estimate, TheoremError> {
        r.map(Estimate::exact).map_err(|source| TheoremError::Eval {
            what: what.to_string(),
            source,
        })
    }

    fn record(
        &self,
        what: &str,
        r: Result<QuadratureResult, QuadError>,
    ) -> Result<Estimate, TheoremError> {
        let r = r.map_err(|source| TheoremError::Quad {
            what: what.to_string(),
            source,
        })?;
        self.converged.set(self.converged.get() && r.converged);
        self.inset.set(self.inset.get() || r.endpoint_inset);
        Ok(Estimate::new(r.value, r.abs_error_estimate))
    }

    fn int(
        &self,
        what: &str,
        over: Interval,
        mut f: impl FnMut(f64) -> Result<f64, EvalError>,
    ) -> Result<Estimate, TheoremError> {
        self.record(what, self.integ.integrate_1d(&mut f, over))
    }

    /// Integral over `[0, 1]` in the weight variable.
    fn int_t(
        &self,
        what: &str,
        f: impl FnMut(f64) -> Result<f64, EvalError>,
    ) -> Result<Estimate, TheoremError> {
        self.int(what, Interval::unit(), f)
    }

    fn int_x(
        &self,
        what: &str,
        f: impl FnMut(f64) -> Result<f64, EvalError>,
    ) -> Result<Estimate, TheoremError> {
        self.int(what, self.sc.interval, f)
    }

    fn endpoints(&self) -> Result<(f64, f64, f64, f64), TheoremError> {
        let (a, b) = (self.a, self.b);
        Ok((
            self.value("f(a)", self.f(a))?.value,
            self.value("f(b)", self.f(b))?.value,
            self.value("g(a)", self.g(a))?.value,
            self.value("g(b)", self.g(b))?.value,
        ))
    }

    fn products(&self) -> Result<EndpointProducts, TheoremError> {
        let (fa, fb, ga, gb) = self.endpoints()?;
        Ok(EndpointProducts::new(fa, fb, ga, gb))
    }

    fn weight(&self, u: f64) -> Result<Estimate, TheoremError> {
        self.value(&format!("h^s({u})"), self.hs(u))
    }

    /// `P(m) = f(m) g(m)` at the midpoint.
    fn mid_product(&self) -> Result<Estimate, TheoremError> {
        let m = 0.5 * (self.a + self.b);
        self.value("f(m)g(m)", self.p(m))
    }

    fn int_product(&self) -> Result<Estimate, TheoremError> {
        self.int_x("∫fg", |x| self.p(x))
    }

    /// `∭ f(z) g(z) dt dx dy` with `z = tx + (1-t)y`, `t` innermost.
    fn triple(&self) -> Result<Estimate, TheoremError> {
        let i = self.sc.interval;
        let mut k = |x: f64, y: f64, t: f64| self.p(t * x + (1.0 - t) * y);
        self.record(
            "∭fg(tx+(1-t)y)",
            self.integ.integrate_3d(&mut k, i, i, Interval::unit()),
        )
    }

    /// `∬ [f(y)g(x) + f(x)g(y)] dx dy`
    fn double_cross(&self) -> Result<Estimate, TheoremError> {
        let i = self.sc.interval;
        let mut k = |x: f64, y: f64| Ok(self.f(y)? * self.g(x)? + self.f(x)? * self.g(y)?);
        self.record("∬N(x,y)", self.integ.integrate_2d(&mut k, i, i))
    }

    /// `∫(H(t²) + H(t-t²))` and `∫(H((1-t)²) + H(t-t²))`.
    fn split_weights(&self) -> Result<(Estimate, Estimate), TheoremError> {
        let first = self.int_t("∫H(t²)+H(t-t²)", |t| {
            Ok(self.hs(t * t)? + self.hs(t - t * t)?)
        })?;
        let second = self.int_t("∫H((1-t)²)+H(t-t²)", |t| {
            Ok(self.hs((1.0 - t) * (1.0 - t))? + self.hs(t - t * t)?)
        })?;
        Ok((first, second))
    }

    /// `∫(H(t) + H(1-t))²`
    fn square_weight(&self) -> Result<Estimate, TheoremError> {
        self.int_t("∫(H(t)+H(1-t))²", |t| {
            let v = self.hs(t)? + self.hs(1.0 - t)?;
            Ok(v * v)
        })
    }

    /// Closed-form value of `∫(t^s + (1-t)^s)²`, with a small allowance for
    /// the gamma approximation.
    fn weight_square_closed(&self) -> Result<Estimate, TheoremError> {
        let v = weight_square_integral(self.sc.s)?;
        Ok(Estimate::new(v, 1e-14 * v.abs()))
    }

    fn frac_lhs(&self) -> Result<Estimate, TheoremError> {
        let (a, b, len) = (self.a, self.b, self.len);
        let v = self.int_x("∫f^p g^q", |x| {
            let p = (x - a) / len;
            let q = (b - x) / len;
            Ok(pow_err(self.f(x)?, p, "f(x)^((x-a)/(b-a))", "x", x)?
                * pow_err(self.g(x)?, q, "g(x)^((b-x)/(b-a))", "x", x)?)
        })?;
        Ok(v / len)
    }

    fn mean(
        &self,
        which: &str,
        e: impl Fn(f64) -> Result<f64, EvalError>,
    ) -> Result<Estimate, TheoremError> {
        Ok(self.int_x(which, e)? / self.len)
    }

    fn sqrt_product_mean(&self) -> Result<Estimate, TheoremError> {
        self.mean("∫√(fg)", |x| {
            pow_err(self.p(x)?, 0.5, "√(f(x)g(x))", "x", x)
        })
    }
}

pub fn evaluate_sides_with(
    id: TheoremId,
    sc: &Scenario,
    normalization: Normalization,
    integ: &dyn Integrator,
) -> Result<Sides, TheoremError> {
    let c = Ctx::new(sc, integ);
    let (a, b, len) = (c.a, c.b, c.len);
    let proof = normalization == Normalization::Proof && id.has_proof_variant();
    let mut chain = None;

    let (lhs, rhs) = match id {
        TheoremId::HhBaseline => {
            let m = 0.5 * (a + b);
            let left = c.value("f(m)", c.f(m))?;
            let mid = c.mean("∫f", |x| c.f(x))?;
            let (fa, fb, _, _) = c.endpoints()?;
            let right = Estimate::exact(0.5 * (fa + fb));
            chain = Some(vec![left.value, mid.value, right.value]);
            // report the tighter of the two links
            if mid.value - left.value <= right.value - mid.value {
                (left, mid)
            } else {
                (mid, right)
            }
        }
        TheoremId::SarikayaProduct => {
            let lhs = c.int_product()? / len;
            let e = c.products()?;
            let (h1, h2) = (&sc.h, sc.h2());
            let w = |e: &Expr, u: f64| Ctx::raw(e, u, &c.params);
            let same = c.int_t("∫h1(t)h2(t)", |t| Ok(w(h1, t)? * w(h2, t)?))?;
            let cross = c.int_t("∫h1(t)h2(1-t)", |t| Ok(w(h1, t)? * w(h2, 1.0 - t)?))?;
            (lhs, same * e.m + cross * e.n)
        }
        TheoremId::T1 | TheoremId::T2 => {
            let lhs = c.frac_lhs()?;
            let (fa, fb, ga, gb) = c.endpoints()?;
            let first = id == TheoremId::T1;
            let hp = |x: f64| c.hs((x - a) / len);
            // weight on the f(a), g(a) terms
            let hq = |x: f64| -> Result<f64, EvalError> {
                if first {
                    Ok(1.0 - c.hs((x - a) / len)?)
                } else {
                    c.hs((b - x) / len)
                }
            };
            let i1 = c.int_x("∫(x-a)H(p)", |x| Ok((x - a) * hp(x)?))?;
            let i2 = c.int_x("∫(x-a)H'", |x| Ok((x - a) * hq(x)?))?;
            let i3 = c.int_x("∫(b-x)H(p)", |x| Ok((b - x) * hp(x)?))?;
            let i4 = c.int_x("∫(b-x)H'", |x| Ok((b - x) * hq(x)?))?;
            let rhs = (i1 * fb + i2 * fa + i3 * gb + i4 * ga) / (len * len);
            (lhs, rhs)
        }
        TheoremId::T1CorA | TheoremId::T2CorA => {
            let lhs = c.mean("∫g", |x| c.g(x))?;
            let (_, _, ga, gb) = c.endpoints()?;
            let h0 = c.weight(0.0)?;
            let other = if id == TheoremId::T1CorA {
                Estimate::exact(1.0) - h0
            } else {
                c.weight(1.0)?
            };
            (lhs, h0 * gb + other * ga)
        }
        TheoremId::T1CorB | TheoremId::T2CorB => {
            let lhs = c.mean("∫f", |x| c.f(x))?;
            let (fa, fb, _, _) = c.endpoints()?;
            let h1 = c.weight(1.0)?;
            let other = if id == TheoremId::T1CorB {
                Estimate::exact(1.0) - h1
            } else {
                c.weight(0.0)?
            };
            (lhs, h1 * fb + other * fa)
        }
        TheoremId::T1CorMid => {
            let lhs = c.sqrt_product_mean()?;
            let (fa, fb, ga, gb) = c.endpoints()?;
            let half = c.weight(0.5)?;
            let rhs = half * (0.5 * (fb + gb)) + (Estimate::exact(1.0) - half) * (0.5 * (fa + ga));
            (lhs, rhs)
        }
        TheoremId::T2CorMid => {
            let lhs = c.sqrt_product_mean()?;
            let (fa, fb, ga, gb) = c.endpoints()?;
            (lhs, c.weight(0.5)? * (0.5 * (fa + fb + ga + gb)))
        }
        TheoremId::T3 => {
            let triple = c.triple()?;
            let fg = c.int_product()?;
            let cross = c.double_cross()?;
            let sq = c.int_t("∫H(t²)", |t| c.hs(t * t))?;
            let comp = c.int_t("∫(1-H(t))²", |t| {
                let v = 1.0 - c.hs(t)?;
                Ok(v * v)
            })?;
            let diff = c.int_t("∫H(t)-H(t²)", |t| Ok(c.hs(t)? - c.hs(t * t)?))?;
            if proof {
                (triple / len, fg * sq + fg * comp + cross * diff)
            } else {
                let mean = fg / len;
                (
                    triple / (len * len),
                    mean * sq + mean * comp + cross / len * diff,
                )
            }
        }
        TheoremId::T3Remark => {
            let triple = c.triple()?;
            let fg = c.int_product()?;
            let cross = c.double_cross()?;
            (
                triple / (len * len),
                fg / (3.0 * len) * 2.0 + cross / (6.0 * len),
            )
        }
        TheoremId::T4Sum | TheoremId::T4Square | TheoremId::T5 => {
            let triple = c.triple()?;
            let fg = c.int_product()?;
            let (lhs, fg) = if proof {
                (triple / len, fg)
            } else {
                (triple / (len * len), fg / len)
            };
            let rhs = match id {
                TheoremId::T4Sum => {
                    let (first, second) = c.split_weights()?;
                    fg * first + fg * second
                }
                TheoremId::T4Square => fg * c.square_weight()?,
                _ => {
                    let (first, second) = c.split_weights()?;
                    let scale = if proof { len } else { 1.0 };
                    fg * first + c.mid_product()? * second * scale
                }
            };
            (lhs, rhs)
        }
        TheoremId::T6a => {
            let e = c.products()?;
            let rhs = c.weight(0.25)? * 2.0 * e.m * c.square_weight()?;
            (c.mid_product()?, rhs)
        }
        TheoremId::T6b => {
            let e = c.products()?;
            let half = c.weight(0.5)?;
            let lhs_num = c.mid_product()?;
            if half.value == 0.0 {
                return Err(TheoremError::Eval {
                    what: "1/(2h^(2s)(1/2))".into(),
                    source: EvalError::Domain {
                        reason: crate::expr::DomainReason::DivisionByZero,
                        subexpression: "h^s".into(),
                        operand: 0.0,
                        variable: sc.h.free_variable().into(),
                        at: 0.5,
                    },
                });
            }
            let lhs = lhs_num / (2.0 * half.value * half.value);
            let rhs = c.int_product()? / len + c.square_weight()? * (0.5 * e.m);
            (lhs, rhs)
        }
        TheoremId::T6RemarkA => {
            let e = c.products()?;
            let s = sc.s;
            let rhs = c.weight_square_closed()? * (2f64.powf(1.0 - 2.0 * s) * e.m);
            (c.mid_product()?, rhs)
        }
        TheoremId::T6RemarkB => {
            let e = c.products()?;
            let s = sc.s;
            let lhs = c.mid_product()? * 2f64.powf(2.0 * s - 1.0);
            let rhs = c.int_product()? / len + c.weight_square_closed()? * (0.5 * e.m);
            (lhs, rhs)
        }
        TheoremId::T7 => {
            let (fa, fb, ga, gb) = c.endpoints()?;
            let hp = |x: f64| c.hs((x - a) / len);
            let hq = |x: f64| c.hs((b - x) / len);
            let pf = c.int_x("∫H(p)f", |x| Ok(hp(x)? * c.f(x)?))?;
            let qf = c.int_x("∫H(q)f", |x| Ok(hq(x)? * c.f(x)?))?;
            let pg = c.int_x("∫H(p)g", |x| Ok(hp(x)? * c.g(x)?))?;
            let qg = c.int_x("∫H(q)g", |x| Ok(hq(x)? * c.g(x)?))?;
            let lhs = (pf * gb + qf * ga + pg * fb + qg * fa) / len;
            let upper = c.int_t("∫H(t-t²)+H(t²)", |t| Ok(c.hs(t - t * t)? + c.hs(t * t)?))?;
            let lower = c.int_t("∫H((1-t)²)+H(t-t²)", |t| {
                Ok(c.hs((1.0 - t) * (1.0 - t))? + c.hs(t - t * t)?)
            })?;
            let rhs = c.int_product()? / len + upper * (fb * gb) + lower * (fa * ga);
            (lhs, rhs)
        }
    };

    Ok(Sides {
        lhs,
        rhs,
        converged: c.converged.get(),
        inset: c.inset.get(),
        chain,
    })
}
