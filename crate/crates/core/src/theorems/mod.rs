//! Registry of the product inequalities for (h-s)-convex functions.
//!
//! Each [`TheoremId`] has a computable left and right side
//! ([`evaluate_sides`]) and a list of hypotheses checked by sampling
//! ([`check_hypotheses`]). [`verify`] combines both into an
//! [`InequalityReport`]. Hypotheses are advisory: a failed hypothesis never
//! stops the sides from being evaluated, it only changes how a violation is
//! classified.

mod estimate;
mod hypotheses;
mod sides;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{validate_exponent, ClassError, SamplingPlan, Verdict};
use crate::expr::{Bindings, EvalError, Expr};
use crate::quad::{Adaptive, GammaError, QuadError, QuadratureConfig};
use crate::Interval;

pub use estimate::Estimate;
pub use hypotheses::check_hypotheses;
pub use sides::{evaluate_sides, evaluate_sides_with, weight_square_integral, Sides};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremId {
    /// `f(m) <= mean(f) <= (f(a) + f(b)) / 2` for convex `f`.
    HhBaseline,
    /// Product bound for `f` h1-convex and `g` h2-convex.
    SarikayaProduct,
    T1,
    T1CorA,
    T1CorB,
    T1CorMid,
    T2,
    T2CorA,
    T2CorB,
    T2CorMid,
    T3,
    T3Remark,
    T4Sum,
    T4Square,
    T5,
    T6a,
    T6b,
    T6RemarkA,
    T6RemarkB,
    T7,
}

impl TheoremId {
    pub const ALL: [TheoremId; 20] = [
        TheoremId::HhBaseline,
        TheoremId::SarikayaProduct,
        TheoremId::T1,
        TheoremId::T1CorA,
        TheoremId::T1CorB,
        TheoremId::T1CorMid,
        TheoremId::T2,
        TheoremId::T2CorA,
        TheoremId::T2CorB,
        TheoremId::T2CorMid,
        TheoremId::T3,
        TheoremId::T3Remark,
        TheoremId::T4Sum,
        TheoremId::T4Square,
        TheoremId::T5,
        TheoremId::T6a,
        TheoremId::T6b,
        TheoremId::T6RemarkA,
        TheoremId::T6RemarkB,
        TheoremId::T7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::HhBaseline => "HH_BASELINE",
            TheoremId::SarikayaProduct => "SARIKAYA_PRODUCT",
            TheoremId::T1 => "T1",
            TheoremId::T1CorA => "T1_COR_A",
            TheoremId::T1CorB => "T1_COR_B",
            TheoremId::T1CorMid => "T1_COR_MID",
            TheoremId::T2 => "T2",
            TheoremId::T2CorA => "T2_COR_A",
            TheoremId::T2CorB => "T2_COR_B",
            TheoremId::T2CorMid => "T2_COR_MID",
            TheoremId::T3 => "T3",
            TheoremId::T3Remark => "T3_REMARK",
            TheoremId::T4Sum => "T4_SUM",
            TheoremId::T4Square => "T4_SQUARE",
            TheoremId::T5 => "T5",
            TheoremId::T6a => "T6A",
            TheoremId::T6b => "T6B",
            TheoremId::T6RemarkA => "T6_REMARK_A",
            TheoremId::T6RemarkB => "T6_REMARK_B",
            TheoremId::T7 => "T7",
        }
    }

    /// One-line statement of the inequality, with `H(u) = h(u)^s`,
    /// `m = (a+b)/2`, `L = b - a`, `P = f g` and `z = tx + (1-t)y`.
    pub fn summary(self) -> &'static str {
        match self {
            TheoremId::HhBaseline => "f(m) <= (1/L)∫f <= (f(a)+f(b))/2",
            TheoremId::SarikayaProduct => {
                "(1/L)∫fg <= M∫h1(t)h2(t)dt + N∫h1(t)h2(1-t)dt"
            }
            TheoremId::T1 => {
                "(1/L)∫f^p g^q <= [f(b)∫(x-a)H(p) + f(a)∫(x-a)(1-H(p)) + g(b)∫(b-x)H(p) + g(a)∫(b-x)(1-H(p))]/L²"
            }
            TheoremId::T1CorA => "(1/L)∫g <= g(b)H(0) + g(a)(1-H(0))",
            TheoremId::T1CorB => "(1/L)∫f <= f(b)H(1) + f(a)(1-H(1))",
            TheoremId::T1CorMid => {
                "(1/L)∫√(fg) <= (f(b)+g(b))/2 H(1/2) + (f(a)+g(a))/2 (1-H(1/2))"
            }
            TheoremId::T2 => {
                "(1/L)∫f^p g^q <= [f(b)∫(x-a)H(p) + f(a)∫(x-a)H(q) + g(b)∫(b-x)H(p) + g(a)∫(b-x)H(q)]/L²"
            }
            TheoremId::T2CorA => "(1/L)∫g <= g(b)H(0) + g(a)H(1)",
            TheoremId::T2CorB => "(1/L)∫f <= f(b)H(1) + f(a)H(0)",
            TheoremId::T2CorMid => "(1/L)∫√(fg) <= H(1/2)(f(a)+f(b)+g(a)+g(b))/2",
            TheoremId::T3 => {
                "(1/L²)∭P(z) <= (1/L)∫P ∫H(t²) + (1/L)∫P ∫(1-H(t))² + (1/L)∬N(x,y) ∫(H(t)-H(t²))"
            }
            TheoremId::T3Remark => "(1/L²)∭P(z) <= (2/(3L))∫P + (1/(6L))∬N(x,y)",
            TheoremId::T4Sum => {
                "(1/L²)∭P(z) <= (1/L)∫P ∫(H(t²)+H(t-t²)) + (1/L)∫P ∫(H((1-t)²)+H(t-t²))"
            }
            TheoremId::T4Square => "(1/L²)∭P(z) <= (1/L)∫P ∫(H(t)+H(1-t))²",
            TheoremId::T5 => {
                "(1/L²)∭P(z) <= (1/L)∫P ∫(H(t²)+H(t-t²)) + P(m) ∫(H((1-t)²)+H(t-t²))"
            }
            TheoremId::T6a => "P(m) <= 2H(1/4) M ∫(H(t)+H(1-t))²",
            TheoremId::T6b => "P(m)/(2H(1/2)²) <= (1/L)∫P + (M/2)∫(H(t)+H(1-t))²",
            TheoremId::T6RemarkA => {
                "P(m) <= 2^(1-2s) M (2/(1+2s) + √π 2^(-2s) Γ(1+s)/Γ(3/2+s))"
            }
            TheoremId::T6RemarkB => {
                "2^(2s-1) P(m) <= (1/L)∫P + (M/2)(2/(1+2s) + √π 2^(-2s) Γ(1+s)/Γ(3/2+s))"
            }
            TheoremId::T7 => {
                "[g(b)∫H(p)f + g(a)∫H(q)f + f(b)∫H(p)g + f(a)∫H(q)g]/L <= (1/L)∫P + P(b)∫(H(t-t²)+H(t²)) + P(a)∫(H((1-t)²)+H(t-t²))"
            }
        }
    }

    /// Whether the statement and its proof use different normalizations, so
    /// that a proof-normalized variant is computed alongside.
    pub fn has_proof_variant(self) -> bool {
        matches!(
            self,
            TheoremId::T3 | TheoremId::T4Sum | TheoremId::T4Square | TheoremId::T5
        )
    }

    fn is_corollary(self) -> bool {
        matches!(
            self,
            TheoremId::T1CorA
                | TheoremId::T1CorB
                | TheoremId::T1CorMid
                | TheoremId::T2CorA
                | TheoremId::T2CorB
                | TheoremId::T2CorMid
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown theorem id '{0}'")]
pub struct UnknownTheorem(pub String);

impl FromStr for TheoremId {
    type Err = UnknownTheorem;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownTheorem(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoremError {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("cannot evaluate {what}: {source}")]
    Eval { what: String, source: EvalError },
    #[error("integral {what} failed: {source}")]
    Quad { what: String, source: QuadError },
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Class(#[from] ClassError),
}

/// `M = f(a)g(a) + f(b)g(b)` and `N = f(a)g(b) + f(b)g(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointProducts {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

impl EndpointProducts {
    pub fn new(fa: f64, fb: f64, ga: f64, gb: f64) -> Self {
        Self {
            m: fa * ga + fb * gb,
            n: fa * gb + fb * ga,
        }
    }

    pub fn of(sc: &Scenario) -> Result<Self, TheoremError> {
        let (a, b) = (sc.interval.a(), sc.interval.b());
        let at = |e: &Expr, x: f64, name: &str| {
            e.evaluate(x, &sc.bindings())
                .map_err(|source| TheoremError::Eval {
                    what: format!("{name}({x})"),
                    source,
                })
        };
        Ok(Self::new(
            at(&sc.f, a, "f")?,
            at(&sc.f, b, "f")?,
            at(sc.g(), a, "g")?,
            at(sc.g(), b, "g")?,
        ))
    }
}

/// Which normalization of the triple-integral theorems a report uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// As printed in the theorem statement.
    #[default]
    Statement,
    /// As derived at the end of the proof, before the final division.
    Proof,
}

/// Everything a theorem needs: the functions, the weight, the exponent and
/// the interval, plus numerical settings.
///
/// `f` and `g` are functions of the interval variable, `h` (and `h2`) of the
/// weight variable on `[0, 1]`. All may reference the parameter `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub f: Expr,
    /// Defaults to `f` when absent.
    pub g: Option<Expr>,
    pub h: Expr,
    /// Second weight for the product bound with two weights; defaults to `h`.
    pub h2: Option<Expr>,
    pub s: f64,
    pub interval: Interval,
    pub quad: QuadratureConfig,
    pub plan: SamplingPlan,
    pub normalization: Normalization,
}

impl Scenario {
    pub fn new(f: Expr, h: Expr, s: f64, interval: Interval) -> Result<Self, TheoremError> {
        let sc = Self {
            f,
            g: None,
            h,
            h2: None,
            s,
            interval,
            quad: QuadratureConfig::default(),
            plan: SamplingPlan::default(),
            normalization: Normalization::Statement,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn with_g(mut self, g: Expr) -> Self {
        self.g = Some(g);
        self
    }

    pub fn with_h2(mut self, h2: Expr) -> Self {
        self.h2 = Some(h2);
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn g(&self) -> &Expr {
        self.g.as_ref().unwrap_or(&self.f)
    }

    pub fn h2(&self) -> &Expr {
        self.h2.as_ref().unwrap_or(&self.h)
    }

    pub fn bindings(&self) -> Bindings {
        Bindings::from([("s".to_string(), self.s)])
    }

    pub fn validate(&self) -> Result<(), TheoremError> {
        validate_exponent(self.s).map_err(|e| TheoremError::Scenario(e.to_string()))?;
        self.quad
            .validate()
            .map_err(|e| TheoremError::Scenario(e.to_string()))?;
        self.plan.validate()?;
        let params = self.bindings();
        for (name, e) in [
            ("f", &self.f),
            ("g", self.g()),
            ("h", &self.h),
            ("h2", self.h2()),
        ] {
            e.check_bound(&params)
                .map_err(|source| TheoremError::Eval {
                    what: name.to_string(),
                    source,
                })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InequalityVerdict {
    Holds,
    Violated,
    Inconclusive,
}

impl fmt::Display for InequalityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityVerdict::Holds => "HOLDS",
            InequalityVerdict::Violated => "VIOLATED",
            InequalityVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Fixed slack added to every error budget for floating-point arithmetic.
pub const ARITHMETIC_SLACK: f64 = 1e-12;

/// Rounding allowance relative to the size of the compared sides.
const RELATIVE_SLACK: f64 = 8.0 * f64::EPSILON;

/// `sum of propagated side errors + ARITHMETIC_SLACK + 8 eps max(|lhs|, |rhs|)`.
pub fn error_budget(lhs: Estimate, rhs: Estimate) -> f64 {
    lhs.error + rhs.error + ARITHMETIC_SLACK + RELATIVE_SLACK * lhs.value.abs().max(rhs.value.abs())
}

/// VIOLATED when `lhs - rhs` exceeds the budget, HOLDS otherwise, and
/// INCONCLUSIVE whenever an integral did not reach its tolerance.
pub fn classify(lhs: f64, rhs: f64, budget: f64, converged: bool) -> InequalityVerdict {
    if !converged || !(lhs.is_finite() && rhs.is_finite()) {
        InequalityVerdict::Inconclusive
    } else if lhs - rhs > budget {
        InequalityVerdict::Violated
    } else {
        InequalityVerdict::Holds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    /// Theorem id name, or the name of another checked statement.
    pub theorem: String,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    pub error_budget: f64,
    /// `rhs - lhs`
    pub margin: f64,
    pub verdict: InequalityVerdict,
    pub hypothesis_results: BTreeMap<String, Verdict>,
    /// The inequality failed and so did at least one hypothesis.
    pub out_of_hypothesis: bool,
    pub converged: bool,
    pub normalization: Normalization,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Every member of a chained inequality, in order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<f64>>,
    /// The other normalization, for theorems that have one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternate: Option<Box<InequalityReport>>,
}

impl InequalityReport {
    /// Builds a report from evaluated sides; hypotheses are attached separately.
    pub fn from_sides(
        theorem: impl Into<String>,
        sides: &Sides,
        normalization: Normalization,
    ) -> Self {
        let budget = error_budget(sides.lhs, sides.rhs);
        Self {
            theorem: theorem.into(),
            lhs: sides.lhs.value,
            rhs: sides.rhs.value,
            lhs_error: sides.lhs.error,
            rhs_error: sides.rhs.error,
            error_budget: budget,
            margin: sides.rhs.value - sides.lhs.value,
            verdict: classify(sides.lhs.value, sides.rhs.value, budget, sides.converged),
            hypothesis_results: BTreeMap::new(),
            out_of_hypothesis: false,
            converged: sides.converged,
            normalization,
            notes: Vec::new(),
            chain: sides.chain.clone(),
            alternate: None,
        }
    }

    /// Attaches hypothesis verdicts and derives `out_of_hypothesis`.
    pub fn with_hypotheses(mut self, results: BTreeMap<String, Verdict>) -> Self {
        self.hypothesis_results = results;
        self.out_of_hypothesis = self.verdict == InequalityVerdict::Violated
            && self.hypothesis_results.values().any(Verdict::is_violated);
        if let Some(alt) = self.alternate.as_mut() {
            alt.hypothesis_results = self.hypothesis_results.clone();
            alt.out_of_hypothesis = alt.verdict == InequalityVerdict::Violated
                && alt.hypothesis_results.values().any(Verdict::is_violated);
        }
        self
    }
}

/// Evaluates both sides with the adaptive engine, checks the hypotheses and
/// classifies the result.
pub fn verify(id: TheoremId, sc: &Scenario) -> Result<InequalityReport, TheoremError> {
    sc.validate()?;
    let engine = Adaptive(sc.quad);
    let sides = evaluate_sides_with(id, sc, sc.normalization, &engine)?;
    let mut report = InequalityReport::from_sides(id.name(), &sides, sc.normalization);
    if sides.inset {
        report.notes.push(
            "an integrand was undefined at an endpoint; that endpoint was moved inward".into(),
        );
    }
    if id.has_proof_variant() {
        let other = match sc.normalization {
            Normalization::Statement => Normalization::Proof,
            Normalization::Proof => Normalization::Statement,
        };
        let alt = evaluate_sides_with(id, sc, other, &engine)?;
        report.alternate = Some(Box::new(InequalityReport::from_sides(
            id.name(),
            &alt,
            other,
        )));
    }
    if id.is_corollary() {
        report.notes.push(
            "corollary evaluated as displayed; it substitutes a value for the integration variable, so a violation reflects the displayed inequality, not the parent theorem"
                .into(),
        );
    }
    let hypotheses = match check_hypotheses(id, sc) {
        Ok(h) => h,
        Err(e) => {
            report
                .notes
                .push(format!("hypotheses could not be checked: {e}"));
            BTreeMap::new()
        }
    };
    Ok(report.with_hypotheses(hypotheses))
}

/// Whether `alpha x + (1 - alpha) y >= x^alpha y^(1 - alpha) - 1e-12`.
pub fn general_cauchy_check(alpha: f64, x: f64, y: f64) -> Result<bool, TheoremError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(TheoremError::Scenario(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(TheoremError::Scenario(format!(
            "x and y must be positive and finite, got {x} and {y}"
        )));
    }
    let mean = alpha * x + (1.0 - alpha) * y;
    let geometric = x.powf(alpha) * y.powf(1.0 - alpha);
    Ok(mean >= geometric - 1e-12)
}
