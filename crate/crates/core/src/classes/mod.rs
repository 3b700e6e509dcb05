//! Sampling-based membership checks for the generalized convexity classes and
//! the structural properties of weight functions.
//!
//! Every check is a falsification search: it evaluates the defining inequality
//! on a tensor grid followed by seeded uniform random samples and returns the
//! strongest violation it saw as a [`Counterexample`]. A
//! [`VerdictStatus::NoViolationFound`] result is one-sided evidence only; it
//! never asserts membership.

mod checks;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Bindings, EvalError, Expr};

pub use checks::{
    check_class, check_multiplicativity, check_nonnegative, check_similarly_ordered,
    check_superadditive, check_supermultiplicative, defining_sides, Multiplicativity,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassId {
    /// `f(tx+(1-t)y) <= h^s(t) f(x) + (1 - h^s(t)) f(y)`
    #[serde(rename = "HS1")]
    Hs1,
    /// `f(tx+(1-t)y) <= h^s(t) f(x) + h^s(1-t) f(y)`
    #[serde(rename = "HS2")]
    Hs2,
    #[serde(rename = "H_CONVEX")]
    HConvex,
    /// s-convexity in the second sense.
    #[serde(rename = "S_CONVEX_2")]
    SConvex2,
    #[serde(rename = "P_FUNCTION")]
    PFunction,
    #[serde(rename = "GODUNOVA_LEVIN")]
    GodunovaLevin,
    #[serde(rename = "ORDINARY_CONVEX")]
    OrdinaryConvex,
}

impl ClassId {
    pub const ALL: [ClassId; 7] = [
        ClassId::Hs1,
        ClassId::Hs2,
        ClassId::HConvex,
        ClassId::SConvex2,
        ClassId::PFunction,
        ClassId::GodunovaLevin,
        ClassId::OrdinaryConvex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassId::Hs1 => "HS1",
            ClassId::Hs2 => "HS2",
            ClassId::HConvex => "H_CONVEX",
            ClassId::SConvex2 => "S_CONVEX_2",
            ClassId::PFunction => "P_FUNCTION",
            ClassId::GodunovaLevin => "GODUNOVA_LEVIN",
            ClassId::OrdinaryConvex => "ORDINARY_CONVEX",
        }
    }

    pub fn needs_h(self) -> bool {
        matches!(self, ClassId::Hs1 | ClassId::Hs2 | ClassId::HConvex)
    }

    pub fn needs_s(self) -> bool {
        matches!(self, ClassId::Hs1 | ClassId::Hs2 | ClassId::SConvex2)
    }

    /// Every class except plain convexity requires `f >= 0`.
    pub fn requires_nonnegative(self) -> bool {
        self != ClassId::OrdinaryConvex
    }

    /// Classes whose definition only makes sense for `t` in the open interval.
    pub fn open_t(self) -> bool {
        self == ClassId::GodunovaLevin
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ClassId {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassId::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ClassError::UnknownClass(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("class {class} requires parameter `{param}`")]
    MissingParameter { class: ClassId, param: &'static str },
    #[error("exponent s must lie in (0, 1], got {0}")]
    ExponentOutOfRange(f64),
    #[error("invalid sampling plan: {0}")]
    InvalidPlan(String),
    #[error("evaluation failed at {witness:?}: {source}")]
    Eval {
        witness: BTreeMap<String, f64>,
        source: EvalError,
    },
    #[error("weight h is negative at t = {t}: h(t) = {value}")]
    NegativeWeight { t: f64, value: f64 },
}

/// Checks that `s` lies in `(0, 1]`.
pub fn validate_exponent(s: f64) -> Result<(), ClassError> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(ClassError::ExponentOutOfRange(s))
    }
}

/// A convexity class together with its weight `h` and exponent `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityClassSpec {
    class: ClassId,
    h: Option<Expr>,
    s: Option<f64>,
}

impl ConvexityClassSpec {
    pub fn new(class: ClassId, h: Option<Expr>, s: Option<f64>) -> Result<Self, ClassError> {
        if class.needs_h() && h.is_none() {
            return Err(ClassError::MissingParameter { class, param: "h" });
        }
        if class.needs_s() {
            match s {
                None => return Err(ClassError::MissingParameter { class, param: "s" }),
                Some(s) => validate_exponent(s)?,
            }
        } else if let Some(s) = s {
            validate_exponent(s)?;
        }
        Ok(Self { class, h, s })
    }

    pub fn ordinary_convex() -> Self {
        Self {
            class: ClassId::OrdinaryConvex,
            h: None,
            s: None,
        }
    }

    pub fn hs1(h: Expr, s: f64) -> Result<Self, ClassError> {
        Self::new(ClassId::Hs1, Some(h), Some(s))
    }

    pub fn hs2(h: Expr, s: f64) -> Result<Self, ClassError> {
        Self::new(ClassId::Hs2, Some(h), Some(s))
    }

    pub fn h_convex(h: Expr) -> Self {
        Self {
            class: ClassId::HConvex,
            h: Some(h),
            s: None,
        }
    }

    pub fn s_convex(s: f64) -> Result<Self, ClassError> {
        Self::new(ClassId::SConvex2, None, Some(s))
    }

    pub fn class(&self) -> ClassId {
        self.class
    }

    pub fn h(&self) -> Option<&Expr> {
        self.h.as_ref()
    }

    pub fn s(&self) -> Option<f64> {
        self.s
    }

    /// Parameter bindings for `f` and `h`: `s` when the class carries one.
    pub fn bindings(&self) -> Bindings {
        let mut b = Bindings::new();
        if let Some(s) = self.s {
            b.insert("s".to_string(), s);
        }
        b
    }
}

impl fmt::Display for ConvexityClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.class)?;
        let mut parts = Vec::new();
        if let Some(h) = &self.h {
            parts.push(format!("h = {h}"));
        }
        if let Some(s) = self.s {
            parts.push(format!("s = {s}"));
        }
        if !parts.is_empty() {
            write!(f, "({})", parts.join(", "))?;
        }
        Ok(())
    }
}

/// How points are drawn for a falsification search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingPlan {
    pub grid_points_per_axis: usize,
    pub random_samples: usize,
    pub seed: u64,
    /// Inset for classes defined on the open interval `0 < t < 1`.
    pub t_open_inset: f64,
    /// Absolute slack before a difference counts as a violation.
    pub tolerance: f64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            grid_points_per_axis: 33,
            random_samples: 20_000,
            seed: 0,
            t_open_inset: 1e-6,
            tolerance: 1e-9,
        }
    }
}

impl SamplingPlan {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ClassError> {
        if self.grid_points_per_axis == 0 || self.random_samples == 0 {
            return Err(ClassError::InvalidPlan(
                "grid_points_per_axis and random_samples must be at least 1".into(),
            ));
        }
        if !(self.t_open_inset > 0.0 && self.t_open_inset < 0.5) {
            return Err(ClassError::InvalidPlan(format!(
                "t_open_inset must lie in (0, 0.5), got {}",
                self.t_open_inset
            )));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(ClassError::InvalidPlan(format!(
                "tolerance must be a non-negative number, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictStatus {
    NoViolationFound,
    Violated,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::NoViolationFound => "NO_VIOLATION_FOUND",
            VerdictStatus::Violated => "VIOLATED",
        })
    }
}

/// Which inequality a counterexample breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// The class or property's defining inequality `lhs <= rhs`.
    Defining,
    /// `0 <= f(x)`, encoded as `lhs = 0`, `rhs = f(x)`.
    Nonnegativity,
}

/// A witness point at which `lhs <= rhs` fails by more than the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub kind: ViolationKind,
    pub witness: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    pub samples_checked: usize,
    #[serde(default)]
    pub samples_skipped: usize,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        self.status == VerdictStatus::Violated
    }
}
