use std::fmt;

use thiserror::Error;

use super::{BinOp, Bindings, Expr, Func, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainReason {
    LogOfNonPositive,
    SqrtOfNegative,
    /// Negative base with a non-integer exponent.
    FractionalPowerOfNegative,
    /// Zero raised to a negative exponent.
    ZeroToNegativePower,
    DivisionByZero,
    /// Overflow or any other non-finite intermediate.
    NonFinite,
}

impl fmt::Display for DomainReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainReason::LogOfNonPositive => "logarithm of a non-positive value",
            DomainReason::SqrtOfNegative => "square root of a negative value",
            DomainReason::FractionalPowerOfNegative => "non-integer power of a negative base",
            DomainReason::ZeroToNegativePower => "zero raised to a negative power",
            DomainReason::DivisionByZero => "division by zero",
            DomainReason::NonFinite => "non-finite result",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("parameter `{name}` is not bound")]
    UnboundParameter { name: String },
    #[error("{reason} in `{subexpression}` (operand {operand}) at {variable} = {at}")]
    Domain {
        reason: DomainReason,
        subexpression: String,
        operand: f64,
        variable: String,
        at: f64,
    },
}

/// Real power on the principal branch.
///
/// Negative bases are accepted only with integral exponents; `0^p` requires `p >= 0`.
pub fn real_pow(base: f64, exponent: f64) -> Result<f64, DomainReason> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(DomainReason::FractionalPowerOfNegative);
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(DomainReason::ZeroToNegativePower);
    }
    let v = base.powf(exponent);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainReason::NonFinite)
    }
}

struct Ctx<'a> {
    x: f64,
    params: &'a Bindings,
    expr: &'a Expr,
}

impl Ctx<'_> {
    fn domain(&self, node: &Node, reason: DomainReason, operand: f64) -> EvalError {
        let mut sub = String::new();
        node.write(self.expr.free_variable(), &mut sub);
        EvalError::Domain {
            reason,
            subexpression: sub,
            operand,
            variable: self.expr.free_variable().to_string(),
            at: self.x,
        }
    }

    fn finite(&self, node: &Node, v: f64) -> Result<f64, EvalError> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain(node, DomainReason::NonFinite, v))
        }
    }

    fn eval(&self, node: &Node) -> Result<f64, EvalError> {
        match node {
            Node::Num(v) => Ok(*v),
            Node::Var => self.finite(node, self.x),
            Node::Const(c) => Ok(c.value()),
            Node::Param(name) => self
                .params
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UnboundParameter { name: name.clone() }),
            Node::Neg(inner) => Ok(-self.eval(inner)?),
            Node::Binary(op, l, r) => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                let v = match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(self.domain(node, DomainReason::DivisionByZero, b));
                        }
                        a / b
                    }
                    BinOp::Pow => real_pow(a, b).map_err(|reason| self.domain(node, reason, a))?,
                };
                self.finite(node, v)
            }
            Node::Call(func, arg) => {
                let a = self.eval(arg)?;
                let v = match func {
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(self.domain(node, DomainReason::LogOfNonPositive, a));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(self.domain(node, DomainReason::SqrtOfNegative, a));
                        }
                        a.sqrt()
                    }
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                };
                self.finite(node, v)
            }
        }
    }
}

impl Expr {
    /// Evaluates the expression at `var_value` with the given parameter bindings.
    ///
    /// Every intermediate is checked; anything that would produce NaN or an
    /// infinity is reported as [`EvalError::Domain`].
    pub fn evaluate(&self, var_value: f64, params: &Bindings) -> Result<f64, EvalError> {
        Ctx {
            x: var_value,
            params,
            expr: self,
        }
        .eval(self.root())
    }

    /// Checks that every parameter of the expression is bound.
    pub fn check_bound(&self, params: &Bindings) -> Result<(), EvalError> {
        match self.parameters().iter().find(|p| !params.contains_key(*p)) {
            Some(name) => Err(EvalError::UnboundParameter { name: name.clone() }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn eval(src: &str, var: &str, x: f64, params: &[(&str, f64)]) -> Result<f64, EvalError> {
        let e = parse_expression(src, var).unwrap();
        let b: Bindings = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        e.evaluate(x, &b)
    }

    #[test]
    fn documented_values() {
        assert_eq!(eval("ln(x)", "x", std::f64::consts::E, &[]).unwrap(), 1.0);
        assert_eq!(eval("t^s", "t", 0.25, &[("s", 0.5)]).unwrap(), 0.5);
    }

    #[test]
    fn ln_of_zero_is_a_domain_error() {
        match eval("ln(x)", "x", 0.0, &[]) {
            Err(EvalError::Domain {
                reason,
                subexpression,
                operand,
                at,
                ..
            }) => {
                assert_eq!(reason, DomainReason::LogOfNonPositive);
                assert_eq!(subexpression, "ln(x)");
                assert_eq!(operand, 0.0);
                assert_eq!(at, 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn power_branches() {
        assert_eq!(eval("x^3", "x", -2.0, &[]).unwrap(), -8.0);
        assert!(matches!(
            eval("x^0.5", "x", -2.0, &[]),
            Err(EvalError::Domain {
                reason: DomainReason::FractionalPowerOfNegative,
                ..
            })
        ));
        assert!(matches!(
            eval("x^(-1)", "x", 0.0, &[]),
            Err(EvalError::Domain {
                reason: DomainReason::ZeroToNegativePower,
                ..
            })
        ));
        assert_eq!(eval("x^0", "x", 0.0, &[]).unwrap(), 1.0);
        assert_eq!(eval("x^0.3", "x", 0.0, &[]).unwrap(), 0.0);
    }

    #[test]
    fn other_domain_failures() {
        assert!(matches!(
            eval("1/x", "x", 0.0, &[]),
            Err(EvalError::Domain {
                reason: DomainReason::DivisionByZero,
                ..
            })
        ));
        assert!(matches!(
            eval("sqrt(x - 1)", "x", 0.0, &[]),
            Err(EvalError::Domain {
                reason: DomainReason::SqrtOfNegative,
                ..
            })
        ));
        assert!(matches!(
            eval("exp(x)", "x", 1000.0, &[]),
            Err(EvalError::Domain {
                reason: DomainReason::NonFinite,
                ..
            })
        ));
        assert!(matches!(
            eval("x", "x", f64::NAN, &[]),
            Err(EvalError::Domain {
                reason: DomainReason::NonFinite,
                ..
            })
        ));
    }

    #[test]
    fn unbound_parameter() {
        assert_eq!(
            eval("t^s", "t", 0.5, &[]),
            Err(EvalError::UnboundParameter { name: "s".into() })
        );
        let e = parse_expression("t^s + a", "t").unwrap();
        let mut b = Bindings::new();
        b.insert("s".into(), 1.0);
        assert!(e.check_bound(&b).is_err());
        b.insert("a".into(), 0.0);
        assert!(e.check_bound(&b).is_ok());
    }

    #[test]
    fn constants_and_functions() {
        let v = eval(
            "sin(pi/2) + cos(0) + abs(-3) + exp(0) + sqrt(4)",
            "x",
            0.0,
            &[],
        )
        .unwrap();
        assert_eq!(v, 1.0 + 1.0 + 3.0 + 1.0 + 2.0);
        assert_eq!(eval("ln(e)", "x", 0.0, &[]).unwrap(), 1.0);
    }
}
