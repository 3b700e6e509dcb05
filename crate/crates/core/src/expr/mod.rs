//! The expression language used to describe the functions under test.
//!
//! Expressions are over a single free variable (conventionally `x` for `f`
//! and `g`, `t` for the weight `h`) plus any number of named parameters such
//! as `s`. The function set is closed: `ln`, `exp`, `sqrt`, `abs`, `pow`,
//! `sin`, `cos`, with the constants `e` and `pi`.
//!
//! ```
//! use hsconvex_core::expr::{parse_expression, Bindings};
//!
//! let h = parse_expression("t^s", "t").unwrap();
//! let mut params = Bindings::new();
//! params.insert("s".to_string(), 0.5);
//! assert_eq!(h.evaluate(0.25, &params).unwrap(), 0.5);
//! ```

mod eval;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use eval::{real_pow, DomainReason, EvalError};
pub use parse::{parse_expression, ParseError, Parser};

/// Parameter values keyed by name.
pub type Bindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Ln,
    Exp,
    Sqrt,
    Abs,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "ln" => Func::Ln,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    E,
    Pi,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::E => std::f64::consts::E,
            Constant::Pi => std::f64::consts::PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::E => "e",
            Constant::Pi => "pi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    /// `a^b` and `pow(a, b)` both parse to this.
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// A node of the expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    /// The free variable.
    Var,
    Param(String),
    Const(Constant),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    pub fn num(v: f64) -> Self {
        Node::Num(v)
    }

    pub fn param(name: impl Into<String>) -> Self {
        Node::Param(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(inner: Node) -> Self {
        Node::Neg(Box::new(inner))
    }

    pub fn binary(op: BinOp, l: Node, r: Node) -> Self {
        Node::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn call(func: Func, arg: Node) -> Self {
        Node::Call(func, Box::new(arg))
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Node::Param(p) => {
                out.insert(p.clone());
            }
            Node::Neg(n) | Node::Call(_, n) => n.collect_params(out),
            Node::Binary(_, l, r) => {
                l.collect_params(out);
                r.collect_params(out);
            }
            Node::Num(_) | Node::Var | Node::Const(_) => {}
        }
    }

    // Binding strength used by the printer: higher binds tighter.
    fn precedence(&self) -> u8 {
        match self {
            Node::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Node::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Node::Neg(_) => 3,
            Node::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    pub(crate) fn write(&self, var: &str, out: &mut String) {
        fn child(node: &Node, var: &str, min_prec: u8, out: &mut String) {
            if node.precedence() < min_prec {
                out.push('(');
                node.write(var, out);
                out.push(')');
            } else {
                node.write(var, out);
            }
        }
        match self {
            Node::Num(v) => out.push_str(&format!("{v}")),
            Node::Var => out.push_str(var),
            Node::Param(p) => out.push_str(p),
            Node::Const(c) => out.push_str(c.name()),
            Node::Neg(n) => {
                out.push('-');
                child(n, var, 3, out);
            }
            Node::Binary(BinOp::Pow, l, r) => {
                child(l, var, 5, out);
                out.push('^');
                child(r, var, 3, out);
            }
            Node::Binary(op, l, r) => {
                let p = self.precedence();
                child(l, var, p, out);
                out.push_str(&format!(" {} ", op.symbol()));
                child(r, var, p + 1, out);
            }
            Node::Call(func, arg) => {
                out.push_str(func.name());
                out.push('(');
                arg.write(var, out);
                out.push(')');
            }
        }
    }
}

/// A parsed expression over exactly one free variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    free_variable: String,
    parameters: BTreeSet<String>,
}

impl Expr {
    /// Builds an expression from a tree; the parameter set is collected from the tree.
    pub fn from_node(root: Node, free_variable: impl Into<String>) -> Self {
        let mut parameters = BTreeSet::new();
        root.collect_params(&mut parameters);
        Self {
            root,
            free_variable: free_variable.into(),
            parameters,
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn free_variable(&self) -> &str {
        &self.free_variable
    }

    pub fn parameters(&self) -> &BTreeSet<String> {
        &self.parameters
    }

    /// Identity for the variable, i.e. `h(t) = t`.
    pub fn identity(free_variable: impl Into<String>) -> Self {
        Self::from_node(Node::Var, free_variable)
    }

    pub fn constant(value: f64, free_variable: impl Into<String>) -> Self {
        Self::from_node(Node::Num(value), free_variable)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.root.write(&self.free_variable, &mut out);
        f.write_str(&out)
    }
}
