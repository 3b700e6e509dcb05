use std::collections::BTreeSet;

use thiserror::Error;

use super::{BinOp, Constant, Expr, Func, Node};

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character {ch:?} at offset {offset}")]
    Lexical { offset: usize, ch: char },
    #[error("syntax error at offset {offset}: found {found}, expected one of {}", .expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("`{name}` expects {expected} argument(s), got {found} (offset {offset})")]
    Arity {
        offset: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error(
        "second free variable `{name}` at offset {offset} (free variable is `{free_variable}`)"
    )]
    MultipleFreeVariables {
        offset: usize,
        name: String,
        free_variable: String,
    },
    #[error("expression nested too deeply at offset {offset}")]
    TooDeep { offset: usize },
}

impl ParseError {
    /// Byte offset of the error in the source, when it has one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::Lexical { offset, .. }
            | ParseError::Syntax { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::Arity { offset, .. }
            | ParseError::MultipleFreeVariables { offset, .. }
            | ParseError::TooDeep { offset } => Some(*offset),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b',' => out.push((Tok::Comma, start)),
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                let mut digits = 0;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                    digits += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                        digits += 1;
                    }
                }
                if digits == 0 {
                    return Err(ParseError::Lexical {
                        offset: start,
                        ch: '.',
                    });
                }
                // Optional exponent, only consumed when well formed.
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    let exp_start = k;
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    if k > exp_start {
                        j = k;
                    }
                }
                let text = &src[start..j];
                let v: f64 = text.parse().map_err(|_| ParseError::Lexical {
                    offset: start,
                    ch: c as char,
                })?;
                out.push((Tok::Num(v), start));
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((Tok::Ident(src[start..j].to_string()), start));
                i = j;
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError::Lexical { offset: start, ch });
            }
        }
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

/// Configurable expression parser.
///
/// By default every identifier that is not the free variable, a constant or a
/// function name becomes a parameter. [`Parser::with_parameters`] switches to
/// strict mode, where any other identifier is reported as a second free
/// variable.
#[derive(Debug, Clone)]
pub struct Parser {
    free_variable: String,
    allowed: Option<BTreeSet<String>>,
}

impl Parser {
    pub fn new(free_variable: impl Into<String>) -> Self {
        Self {
            free_variable: free_variable.into(),
            allowed: None,
        }
    }

    pub fn with_parameters<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.allowed = Some(names.into_iter().map(Into::into).collect());
        self
    }

    pub fn parse(&self, src: &str) -> Result<Expr, ParseError> {
        if src.trim().is_empty() {
            return Err(ParseError::Empty);
        }
        let toks = lex(src)?;
        let mut st = State {
            toks,
            pos: 0,
            depth: 0,
            cfg: self,
        };
        let root = st.expr()?;
        st.expect_end()?;
        Ok(Expr::from_node(root, self.free_variable.clone()))
    }
}

/// Parses `src` with `free_variable` as the only variable; other identifiers are parameters.
pub fn parse_expression(src: &str, free_variable: &str) -> Result<Expr, ParseError> {
    Parser::new(free_variable).parse(src)
}

struct State<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
    cfg: &'a Parser,
}

const PRIMARY_START: &[&str] = &["number", "identifier", "'('", "'-'"];

impl State<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            found: self.peek().describe(),
            expected: expected.to_vec(),
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.syntax(&["operator", "end of input"]))
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep {
                offset: self.offset(),
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::binary(op, lhs, rhs);
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Minus {
            self.enter()?;
            self.bump();
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Node::neg(inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.enter()?;
            self.bump();
            // Right-associative: the exponent is itself a unary/power.
            let exp = self.unary()?;
            self.depth -= 1;
            return Ok(Node::binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Node::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.syntax(&["')'", "operator"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                let (_, at) = self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    self.call(&name, at)
                } else {
                    self.identifier(name, at)
                }
            }
            _ => Err(self.syntax(PRIMARY_START)),
        }
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Node, ParseError> {
        let is_pow = name == "pow";
        let func = Func::from_name(name);
        if func.is_none() && !is_pow {
            return Err(ParseError::UnknownFunction {
                offset: at,
                name: name.to_string(),
            });
        }
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.expr()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => break,
                    _ => return Err(self.syntax(&["','", "')'", "operator"])),
                }
            }
        }
        self.bump();
        let expected = if is_pow { 2 } else { 1 };
        if args.len() != expected {
            return Err(ParseError::Arity {
                offset: at,
                name: name.to_string(),
                expected,
                found: args.len(),
            });
        }
        let mut args = args.into_iter();
        let first = args.next().unwrap();
        Ok(match func {
            Some(f) => Node::call(f, first),
            None => Node::binary(BinOp::Pow, first, args.next().unwrap()),
        })
    }

    fn identifier(&self, name: String, at: usize) -> Result<Node, ParseError> {
        if name == self.cfg.free_variable {
            return Ok(Node::Var);
        }
        match name.as_str() {
            "e" => return Ok(Node::Const(Constant::E)),
            "pi" => return Ok(Node::Const(Constant::Pi)),
            _ => {}
        }
        if let Some(allowed) = &self.cfg.allowed {
            if !allowed.contains(&name) {
                return Err(ParseError::MultipleFreeVariables {
                    offset: at,
                    name,
                    free_variable: self.cfg.free_variable.clone(),
                });
            }
        }
        Ok(Node::Param(name))
    }
}
