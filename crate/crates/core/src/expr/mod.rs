//! Scalar expressions over named real variables.
//!
//! Expressions are parsed from a small infix grammar (see [`parse`]),
//! evaluated at a point, and differentiated symbolically. Trees are
//! immutable once built; every operation here is a pure function.

mod diff;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use parser::{parse, ParseError};

/// Binary operators, in the order they appear in the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// One-argument functions.
///
/// `Sign` cannot be written in source text; it only appears in derivatives
/// of `abs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Tanh,
    Sign,
}

impl Func {
    /// Looks up a function callable from source text.
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Tanh => "tanh",
            Func::Sign => "sign",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            // ln(x <= 0) must surface as an error, not -inf/NaN
            Func::Log if x <= 0.0 => f64::NAN,
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
            Func::Tanh => x.tanh(),
            Func::Sign => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Parsed expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no value bound for variable `{0}`")]
    MissingVariable(String),
    #[error("non-finite result in `{0}`")]
    NonFinite(String),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    /// Evaluates the tree, resolving variables through `lookup`.
    ///
    /// Every intermediate value must be finite; the first non-finite node
    /// aborts evaluation with [`EvalError::NonFinite`] naming that subtree.
    pub fn eval_with<F>(&self, lookup: &F) -> Result<f64, EvalError>
    where
        F: Fn(&str) -> Option<f64>,
    {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var(name) => {
                lookup(name).ok_or_else(|| EvalError::MissingVariable(name.clone()))?
            }
            Expr::Neg(inner) => -inner.eval_with(lookup)?,
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_with(lookup)?;
                let b = rhs.eval_with(lookup)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(func, arg) => func.apply(arg.eval_with(lookup)?),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::NonFinite(self.to_string()))
        }
    }

    /// Evaluates against parallel slices of names and values.
    pub fn evaluate(&self, names: &[&str], values: &[f64]) -> Result<f64, EvalError> {
        self.eval_with(&|name: &str| {
            names
                .iter()
                .position(|n| *n == name)
                .and_then(|k| values.get(k).copied())
        })
    }

    /// Variable names appearing as leaves.
    pub fn syntactic_support(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(name) => {
                out.insert(name.clone());
            }
            Expr::Neg(inner) | Expr::Call(_, inner) => inner.collect_vars(out),
            Expr::Binary(_, lhs, rhs) => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
        }
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Expr {
        diff::derivative(self, var)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => 3,
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let paren = self.precedence() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Const(c) => write!(f, "{c}")?,
            Expr::Var(name) => f.write_str(name)?,
            Expr::Neg(inner) => {
                f.write_str("-")?;
                inner.fmt_at(f, 3)?;
            }
            Expr::Binary(op, lhs, rhs) => {
                let (sym, left_min, right_min) = match op {
                    BinOp::Add => ("+", 1, 2),
                    BinOp::Sub => ("-", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    BinOp::Pow => ("^", 5, 3),
                };
                lhs.fmt_at(f, left_min)?;
                f.write_str(sym)?;
                rhs.fmt_at(f, right_min)?;
            }
            Expr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.fmt_at(f, 0)?;
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Prints source text that parses back to an equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, names: &[&str], values: &[f64]) -> Result<f64, EvalError> {
        parse(src).unwrap().evaluate(names, values)
    }

    #[test]
    fn evaluates_paper_style_constraints() {
        assert_eq!(
            eval("x1*exp(-x1^2-x2^2)", &["x1", "x2"], &[0.0, 5.0]).unwrap(),
            0.0
        );
        assert_eq!(eval("-x1+x2+1", &["x1", "x2"], &[2.0, 0.0]).unwrap(), -1.0);
        assert_eq!(eval("x2^2-1", &["x2"], &[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_is_an_error() {
        assert!(matches!(
            eval("1/x", &["x"], &[0.0]),
            Err(EvalError::NonFinite(_))
        ));
        assert!(matches!(
            eval("log(x)", &["x"], &[0.0]),
            Err(EvalError::NonFinite(_))
        ));
        assert!(matches!(
            eval("sqrt(x)", &["x"], &[-1.0]),
            Err(EvalError::NonFinite(_))
        ));
        // log(0) is caught even when a later node would have made it finite
        assert!(eval("exp(log(x))", &["x"], &[0.0]).is_err());
    }

    #[test]
    fn missing_binding() {
        assert_eq!(
            eval("x+y", &["x"], &[1.0]),
            Err(EvalError::MissingVariable("y".into()))
        );
    }

    #[test]
    fn support_is_syntactic() {
        let names = |s: &str| -> Vec<String> {
            parse(s).unwrap().syntactic_support().into_iter().collect()
        };
        assert_eq!(names("2*sin(x1)-1"), vec!["x1"]);
        assert!(names("3.5").is_empty());
        assert_eq!(names("x2 - x2 + x1"), vec!["x1", "x2"]);
        assert_eq!(names("x1*exp(-x1^2-x2^2)"), vec!["x1", "x2"]);
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "2*sin(x1)-1",
            "x1*exp(-x1^2-x2^2)",
            "-0.1-x1*exp(-x1^2-x2^2)",
            "a-(b-c)",
            "a/(b*c)",
            "(a^b)^c",
            "a^b^c",
            "(-a)^2",
            "-a^2",
            "2^-x",
            "--x",
            "a*-b",
            "1e-12+x",
            "abs(tanh(x)/sqrt(y))",
        ] {
            let ast = parse(src).unwrap();
            let printed = ast.to_string();
            assert_eq!(parse(&printed).unwrap(), ast, "{src} -> {printed}");
        }
    }

    #[test]
    fn sign_semantics() {
        assert_eq!(Func::Sign.apply(0.0), 0.0);
        assert_eq!(Func::Sign.apply(-3.0), -1.0);
        assert_eq!(Func::Sign.apply(2.0), 1.0);
    }
}
