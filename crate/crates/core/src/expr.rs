//! Closed-form expression trees in the single variable `t`.
//!
//! The grammar is deliberately small: constants, `t`, the four arithmetic
//! operations, powers with a real exponent, `exp`, `sin`, `cos`, `ln(1+u)`,
//! `abs` and `sign`. Every expression can be differentiated symbolically,
//! evaluated pointwise and enclosed over intervals (see [`crate::interval`]).
//!
//! Serialized form is a nested JSON array: numbers are constants, the string
//! `"t"` is the variable and `["op", arg, ...]` applies an operator. Powers are
//! written `["pow", base, exponent]` with a numeric exponent.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// `base ^ exponent` with a fixed real exponent.
    Pow(Box<Expr>, f64),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    /// `ln(1 + u)`.
    Ln1p(Box<Expr>),
    Abs(Box<Expr>),
    /// Sign function; appears in derivatives of `abs`.
    Sign(Box<Expr>),
}

// Builders. They fold constants and drop neutral elements so that symbolic
// derivatives stay small.
impl Expr {
    pub fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn t() -> Expr {
        Expr::T
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn neg(self) -> Expr {
        match self {
            Expr::Const(v) => Expr::Const(-v),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a + b),
            (Some(0.0), None) => rhs,
            (None, Some(0.0)) => self,
            _ => Expr::Add(Box::new(self), Box::new(rhs)),
        }
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a - b),
            (Some(0.0), None) => rhs.neg(),
            (None, Some(0.0)) => self,
            _ => Expr::Sub(Box::new(self), Box::new(rhs)),
        }
    }

    pub fn mul(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::Const(a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => Expr::Const(0.0),
            (Some(1.0), None) => rhs,
            (None, Some(1.0)) => self,
            (Some(-1.0), None) => rhs.neg(),
            (None, Some(-1.0)) => self.neg(),
            _ => Expr::Mul(Box::new(self), Box::new(rhs)),
        }
    }

    pub fn div(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Expr::Const(a / b),
            (Some(0.0), _) => Expr::Const(0.0),
            (None, Some(1.0)) => self,
            _ => Expr::Div(Box::new(self), Box::new(rhs)),
        }
    }

    pub fn pow(self, k: f64) -> Expr {
        if k == 0.0 {
            return Expr::Const(1.0);
        }
        if k == 1.0 {
            return self;
        }
        match self {
            Expr::Const(v) => Expr::Const(v.powf(k)),
            other => Expr::Pow(Box::new(other), k),
        }
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn sin(self) -> Expr {
        Expr::Sin(Box::new(self))
    }

    pub fn cos(self) -> Expr {
        Expr::Cos(Box::new(self))
    }

    pub fn ln1p(self) -> Expr {
        Expr::Ln1p(Box::new(self))
    }

    pub fn abs(self) -> Expr {
        Expr::Abs(Box::new(self))
    }

    pub fn sign(self) -> Expr {
        Expr::Sign(Box::new(self))
    }
}

impl Expr {
    /// Pointwise value. Domain violations propagate as NaN.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Const(v) => *v,
            Expr::T => t,
            Expr::Neg(a) => -a.eval(t),
            Expr::Add(a, b) => a.eval(t) + b.eval(t),
            Expr::Sub(a, b) => a.eval(t) - b.eval(t),
            Expr::Mul(a, b) => a.eval(t) * b.eval(t),
            Expr::Div(a, b) => a.eval(t) / b.eval(t),
            Expr::Pow(a, k) => pow_real(a.eval(t), *k),
            Expr::Exp(a) => a.eval(t).exp(),
            Expr::Sin(a) => a.eval(t).sin(),
            Expr::Cos(a) => a.eval(t).cos(),
            Expr::Ln1p(a) => a.eval(t).ln_1p(),
            Expr::Abs(a) => a.eval(t).abs(),
            Expr::Sign(a) => {
                let v = a.eval(t);
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else if v == 0.0 {
                    0.0
                } else {
                    f64::NAN
                }
            }
        }
    }

    /// Like [`Expr::eval`] but returns `None` where the expression is not
    /// classically differentiable: `sign` evaluated at zero (a kink of `abs`)
    /// or any non-finite intermediate.
    pub fn eval_strict(&self, t: f64) -> Option<f64> {
        let v = match self {
            Expr::Const(v) => *v,
            Expr::T => t,
            Expr::Neg(a) => -a.eval_strict(t)?,
            Expr::Add(a, b) => a.eval_strict(t)? + b.eval_strict(t)?,
            Expr::Sub(a, b) => a.eval_strict(t)? - b.eval_strict(t)?,
            Expr::Mul(a, b) => a.eval_strict(t)? * b.eval_strict(t)?,
            Expr::Div(a, b) => a.eval_strict(t)? / b.eval_strict(t)?,
            Expr::Pow(a, k) => pow_real(a.eval_strict(t)?, *k),
            Expr::Exp(a) => a.eval_strict(t)?.exp(),
            Expr::Sin(a) => a.eval_strict(t)?.sin(),
            Expr::Cos(a) => a.eval_strict(t)?.cos(),
            Expr::Ln1p(a) => a.eval_strict(t)?.ln_1p(),
            Expr::Abs(a) => a.eval_strict(t)?.abs(),
            Expr::Sign(a) => {
                let v = a.eval_strict(t)?;
                if v == 0.0 {
                    return None;
                }
                v.signum()
            }
        };
        v.is_finite().then_some(v)
    }

    /// Symbolic derivative with respect to `t`.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::c(0.0),
            Expr::T => Expr::c(1.0),
            Expr::Neg(a) => a.derivative().neg(),
            Expr::Add(a, b) => a.derivative().add(b.derivative()),
            Expr::Sub(a, b) => a.derivative().sub(b.derivative()),
            Expr::Mul(a, b) => {
                let left = a.derivative().mul((**b).clone());
                let right = (**a).clone().mul(b.derivative());
                left.add(right)
            }
            Expr::Div(a, b) => {
                let num = a
                    .derivative()
                    .mul((**b).clone())
                    .sub((**a).clone().mul(b.derivative()));
                num.div((**b).clone().pow(2.0))
            }
            Expr::Pow(a, k) => Expr::c(*k)
                .mul((**a).clone().pow(k - 1.0))
                .mul(a.derivative()),
            Expr::Exp(a) => self.clone().mul(a.derivative()),
            Expr::Sin(a) => (**a).clone().cos().mul(a.derivative()),
            Expr::Cos(a) => (**a).clone().sin().neg().mul(a.derivative()),
            Expr::Ln1p(a) => a
                .derivative()
                .div(Expr::c(1.0).add((**a).clone())),
            Expr::Abs(a) => (**a).clone().sign().mul(a.derivative()),
            // Piecewise constant; the jump at zero is reported by eval_strict.
            Expr::Sign(_) => Expr::c(0.0),
        }
    }

    /// Largest nesting depth; used to bound generated expressions in tests.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::T => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Expr::Neg(a)
            | Expr::Pow(a, _)
            | Expr::Exp(a)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Ln1p(a)
            | Expr::Abs(a)
            | Expr::Sign(a) => 1 + a.depth(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(v) if *v == 0.0)
    }
}

/// Real power. Negative bases are accepted only for integral exponents.
pub(crate) fn pow_real(x: f64, k: f64) -> f64 {
    if k == k.trunc() && k.abs() < 1e15 {
        if k == 2.0 {
            return x * x;
        }
        x.powi(k as i32)
    } else {
        x.powf(k)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::T => write!(f, "t"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Pow(a, k) => write!(f, "({a})^{k}"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Ln1p(a) => write!(f, "ln(1 + {a})"),
            Expr::Abs(a) => write!(f, "|{a}|"),
            Expr::Sign(a) => write!(f, "sign({a})"),
        }
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let (op, args): (&str, Vec<&Expr>) = match self {
            Expr::Const(v) => return serializer.serialize_f64(*v),
            Expr::T => return serializer.serialize_str("t"),
            Expr::Pow(a, k) => {
                let mut seq = serializer.serialize_seq(Some(3))?;
                seq.serialize_element("pow")?;
                seq.serialize_element(a.as_ref())?;
                seq.serialize_element(k)?;
                return seq.end();
            }
            Expr::Neg(a) => ("neg", vec![a]),
            Expr::Add(a, b) => ("add", vec![a, b]),
            Expr::Sub(a, b) => ("sub", vec![a, b]),
            Expr::Mul(a, b) => ("mul", vec![a, b]),
            Expr::Div(a, b) => ("div", vec![a, b]),
            Expr::Exp(a) => ("exp", vec![a]),
            Expr::Sin(a) => ("sin", vec![a]),
            Expr::Cos(a) => ("cos", vec![a]),
            Expr::Ln1p(a) => ("ln1p", vec![a]),
            Expr::Abs(a) => ("abs", vec![a]),
            Expr::Sign(a) => ("sign", vec![a]),
        };
        let mut seq = serializer.serialize_seq(Some(args.len() + 1))?;
        seq.serialize_element(op)?;
        for a in args {
            seq.serialize_element(a)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        Expr::from_json(&value).map_err(de::Error::custom)
    }
}

impl Expr {
    /// Parses the nested-array form. Errors carry a path such as `[2][1]`.
    pub fn from_json(value: &Value) -> Result<Expr, String> {
        parse_node(value, "")
    }
}

fn parse_node(value: &Value, path: &str) -> Result<Expr, String> {
    match value {
        Value::Number(n) => n
            .as_f64()
            .map(Expr::Const)
            .ok_or_else(|| format!("expression{path}: number out of range")),
        Value::String(s) if s == "t" => Ok(Expr::T),
        Value::String(s) => Err(format!(
            "expression{path}: unknown symbol \"{s}\" (only \"t\" is allowed)"
        )),
        Value::Array(items) => {
            let op = items
                .first()
                .and_then(Value::as_str)
                .ok_or_else(|| format!("expression{path}: expected [\"op\", args...]"))?;
            let args = &items[1..];
            let arity = |n: usize| -> Result<(), String> {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(format!(
                        "expression{path}: \"{op}\" takes {n} argument(s), got {}",
                        args.len()
                    ))
                }
            };
            let arg = |i: usize| parse_node(&args[i], &format!("{path}[{}]", i + 1));
            let unary = |f: fn(Box<Expr>) -> Expr| -> Result<Expr, String> {
                arity(1)?;
                Ok(f(Box::new(arg(0)?)))
            };
            let binary = |f: fn(Box<Expr>, Box<Expr>) -> Expr| -> Result<Expr, String> {
                arity(2)?;
                Ok(f(Box::new(arg(0)?), Box::new(arg(1)?)))
            };
            match op {
                "neg" => unary(Expr::Neg),
                "exp" => unary(Expr::Exp),
                "sin" => unary(Expr::Sin),
                "cos" => unary(Expr::Cos),
                "ln1p" => unary(Expr::Ln1p),
                "abs" => unary(Expr::Abs),
                "sign" => unary(Expr::Sign),
                "add" => binary(Expr::Add),
                "sub" => binary(Expr::Sub),
                "mul" => binary(Expr::Mul),
                "div" => binary(Expr::Div),
                "pow" => {
                    arity(2)?;
                    let k = args[1].as_f64().ok_or_else(|| {
                        format!("expression{path}[2]: pow exponent must be a number")
                    })?;
                    Ok(Expr::Pow(Box::new(arg(0)?), k))
                }
                other => Err(format!("expression{path}: unknown operator \"{other}\"")),
            }
        }
        _ => Err(format!(
            "expression{path}: expected number, \"t\" or [\"op\", ...]"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn damped_sine() -> Expr {
        Expr::t().neg().exp().mul(Expr::t().sin())
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let exprs = vec![
            damped_sine(),
            Expr::c(1.0).add(Expr::t()).pow(-1.5),
            Expr::t().ln1p().sin().mul(Expr::c(1.0).add(Expr::t()).pow(-0.75)),
            Expr::t().cos().div(Expr::c(2.0).add(Expr::t())),
        ];
        for e in exprs {
            let d = e.derivative();
            for &t in &[0.3, 1.0, 2.7, 10.0] {
                let h = 1e-6;
                let fd = (e.eval(t + h) - e.eval(t - h)) / (2.0 * h);
                assert!((d.eval(t) - fd).abs() < 1e-7, "{e} at {t}");
            }
        }
    }

    #[test]
    fn abs_kink_is_not_differentiable() {
        let e = Expr::t().sub(Expr::c(1.0)).abs();
        let d = e.derivative();
        assert_eq!(d.eval_strict(1.0), None);
        assert_eq!(d.eval_strict(2.0), Some(1.0));
        assert_eq!(d.eval_strict(0.5), Some(-1.0));
    }

    #[test]
    fn sqrt_has_no_derivative_at_zero() {
        let d = Expr::t().pow(0.5).derivative();
        assert_eq!(d.eval_strict(0.0), None);
    }

    #[test]
    fn json_round_trip() {
        let e = damped_sine().add(Expr::t().pow(2.5));
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(
            s,
            r#"["add",["mul",["exp",["neg","t"]],["sin","t"]],["pow","t",2.5]]"#
        );
        let back: Expr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn parse_errors_carry_a_path() {
        let err = serde_json::from_str::<Expr>(r#"["add", "t", ["log", "t"]]"#).unwrap_err();
        assert!(err.to_string().contains("[2]"), "{err}");
        assert!(err.to_string().contains("log"), "{err}");
        assert!(serde_json::from_str::<Expr>(r#""x""#).is_err());
        assert!(serde_json::from_str::<Expr>(r#"["sin", "t", "t"]"#).is_err());
    }
}
