//! Random closed-form functions with exact antiderivatives, plus plain-f64
//! evaluators that do not go through the library.

#![allow(dead_code)]

use barbalat_core::{Expr, FunctionSpec};
use proptest::prelude::*;

#[derive(Debug, Clone, Copy)]
pub enum Term {
    Exp { a: f64, lam: f64 },
    ExpSin { a: f64, lam: f64, w: f64 },
    ExpCos { a: f64, lam: f64, w: f64 },
    Power { a: f64, k: f64 },
}

fn decay(lam: f64) -> Expr {
    Expr::c(-lam).mul(Expr::t()).exp()
}

fn wave(w: f64) -> (Expr, Expr) {
    let arg = Expr::c(w).mul(Expr::t());
    (arg.clone().sin(), arg.cos())
}

impl Term {
    /// `(f, F)` with `F' = f`.
    pub fn exprs(&self) -> (Expr, Expr) {
        match *self {
            Term::Exp { a, lam } => (Expr::c(a).mul(decay(lam)), Expr::c(-a / lam).mul(decay(lam))),
            Term::ExpSin { a, lam, w } => {
                let (s, c) = wave(w);
                let d = lam * lam + w * w;
                let anti = Expr::c(-a * lam / d)
                    .mul(s.clone())
                    .add(Expr::c(-a * w / d).mul(c))
                    .mul(decay(lam));
                (Expr::c(a).mul(decay(lam)).mul(s), anti)
            }
            Term::ExpCos { a, lam, w } => {
                let (s, c) = wave(w);
                let d = lam * lam + w * w;
                let anti = Expr::c(a * w / d)
                    .mul(s)
                    .add(Expr::c(-a * lam / d).mul(c.clone()))
                    .mul(decay(lam));
                (Expr::c(a).mul(decay(lam)).mul(c), anti)
            }
            Term::Power { a, k } => {
                let base = Expr::c(1.0).add(Expr::t());
                (
                    Expr::c(a).mul(base.clone().pow(-k)),
                    Expr::c(-a / (k - 1.0)).mul(base.pow(1.0 - k)),
                )
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Term::Exp { a, lam } => a * (-lam * t).exp(),
            Term::ExpSin { a, lam, w } => a * (-lam * t).exp() * (w * t).sin(),
            Term::ExpCos { a, lam, w } => a * (-lam * t).exp() * (w * t).cos(),
            Term::Power { a, k } => a * (1.0 + t).powf(-k),
        }
    }

    /// Upper bound on `|f'|` over `[0, inf)`.
    pub fn lipschitz_bound(&self) -> f64 {
        match *self {
            Term::Exp { a, lam } => a.abs() * lam,
            Term::ExpSin { a, lam, w } | Term::ExpCos { a, lam, w } => a.abs() * (lam + w),
            Term::Power { a, k } => a.abs() * k,
        }
    }
}

pub fn term() -> impl Strategy<Value = Term> {
    let a = -2.0..2.0f64;
    let lam = 0.2..2.0f64;
    let w = 0.5..4.0f64;
    prop_oneof![
        (a.clone(), lam.clone()).prop_map(|(a, lam)| Term::Exp { a, lam }),
        (a.clone(), lam.clone(), w.clone()).prop_map(|(a, lam, w)| Term::ExpSin { a, lam, w }),
        (a.clone(), lam, w).prop_map(|(a, lam, w)| Term::ExpCos { a, lam, w }),
        (a, 1.5..3.0f64).prop_map(|(a, k)| Term::Power { a, k }),
    ]
}

pub fn terms() -> impl Strategy<Value = Vec<Term>> {
    prop::collection::vec(term(), 1..=3)
}

pub fn spec_of(terms: &[Term]) -> FunctionSpec {
    let (f, anti) = terms
        .iter()
        .map(Term::exprs)
        .reduce(|(f, g), (a, b)| (f.add(a), g.add(b)))
        .expect("at least one term");
    FunctionSpec::closed_form_with_antiderivative(f, anti).expect("generated antiderivative is exact")
}

pub fn eval_terms(terms: &[Term], t: f64) -> f64 {
    terms.iter().map(|x| x.eval(t)).sum()
}

pub fn exp_neg() -> FunctionSpec {
    let e = Expr::c(-1.0).mul(Expr::t()).exp();
    FunctionSpec::closed_form_with_antiderivative(e.clone(), e.neg()).unwrap()
}

/// `e^{-t} sin t` with `F = -e^{-t}(sin t + cos t) / 2`.
pub fn damped_sine() -> FunctionSpec {
    spec_of(&[Term::ExpSin {
        a: 1.0,
        lam: 1.0,
        w: 1.0,
    }])
}
