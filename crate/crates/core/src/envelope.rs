//! Asymptotic decay envelopes for closed-form expressions.
//!
//! An [`Envelope`] certifies `|g(t)| <= C * exp(-rate * t) * (1 + t)^power`
//! for all `t >= start`. Envelopes are derived structurally from the
//! expression tree, falling back to interval enclosures where no structural
//! rule applies. They turn tails such as `int_X^inf |f|^p` into closed-form
//! upper bounds, which is what keeps remainders of improper integrals sound.

use crate::expr::Expr;
use crate::interval::Interval;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub coef: f64,
    pub rate: f64,
    pub power: f64,
}

impl Envelope {
    pub const ZERO: Envelope = Envelope {
        coef: 0.0,
        rate: 0.0,
        power: 0.0,
    };

    fn constant(c: f64) -> Envelope {
        Envelope {
            coef: c.abs(),
            rate: 0.0,
            power: 0.0,
        }
    }

    fn is_usable(&self) -> bool {
        self.coef.is_finite() && self.rate.is_finite() && self.power.is_finite()
    }

    pub fn mul(self, o: Envelope) -> Envelope {
        if self.coef == 0.0 || o.coef == 0.0 {
            return Envelope::ZERO;
        }
        Envelope {
            coef: self.coef * o.coef,
            rate: self.rate + o.rate,
            power: self.power + o.power,
        }
    }

    /// Envelope of `|g|^k`; valid for either sign of `k` provided `self`
    /// bounds `|g|` from the matching side.
    pub fn pow(self, k: f64) -> Envelope {
        if self.coef == 0.0 {
            return if k > 0.0 {
                Envelope::ZERO
            } else {
                Envelope {
                    coef: f64::INFINITY,
                    ..Envelope::ZERO
                }
            };
        }
        Envelope {
            coef: self.coef.powf(k),
            rate: self.rate * k,
            power: self.power * k,
        }
    }

    /// Asymptotic ordering: smaller is faster decay.
    fn decays_faster_than(&self, o: &Envelope) -> bool {
        if self.coef == 0.0 {
            return true;
        }
        if o.coef == 0.0 {
            return false;
        }
        if self.rate != o.rate {
            return self.rate > o.rate;
        }
        if self.power != o.power {
            return self.power < o.power;
        }
        self.coef < o.coef
    }

    /// Rewrites `self` with the given (slower) rate and power for `t >= x0`.
    fn rebase(self, rate: f64, power: f64, x0: f64) -> Envelope {
        if self.coef == 0.0 {
            return Envelope {
                coef: 0.0,
                rate,
                power,
            };
        }
        let factor = sup_exp_power(self.rate - rate, self.power - power, x0);
        Envelope {
            coef: self.coef * factor,
            rate,
            power,
        }
    }

    /// Envelope of `|u + v|` from envelopes of `|u|` and `|v|`.
    pub fn sum(self, o: Envelope, x0: f64) -> Envelope {
        if self.coef == 0.0 {
            return o;
        }
        if o.coef == 0.0 {
            return self;
        }
        let rate = self.rate.min(o.rate);
        let power = if self.rate == o.rate {
            self.power.max(o.power)
        } else if self.rate < o.rate {
            self.power
        } else {
            o.power
        };
        let a = self.rebase(rate, power, x0);
        let b = o.rebase(rate, power, x0);
        Envelope {
            coef: a.coef + b.coef,
            rate,
            power,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.coef == 0.0 {
            return 0.0;
        }
        self.coef * (-self.rate * t + self.power * (1.0 + t).ln()).exp()
    }

    /// `sup_{t >= x0}` of the envelope.
    pub fn sup_from(&self, x0: f64) -> f64 {
        if self.coef == 0.0 {
            return 0.0;
        }
        self.coef * sup_exp_power(self.rate, self.power, x0)
    }

    /// Upper bound on `int_{x0}^inf` of the envelope; infinite when the
    /// envelope is not integrable.
    pub fn tail_integral(&self, x0: f64) -> f64 {
        let (c, lam, beta) = (self.coef, self.rate, self.power);
        if c == 0.0 {
            return 0.0;
        }
        if !self.is_usable() || lam < 0.0 {
            return f64::INFINITY;
        }
        let r = if lam == 0.0 {
            if beta < -1.0 {
                c * (1.0 + x0).powf(beta + 1.0) / (-beta - 1.0)
            } else {
                f64::INFINITY
            }
        } else if beta <= 0.0 {
            c * (1.0 + x0).powf(beta) * (-lam * x0).exp() / lam
        } else {
            // split exp(-lam t) = exp(-(lam - mu) t) * exp(-mu t)
            (1..8)
                .map(|j| {
                    let mu = lam * j as f64 / 8.0;
                    let m = sup_exp_power(lam - mu, beta, x0);
                    c * m * (-mu * x0).exp() / mu
                })
                .fold(f64::INFINITY, f64::min)
        };
        // rounding margin on a closed-form bound
        r * (1.0 + 1e-12)
    }
}

/// `sup_{t >= x0} exp(-a t) (1 + t)^b`, assuming `a >= 0`.
fn sup_exp_power(a: f64, b: f64, x0: f64) -> f64 {
    let at = |t: f64| (-a * t + b * (1.0 + t).ln()).exp();
    if a < 0.0 {
        return f64::INFINITY;
    }
    if a == 0.0 {
        return if b <= 0.0 { at(x0) } else { f64::INFINITY };
    }
    if b <= 0.0 {
        return at(x0);
    }
    let t_star = b / a - 1.0;
    if t_star <= x0 {
        at(x0)
    } else {
        at(t_star)
    }
}

fn tail_interval(x0: f64) -> Interval {
    Interval::new(x0, f64::INFINITY)
}

/// Exact affine form `a + b t`, if the expression is affine.
pub fn as_affine(e: &Expr) -> Option<(f64, f64)> {
    match e {
        Expr::Const(c) => Some((*c, 0.0)),
        Expr::T => Some((0.0, 1.0)),
        Expr::Neg(u) => as_affine(u).map(|(a, b)| (-a, -b)),
        Expr::Add(u, v) => {
            let (a1, b1) = as_affine(u)?;
            let (a2, b2) = as_affine(v)?;
            Some((a1 + a2, b1 + b2))
        }
        Expr::Sub(u, v) => {
            let (a1, b1) = as_affine(u)?;
            let (a2, b2) = as_affine(v)?;
            Some((a1 - a2, b1 - b2))
        }
        Expr::Mul(u, v) => match (u.as_ref(), v.as_ref()) {
            (Expr::Const(c), w) | (w, Expr::Const(c)) => {
                as_affine(w).map(|(a, b)| (a * c, b * c))
            }
            _ => None,
        },
        Expr::Div(u, v) => match v.as_ref() {
            Expr::Const(c) if *c != 0.0 => as_affine(u).map(|(a, b)| (a / c, b / c)),
            _ => None,
        },
        _ => None,
    }
}

/// `(a, b)` with `e(t) <= a + b t` for `t >= x0` (`upper = true`), or
/// `e(t) >= a + b t` (`upper = false`).
fn affine_bound(e: &Expr, x0: f64, upper: bool) -> Option<(f64, f64)> {
    if let Some(ab) = as_affine(e) {
        return Some(ab);
    }
    let structural = match e {
        Expr::Neg(u) => affine_bound(u, x0, !upper).map(|(a, b)| (-a, -b)),
        Expr::Add(u, v) => {
            let (a1, b1) = affine_bound(u, x0, upper)?;
            let (a2, b2) = affine_bound(v, x0, upper)?;
            Some((a1 + a2, b1 + b2))
        }
        Expr::Sub(u, v) => {
            let (a1, b1) = affine_bound(u, x0, upper)?;
            let (a2, b2) = affine_bound(v, x0, !upper)?;
            Some((a1 - a2, b1 - b2))
        }
        Expr::Mul(u, v) => match (u.as_ref(), v.as_ref()) {
            (Expr::Const(c), w) | (w, Expr::Const(c)) => {
                let side = if *c >= 0.0 { upper } else { !upper };
                affine_bound(w, x0, side).map(|(a, b)| (a * c, b * c))
            }
            _ => None,
        },
        _ => None,
    };
    structural.or_else(|| {
        let r = e.enclose(tail_interval(x0));
        let v = if upper { r.hi } else { r.lo };
        v.is_finite().then_some((v, 0.0))
    })
}

/// Upper envelope of `|e(t)|` on `[x0, inf)`.
pub fn upper(e: &Expr, x0: f64) -> Option<Envelope> {
    let structural = upper_structural(e, x0).filter(Envelope::is_usable);
    let fallback = {
        let m = e.enclose(tail_interval(x0)).mag();
        m.is_finite().then(|| Envelope::constant(m))
    };
    match (structural, fallback) {
        (Some(s), Some(f)) => Some(if f.decays_faster_than(&s) { f } else { s }),
        (s, f) => s.or(f),
    }
}

fn upper_structural(e: &Expr, x0: f64) -> Option<Envelope> {
    match e {
        Expr::Const(c) => Some(Envelope::constant(*c)),
        Expr::T => Some(Envelope {
            coef: 1.0,
            rate: 0.0,
            power: 1.0,
        }),
        Expr::Neg(u) | Expr::Abs(u) => upper(u, x0),
        Expr::Sign(_) | Expr::Sin(_) | Expr::Cos(_) => Some(Envelope::constant(1.0)),
        Expr::Add(u, v) | Expr::Sub(u, v) => Some(upper(u, x0)?.sum(upper(v, x0)?, x0)),
        Expr::Mul(u, v) => Some(upper(u, x0)?.mul(upper(v, x0)?)),
        Expr::Div(u, v) => {
            let num = upper(u, x0)?;
            let den = lower(v, x0)?;
            Some(num.mul(den.pow(-1.0)))
        }
        Expr::Pow(u, k) => {
            if *k > 0.0 {
                Some(upper(u, x0)?.pow(*k))
            } else {
                Some(lower(u, x0)?.pow(*k))
            }
        }
        Expr::Exp(u) => {
            let (a, b) = affine_bound(u, x0, true)?;
            Some(Envelope {
                coef: a.exp(),
                rate: -b,
                power: 0.0,
            })
        }
        Expr::Ln1p(u) => {
            // ln(y) <= 2 sqrt(y) for y >= 1
            if u.enclose(tail_interval(x0)).lo < 0.0 {
                return None;
            }
            let one_plus = Envelope::constant(1.0).sum(upper(u, x0)?, x0);
            let s = one_plus.pow(0.5);
            Some(Envelope {
                coef: 2.0 * s.coef,
                ..s
            })
        }
    }
}

/// Lower envelope: `|e(t)| >= C exp(-rate t)(1+t)^power` on `[x0, inf)`.
/// Only available when `e` keeps a strict sign there.
pub fn lower(e: &Expr, x0: f64) -> Option<Envelope> {
    let enc = e.enclose(tail_interval(x0));
    if !(enc.lo > 0.0 || enc.hi < 0.0) {
        return None;
    }
    let fallback = {
        let m = if enc.lo > 0.0 { enc.lo } else { -enc.hi };
        (m > 0.0).then(|| Envelope::constant(m))
    };
    let structural = lower_structural(e, x0, enc).filter(|s| s.is_usable() && s.coef > 0.0);
    match (structural, fallback) {
        // for lower bounds the slower-decaying envelope is the better one
        (Some(s), Some(f)) => Some(if s.decays_faster_than(&f) { f } else { s }),
        (s, f) => s.or(f),
    }
}

fn lower_structural(e: &Expr, x0: f64, enc: Interval) -> Option<Envelope> {
    if let Some((a, b)) = as_affine(e) {
        let (a, b) = if a + b * x0 >= 0.0 { (a, b) } else { (-a, -b) };
        return if b == 0.0 {
            Some(Envelope::constant(a))
        } else if a > 0.0 && b > 0.0 {
            Some(Envelope {
                coef: a.min(b),
                rate: 0.0,
                power: 1.0,
            })
        } else if b > 0.0 && x0 > 0.0 {
            // a + b t >= (a + b x0)/(1 + x0) * (1 + t) once a <= b
            let c = (a + b * x0) / (1.0 + x0);
            (c > 0.0 && a <= b).then_some(Envelope {
                coef: c,
                rate: 0.0,
                power: 1.0,
            })
        } else {
            None
        };
    }
    match e {
        Expr::Neg(u) | Expr::Abs(u) => lower(u, x0),
        Expr::Mul(u, v) => Some(lower(u, x0)?.mul(lower(v, x0)?)),
        Expr::Div(u, v) => Some(lower(u, x0)?.mul(upper(v, x0)?.pow(-1.0))),
        Expr::Pow(u, k) => {
            if *k > 0.0 {
                Some(lower(u, x0)?.pow(*k))
            } else {
                Some(upper(u, x0)?.pow(*k))
            }
        }
        Expr::Exp(u) => {
            let (a, b) = affine_bound(u, x0, false)?;
            Some(Envelope {
                coef: a.exp(),
                rate: -b,
                power: 0.0,
            })
        }
        Expr::Add(u, v) => {
            // same strict sign on both terms: |u + v| >= max(|u|, |v|)
            let eu = u.enclose(tail_interval(x0));
            let ev = v.enclose(tail_interval(x0));
            let same_sign = (eu.lo >= 0.0 && ev.lo >= 0.0 && enc.lo > 0.0)
                || (eu.hi <= 0.0 && ev.hi <= 0.0 && enc.hi < 0.0);
            if !same_sign {
                return None;
            }
            match (lower(u, x0), lower(v, x0)) {
                (Some(a), Some(b)) => Some(if a.decays_faster_than(&b) { b } else { a }),
                (a, b) => a.or(b),
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_plus_t() -> Expr {
        Expr::c(1.0).add(Expr::t())
    }

    #[test]
    fn exponential_decay_envelope() {
        let e = Expr::c(3.0).mul(Expr::c(-2.0).mul(Expr::t()).exp());
        let env = upper(&e, 1.0).unwrap();
        assert_eq!(env.rate, 2.0);
        assert!((env.coef - 3.0).abs() < 1e-12);
        let tail = env.tail_integral(1.0);
        let exact = 1.5 * (-2.0f64).exp();
        assert!(tail >= exact && tail < exact * (1.0 + 1e-9));
    }

    #[test]
    fn algebraic_decay_envelope() {
        let e = one_plus_t().pow(-1.5);
        let env = upper(&e, 0.0).unwrap();
        assert_eq!((env.rate, env.power), (0.0, -1.5));
        let tail = env.tail_integral(3.0);
        assert!((tail - 2.0 * 4.0f64.powf(-0.5)).abs() < 1e-9);
    }

    #[test]
    fn oscillating_times_decay() {
        let e = Expr::t().ln1p().sin().mul(one_plus_t().pow(-0.75));
        let sq = upper(&e, 0.0).unwrap().pow(2.0);
        assert_eq!(sq.power, -1.5);
        assert!(sq.tail_integral(0.0).is_finite());
    }

    #[test]
    fn envelope_dominates_samples() {
        let exprs = vec![
            Expr::t().neg().exp().mul(Expr::t().sin()).add(one_plus_t().pow(-2.0)),
            Expr::t().mul(Expr::c(-0.5).mul(Expr::t()).exp()),
            Expr::t().cos().div(Expr::c(2.0).add(Expr::t().mul(Expr::t()))),
        ];
        for e in exprs {
            for &x0 in &[0.0, 2.0, 10.0] {
                let env = upper(&e, x0).unwrap();
                for i in 0..400 {
                    let t = x0 + i as f64 * 0.37;
                    assert!(e.eval(t).abs() <= env.eval(t) * (1.0 + 1e-12) + 1e-300, "{e} at {t}");
                }
            }
        }
    }

    #[test]
    fn growing_expression_has_no_finite_tail() {
        let env = upper(&Expr::t(), 0.0).unwrap();
        assert!(env.tail_integral(0.0).is_infinite());
        assert!(upper(&Expr::t().exp(), 0.0).unwrap().tail_integral(0.0).is_infinite());
    }
}
