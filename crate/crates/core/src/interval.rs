//! Outward-rounded interval arithmetic over the expression grammar.
//!
//! Rust exposes no rounding-mode control, so every operation widens its
//! result by a few ulps instead. Endpoints may be infinite; `0 * inf` is
//! taken as 0 at endpoints, which is correct for the limits that occur on
//! unbounded time intervals.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::expr::{pow_real, Expr};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

pub const ENTIRE: Interval = Interval {
    lo: f64::NEG_INFINITY,
    hi: f64::INFINITY,
};

fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

/// Widen by a relative margin for library functions that are not correctly
/// rounded.
fn widen_rel(x: Interval, ulps: f64) -> Interval {
    let eps = f64::EPSILON * ulps;
    let lo = if x.lo.is_finite() {
        down(x.lo - x.lo.abs() * eps)
    } else {
        x.lo
    };
    let hi = if x.hi.is_finite() {
        up(x.hi + x.hi.abs() * eps)
    } else {
        x.hi
    };
    Interval { lo, hi }
}

fn emul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        debug_assert!(!(lo > hi), "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Interval {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_valid(&self) -> bool {
        !(self.lo.is_nan() || self.hi.is_nan()) && self.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    fn sanitize(self) -> Interval {
        if self.is_valid() {
            self
        } else {
            ENTIRE
        }
    }

    pub fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval {
            lo: down(self.lo + o.lo),
            hi: up(self.hi + o.hi),
        }
        .sanitize()
    }

    pub fn sub(self, o: Interval) -> Interval {
        self.add(o.neg())
    }

    pub fn mul(self, o: Interval) -> Interval {
        let p = [
            emul(self.lo, o.lo),
            emul(self.lo, o.hi),
            emul(self.hi, o.lo),
            emul(self.hi, o.hi),
        ];
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lo: down(lo),
            hi: up(hi),
        }
        .sanitize()
    }

    pub fn recip(self) -> Interval {
        if self.contains(0.0) {
            return ENTIRE;
        }
        Interval {
            lo: down(1.0 / self.hi),
            hi: up(1.0 / self.lo),
        }
    }

    pub fn div(self, o: Interval) -> Interval {
        self.mul(o.recip())
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            Interval {
                lo: 0.0,
                hi: self.mag(),
            }
        }
    }

    pub fn sign(self) -> Interval {
        if self.lo > 0.0 {
            Interval::point(1.0)
        } else if self.hi < 0.0 {
            Interval::point(-1.0)
        } else if self.lo == 0.0 && self.hi == 0.0 {
            Interval::point(0.0)
        } else {
            Interval {
                lo: if self.lo < 0.0 { -1.0 } else { 0.0 },
                hi: if self.hi > 0.0 { 1.0 } else { 0.0 },
            }
        }
    }

    pub fn exp(self) -> Interval {
        let r = widen_rel(
            Interval {
                lo: self.lo.exp(),
                hi: self.hi.exp(),
            },
            4.0,
        );
        Interval {
            lo: r.lo.max(0.0),
            hi: r.hi,
        }
    }

    pub fn ln1p(self) -> Interval {
        if self.hi <= -1.0 {
            return ENTIRE;
        }
        let lo = if self.lo <= -1.0 {
            f64::NEG_INFINITY
        } else {
            self.lo.ln_1p()
        };
        widen_rel(
            Interval {
                lo,
                hi: self.hi.ln_1p(),
            },
            4.0,
        )
    }

    /// Enclosure of `sin`/`cos`; `max_at`/`min_at` locate the lattice of
    /// extrema modulo 2pi.
    fn periodic(self, f: fn(f64) -> f64, max_at: f64, min_at: f64) -> Interval {
        if !self.lo.is_finite() || !self.hi.is_finite() || self.width() >= TAU {
            return Interval { lo: -1.0, hi: 1.0 };
        }
        let contains_lattice = |base: f64| {
            let k_lo = ((self.lo - base) / TAU - 1e-12).ceil();
            let k_hi = ((self.hi - base) / TAU + 1e-12).floor();
            k_lo <= k_hi
        };
        let a = f(self.lo);
        let b = f(self.hi);
        let mut r = widen_rel(
            Interval {
                lo: a.min(b),
                hi: a.max(b),
            },
            4.0,
        );
        // absolute slack for the argument reduction of large inputs
        let slack = 4.0 * f64::EPSILON * (1.0 + self.mag());
        r.lo -= slack;
        r.hi += slack;
        if contains_lattice(max_at) {
            r.hi = 1.0;
        }
        if contains_lattice(min_at) {
            r.lo = -1.0;
        }
        Interval {
            lo: r.lo.max(-1.0),
            hi: r.hi.min(1.0),
        }
    }

    pub fn sin(self) -> Interval {
        self.periodic(f64::sin, FRAC_PI_2, -FRAC_PI_2)
    }

    pub fn cos(self) -> Interval {
        self.periodic(f64::cos, 0.0, PI)
    }

    pub fn pow(self, k: f64) -> Interval {
        if k == 0.0 {
            return Interval::point(1.0);
        }
        let integral = k == k.trunc() && k.abs() < 1e9;
        let r = if integral {
            let n = k as i64;
            let p = |x: f64| pow_real(x, k);
            if n > 0 && n % 2 == 0 {
                let m_hi = self.mag();
                let m_lo = if self.contains(0.0) {
                    0.0
                } else {
                    self.lo.abs().min(self.hi.abs())
                };
                Interval {
                    lo: p(m_lo),
                    hi: p(m_hi),
                }
            } else if n > 0 {
                Interval {
                    lo: p(self.lo),
                    hi: p(self.hi),
                }
            } else {
                if self.contains(0.0) {
                    return ENTIRE;
                }
                return self.pow(-k).recip();
            }
        } else {
            if self.hi < 0.0 {
                return ENTIRE;
            }
            let lo = self.lo.max(0.0);
            if k > 0.0 {
                Interval {
                    lo: lo.powf(k),
                    hi: self.hi.powf(k),
                }
            } else {
                Interval {
                    lo: self.hi.powf(k),
                    hi: lo.powf(k),
                }
            }
        };
        let r = widen_rel(r, 8.0 + k.abs());
        if !integral || (k as i64) % 2 == 0 {
            Interval {
                lo: r.lo.max(0.0),
                hi: r.hi,
            }
        } else {
            r
        }
    }
}

impl Expr {
    /// Interval enclosure of the expression for `t` ranging over `x`.
    pub fn enclose(&self, x: Interval) -> Interval {
        match self {
            Expr::Const(v) => Interval::point(*v),
            Expr::T => x,
            Expr::Neg(a) => a.enclose(x).neg(),
            Expr::Add(a, b) => a.enclose(x).add(b.enclose(x)),
            Expr::Sub(a, b) => a.enclose(x).sub(b.enclose(x)),
            Expr::Mul(a, b) => {
                // square of the same subexpression is nonnegative
                if a == b {
                    a.enclose(x).pow(2.0)
                } else {
                    a.enclose(x).mul(b.enclose(x))
                }
            }
            Expr::Div(a, b) => a.enclose(x).div(b.enclose(x)),
            Expr::Pow(a, k) => a.enclose(x).pow(*k),
            Expr::Exp(a) => a.enclose(x).exp(),
            Expr::Sin(a) => a.enclose(x).sin(),
            Expr::Cos(a) => a.enclose(x).cos(),
            Expr::Ln1p(a) => a.enclose(x).ln1p(),
            Expr::Abs(a) => a.enclose(x).abs(),
            Expr::Sign(a) => a.enclose(x).sign(),
        }
    }

    /// Enclosure over `[a, b]` using `pieces` equal subintervals (a single
    /// piece when `b` is infinite).
    pub fn enclose_split(&self, a: f64, b: f64, pieces: usize) -> Interval {
        if !b.is_finite() || pieces <= 1 {
            return self.enclose(Interval::new(a, b));
        }
        let h = (b - a) / pieces as f64;
        let mut acc: Option<Interval> = None;
        for i in 0..pieces {
            let lo = a + h * i as f64;
            let hi = if i + 1 == pieces { b } else { a + h * (i + 1) as f64 };
            let r = self.enclose(Interval::new(lo, hi));
            acc = Some(match acc {
                Some(r0) => r0.hull(&r),
                None => r,
            });
        }
        acc.unwrap_or(ENTIRE)
    }
}
