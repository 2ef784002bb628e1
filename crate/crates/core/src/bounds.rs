//! Branch-and-bound maximization of expressions over time intervals.
//!
//! Upper bounds come from interval enclosures (and decay envelopes on
//! unbounded boxes), lower bounds from point evaluations, so the returned
//! bracket always contains the true supremum.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::envelope;
use crate::expr::Expr;
use crate::interval::Interval;

/// Bracket `[lower, upper]` around a supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupBracket {
    pub lower: f64,
    pub upper: f64,
}

struct Cell {
    lo: f64,
    hi: f64,
    upper: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

const MAX_ITER: usize = 20_000;

fn split(lo: f64, hi: f64) -> Option<(f64, f64, f64)> {
    if hi.is_infinite() {
        let m = 2.0 * lo + 1.0;
        return (m.is_finite() && m < 1e300).then_some((lo, m, hi));
    }
    let m = 0.5 * (lo + hi);
    (m > lo && m < hi && hi - lo > 1e-13 * (1.0 + lo.abs())).then_some((lo, m, hi))
}

/// Generic maximizer: `cell_upper` bounds the objective over a box,
/// `point` evaluates it (NaN is ignored).
fn maximize(
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    cell_upper: impl Fn(f64, f64) -> f64,
    point: impl Fn(f64) -> f64,
) -> SupBracket {
    let mut best = f64::NEG_INFINITY;
    let probe = |x: f64, best: &mut f64| {
        let v = point(x);
        if v > *best {
            *best = v;
        }
    };
    probe(a, &mut best);
    if b.is_finite() {
        probe(b, &mut best);
    }
    let mut heap = BinaryHeap::new();
    heap.push(Cell {
        lo: a,
        hi: b,
        upper: cell_upper(a, b),
    });
    let mut iter = 0;
    while let Some(cell) = heap.pop() {
        iter += 1;
        if cell.upper.is_nan() {
            return SupBracket {
                lower: best,
                upper: f64::INFINITY,
            };
        }
        let gap_ok = cell.upper - best <= abs_tol + rel_tol * best.abs();
        if gap_ok || iter >= MAX_ITER {
            return SupBracket {
                lower: best,
                upper: cell.upper.max(best),
            };
        }
        match split(cell.lo, cell.hi) {
            Some((l, m, h)) => {
                probe(m, &mut best);
                if h.is_finite() {
                    probe(0.5 * (l + m), &mut best);
                    probe(0.5 * (m + h), &mut best);
                }
                for (x, y) in [(l, m), (m, h)] {
                    let u = cell_upper(x, y);
                    if u >= best || u.is_nan() {
                        heap.push(Cell { lo: x, hi: y, upper: u });
                    }
                }
            }
            None => {
                return SupBracket {
                    lower: best,
                    upper: cell.upper.max(best),
                };
            }
        }
    }
    SupBracket {
        lower: best,
        upper: best,
    }
}

/// Natural enclosure intersected with the mean-value form
/// `f(mid) + f'(box) * [-r, r]`, which is second-order tight near extrema.
pub(crate) fn enclose_mv(e: &Expr, de: &Expr, lo: f64, hi: f64) -> Interval {
    let natural = e.enclose(Interval::new(lo, hi));
    if !hi.is_finite() {
        return natural;
    }
    let mid = 0.5 * (lo + hi);
    let r = Interval::new(lo - mid, hi - mid).mag();
    let slope = de.enclose(Interval::new(lo, hi)).mag();
    let centre = e.enclose(Interval::point(mid));
    if !(slope.is_finite() && centre.is_valid()) {
        return natural;
    }
    let mv = centre.add(Interval::new(-slope, slope).mul(Interval::point(r)));
    let (l, h) = (natural.lo.max(mv.lo), natural.hi.min(mv.hi));
    if l <= h {
        Interval::new(l, h)
    } else {
        natural
    }
}

fn envelope_sup(e: &Expr, lo: f64) -> f64 {
    envelope::upper(e, lo).map_or(f64::INFINITY, |env| env.sup_from(lo))
}

/// Bracket on `sup_{t in [a, b]} |e(t)|`; `b` may be infinite.
pub fn sup_abs(e: &Expr, a: f64, b: f64, rel_tol: f64) -> SupBracket {
    let de = e.derivative();
    maximize(
        a,
        b,
        1e-300,
        rel_tol,
        |lo, hi| {
            let m = enclose_mv(e, &de, lo, hi).mag();
            if hi.is_infinite() {
                m.min(envelope_sup(e, lo))
            } else {
                m
            }
        },
        |x| e.eval(x).abs(),
    )
}

/// Certified outer enclosure of the range of `e` over `[a, b]`.
pub fn range(e: &Expr, a: f64, b: f64, tol: f64) -> Interval {
    let de = e.derivative();
    let tail = |lo: f64, hi: f64| {
        if hi.is_infinite() {
            envelope_sup(e, lo)
        } else {
            f64::INFINITY
        }
    };
    let max = maximize(
        a,
        b,
        tol,
        0.0,
        |lo, hi| enclose_mv(e, &de, lo, hi).hi.min(tail(lo, hi)),
        |x| e.eval(x),
    );
    let min = maximize(
        a,
        b,
        tol,
        0.0,
        |lo, hi| (-enclose_mv(e, &de, lo, hi).lo).min(tail(lo, hi)),
        |x| -e.eval(x),
    );
    Interval {
        lo: -min.upper,
        hi: max.upper,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_of_decaying_exponential() {
        let e = Expr::t().neg().exp().neg();
        let s = sup_abs(&e, 0.0, f64::INFINITY, 1e-12);
        assert_eq!(s.lower, 1.0);
        assert!(s.upper >= 1.0 && s.upper < 1.0 + 1e-9);
    }

    #[test]
    fn sup_of_damped_oscillation_matches_dense_scan() {
        // f = e^{-t} sin t peaks at t = pi/4
        let e = Expr::t().neg().exp().mul(Expr::t().sin());
        let s = sup_abs(&e, 0.0, f64::INFINITY, 1e-10);
        let exact = (-std::f64::consts::FRAC_PI_4).exp() * std::f64::consts::FRAC_PI_4.sin();
        assert!(s.lower <= exact * (1.0 + 1e-12) && s.upper >= exact);
        assert!(s.upper - exact < 1e-8);
    }

    #[test]
    fn range_of_witness_like_expression() {
        let e = Expr::t().ln1p().sin().mul(Expr::c(1.0).add(Expr::t()).pow(-0.75));
        let r = range(&e, 0.0, 50.0, 1e-9);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=500_000 {
            let v = e.eval(i as f64 * 1e-4);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(r.lo <= lo && r.hi >= hi);
        assert!(hi - r.hi > -1e-6 && r.lo - lo > -1e-6);
    }

    #[test]
    fn unbounded_growth_has_infinite_sup() {
        let s = sup_abs(&Expr::t(), 0.0, f64::INFINITY, 1e-9);
        assert!(s.upper.is_infinite());
    }
}
