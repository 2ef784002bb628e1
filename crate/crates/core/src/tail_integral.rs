//! Definite and improper integrals and the tail supremum
//! `S(t) = sup_{s >= t} |int_t^s f|`.
//!
//! `S(t)` is returned as a certified bracket: `value` is attained by the
//! cumulative integral at tracked nodes, and `value + remainder_bound` is an
//! upper bound that accounts for excursions between nodes, quadrature error
//! and everything past the horizon.

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::envelope;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::function_model::{
    evaluate, piece_index, CounterexampleParams, FunctionSpec, Model, Piece, Samples, TailRule,
};
use crate::interval::Interval;
use crate::numeric::CompensatedSum;
use crate::quadrature;

pub const DEFAULT_MAX_HORIZON: f64 = 1e6;

/// How far the cumulative integral is tracked before analytic tail bounds
/// take over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HorizonPolicy {
    /// Start at `t + 100` and double until the analytic tail bound drops
    /// below `tol / 2`, capped at `max_horizon`.
    Auto { max_horizon: f64 },
    Fixed(f64),
}

impl Default for HorizonPolicy {
    fn default() -> Self {
        HorizonPolicy::Auto {
            max_horizon: DEFAULT_MAX_HORIZON,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMethod {
    ExactPiecewise,
    AdaptiveQuadrature,
    AlternatingSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSupremumResult {
    pub t: f64,
    pub value: f64,
    pub remainder_bound: f64,
    pub horizon: f64,
    pub method: TailMethod,
    /// The cumulative integral is certified unbounded; `S(t) = inf`.
    pub unbounded: bool,
}

impl TailSupremumResult {
    /// Sound upper end of the bracket.
    pub fn upper(&self) -> f64 {
        if self.unbounded {
            f64::INFINITY
        } else {
            self.value + self.remainder_bound
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralStatus {
    Converged,
    Diverged,
    Oscillating,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImproperIntegral {
    pub value: f64,
    pub status: IntegralStatus,
    pub remainder_bound: f64,
    pub horizon: f64,
    /// `(T, int_a^T f)` pairs backing the status.
    pub evidence: Vec<(f64, f64)>,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

// ---------------------------------------------------------------------------
// definite integrals

fn eval_checked(e: &Expr, x: f64) -> Result<f64> {
    let v = e.eval(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { t: x, value: v })
    }
}

/// `int_a^b` over a single piece, with the quadrature error estimate.
fn piece_integral(p: &Piece, a: f64, b: f64, tol: f64) -> Result<(f64, f64, bool)> {
    if a == b {
        return Ok((0.0, 0.0, true));
    }
    match &p.anti {
        Some(anti) => Ok((eval_checked(anti, b)? - eval_checked(anti, a)?, 0.0, true)),
        None => {
            let r = quadrature::integrate(|x| p.expr.eval(x), a, b, tol)?;
            Ok((r.value, r.error, false))
        }
    }
}

pub(crate) fn sampled_integral(s: &Samples, a: f64, b: f64) -> f64 {
    let b = b.min(s.last_time());
    if b <= a {
        return 0.0;
    }
    let mut sum = CompensatedSum::new();
    let mut i = s.cell(a);
    let mut x = a;
    while x < b {
        let end = s.times[i + 1].min(b);
        sum.add(0.5 * (end - x) * (s.interpolate(x) + s.interpolate(end)));
        x = end;
        i += 1;
        if i + 1 >= s.times.len() {
            break;
        }
    }
    sum.value()
}

/// `int_a^b f` to absolute error `tol`; exact where antiderivatives exist.
pub fn integrate(spec: &FunctionSpec, a: f64, b: f64, tol: f64) -> Result<f64> {
    check_t(a)?;
    check_tol(tol)?;
    if !(b >= a && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must satisfy 0 <= a <= b < inf, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    match spec.model() {
        Model::Pieces(pieces) => {
            let first = piece_index(&pieces, a);
            let last = piece_index(&pieces, b);
            let share = tol / (last - first + 1) as f64;
            let mut sum = CompensatedSum::new();
            let mut err = 0.0;
            for p in &pieces[first..=last] {
                let (lo, hi) = (a.max(p.a), b.min(p.b));
                if hi > lo {
                    let (v, e, _) = piece_integral(p, lo, hi, share)?;
                    sum.add(v);
                    err += e;
                }
            }
            // the achievable accuracy is limited by rounding relative to the value
            if err > tol.max(64.0 * f64::EPSILON * sum.value().abs()) {
                return Err(Error::Quadrature {
                    a,
                    b,
                    estimate: err,
                });
            }
            Ok(sum.value())
        }
        Model::Sampled { samples, tail } => {
            let last = samples.last_time();
            if b > last && tail != Some(TailRule::Zero) {
                return Err(Error::BeyondSamples { t: b, last });
            }
            Ok(sampled_integral(samples, a, b))
        }
        Model::Bumps(p) => Ok(p.integral(a, b)),
    }
}

// ---------------------------------------------------------------------------
// analytic tails for piece models

/// Interval containing `int_H^s f` for every `s >= H`.
fn pieces_tail(pieces: &[Piece], h: f64) -> Interval {
    let p = &pieces[piece_index(pieces, h)];
    let by_envelope = envelope::upper(&p.expr, h)
        .map(|e| e.tail_integral(h))
        .filter(|v| v.is_finite())
        .map(|tau| Interval::new(-tau, tau));
    let by_anti = p.anti.as_ref().and_then(|anti| {
        let fh = anti.eval(h);
        let r = bounds::range(anti, h, f64::INFINITY, 1e-14);
        (fh.is_finite() && r.lo.is_finite() && r.hi.is_finite())
            .then(|| r.sub(Interval::point(fh)))
    });
    match (by_envelope, by_anti) {
        (Some(e), Some(a)) => {
            let lo = e.lo.max(a.lo);
            let hi = e.hi.min(a.hi);
            if lo <= hi {
                Interval::new(lo, hi)
            } else {
                e
            }
        }
        (Some(e), None) => e,
        (None, Some(a)) => a,
        (None, None) => Interval::new(f64::NEG_INFINITY, f64::INFINITY),
    }
}

fn choose_horizon(pieces: &[Piece], start: f64, tol: f64, policy: HorizonPolicy) -> (f64, Interval) {
    let last_start = pieces.last().map_or(0.0, |p| p.a);
    match policy {
        HorizonPolicy::Fixed(h) => {
            // analytic tails only exist on the final, unbounded segment
            let h = h.max(start).max(last_start);
            (h, pieces_tail(pieces, h))
        }
        HorizonPolicy::Auto { max_horizon } => {
            let cap = max_horizon.max(start);
            let mut h = (start + 100.0).max(last_start).min(cap.max(last_start));
            loop {
                let tail = pieces_tail(pieces, h);
                if tail.width() <= 0.5 * tol || h >= cap {
                    return (h, tail);
                }
                h = (2.0 * h).min(cap);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// tail supremum

const UNIFORM_STEP: f64 = 0.125;
const GEOMETRIC_RATIO: f64 = 1.05;
const MAX_DEPTH: u32 = 40;
const CELL_BUDGET: usize = 400_000;

/// Largest excursion of `G(s) = int_{x0}^{s} f` above `max(0, G(h))` and
/// below `min(0, G(h))`, given `f` in `[lo, hi]` on a cell of width `h`.
fn cell_excursion(i: f64, lo: f64, hi: f64, h: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (f64::INFINITY, f64::INFINITY);
    }
    if lo >= 0.0 || hi <= 0.0 {
        return (0.0, 0.0);
    }
    // G(s) <= min(hi s, I - lo (h - s)), G(s) >= max(lo s, I - hi (h - s))
    let s_up = ((i - lo * h) / (hi - lo)).clamp(0.0, h);
    let s_dn = ((hi * h - i) / (hi - lo)).clamp(0.0, h);
    let up = (hi * s_up - i.max(0.0)).max(0.0);
    let dn = (i.min(0.0) - lo * s_dn).max(0.0);
    (up, dn)
}

struct Cells {
    nodes: Vec<f64>,
    incr: Vec<f64>,
    up: Vec<f64>,
    dn: Vec<f64>,
    quad_err: f64,
    exact: bool,
}

impl Cells {
    #[allow(clippy::too_many_arguments)]
    fn push_cell(
        &mut self,
        p: &Piece,
        x0: f64,
        x1: f64,
        tol: f64,
        qtol: f64,
        depth: u32,
    ) -> Result<()> {
        let (i, err, exact) = piece_integral(p, x0, x1, qtol)?;
        let enc = bounds::enclose_mv(&p.expr, &p.deriv, x0, x1);
        let (up, dn) = cell_excursion(i, enc.lo, enc.hi, x1 - x0);
        let mid = 0.5 * (x0 + x1);
        let can_split = depth < MAX_DEPTH && self.nodes.len() < CELL_BUDGET && mid > x0 && mid < x1;
        if up.max(dn) > tol / 8.0 && can_split {
            self.push_cell(p, x0, mid, tol, qtol, depth + 1)?;
            return self.push_cell(p, mid, x1, tol, qtol, depth + 1);
        }
        self.nodes.push(x1);
        self.incr.push(i);
        self.up.push(up);
        self.dn.push(dn);
        self.quad_err += err;
        self.exact &= exact;
        Ok(())
    }
}

fn tail_nodes(ts: &[f64], joints: impl Iterator<Item = f64>, base: f64, dense_end: f64, h: f64) -> Vec<f64> {
    let mut nodes: Vec<f64> = ts.to_vec();
    nodes.extend(joints.filter(|&x| x > base && x < h));
    let mut x = base;
    while x < dense_end {
        nodes.push(x);
        x += UNIFORM_STEP;
    }
    let mut x = dense_end.max(base);
    while x < h {
        nodes.push(x);
        x = x * GEOMETRIC_RATIO + UNIFORM_STEP;
    }
    nodes.push(h);
    nodes.retain(|&x| x >= base && x <= h);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes
}

/// Running extrema of the cumulative integral over a node set, with
/// `tail` an interval for `C(s) - C(last node)` beyond the last node.
struct Extrema {
    cum: Vec<f64>,
    suf_max: Vec<f64>,
    suf_min: Vec<f64>,
    suf_up: Vec<f64>,
    suf_dn: Vec<f64>,
}

impl Extrema {
    fn build(incr: &[f64], up: &[f64], dn: &[f64], tail: Interval) -> Extrema {
        let n = incr.len() + 1;
        let mut cum = Vec::with_capacity(n);
        let mut acc = CompensatedSum::new();
        cum.push(0.0);
        for &d in incr {
            acc.add(d);
            cum.push(acc.value());
        }
        let mut suf_max = vec![0.0; n];
        let mut suf_min = vec![0.0; n];
        let mut suf_up = vec![0.0; n];
        let mut suf_dn = vec![0.0; n];
        let last = cum[n - 1];
        suf_max[n - 1] = last;
        suf_min[n - 1] = last;
        suf_up[n - 1] = last.max(last + tail.hi);
        suf_dn[n - 1] = last.min(last + tail.lo);
        for k in (0..n - 1).rev() {
            let (a, b) = (cum[k], cum[k + 1]);
            suf_max[k] = suf_max[k + 1].max(a);
            suf_min[k] = suf_min[k + 1].min(a);
            suf_up[k] = suf_up[k + 1].max(a.max(b) + up[k]);
            suf_dn[k] = suf_dn[k + 1].min(a.min(b) - dn[k]);
        }
        Extrema {
            cum,
            suf_max,
            suf_min,
            suf_up,
            suf_dn,
        }
    }

    /// `(attained, upper)` for the node with index `k`.
    fn at(&self, k: usize, slack: f64) -> (f64, f64) {
        let c = self.cum[k];
        let value = (self.suf_max[k] - c).max(c - self.suf_min[k]);
        let upper = (self.suf_up[k] - c).max(c - self.suf_dn[k]) + slack;
        (value, upper.max(value))
    }
}

fn node_index(nodes: &[f64], t: f64) -> usize {
    nodes.partition_point(|&x| x < t)
}

fn pieces_tail_supremum(
    pieces: &[Piece],
    ts: &[f64],
    tol: f64,
    policy: HorizonPolicy,
) -> Result<Vec<TailSupremumResult>> {
    let base = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let tmax = ts.iter().copied().fold(0.0, f64::max);
    let (h, tail) = choose_horizon(pieces, tmax, tol, policy);
    let joints = pieces.iter().skip(1).map(|p| p.a);
    let dense_end = (tmax + 100.0).min(h);
    let coarse = tail_nodes(ts, joints, base, dense_end, h);

    let mut cells = Cells {
        nodes: vec![coarse[0]],
        incr: Vec::new(),
        up: Vec::new(),
        dn: Vec::new(),
        quad_err: 0.0,
        exact: true,
    };
    let qtol_per_length = 1e-2 * tol / (h - base).max(1.0);
    for w in coarse.windows(2) {
        let p = &pieces[piece_index(pieces, w[0])];
        let qtol = (qtol_per_length * (w[1] - w[0])).max(1e-300);
        cells.push_cell(p, w[0], w[1], tol, qtol, 0)?;
    }
    let ex = Extrema::build(&cells.incr, &cells.up, &cells.dn, tail);
    let slack = 2.0 * cells.quad_err;
    let method = if cells.exact {
        TailMethod::ExactPiecewise
    } else {
        TailMethod::AdaptiveQuadrature
    };
    Ok(ts
        .iter()
        .map(|&t| {
            let (value, upper) = ex.at(node_index(&cells.nodes, t), slack);
            TailSupremumResult {
                t,
                value,
                remainder_bound: upper - value,
                horizon: h,
                method,
                unbounded: false,
            }
        })
        .collect())
}

fn sampled_tail_supremum(samples: &Samples, tail: Option<TailRule>, ts: &[f64]) -> Result<Vec<TailSupremumResult>> {
    let last = samples.last_time();
    let tail_mass = match tail {
        Some(TailRule::Zero) => 0.0,
        Some(TailRule::Bounded { abs_integral, .. }) => abs_integral,
        None => {
            return Err(Error::InvalidArgument(
                "sampled spec has no tail rule, so S(t) is undefined past the last sample".into(),
            ))
        }
    };
    // cumulative integral is monotone between samples and sign changes
    let mut nodes: Vec<f64> = samples.times.clone();
    for i in 0..samples.times.len() - 1 {
        let (v0, v1) = (samples.values[i], samples.values[i + 1]);
        if v0 * v1 < 0.0 {
            let (t0, t1) = (samples.times[i], samples.times[i + 1]);
            nodes.push(t0 + (t1 - t0) * v0 / (v0 - v1));
        }
    }
    nodes.extend(ts.iter().copied().filter(|&t| t <= last));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let incr: Vec<f64> = nodes
        .windows(2)
        .map(|w| sampled_integral(samples, w[0], w[1]))
        .collect();
    let zeros = vec![0.0; incr.len()];
    let ex = Extrema::build(&incr, &zeros, &zeros, Interval::new(-tail_mass, tail_mass));
    Ok(ts
        .iter()
        .map(|&t| {
            let (value, upper) = if t > last {
                (0.0, tail_mass)
            } else {
                ex.at(node_index(&nodes, t), 0.0)
            };
            TailSupremumResult {
                t,
                value,
                remainder_bound: upper - value,
                horizon: last.max(t),
                method: TailMethod::ExactPiecewise,
                unbounded: false,
            }
        })
        .collect())
}

/// Exact `S(t)` for the bump train: past `t` the cumulative integral moves
/// monotonically within each bump, and the signed partial sums of an
/// alternating series with decreasing terms stay between the first two.
pub fn counterexample_tail_supremum(p: &CounterexampleParams, t: f64) -> (f64, u64) {
    let n = t.floor() as u64;
    let (rest, next) = if n >= p.start_index && t - (n as f64) < 2.0 * p.half_width(n) {
        let r = CounterexampleParams::sign(n) * (p.bump_area(n) - p.bump_partial(n, t - n as f64));
        (r, n + 1)
    } else {
        (0.0, (n + 1).max(p.start_index))
    };
    let a = CounterexampleParams::sign(next) * p.bump_area(next);
    (rest.abs().max((rest + a).abs()), next)
}

fn witness_tail_supremum(gamma: f64, t: f64) -> TailSupremumResult {
    let k = 1.0 - gamma;
    let u = t.ln_1p();
    // one full period of u past t
    let horizon = (1.0 + t) * std::f64::consts::TAU.exp() - 1.0;
    if k > 0.0 {
        TailSupremumResult {
            t,
            value: f64::INFINITY,
            remainder_bound: 0.0,
            horizon,
            method: TailMethod::ExactPiecewise,
            unbounded: true,
        }
    } else {
        // int_t^s f = cos(u_t) - cos(u_s) and u_s sweeps every phase
        let v = 1.0 + u.cos().abs();
        TailSupremumResult {
            t,
            value: v,
            remainder_bound: 4.0 * f64::EPSILON * v,
            horizon,
            method: TailMethod::ExactPiecewise,
            unbounded: false,
        }
    }
}

/// `S(t)` for every `t` in `ts`; sharing one sweep of the cumulative
/// integral across the grid.
pub fn tail_supremum_grid(
    spec: &FunctionSpec,
    ts: &[f64],
    tol: f64,
    policy: HorizonPolicy,
) -> Result<Vec<TailSupremumResult>> {
    check_tol(tol)?;
    for &t in ts {
        check_t(t)?;
    }
    if ts.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(gamma) = spec.witness_gamma() {
        return Ok(ts.iter().map(|&t| witness_tail_supremum(gamma, t)).collect());
    }
    match spec.model() {
        Model::Pieces(pieces) => pieces_tail_supremum(&pieces, ts, tol, policy),
        Model::Sampled { samples, tail } => sampled_tail_supremum(samples, tail, ts),
        Model::Bumps(p) => Ok(ts
            .iter()
            .map(|&t| {
                let (value, next) = counterexample_tail_supremum(&p, t);
                TailSupremumResult {
                    t,
                    value,
                    remainder_bound: 0.0,
                    horizon: (next + 1) as f64,
                    method: TailMethod::AlternatingSeries,
                    unbounded: false,
                }
            })
            .collect()),
    }
}

pub fn tail_supremum(
    spec: &FunctionSpec,
    t: f64,
    tol: f64,
    policy: HorizonPolicy,
) -> Result<TailSupremumResult> {
    Ok(tail_supremum_grid(spec, &[t], tol, policy)?[0])
}

/// Brute-force check: left Riemann sums on a uniform grid over
/// `[t, horizon]`, returning the largest `|cumulative|`.
pub fn tail_supremum_oracle(spec: &FunctionSpec, t: f64, grid_step: f64, horizon: f64) -> Result<f64> {
    check_t(t)?;
    if !(grid_step > 0.0 && horizon > t) {
        return Err(Error::InvalidArgument(
            "oracle needs grid_step > 0 and horizon > t".into(),
        ));
    }
    let steps = ((horizon - t) / grid_step).ceil() as u64;
    let mut cum = 0.0;
    let mut best: f64 = 0.0;
    for i in 0..steps {
        let x = t + i as f64 * grid_step;
        let w = grid_step.min(horizon - x);
        cum += evaluate(spec, x)? * w;
        best = best.max(cum.abs());
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// improper integrals

fn witness_improper(gamma: f64, a: f64, policy: HorizonPolicy) -> ImproperIntegral {
    let (_, anti) = crate::function_model::witness_expressions(gamma);
    let fa = anti.eval(a);
    let h = match policy {
        HorizonPolicy::Auto { max_horizon } => max_horizon,
        HorizonPolicy::Fixed(h) => h,
    }
    .max(a);
    // extrema of the cumulative integral sit at the zeros of f, u = j pi
    let mut evidence = Vec::new();
    let mut j = ((a.ln_1p()) / std::f64::consts::PI).floor() as i64 + 1;
    loop {
        let x = (j as f64 * std::f64::consts::PI).exp() - 1.0;
        if x > h {
            break;
        }
        evidence.push((x, anti.eval(x) - fa));
        j += 1;
    }
    let swings: Vec<f64> = evidence.windows(2).map(|w| (w[1].1 - w[0].1).abs()).collect();
    let non_shrinking = swings.len() >= 2 && swings.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    ImproperIntegral {
        value: anti.eval(h) - fa,
        status: if non_shrinking {
            IntegralStatus::Oscillating
        } else {
            IntegralStatus::Inconclusive
        },
        remainder_bound: f64::INFINITY,
        horizon: h,
        evidence,
    }
}

fn counterexample_improper(p: &CounterexampleParams, a: f64, tol: f64, policy: HorizonPolicy) -> ImproperIntegral {
    let start = (a.floor() as u64 + 1).max(p.start_index);
    let end = match policy {
        HorizonPolicy::Fixed(h) => (h.max(a).floor() as u64).max(start),
        HorizonPolicy::Auto { max_horizon } => {
            // smallest integer horizon whose next omitted bump is below tol
            let cap = (max_horizon.max(a).floor() as u64).max(start);
            let mut n = start;
            while n < cap && p.bump_area(n) > tol {
                n = (2 * n).min(cap);
            }
            n
        }
    };
    let mut evidence = Vec::new();
    let mut x = start;
    while x < end {
        evidence.push((x as f64, p.integral(a, x as f64)));
        x *= 2;
    }
    let value = p.integral(a, end as f64);
    evidence.push((end as f64, value));
    ImproperIntegral {
        value,
        status: IntegralStatus::Converged,
        remainder_bound: p.bump_area(end),
        horizon: end as f64,
        evidence,
    }
}

fn pieces_improper(spec: &FunctionSpec, pieces: &[Piece], a: f64, tol: f64, policy: HorizonPolicy) -> Result<ImproperIntegral> {
    let (h, tail) = choose_horizon(pieces, a, tol, policy);
    let body = integrate(spec, a, h, 0.25 * tol)?;
    let mut evidence = Vec::new();
    let mut x = a + 1.0;
    while x < h {
        evidence.push((x, integrate(spec, a, x, tol)?));
        x = 2.0 * x + 1.0;
    }
    evidence.push((h, body));
    let last = &pieces[piece_index(pieces, h)];
    // an antiderivative with a decaying envelope has limit 0 at infinity
    let anti_limit = last.anti.as_ref().and_then(|anti| {
        let env = envelope::upper(anti, h)?;
        let decays = env.coef == 0.0 || env.rate > 0.0 || (env.rate == 0.0 && env.power < 0.0);
        decays.then(|| anti.eval(h)).filter(|v| v.is_finite())
    });
    Ok(if let Some(fh) = anti_limit {
        ImproperIntegral {
            value: body - fh,
            status: IntegralStatus::Converged,
            remainder_bound: 0.25 * tol,
            horizon: h,
            evidence,
        }
    } else if tail.lo.is_finite() && tail.hi.is_finite() && envelope::upper(&last.expr, h).is_some_and(|e| e.tail_integral(h).is_finite()) {
        let mid = 0.5 * (tail.lo + tail.hi);
        ImproperIntegral {
            value: body + mid,
            status: IntegralStatus::Converged,
            remainder_bound: 0.5 * tail.width() + 0.25 * tol,
            horizon: h,
            evidence,
        }
    } else {
        ImproperIntegral {
            value: body,
            status: IntegralStatus::Inconclusive,
            remainder_bound: f64::INFINITY,
            horizon: h,
            evidence,
        }
    })
}

/// `int_a^inf f` with a convergence status.
pub fn improper_integral(
    spec: &FunctionSpec,
    a: f64,
    tol: f64,
    policy: HorizonPolicy,
) -> Result<ImproperIntegral> {
    check_t(a)?;
    check_tol(tol)?;
    if let Some(gamma) = spec.witness_gamma() {
        return Ok(witness_improper(gamma, a, policy));
    }
    match spec.model() {
        Model::Pieces(pieces) => pieces_improper(spec, &pieces, a, tol, policy),
        Model::Bumps(p) => Ok(counterexample_improper(&p, a, tol, policy)),
        Model::Sampled { samples, tail } => {
            let last = samples.last_time();
            let body = sampled_integral(samples, a, last);
            let (status, rem) = match tail {
                Some(TailRule::Zero) => (IntegralStatus::Converged, 0.0),
                Some(TailRule::Bounded { abs_integral, .. }) => {
                    (IntegralStatus::Converged, abs_integral)
                }
                None => (IntegralStatus::Inconclusive, f64::INFINITY),
            };
            Ok(ImproperIntegral {
                value: body,
                status,
                remainder_bound: rem,
                horizon: last.max(a),
                evidence: vec![(last.max(a), body)],
            })
        }
    }
}
