//! Lebesgue norms of `f` and `f'`, sup-norm bounds and `W^{1,p,q}`
//! membership reports.

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds;
use crate::envelope;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::function_model::{evaluate, CounterexampleParams, FunctionSpec, Model, Piece, Samples, TailRule};
use crate::numeric::CompensatedSum;
use crate::quadrature;
use crate::tail_integral::HorizonPolicy;

/// A norm that is either a certified finite upper bound (accurate to the
/// requested tolerance), divergent with growth evidence, or undecided.
#[derive(Debug, Clone, PartialEq)]
pub enum NormValue {
    Finite(f64),
    /// `witness` holds `(horizon, partial value)` pairs that grow without
    /// bound; `certified` marks divergence proved analytically rather than
    /// inferred from the growth pattern.
    Divergent {
        witness: Vec<(f64, f64)>,
        certified: bool,
    },
    Inconclusive,
}

impl NormValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            NormValue::Finite(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, NormValue::Divergent { .. })
    }
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormValue::Finite(v) => s.serialize_f64(*v),
            NormValue::Divergent { witness, certified } => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("status", "divergent")?;
                m.serialize_entry("witness", witness)?;
                m.serialize_entry("certified", certified)?;
                m.end()
            }
            NormValue::Inconclusive => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("status", "inconclusive")?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for NormValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        if let Some(x) = v.as_f64() {
            return Ok(NormValue::Finite(x));
        }
        match v.get("status").and_then(Value::as_str) {
            Some("divergent") => {
                let witness = serde_json::from_value(v["witness"].clone()).map_err(de::Error::custom)?;
                let certified = v.get("certified").and_then(Value::as_bool).unwrap_or(false);
                Ok(NormValue::Divergent { witness, certified })
            }
            Some("inconclusive") => Ok(NormValue::Inconclusive),
            _ => Err(de::Error::custom("expected a number or {\"status\": ...}")),
        }
    }
}

/// Serializes `q = inf` as the string `"inf"`.
pub mod serde_q {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &f64, s: S) -> Result<S::Ok, S::Error> {
        if q.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*q)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Q {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Q::deserialize(d)? {
            Q::Num(x) => Ok(x),
            Q::Str(s) => super::parse_q(&s).map_err(serde::de::Error::custom),
        }
    }
}

/// Parses `q`, accepting `inf` (and `infinity`) for the essential sup.
pub fn parse_q(s: &str) -> std::result::Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        other => other.parse::<f64>().map_err(|e| format!("invalid q {s:?}: {e}")),
    }
}

pub fn format_q(q: f64) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        format!("{q}")
    }
}

/// `r = p (q - 1) / q`, with `r = p` for `q = inf`.
pub fn embedding_r(p: f64, q: f64) -> f64 {
    if q.is_infinite() {
        p
    } else {
        p * (q - 1.0) / q
    }
}

/// `(q - 1) / q`, with `1` for `q = inf`.
pub fn holder_exponent(q: f64) -> f64 {
    if q.is_infinite() {
        1.0
    } else {
        (q - 1.0) / q
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p must lie in [1, inf), got {p}")))
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("q must lie in (1, inf], got {q}")))
    }
}

fn max_horizon(policy: HorizonPolicy) -> f64 {
    match policy {
        HorizonPolicy::Auto { max_horizon } => max_horizon,
        HorizonPolicy::Fixed(h) => h,
    }
}

// ---------------------------------------------------------------------------
// integrals of powers

/// `int_a^b |g|^r` over chunks that double in length, with the summed
/// quadrature error.
fn power_integral(g: &Expr, r: f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if b <= a {
        return Ok((0.0, 0.0));
    }
    let mut cuts = vec![a];
    let mut x = a;
    while x < b {
        x = (2.0 * x + 1.0).min(b).max(x + 1.0).min(b);
        cuts.push(x);
    }
    let share = tol / cuts.len() as f64;
    let mut sum = CompensatedSum::new();
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let q = quadrature::integrate(|t| g.eval(t).abs().powf(r), w[0], w[1], share)?;
        sum.add(q.value);
        err += q.error;
    }
    Ok((sum.value(), err))
}

/// `int_H^inf |g|^r` bound from a decay envelope.
fn envelope_power_tail(g: &Expr, r: f64, h: f64) -> f64 {
    envelope::upper(g, h).map_or(f64::INFINITY, |e| e.pow(r).tail_integral(h))
}

/// `|g| >= env` with a non-integrable `env^r` proves divergence.
fn envelope_power_diverges(g: &Expr, r: f64, h: f64) -> bool {
    envelope::lower(g, h).is_some_and(|e| {
        let e = e.pow(r);
        e.coef > 0.0 && (e.rate < 0.0 || (e.rate == 0.0 && e.power >= -1.0))
    })
}

/// `int_0^inf |g|^r` over pieces (`g` selects `f` or `f'` per piece), as a
/// certified upper bound, or divergence evidence.
fn pieces_power_norm(
    pieces: &[Piece],
    select: impl Fn(&Piece) -> &Expr,
    r: f64,
    a: f64,
    tol: f64,
    policy: HorizonPolicy,
) -> Result<std::result::Result<f64, NormValue>> {
    let last = pieces.last().expect("at least one piece");
    let g_last = select(last);
    let cap = max_horizon(policy).max(last.a).max(a);
    let mut h = match policy {
        HorizonPolicy::Fixed(h) => h.max(last.a).max(a),
        HorizonPolicy::Auto { .. } => (a + 100.0).max(last.a).min(cap),
    };
    let mut tail = envelope_power_tail(g_last, r, h);
    if let HorizonPolicy::Auto { .. } = policy {
        while tail > 0.5 * tol && h < cap {
            h = (2.0 * h).min(cap);
            tail = envelope_power_tail(g_last, r, h);
        }
    }
    let partial = |end: f64| -> Result<(f64, f64)> {
        let mut total = 0.0;
        let mut err = 0.0;
        for p in pieces {
            let (lo, hi) = (a.max(p.a), end.min(p.b));
            if hi > lo {
                let (v, e) = power_integral(select(p), r, lo, hi, 0.25 * tol)?;
                total += v;
                err += e;
            }
        }
        Ok((total, err))
    };
    if tail.is_finite() {
        let (v, e) = partial(h)?;
        return Ok(Ok(v + e + tail));
    }
    // growth evidence at doubling horizons
    let mut witness = Vec::new();
    let mut x = (a + 1.0).max(1.0);
    while x <= h {
        witness.push((x, partial(x)?.0));
        x *= 2.0;
    }
    if envelope_power_diverges(g_last, r, last.a.max(a)) {
        return Ok(Err(NormValue::Divergent {
            witness,
            certified: true,
        }));
    }
    let incr: Vec<f64> = witness.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let k = incr.len();
    let non_shrinking = k >= 4 && incr[k - 4..].windows(2).all(|w| w[1] >= w[0]) && incr[k - 1] > 0.0;
    Ok(Err(if non_shrinking {
        NormValue::Divergent {
            witness,
            certified: false,
        }
    } else {
        NormValue::Inconclusive
    }))
}

/// `int |linear|^p` over one cell from `v0` to `v1` of width `w`.
fn linear_power_integral(v0: f64, v1: f64, w: f64, p: f64) -> f64 {
    if v0 * v1 < 0.0 {
        let z = w * v0 / (v0 - v1);
        return linear_power_integral(v0, 0.0, z, p) + linear_power_integral(0.0, v1, w - z, p);
    }
    let (a, b) = (v0.abs(), v1.abs());
    if (a - b).abs() <= 1e-14 * a.max(b) {
        return w * a.max(b).powf(p);
    }
    w * (b.powf(p + 1.0) - a.powf(p + 1.0)) / ((p + 1.0) * (b - a))
}

fn sampled_power_integral(s: &Samples, p: f64, a: f64) -> f64 {
    let mut sum = CompensatedSum::new();
    for i in 0..s.times.len() - 1 {
        let (t0, t1) = (s.times[i], s.times[i + 1]);
        if t1 <= a {
            continue;
        }
        let lo = t0.max(a);
        sum.add(linear_power_integral(s.interpolate(lo), s.values[i + 1], t1 - lo, p));
    }
    sum.value()
}

// ---------------------------------------------------------------------------
// L^p norms

/// `sum_{n=n0}^{N} int |f_n|^p`, which equals `int_0^{N+1} |f|^p`.
pub fn counterexample_partial_power(p: &CounterexampleParams, big_n: u64, power: f64) -> f64 {
    (p.start_index..=big_n)
        .map(|n| p.bump_power_integral(n, power))
        .collect::<CompensatedSum>()
        .value()
}

fn doubling_indices(start: u64, end: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = start.next_power_of_two();
    while n <= end {
        out.push(n);
        n *= 2;
    }
    out
}

/// `int` over `[u, 2m]` of a symmetric bump whose halves are `k x^{e-1}`
/// (`x` the distance to the nearer end).
fn bump_from(m: f64, e: f64, k: f64, u: f64) -> f64 {
    let half = |x: f64| k * x.powf(e) / e;
    if u < m {
        2.0 * half(m) - half(u)
    } else if u < 2.0 * m {
        half(2.0 * m - u)
    } else {
        0.0
    }
}

/// Sum of `C n^{-s}` style bump integrals over bumps from `a` on: certified
/// tail bound past the truncation, doubling-horizon growth evidence when the
/// series diverges.
struct BumpSeries<F: Fn(u64) -> f64> {
    per: F,
    /// `per(n) <= coef n^{-decay}`
    coef: f64,
    decay: f64,
    head: f64,
    first: u64,
    cap: u64,
}

impl<F: Fn(u64) -> f64> BumpSeries<F> {
    fn sum(&self, tol: f64) -> NormValue {
        let mut acc = CompensatedSum::new();
        acc.add(self.head);
        let mut n = self.first;
        if self.decay <= 1.0 {
            let mut witness = Vec::new();
            for big_n in doubling_indices(self.first, self.cap) {
                while n <= big_n {
                    acc.add((self.per)(n));
                    n += 1;
                }
                witness.push(((big_n + 1) as f64, acc.value()));
            }
            return NormValue::Divergent {
                witness,
                certified: true,
            };
        }
        loop {
            acc.add((self.per)(n));
            // sum_{k > n} coef k^{-s} <= coef n^{1-s} / (s - 1)
            let tail = self.coef * (n as f64).powf(1.0 - self.decay) / (self.decay - 1.0);
            if tail <= 0.5 * tol || n >= self.cap {
                return NormValue::Finite(acc.value() + tail);
            }
            n += 1;
        }
    }
}

/// Index of the first bump starting after `a`, and the part of the bump
/// containing `a` that lies past it.
fn split_at(params: &CounterexampleParams, a: f64, e: f64, k: f64) -> (u64, f64) {
    let n = a.floor() as u64;
    if a >= params.start_index as f64 {
        (n + 1, bump_from(params.half_width(n), e, k, a - n as f64))
    } else {
        (params.start_index, 0.0)
    }
}

fn counterexample_lp_tail(params: &CounterexampleParams, power: f64, a: f64, tol: f64, policy: HorizonPolicy) -> NormValue {
    let e = params.height_exponent * power + 1.0;
    let (first, head) = split_at(params, a, e, 1.0);
    BumpSeries {
        per: |n| params.bump_power_integral(n, power),
        coef: 2.0 * 0.5f64.powf(e) / e,
        decay: params.width_exponent * e,
        head,
        first,
        cap: (max_horizon(policy) as u64).max(first + 1),
    }
    .sum(tol)
}

/// `int_{u0}^U |sin u|^p e^{(1 - gamma p) u} du`, the witness `L^p`
/// integral after substituting `t = e^u - 1`.
fn witness_lp_tail(gamma: f64, power: f64, a: f64, tol: f64, policy: HorizonPolicy) -> Result<NormValue> {
    let k = 1.0 - gamma * power;
    let integrand = |u: f64| u.sin().abs().powf(power) * (k * u).exp();
    let pi = std::f64::consts::PI;
    let u0 = a.ln_1p();
    // chunk ends at multiples of pi
    let mut ends = std::iter::successors(Some(((u0 / pi).floor() + 1.0) * pi), |u| Some(u + pi));
    if k >= 0.0 {
        let cap_u = max_horizon(policy).ln_1p();
        let mut witness = Vec::new();
        let mut acc = 0.0;
        let mut lo = u0;
        for (j, hi) in (1u64..).zip(ends.by_ref()) {
            if hi > cap_u {
                break;
            }
            acc += quadrature::integrate(integrand, lo, hi, 1e-12)?.value;
            lo = hi;
            if j.is_power_of_two() {
                witness.push((hi.exp() - 1.0, acc));
            }
        }
        return Ok(NormValue::Divergent {
            witness,
            certified: true,
        });
    }
    // past U: int_U^inf e^{k u} du = e^{k U} / (-k)
    let mut sum = CompensatedSum::new();
    let mut err = 0.0;
    let mut lo = u0;
    loop {
        let tail = (k * lo).exp() / -k;
        if tail <= 0.25 * tol {
            return Ok(NormValue::Finite(sum.value() + err + tail));
        }
        let hi = ends.next().expect("unbounded iterator");
        let q = quadrature::integrate(integrand, lo, hi, 1e-3 * tol)?;
        sum.add(q.value);
        err += q.error;
        lo = hi;
    }
}

/// `int_a^inf |f|^p`: a certified upper bound when finite.
pub fn lp_tail_power(spec: &FunctionSpec, p: f64, a: f64, tol: f64, policy: HorizonPolicy) -> Result<NormValue> {
    check_p(p)?;
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::NegativeTime(a));
    }
    if let Some(gamma) = spec.witness_gamma() {
        return witness_lp_tail(gamma, p, a, tol, policy);
    }
    match spec.model() {
        Model::Bumps(params) => Ok(counterexample_lp_tail(&params, p, a, tol, policy)),
        Model::Pieces(pieces) => Ok(match pieces_power_norm(&pieces, |q| &q.expr, p, a, tol, policy)? {
            Ok(v) => NormValue::Finite(v),
            Err(n) => n,
        }),
        Model::Sampled { samples, tail } => {
            let body = sampled_power_integral(samples, p, a);
            Ok(match tail {
                Some(TailRule::Zero) => NormValue::Finite(body),
                // int |f|^p <= sup^{p-1} int |f|
                Some(TailRule::Bounded {
                    abs_integral,
                    sup_abs,
                    ..
                }) => NormValue::Finite(body + sup_abs.powf(p - 1.0) * abs_integral),
                None => NormValue::Inconclusive,
            })
        }
    }
}

/// `||f||_p` on `[0, inf)`. Divergence witnesses carry partial integrals
/// of `|f|^p`.
pub fn lp_norm(spec: &FunctionSpec, p: f64, tol: f64, policy: HorizonPolicy) -> Result<NormValue> {
    Ok(match lp_tail_power(spec, p, 0.0, tol, policy)? {
        NormValue::Finite(v) => NormValue::Finite(v.powf(1.0 / p)),
        other => other,
    })
}

// ---------------------------------------------------------------------------
// derivative norms

fn counterexample_derivative_sup_witness(params: &CounterexampleParams, a: f64) -> Vec<(f64, f64)> {
    let n = ((a.floor() as u64) + 1).max(params.start_index);
    (1..=8)
        .map(|k| {
            let x = n as f64 + 10f64.powi(-k);
            (x, params.one_sided_derivative(x, false).abs())
        })
        .collect()
}

fn counterexample_lq(params: &CounterexampleParams, q: f64, a: f64, tol: f64, policy: HorizonPolicy) -> NormValue {
    let h = params.height_exponent;
    if q.is_infinite() {
        return if h < 1.0 {
            NormValue::Divergent {
                witness: counterexample_derivative_sup_witness(params, a),
                certified: true,
            }
        } else {
            let n = params.start_index.max(a.floor() as u64);
            NormValue::Finite(h * params.half_width(n).powf(h - 1.0))
        };
    }
    // |f_n'|^q = h^q x^{q (h - 1)} on each half; integrable iff e > 0
    let e = q * (h - 1.0) + 1.0;
    let k = h.powf(q);
    if e <= 0.0 {
        let first = ((a.floor() as u64) + 1).max(params.start_index);
        let m = params.half_width(first);
        let witness = (1..=8)
            .map(|j| {
                let eps = m * 10f64.powi(-j);
                let v = if e == 0.0 {
                    2.0 * k * (m / eps).ln()
                } else {
                    2.0 * k * (eps.powf(e) - m.powf(e)) / -e
                };
                (first as f64 + eps, v)
            })
            .collect();
        return NormValue::Divergent {
            witness,
            certified: true,
        };
    }
    let (first, head) = split_at(params, a, e, k);
    let total = BumpSeries {
        per: |n| 2.0 * k * params.half_width(n).powf(e) / e,
        coef: 2.0 * k * 0.5f64.powf(e) / e,
        decay: params.width_exponent * e,
        head,
        first,
        cap: (max_horizon(policy) as u64).max(first + 1),
    }
    .sum(tol);
    match total {
        NormValue::Finite(v) => NormValue::Finite(v.powf(1.0 / q)),
        other => other,
    }
}

/// `||f'||_q` on `(a, inf)`; `q = inf` is the essential supremum.
pub fn lq_norm_derivative_on(spec: &FunctionSpec, q: f64, a: f64, tol: f64) -> Result<NormValue> {
    check_q(q)?;
    if !(a >= 0.0) {
        return Err(Error::NegativeTime(a));
    }
    let policy = HorizonPolicy::default();
    match spec.model() {
        Model::Bumps(params) => Ok(counterexample_lq(&params, q, a, tol, policy)),
        Model::Pieces(pieces) => {
            if q.is_infinite() {
                let mut best: f64 = 0.0;
                for p in &pieces {
                    if p.b > a {
                        best = best.max(bounds::sup_abs(&p.deriv, a.max(p.a), p.b, 1e-12).upper);
                    }
                }
                return Ok(if best.is_finite() {
                    NormValue::Finite(best)
                } else {
                    NormValue::Inconclusive
                });
            }
            Ok(match pieces_power_norm(&pieces, |p| &p.deriv, q, a, tol, policy)? {
                Ok(v) => NormValue::Finite(v.powf(1.0 / q)),
                Err(n) => n,
            })
        }
        Model::Sampled { samples, tail } => {
            let last = samples.last_time();
            let cells = (0..samples.times.len() - 1).filter(|&i| samples.times[i + 1] > a);
            let tail_lip = match tail {
                Some(TailRule::Zero) => (*samples.values.last().unwrap_or(&0.0) == 0.0).then_some(0.0),
                Some(TailRule::Bounded { lipschitz, .. }) => lipschitz,
                None => Some(0.0),
            };
            if q.is_infinite() {
                let body = cells.map(|i| samples.slope(i).abs()).fold(0.0, f64::max);
                return Ok(tail_lip.map_or(NormValue::Inconclusive, |l| NormValue::Finite(body.max(l))));
            }
            let body: f64 = cells
                .map(|i| {
                    let w = samples.times[i + 1] - samples.times[i].max(a);
                    samples.slope(i).abs().powf(q) * w
                })
                .sum();
            Ok(match tail {
                None => NormValue::Finite(body.powf(1.0 / q)),
                Some(TailRule::Zero) if tail_lip == Some(0.0) => NormValue::Finite(body.powf(1.0 / q)),
                _ if a > last => NormValue::Inconclusive,
                _ => NormValue::Inconclusive,
            })
        }
    }
}

pub fn lq_norm_derivative(spec: &FunctionSpec, q: f64, tol: f64) -> Result<NormValue> {
    lq_norm_derivative_on(spec, q, 0.0, tol)
}

/// Certified `sup |f|` over `[0, inf)`, when available.
pub fn sup_norm(spec: &FunctionSpec) -> Option<f64> {
    match spec.model() {
        Model::Bumps(p) => Some((p.start_index..p.start_index + 2).map(|n| p.peak(n)).fold(0.0, f64::max)),
        Model::Pieces(pieces) => {
            let m = pieces
                .iter()
                .map(|p| bounds::sup_abs(&p.expr, p.a, p.b, 1e-12).upper)
                .fold(0.0, f64::max);
            m.is_finite().then_some(m)
        }
        Model::Sampled { samples, tail } => {
            let body = samples.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            Some(match tail {
                Some(TailRule::Bounded { sup_abs, .. }) => body.max(sup_abs),
                _ => body,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Sobolev report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevReport {
    pub p: f64,
    #[serde(with = "serde_q")]
    pub q: f64,
    pub lp_norm: NormValue,
    pub lq_norm_derivative: NormValue,
    /// `(|f(0)|^{r+1} + (r+1) ||f||_p^r ||f'||_q)^{1/(r+1)}`; absent unless
    /// `member`.
    pub sup_norm_bound: Option<f64>,
    /// `||f'||_q`, the constant in `|f(x) - f(y)| <= |x-y|^{(q-1)/q} ||f'||_q`.
    pub holder_constant: Option<f64>,
    pub holder_exponent: f64,
    pub r: f64,
    pub member: bool,
    /// Which norm failed, when not a member.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing: Option<String>,
}

/// The sup-norm bound from `|f(0)|`, `||f||_p` and `||f'||_q`.
pub fn sobolev_sup_bound(f0: f64, lp: f64, lq: f64, p: f64, q: f64) -> f64 {
    let r = embedding_r(p, q);
    (f0.abs().powf(r + 1.0) + (r + 1.0) * lp.powf(r) * lq).powf(1.0 / (r + 1.0))
}

pub fn sobolev_report(spec: &FunctionSpec, p: f64, q: f64, tol: f64) -> Result<SobolevReport> {
    check_p(p)?;
    check_q(q)?;
    let lp = lp_norm(spec, p, tol, HorizonPolicy::default())?;
    let lq = lq_norm_derivative(spec, q, tol)?;
    let r = embedding_r(p, q);
    let describe = |name: &str, v: &NormValue| match v {
        NormValue::Finite(_) => None,
        NormValue::Divergent { .. } => Some(format!("{name} is divergent")),
        NormValue::Inconclusive => Some(format!("{name} could not be certified finite")),
    };
    let failing = describe(&format!("||f||_{p}"), &lp)
        .into_iter()
        .chain(describe(&format!("||f'||_{}", format_q(q)), &lq))
        .collect::<Vec<_>>();
    let (sup_norm_bound, holder_constant) = match (lp.finite(), lq.finite()) {
        (Some(a), Some(b)) => {
            let f0 = evaluate(spec, 0.0)?;
            (Some(sobolev_sup_bound(f0, a, b, p, q)), Some(b))
        }
        _ => (None, lq.finite()),
    };
    Ok(SobolevReport {
        p,
        q,
        member: failing.is_empty(),
        failing: (!failing.is_empty()).then(|| failing.join("; ")),
        lp_norm: lp,
        lq_norm_derivative: lq,
        sup_norm_bound,
        holder_constant,
        holder_exponent: holder_exponent(q),
        r,
    })
}
