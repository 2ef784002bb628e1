//! Moduli of continuity: local oscillation, global moduli, Hölder fits and
//! the transfer from `f` to `|f|^p`.
//!
//! Every quantity comes in two flavours. Sampled values are lower bounds on
//! the true modulus; certified values are upper bounds derived from interval
//! enclosures or closed-form analysis. Certificates only consume the latter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::function_model::{evaluate, CounterexampleParams, FunctionSpec, Model, Piece, Samples, TailRule};
use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ModulusForm {
    /// `(delta, omega(delta))` with increasing `delta`.
    Table { table: Vec<(f64, f64)> },
    Holder { c: f64, alpha: f64 },
    Lipschitz { lipschitz_const: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    #[serde(flatten)]
    pub form: ModulusForm,
    pub certified: bool,
}

impl ModulusEstimate {
    pub fn lipschitz(l: f64, certified: bool) -> ModulusEstimate {
        ModulusEstimate {
            form: ModulusForm::Lipschitz { lipschitz_const: l },
            certified,
        }
    }

    pub fn holder(c: f64, alpha: f64, certified: bool) -> ModulusEstimate {
        ModulusEstimate {
            form: ModulusForm::Holder { c, alpha },
            certified,
        }
    }

    /// `omega(delta)`. Tables are read upward (the next tabulated `delta`),
    /// and extended past the last entry by subadditivity, so a certified
    /// table yields a certified value everywhere.
    pub fn eval(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        match &self.form {
            ModulusForm::Lipschitz { lipschitz_const } => lipschitz_const * delta,
            ModulusForm::Holder { c, alpha } => c * delta.powf(*alpha),
            ModulusForm::Table { table } => {
                let i = table.partition_point(|&(d, _)| d < delta);
                match table.get(i) {
                    Some(&(_, w)) => w,
                    None => match table.last() {
                        Some(&(d, w)) => (delta / d).ceil() * w,
                        None => f64::INFINITY,
                    },
                }
            }
        }
    }

    fn scaled(&self, k: f64) -> ModulusEstimate {
        let form = match &self.form {
            ModulusForm::Lipschitz { lipschitz_const } => ModulusForm::Lipschitz {
                lipschitz_const: k * lipschitz_const,
            },
            ModulusForm::Holder { c, alpha } => ModulusForm::Holder {
                c: k * c,
                alpha: *alpha,
            },
            ModulusForm::Table { table } => ModulusForm::Table {
                table: table.iter().map(|&(d, w)| (d, k * w)).collect(),
            },
        };
        ModulusEstimate {
            form,
            certified: self.certified,
        }
    }
}

/// Modulus of `|f|^p` from one of `f`, using
/// `||f(x)|^p - |f(y)|^p| <= p ||f||_inf^{p-1} |f(x) - f(y)|`.
pub fn modulus_of_power(modulus: &ModulusEstimate, p: f64, sup_norm_f: f64) -> Result<ModulusEstimate> {
    if !(p >= 1.0 && sup_norm_f >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "modulus_of_power needs p >= 1 and sup_norm_f >= 0, got p = {p}, sup = {sup_norm_f}"
        )));
    }
    if p == 1.0 {
        return Ok(modulus.clone());
    }
    Ok(modulus.scaled(p * sup_norm_f.powf(p - 1.0)))
}

// ---------------------------------------------------------------------------
// counterexample: analytic modulus

/// Certified global modulus of the bump train.
///
/// Pairs inside one bump satisfy `|f(x) - f(y)| <= |x - y|^h` for `h <= 1`.
/// Pairs in different bumps are separated by at least the gap
/// `g = 1 - n0^{-w}` of zeros, and each value is at most (distance to a bump
/// end)^h, giving `2^{1-h} (delta - g)^h`. No pair differs by more than the
/// sum of the two largest peaks.
pub fn counterexample_modulus(p: &CounterexampleParams, delta: f64) -> f64 {
    if delta <= 0.0 {
        return 0.0;
    }
    let h = p.height_exponent;
    let n0 = p.start_index;
    let cap = p.peak(n0) + p.peak(n0 + 1);
    if h >= 1.0 {
        let lip = h * p.half_width(n0).powf(h - 1.0);
        return (lip * delta).min(cap);
    }
    let gap = 1.0 - 2.0 * p.half_width(n0);
    let cross = 2f64.powf(1.0 - h) * (delta - gap).max(0.0).powf(h);
    delta.powf(h).max(cross).min(cap)
}

/// Smallest `c` with `counterexample_modulus(delta) <= c delta^h` for all
/// `delta`; `h <= 1` only.
pub fn counterexample_holder_constant(p: &CounterexampleParams) -> f64 {
    let h = p.height_exponent.min(1.0);
    let n0 = p.start_index;
    let cap = p.peak(n0) + p.peak(n0 + 1);
    let gap = 1.0 - 2.0 * p.half_width(n0);
    // the cross-bump branch meets the cap here; the ratio peaks at this point
    let d_star = gap + (cap / 2f64.powf(1.0 - h)).powf(1.0 / h);
    (cap / d_star.powf(h)).max(1.0)
}

/// Bound on oscillation over `[a, b]` at scale `delta` for the bump train.
fn counterexample_local_upper(p: &CounterexampleParams, a: f64, b: f64, delta: f64) -> f64 {
    let n = (a.floor() as u64).max(p.start_index);
    let h = p.height_exponent;
    let within_unit = b <= (n + 1) as f64;
    if within_unit {
        let hold = if h <= 1.0 {
            delta.powf(h)
        } else {
            h * p.half_width(n).powf(h - 1.0) * delta
        };
        hold.min(p.peak(n))
    } else {
        counterexample_modulus(p, delta).min(p.peak(n) + p.peak(n + 1))
    }
}

// ---------------------------------------------------------------------------
// enclosure-based statistics on windows

/// Certified `sup |f'|` and range of `f` over `[a, b]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WindowStats {
    pub lipschitz: f64,
    pub range: Interval,
}

impl WindowStats {
    fn holder_bound(&self, delta: f64) -> f64 {
        (self.lipschitz * delta).min(self.range.width())
    }
}

fn hull(a: Option<Interval>, b: Interval) -> Interval {
    match a {
        Some(a) => a.hull(&b),
        None => b,
    }
}

fn pieces_stats(pieces: &[Piece], a: f64, b: f64, tight: bool) -> WindowStats {
    let mut lip: f64 = 0.0;
    let mut range: Option<Interval> = None;
    for (i, p) in pieces.iter().enumerate() {
        let (lo, hi) = (a.max(p.a), b.min(p.b));
        if lo > hi || (lo == hi && p.b.is_finite()) {
            continue;
        }
        if i > 0 && p.a > a && p.a <= b {
            let jump = (pieces[i - 1].expr.eval(p.a) - p.expr.eval(p.a)).abs();
            if !(jump <= crate::function_model::JOINT_TOL) {
                lip = f64::INFINITY;
            }
        }
        let (l, r) = if tight {
            (
                bounds::sup_abs(&p.deriv, lo, hi, 1e-9).upper,
                bounds::range(&p.expr, lo, hi, 1e-12),
            )
        } else {
            (
                bounds::enclose_mv(&p.deriv, &p.deriv.derivative(), lo, hi).mag(),
                bounds::enclose_mv(&p.expr, &p.deriv, lo, hi),
            )
        };
        lip = lip.max(if l.is_nan() { f64::INFINITY } else { l });
        range = Some(hull(range, r));
    }
    WindowStats {
        lipschitz: lip,
        range: range.unwrap_or(Interval::point(0.0)),
    }
}

fn apply_tail(vlast: f64, tail: Option<TailRule>, lip: &mut f64, range: &mut Interval) {
    match tail {
        Some(TailRule::Zero) => {
            *range = range.hull(&Interval::point(0.0));
            if vlast != 0.0 {
                *lip = f64::INFINITY;
            }
        }
        Some(TailRule::Bounded {
            sup_abs, lipschitz, ..
        }) => {
            *range = range.hull(&Interval::new(-sup_abs, sup_abs));
            *lip = lip.max(lipschitz.unwrap_or(f64::INFINITY));
        }
        None => {}
    }
}

fn sampled_stats(s: &Samples, tail: Option<TailRule>, a: f64, b: f64) -> WindowStats {
    let last = s.last_time();
    let mut lip: f64 = 0.0;
    let mut range = Interval::point(s.interpolate(a.min(last)));
    let end = b.min(last);
    if a < last {
        let first = s.cell(a);
        let mut i = first;
        while i + 1 < s.times.len() && s.times[i] < end {
            lip = lip.max(s.slope(i).abs());
            if s.times[i + 1] < end {
                range = range.hull(&Interval::point(s.values[i + 1]));
            }
            i += 1;
        }
        range = range.hull(&Interval::point(s.interpolate(end)));
    }
    if b > last {
        apply_tail(*s.values.last().unwrap_or(&0.0), tail, &mut lip, &mut range);
    }
    WindowStats {
        lipschitz: lip,
        range,
    }
}

/// `local_oscillation_upper(spec, a, a + w, w, false)` for every `w` in
/// the ascending `widths`, sweeping sampled data once.
pub(crate) fn nested_oscillation_upper(spec: &FunctionSpec, a: f64, widths: &[f64]) -> Vec<f64> {
    let Model::Sampled { samples: s, tail } = spec.model() else {
        return widths
            .iter()
            .map(|&w| local_oscillation_upper(spec, a, a + w, w, false))
            .collect();
    };
    let last = s.last_time();
    let n = s.times.len();
    let mut lip: f64 = 0.0;
    let mut range = Interval::point(s.interpolate(a.min(last)));
    let mut i = if a < last { s.cell(a) } else { n - 1 };
    widths
        .iter()
        .map(|&w| {
            let end = a + w;
            let e = end.min(last);
            while i + 1 < n && s.times[i + 1] < e {
                lip = lip.max(s.slope(i).abs());
                range = range.hull(&Interval::point(s.values[i + 1]));
                i += 1;
            }
            let (mut l, mut r) = (lip, range);
            if a < last && i + 1 < n {
                l = l.max(s.slope(i).abs());
                r = r.hull(&Interval::point(s.interpolate(e)));
            }
            if end > last {
                apply_tail(s.values[n - 1], tail, &mut l, &mut r);
            }
            WindowStats { lipschitz: l, range: r }.holder_bound(w)
        })
        .collect()
}

/// Certified statistics on `[a, b]`. `tight` selects branch-and-bound over
/// one-shot enclosures.
pub(crate) fn window_stats(spec: &FunctionSpec, a: f64, b: f64, tight: bool) -> Option<WindowStats> {
    match spec.model() {
        Model::Pieces(pieces) => Some(pieces_stats(&pieces, a, b, tight)),
        Model::Sampled { samples, tail } => Some(sampled_stats(samples, tail, a, b)),
        Model::Bumps(_) => None,
    }
}

/// Certified upper bound on the local oscillation over `[a, b]` at scale
/// `delta`.
pub fn local_oscillation_upper(spec: &FunctionSpec, a: f64, b: f64, delta: f64, tight: bool) -> f64 {
    if delta <= 0.0 {
        return 0.0;
    }
    if let Some(p) = spec.counterexample_params() {
        return counterexample_local_upper(&p, a, b, delta);
    }
    window_stats(spec, a, b, tight).map_or(f64::INFINITY, |w| w.holder_bound(delta))
}

// ---------------------------------------------------------------------------
// sampled (lower) estimates

fn domain_end(spec: &FunctionSpec) -> f64 {
    match spec {
        FunctionSpec::Sampled { samples, tail } if *tail != Some(TailRule::Zero) => {
            samples.last_time()
        }
        _ => f64::INFINITY,
    }
}

/// Largest `|f(x) - f(y)|` over a structured set of pairs in `[a, b]` with
/// `|x - y| <= delta`.
fn sampled_oscillation(spec: &FunctionSpec, a: f64, b: f64, delta: f64, samples: usize, seed: u64) -> f64 {
    let b = b.min(domain_end(spec));
    let b_eff = if b.is_finite() { b } else { a + 100.0 };
    if !(b_eff > a) {
        return 0.0;
    }
    let f = |x: f64| evaluate(spec, x).ok();
    let mut joints = spec.joints(a, b_eff);
    if joints.len() > 20_000 {
        joints.truncate(20_000);
    }
    let mut anchors: Vec<f64> = vec![a, b_eff];
    anchors.extend(joints.iter().copied());
    anchors.extend(joints.iter().flat_map(|&j| [j - delta, j + delta]));
    let n = samples.max(2);
    anchors.extend((0..n).map(|i| a + (b_eff - a) * i as f64 / (n - 1) as f64));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    anchors.extend((0..n).map(|_| a + (b_eff - a) * rng.gen::<f64>()));
    anchors.retain(|&x| x >= a && x <= b_eff);

    let mut best: f64 = 0.0;
    for &x in &anchors {
        let Some(fx) = f(x) else { continue };
        let mut partners = vec![x - delta, x + delta];
        let lo = joints.partition_point(|&j| j < x - delta);
        let hi = joints.partition_point(|&j| j <= x + delta);
        partners.extend(joints[lo..hi.min(lo + 64)].iter().copied());
        for y in partners {
            if y >= a && y <= b_eff && (y - x).abs() <= delta {
                if let Some(fy) = f(y) {
                    best = best.max((fx - fy).abs());
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalOscillation {
    /// Attained by sampled pairs (a lower bound).
    pub value: f64,
    /// Certified upper bound.
    pub upper_bound: f64,
    /// The two agree, so `value` is the true oscillation.
    pub exact: bool,
}

/// Local oscillation `sup { |f(x) - f(y)| : x, y in (a, b), |x - y| <= delta }`.
pub fn local_oscillation(spec: &FunctionSpec, a: f64, b: f64, delta: f64, samples: usize) -> Result<LocalOscillation> {
    if !(a >= 0.0 && b > a && delta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "local_oscillation needs 0 <= a < b and delta >= 0, got a = {a}, b = {b}, delta = {delta}"
        )));
    }
    if delta == 0.0 {
        return Ok(LocalOscillation {
            value: 0.0,
            upper_bound: 0.0,
            exact: true,
        });
    }
    let value = sampled_oscillation(spec, a, b, delta, samples, 0);
    let upper_bound = local_oscillation_upper(spec, a, b, delta, true).max(value);
    Ok(LocalOscillation {
        value,
        upper_bound,
        exact: upper_bound <= value * (1.0 + 1e-9) + 1e-15,
    })
}

// ---------------------------------------------------------------------------
// global modulus

fn check_deltas(deltas: &[f64]) -> Result<()> {
    let ok = deltas.iter().all(|&d| d > 0.0 && d.is_finite())
        && deltas.windows(2).all(|w| w[1] > w[0]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "deltas must be positive, finite and strictly increasing".into(),
        ))
    }
}

/// Certified table of `omega(delta)` over `[0, inf)`.
pub fn global_modulus(spec: &FunctionSpec, deltas: &[f64]) -> Result<ModulusEstimate> {
    check_deltas(deltas)?;
    let table: Vec<(f64, f64)> = if let Some(p) = spec.counterexample_params() {
        deltas.iter().map(|&d| (d, counterexample_modulus(&p, d))).collect()
    } else {
        let stats = window_stats(spec, 0.0, f64::INFINITY, true)
            .expect("non-structural specs have window statistics");
        deltas.iter().map(|&d| (d, stats.holder_bound(d))).collect()
    };
    // enforce monotonicity against rounding in the formulas
    let mut out = Vec::with_capacity(table.len());
    let mut run: f64 = 0.0;
    for (d, w) in table {
        run = run.max(w);
        out.push((d, run));
    }
    Ok(ModulusEstimate {
        form: ModulusForm::Table { table: out },
        certified: true,
    })
}

/// Certified global modulus: the Lipschitz constant when finite, otherwise
/// a table over `delta` in `[1e-12, 1e6]`, 20 points per decade.
pub fn certified_modulus(spec: &FunctionSpec) -> Result<ModulusEstimate> {
    if let Some(l) = lipschitz_constant(spec) {
        return Ok(ModulusEstimate::lipschitz(l, true));
    }
    let deltas: Vec<f64> = (0..=360).map(|k| 1e-12 * 10f64.powf(k as f64 / 20.0)).collect();
    global_modulus(spec, &deltas)
}

/// Sampled counterpart of [`global_modulus`]: lower bounds only.
pub fn sampled_global_modulus(spec: &FunctionSpec, deltas: &[f64], horizon: f64, samples: usize) -> Result<ModulusEstimate> {
    check_deltas(deltas)?;
    let mut run: f64 = 0.0;
    let table = deltas
        .iter()
        .map(|&d| {
            run = run.max(sampled_oscillation(spec, 0.0, horizon, d, samples, 1));
            (d, run)
        })
        .collect();
    Ok(ModulusEstimate {
        form: ModulusForm::Table { table },
        certified: false,
    })
}

/// Certified global Lipschitz constant, when one exists.
pub fn lipschitz_constant(spec: &FunctionSpec) -> Option<f64> {
    if let Some(p) = spec.counterexample_params() {
        return (p.height_exponent >= 1.0)
            .then(|| p.height_exponent * p.half_width(p.start_index).powf(p.height_exponent - 1.0));
    }
    window_stats(spec, 0.0, f64::INFINITY, true)
        .map(|w| w.lipschitz)
        .filter(|l| l.is_finite())
}

// ---------------------------------------------------------------------------
// Hölder fits

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    /// Certified constant (an upper bound); infinite when `f` is not
    /// `alpha`-Hölder on the window.
    pub c: f64,
    /// Largest ratio over sampled pairs (a lower bound).
    pub sampled_c: f64,
    pub certified: bool,
    /// Sampled ratios grow without bound as the pair distance shrinks.
    pub unbounded: bool,
}

/// `sup_{delta <= w} omega(delta) / delta^alpha` for a nondecreasing
/// `omega`, bounded on a geometric grid by `omega(d_{i+1}) / d_i^alpha`.
fn holder_from_modulus(omega: impl Fn(f64) -> f64, alpha: f64, w: f64) -> f64 {
    let top = w.min(1e6);
    let ratio = 1.001f64;
    let mut d = 1e-12f64;
    let mut best: f64 = 0.0;
    while d < top {
        let next = (d * ratio).min(top);
        best = best.max(omega(next) / d.powf(alpha));
        d = next;
    }
    if w > 1e6 {
        // past the grid omega is at most its value at infinity
        best = best.max(omega(f64::INFINITY) / top.powf(alpha));
    }
    best
}

fn sampled_holder(spec: &FunctionSpec, alpha: f64, a: f64, b: f64, samples: usize, seed: u64) -> (f64, bool) {
    let b = b.min(domain_end(spec));
    let b_eff = if b.is_finite() { b } else { a + 100.0 };
    let width = b_eff - a;
    if !(width > 0.0) {
        return (0.0, false);
    }
    let f = |x: f64| evaluate(spec, x).ok();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut joints = spec.joints(a, b_eff);
    joints.truncate(4096);
    let mut best: f64 = 0.0;
    let ratio_at = |x: f64, d: f64, best: &mut f64| -> f64 {
        let mut r: f64 = 0.0;
        for y in [x + d, x - d] {
            if y >= a && y <= b_eff {
                if let (Some(fx), Some(fy)) = (f(x), f(y)) {
                    r = r.max((fx - fy).abs() / d.powf(alpha));
                }
            }
        }
        *best = best.max(r);
        r
    };
    let max_d = width.min(1.0);
    for _ in 0..samples {
        let x = a + width * rng.gen::<f64>();
        let d = max_d * 10f64.powf(-6.0 * rng.gen::<f64>());
        ratio_at(x, d, &mut best);
    }
    // scale sweep around joints and random anchors to detect blow-up
    let mut anchors = joints.clone();
    anchors.extend((0..16).map(|_| a + width * rng.gen::<f64>()));
    let scales: Vec<f64> = (2..=10).map(|k| 10f64.powi(-k)).filter(|&d| d < max_d).collect();
    let per_scale: Vec<f64> = scales
        .iter()
        .map(|&d| {
            anchors
                .iter()
                .map(|&x| ratio_at(x, d, &mut best))
                .fold(0.0, f64::max)
        })
        .collect();
    let growing = per_scale.len() >= 3
        && per_scale.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9))
        && per_scale[per_scale.len() - 1] >= 4.0 * per_scale[0]
        && per_scale[0] > 0.0;
    (best, growing)
}

/// Hölder constant of order `alpha` on the window `[a, b]` (`b` may be
/// infinite).
pub fn fit_holder(spec: &FunctionSpec, alpha: f64, window: (f64, f64), samples: usize, seed: u64) -> Result<HolderFit> {
    let (a, b) = window;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(a >= 0.0 && b > a) {
        return Err(Error::InvalidArgument(format!("window must satisfy 0 <= a < b, got ({a}, {b})")));
    }
    let (sampled_c, growing) = sampled_holder(spec, alpha, a, b, samples, seed);
    let c = if let Some(p) = spec.counterexample_params() {
        let h = p.height_exponent;
        let n = (a.floor() as u64).max(p.start_index);
        if alpha > h.min(1.0) {
            f64::INFINITY
        } else if alpha == h && b <= (n + 1) as f64 {
            1.0
        } else if alpha == h {
            counterexample_holder_constant(&p)
        } else {
            holder_from_modulus(|d| counterexample_local_upper(&p, a, b, d), alpha, b - a)
        }
    } else {
        let w = window_stats(spec, a, b, true).expect("non-structural specs have window statistics");
        let (l, r) = (w.lipschitz, w.range.width());
        if l == 0.0 || r == 0.0 {
            0.0
        } else if !l.is_finite() {
            f64::INFINITY
        } else if r / l <= b - a {
            l.powf(alpha) * r.powf(1.0 - alpha)
        } else {
            l * (b - a).powf(1.0 - alpha)
        }
    };
    Ok(HolderFit {
        c,
        sampled_c,
        certified: true,
        unbounded: growing || c.is_infinite(),
    })
}
