//! Function specifications on `[0, inf)`: closed forms, piecewise
//! expressions, sampled data and the two built-in constructions (the
//! alternating square-root bump train and the oscillating witness).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numeric::CompensatedSum;

/// Joint continuity tolerance.
pub const JOINT_TOL: f64 = 1e-12;
const ANTIDERIVATIVE_CHECKS: usize = 32;
const ANTIDERIVATIVE_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    ClosedForm {
        closed_form: Expr,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        antiderivative: Option<Expr>,
    },
    Piecewise {
        pieces: Vec<Segment>,
        #[serde(default = "default_true")]
        continuous: bool,
    },
    Sampled {
        samples: Samples,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<TailRule>,
    },
    Counterexample {
        #[serde(default)]
        counterexample_params: CounterexampleParams,
    },
    IncomparabilityWitness {
        witness_params: WitnessParams,
    },
}

fn default_true() -> bool {
    true
}

/// One piece `[a, b)` of a piecewise spec; `b = None` means `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub a: f64,
    pub b: Option<f64>,
    pub expression: Expr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antiderivative: Option<Expr>,
}

impl Segment {
    pub fn new(a: f64, b: Option<f64>, expression: Expr) -> Segment {
        Segment {
            a,
            b,
            expression,
            antiderivative: None,
        }
    }

    pub fn with_antiderivative(mut self, anti: Expr) -> Segment {
        self.antiderivative = Some(anti);
        self
    }

    pub fn end(&self) -> f64 {
        self.b.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default)]
    pub interpolation: Interpolation,
}

impl Samples {
    pub fn last_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Index `i` with `times[i] <= t < times[i+1]`, clamped to the last cell.
    pub(crate) fn cell(&self, t: f64) -> usize {
        let i = self.times.partition_point(|&x| x <= t);
        i.saturating_sub(1).min(self.times.len() - 2)
    }

    pub(crate) fn slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.times[i + 1] - self.times[i])
    }

    pub(crate) fn interpolate(&self, t: f64) -> f64 {
        let i = self.cell(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        if t == t1 {
            return v1;
        }
        let s = (t - t0) / (t1 - t0);
        v0 + s * (v1 - v0)
    }
}

/// Behaviour past the last sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailRule {
    /// `f = 0` after the last sample.
    Zero,
    /// Values are unknown, but `int_T^inf |f| <= abs_integral` and
    /// `|f| <= sup_abs` there; `lipschitz`, when given, bounds `|f'|` past
    /// the last sample.
    Bounded {
        abs_integral: f64,
        sup_abs: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lipschitz: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleParams {
    #[serde(default = "default_height")]
    pub height_exponent: f64,
    #[serde(default = "default_width")]
    pub width_exponent: f64,
    #[serde(default = "default_start")]
    pub start_index: u64,
}

fn default_height() -> f64 {
    0.5
}
fn default_width() -> f64 {
    1.0 / 3.0
}
fn default_start() -> u64 {
    2
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        CounterexampleParams {
            height_exponent: default_height(),
            width_exponent: default_width(),
            start_index: default_start(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessParams {
    pub gamma: f64,
}

// ---------------------------------------------------------------------------
// counterexample: f = (-1)^n f_n on [n, n+1), n >= n0, zero before n0.
// f_n rises as (x-n)^h on [n, n+m) and falls as (n+2m-x)^h on [n+m, n+2m),
// with half-width m = n^{-w}/2.

impl CounterexampleParams {
    pub fn validate(&self) -> Result<()> {
        let h = self.height_exponent;
        let w = self.width_exponent;
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "counterexample_params.height_exponent must be > 0, got {h}"
            )));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "counterexample_params.width_exponent must be > 0, got {w}"
            )));
        }
        if self.start_index < 2 {
            return Err(Error::InvalidSpec(format!(
                "counterexample_params.start_index must be >= 2, got {}",
                self.start_index
            )));
        }
        Ok(())
    }

    pub fn half_width(&self, n: u64) -> f64 {
        0.5 * (n as f64).powf(-self.width_exponent)
    }

    pub fn peak(&self, n: u64) -> f64 {
        self.half_width(n).powf(self.height_exponent)
    }

    pub fn sign(n: u64) -> f64 {
        if n.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Unsigned area of bump `n`, `2 m^{h+1} / (h+1)`.
    pub fn bump_area(&self, n: u64) -> f64 {
        let h = self.height_exponent;
        2.0 * self.half_width(n).powf(h + 1.0) / (h + 1.0)
    }

    /// `int |f_n|^p`, `2 m^{hp+1} / (hp+1)`.
    pub fn bump_power_integral(&self, n: u64, p: f64) -> f64 {
        let hp = self.height_exponent * p;
        2.0 * self.half_width(n).powf(hp + 1.0) / (hp + 1.0)
    }

    /// `int_n^{n+u} |f_n|` for `u >= 0`.
    pub fn bump_partial(&self, n: u64, u: f64) -> f64 {
        let h1 = self.height_exponent + 1.0;
        let m = self.half_width(n);
        if u <= 0.0 {
            0.0
        } else if u <= m {
            u.powf(h1) / h1
        } else if u < 2.0 * m {
            (2.0 * m.powf(h1) - (2.0 * m - u).powf(h1)) / h1
        } else {
            2.0 * m.powf(h1) / h1
        }
    }

    /// Unsigned profile `f_n(n + u)`.
    pub fn profile(&self, n: u64, u: f64) -> f64 {
        let m = self.half_width(n);
        let h = self.height_exponent;
        if u < 0.0 || u >= 2.0 * m {
            0.0
        } else if u < m {
            u.powf(h)
        } else {
            (2.0 * m - u).powf(h)
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let n = x.floor() as u64;
        if n < self.start_index {
            return 0.0;
        }
        Self::sign(n) * self.profile(n, x - n as f64)
    }

    /// Signed `int_a^b f` by exact piece integration.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return -self.integral(b, a);
        }
        let n0 = self.start_index;
        let na = a.floor() as u64;
        let nb = b.floor() as u64;
        let part = |n: u64, u: f64| {
            if n < n0 {
                0.0
            } else {
                Self::sign(n) * self.bump_partial(n, u)
            }
        };
        if na == nb {
            return part(na, b - nb as f64) - part(na, a - na as f64);
        }
        let mut s = CompensatedSum::new();
        if na >= n0 {
            s.add(Self::sign(na) * (self.bump_area(na) - self.bump_partial(na, a - na as f64)));
        }
        for n in (na + 1).max(n0)..nb {
            s.add(Self::sign(n) * self.bump_area(n));
        }
        s.add(part(nb, b - nb as f64));
        s.value()
    }

    /// `sum_{n=n0}^{N} (-1)^n area(n)`, which equals `int_0^{N+1} f`.
    pub fn series_partial_sum(&self, big_n: u64) -> f64 {
        (self.start_index..=big_n)
            .map(|n| Self::sign(n) * self.bump_area(n))
            .collect::<CompensatedSum>()
            .value()
    }

    fn profile_slope(&self, n: u64, u: f64, from_left: bool) -> f64 {
        let m = self.half_width(n);
        let h = self.height_exponent;
        let rising = if from_left {
            u > 0.0 && u <= m
        } else {
            u >= 0.0 && u < m
        };
        let falling = if from_left {
            u > m && u <= 2.0 * m
        } else {
            u >= m && u < 2.0 * m
        };
        if rising {
            h * u.powf(h - 1.0)
        } else if falling {
            -h * (2.0 * m - u).powf(h - 1.0)
        } else {
            0.0
        }
    }

    /// One-sided derivative; may be infinite at bump ends when `h < 1`.
    pub fn one_sided_derivative(&self, x: f64, from_left: bool) -> f64 {
        let mut n = x.floor() as u64;
        let mut u = x - n as f64;
        if from_left && u == 0.0 && n > 0 {
            n -= 1;
            u = 1.0;
        }
        if n < self.start_index {
            return 0.0;
        }
        Self::sign(n) * self.profile_slope(n, u, from_left)
    }

    /// Breakpoints of bumps `lo..=hi`.
    pub(crate) fn joints_between(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let first = (a.floor().max(0.0) as u64).max(self.start_index);
        let last = b.floor() as u64;
        for n in first..=last {
            let m = self.half_width(n);
            for x in [n as f64, n as f64 + m, n as f64 + 2.0 * m] {
                if x >= a && x <= b {
                    out.push(x);
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// witness

/// `sin(ln(1+t)) (1+t)^{-gamma}` and its antiderivative
/// `(1+t)^k (k sin u - cos u) / (k^2 + 1)` with `u = ln(1+t)`, `k = 1 - gamma`.
pub fn witness_expressions(gamma: f64) -> (Expr, Expr) {
    let u = Expr::t().ln1p();
    let one_plus_t = Expr::c(1.0).add(Expr::t());
    let f = u.clone().sin().mul(one_plus_t.clone().pow(-gamma));
    let k = 1.0 - gamma;
    let anti = one_plus_t
        .pow(k)
        .mul(Expr::c(k).mul(u.clone().sin()).sub(u.cos()))
        .div(Expr::c(k * k + 1.0));
    (f, anti)
}

pub fn make_incomparability_witness(gamma: f64) -> Result<FunctionSpec> {
    let spec = FunctionSpec::IncomparabilityWitness {
        witness_params: WitnessParams { gamma },
    };
    spec.validate()?;
    Ok(spec)
}

// ---------------------------------------------------------------------------
// compiled form

#[derive(Debug, Clone)]
pub(crate) struct Piece {
    pub a: f64,
    pub b: f64,
    pub expr: Expr,
    pub deriv: Expr,
    pub anti: Option<Expr>,
}

impl Piece {
    fn new(a: f64, b: f64, expr: Expr, anti: Option<Expr>) -> Piece {
        let deriv = expr.derivative();
        Piece {
            a,
            b,
            expr,
            deriv,
            anti,
        }
    }
}

pub(crate) enum Model<'a> {
    Pieces(Vec<Piece>),
    Sampled {
        samples: &'a Samples,
        tail: Option<TailRule>,
    },
    Bumps(CounterexampleParams),
}

pub(crate) fn piece_index(pieces: &[Piece], t: f64) -> usize {
    pieces.partition_point(|p| p.a <= t).saturating_sub(1)
}

impl FunctionSpec {
    pub fn zero() -> FunctionSpec {
        FunctionSpec::closed_form_with_antiderivative(Expr::c(0.0), Expr::c(0.0))
            .expect("zero is its own antiderivative")
    }

    pub fn closed_form(expr: Expr) -> FunctionSpec {
        FunctionSpec::ClosedForm {
            closed_form: expr,
            antiderivative: None,
        }
    }

    pub fn closed_form_with_antiderivative(expr: Expr, anti: Expr) -> Result<FunctionSpec> {
        let spec = FunctionSpec::ClosedForm {
            closed_form: expr,
            antiderivative: Some(anti),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn piecewise(pieces: Vec<Segment>, continuous: bool) -> Result<FunctionSpec> {
        let spec = FunctionSpec::Piecewise { pieces, continuous };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sampled(times: Vec<f64>, values: Vec<f64>, tail: Option<TailRule>) -> Result<FunctionSpec> {
        let spec = FunctionSpec::Sampled {
            samples: Samples {
                times,
                values,
                interpolation: Interpolation::Linear,
            },
            tail,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn counterexample(params: CounterexampleParams) -> Result<FunctionSpec> {
        params.validate()?;
        Ok(FunctionSpec::Counterexample {
            counterexample_params: params,
        })
    }

    pub fn counterexample_default() -> FunctionSpec {
        FunctionSpec::Counterexample {
            counterexample_params: CounterexampleParams::default(),
        }
    }

    /// Parses and validates a JSON document.
    pub fn from_json_str(text: &str) -> Result<FunctionSpec> {
        let spec: FunctionSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::ClosedForm {
                closed_form,
                antiderivative,
            } => {
                if let Some(anti) = antiderivative {
                    check_antiderivative(closed_form, anti, 0.0, f64::INFINITY, "closed_form")?;
                }
                Ok(())
            }
            FunctionSpec::Piecewise { pieces, continuous } => validate_pieces(pieces, *continuous),
            FunctionSpec::Sampled { samples, tail } => validate_samples(samples, tail.as_ref()),
            FunctionSpec::Counterexample {
                counterexample_params,
            } => counterexample_params.validate(),
            FunctionSpec::IncomparabilityWitness { witness_params } => {
                let g = witness_params.gamma;
                if g > 0.5 && g <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!(
                        "witness_params.gamma must lie in (1/2, 1], got {g}"
                    )))
                }
            }
        }
    }

    pub(crate) fn model(&self) -> Model<'_> {
        match self {
            FunctionSpec::ClosedForm {
                closed_form,
                antiderivative,
            } => Model::Pieces(vec![Piece::new(
                0.0,
                f64::INFINITY,
                closed_form.clone(),
                antiderivative.clone(),
            )]),
            FunctionSpec::Piecewise { pieces, .. } => {
                let mut out: Vec<Piece> = pieces
                    .iter()
                    .map(|s| {
                        Piece::new(s.a, s.end(), s.expression.clone(), s.antiderivative.clone())
                    })
                    .collect();
                let end = out.last().map_or(0.0, |p| p.b);
                if end.is_finite() {
                    out.push(Piece::new(end, f64::INFINITY, Expr::c(0.0), Some(Expr::c(0.0))));
                }
                Model::Pieces(out)
            }
            FunctionSpec::Sampled { samples, tail } => Model::Sampled {
                samples,
                tail: *tail,
            },
            FunctionSpec::Counterexample {
                counterexample_params,
            } => Model::Bumps(*counterexample_params),
            FunctionSpec::IncomparabilityWitness { witness_params } => {
                let (f, anti) = witness_expressions(witness_params.gamma);
                Model::Pieces(vec![Piece::new(0.0, f64::INFINITY, f, Some(anti))])
            }
        }
    }

    pub fn counterexample_params(&self) -> Option<CounterexampleParams> {
        match self {
            FunctionSpec::Counterexample {
                counterexample_params,
            } => Some(*counterexample_params),
            _ => None,
        }
    }

    pub fn witness_gamma(&self) -> Option<f64> {
        match self {
            FunctionSpec::IncomparabilityWitness { witness_params } => Some(witness_params.gamma),
            _ => None,
        }
    }

    /// Points in `[a, b]` where the representation changes formula.
    pub fn joints(&self, a: f64, b: f64) -> Vec<f64> {
        match self.model() {
            Model::Pieces(pieces) => pieces
                .iter()
                .skip(1)
                .map(|p| p.a)
                .filter(|&x| x >= a && x <= b)
                .collect(),
            Model::Sampled { samples, .. } => samples
                .times
                .iter()
                .copied()
                .filter(|&x| x >= a && x <= b)
                .collect(),
            Model::Bumps(params) => {
                if b.is_finite() {
                    params.joints_between(a, b)
                } else {
                    Vec::new()
                }
            }
        }
    }
}

fn check_antiderivative(f: &Expr, anti: &Expr, a: f64, b: f64, what: &str) -> Result<()> {
    let deriv = anti.derivative();
    let hi = if b.is_finite() { b } else { a + 64.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a17_1de5);
    for _ in 0..ANTIDERIVATIVE_CHECKS {
        let x = a + rng.gen::<f64>() * (hi - a);
        let fv = f.eval(x);
        let dv = deriv.eval(x);
        if !(fv.is_finite() && dv.is_finite())
            || (dv - fv).abs() > ANTIDERIVATIVE_RTOL * fv.abs().max(1.0)
        {
            return Err(Error::InvalidSpec(format!(
                "{what}: antiderivative does not match the expression at t = {x} (F' = {dv}, f = {fv})"
            )));
        }
    }
    Ok(())
}

fn validate_pieces(pieces: &[Segment], continuous: bool) -> Result<()> {
    if pieces.is_empty() {
        return Err(Error::InvalidSpec("pieces: at least one segment required".into()));
    }
    if pieces[0].a != 0.0 {
        return Err(Error::InvalidSpec(format!(
            "pieces[0].a: first segment must start at 0, got {}",
            pieces[0].a
        )));
    }
    for (i, s) in pieces.iter().enumerate() {
        let end = s.end();
        if !(s.a.is_finite() && s.a < end) {
            return Err(Error::InvalidSpec(format!(
                "pieces[{i}]: need a < b, got [{}, {})",
                s.a, end
            )));
        }
        if s.b.is_none() && i + 1 != pieces.len() {
            return Err(Error::InvalidSpec(format!(
                "pieces[{i}]: only the last segment may extend to infinity"
            )));
        }
        if let Some(next) = pieces.get(i + 1) {
            if next.a != end {
                return Err(Error::InvalidSpec(format!(
                    "pieces[{}]: starts at {} but the previous segment ends at {end}",
                    i + 1,
                    next.a
                )));
            }
        }
        if let Some(anti) = &s.antiderivative {
            check_antiderivative(&s.expression, anti, s.a, end, &format!("pieces[{i}]"))?;
        }
    }
    if continuous {
        let mut joints: Vec<(usize, f64, f64)> = pieces
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i, w[0].expression.eval(w[1].a), w[1].expression.eval(w[1].a)))
            .collect();
        if let Some(last) = pieces.last() {
            if let Some(b) = last.b {
                joints.push((pieces.len() - 1, last.expression.eval(b), 0.0));
            }
        }
        for (i, l, r) in joints {
            if !((l - r).abs() <= JOINT_TOL * l.abs().max(1.0)) {
                return Err(Error::InvalidSpec(format!(
                    "pieces[{i}]: discontinuous joint at its right end ({l} vs {r})"
                )));
            }
        }
    }
    Ok(())
}

fn validate_samples(samples: &Samples, tail: Option<&TailRule>) -> Result<()> {
    let n = samples.times.len();
    if n < 2 || samples.values.len() != n {
        return Err(Error::InvalidSpec(format!(
            "samples: need at least two times and equally many values (got {} and {})",
            n,
            samples.values.len()
        )));
    }
    if samples.times[0] != 0.0 {
        return Err(Error::InvalidSpec(format!(
            "samples.times[0]: must be 0, got {}",
            samples.times[0]
        )));
    }
    for i in 1..n {
        if !(samples.times[i] > samples.times[i - 1]) || !samples.times[i].is_finite() {
            return Err(Error::InvalidSpec(format!(
                "samples.times[{i}]: times must be finite and strictly increasing"
            )));
        }
    }
    if let Some(i) = samples.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidSpec(format!("samples.values[{i}]: not finite")));
    }
    if let Some(TailRule::Bounded {
        abs_integral,
        sup_abs,
        lipschitz,
    }) = tail
    {
        if !(*abs_integral >= 0.0 && *sup_abs >= 0.0 && lipschitz.is_none_or(|l| l >= 0.0)) {
            return Err(Error::InvalidSpec(
                "tail: abs_integral, sup_abs and lipschitz must be nonnegative".into(),
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// operations

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

pub fn evaluate(spec: &FunctionSpec, t: f64) -> Result<f64> {
    check_time(t)?;
    let v = match spec.model() {
        Model::Pieces(pieces) => {
            let i = piece_index(&pieces, t);
            pieces[i].expr.eval(t)
        }
        Model::Sampled { samples, tail } => {
            let last = samples.last_time();
            if t > last {
                match tail {
                    Some(TailRule::Zero) => 0.0,
                    _ => return Err(Error::BeyondSamples { t, last }),
                }
            } else {
                samples.interpolate(t)
            }
        }
        Model::Bumps(params) => params.value(t),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { t, value: v })
    }
}

fn agree(l: f64, r: f64) -> bool {
    (l - r).abs() <= JOINT_TOL * l.abs().max(r.abs()).max(1.0)
}

/// Classical derivative, `None` where it does not exist (joints with
/// mismatched one-sided derivatives, kinks, infinite slopes).
pub fn derivative(spec: &FunctionSpec, t: f64) -> Result<Option<f64>> {
    check_time(t)?;
    Ok(match spec.model() {
        Model::Pieces(pieces) => {
            let i = piece_index(&pieces, t);
            let right = pieces[i].deriv.eval_strict(t);
            if i > 0 && t == pieces[i].a {
                let left = pieces[i - 1].deriv.eval_strict(t);
                match (left, right) {
                    (Some(l), Some(r)) if agree(l, r) => Some(r),
                    _ => None,
                }
            } else {
                right
            }
        }
        Model::Sampled { samples, tail } => {
            let last = samples.last_time();
            let n = samples.times.len();
            if t > last {
                match tail {
                    Some(TailRule::Zero) => Some(0.0),
                    _ => return Err(Error::BeyondSamples { t, last }),
                }
            } else if t == last {
                let l = samples.slope(n - 2);
                match tail {
                    Some(TailRule::Zero) => agree(l, 0.0).then_some(l),
                    _ => None,
                }
            } else {
                let i = samples.cell(t);
                let r = samples.slope(i);
                if t == samples.times[i] && i > 0 {
                    let l = samples.slope(i - 1);
                    agree(l, r).then_some(r)
                } else {
                    Some(r)
                }
            }
        }
        Model::Bumps(params) => {
            let r = params.one_sided_derivative(t, false);
            let value = if t > 0.0 {
                let l = params.one_sided_derivative(t, true);
                (l.is_finite() && agree(l, r)).then_some(r)
            } else {
                Some(r)
            };
            value.filter(|v| v.is_finite())
        }
    })
}

pub fn exact_antiderivative_available(spec: &FunctionSpec) -> bool {
    match spec {
        FunctionSpec::ClosedForm { antiderivative, .. } => antiderivative.is_some(),
        FunctionSpec::Piecewise { pieces, .. } => {
            pieces.iter().all(|s| s.antiderivative.is_some())
        }
        FunctionSpec::Sampled { .. } => false,
        FunctionSpec::Counterexample { .. } | FunctionSpec::IncomparabilityWitness { .. } => true,
    }
}
