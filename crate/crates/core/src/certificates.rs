//! Pointwise decay certificates: grids of rows checking `|f(t)| <= bound(t)`
//! where the bound is computed from `S(t)` and a modulus of continuity.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_model::{evaluate, FunctionSpec};
use crate::modulus::{self, fit_holder, ModulusEstimate, ModulusForm};
use crate::norms::{self, format_q, sobolev_report, NormValue};
use crate::numeric::{ext_f64, ext_f64_map, le_tol};
use crate::tail_integral::{tail_supremum_grid, HorizonPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMethod {
    Lemma1Window,
    Lemma2Modulus,
    HolderRate,
    SobolevRate,
    OptimizedWindow,
}

impl CertificateMethod {
    pub fn name(self) -> &'static str {
        match self {
            CertificateMethod::Lemma1Window => "lemma1_window",
            CertificateMethod::Lemma2Modulus => "lemma2_modulus",
            CertificateMethod::HolderRate => "holder_rate",
            CertificateMethod::SobolevRate => "sobolev_rate",
            CertificateMethod::OptimizedWindow => "optimized_window",
        }
    }
}

impl std::str::FromStr for CertificateMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
            Error::InvalidArgument(format!(
                "unknown method {s:?}; expected lemma1_window, lemma2_modulus, holder_rate, sobolev_rate or optimized_window"
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub t: f64,
    pub f_abs: f64,
    /// `S(t)`, or `int_t^inf |f|^p` for the Sobolev method; upper end.
    #[serde(with = "ext_f64")]
    pub s_value: f64,
    #[serde(with = "ext_f64")]
    pub bound: f64,
    pub satisfied: bool,
    /// False when the bound is infinite and the row holds vacuously.
    pub informative: bool,
    /// Window length `s` achieving the bound, for window methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
}

impl CertificateRow {
    fn new(t: f64, f_abs: f64, s_value: f64, bound: f64, window: Option<f64>) -> CertificateRow {
        debug_assert!(!(bound < 0.0), "negative bound {bound} at t={t}");
        CertificateRow {
            t,
            f_abs,
            s_value,
            bound,
            satisfied: le_tol(f_abs, bound),
            informative: bound.is_finite(),
            window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub method: CertificateMethod,
    pub grid: Vec<CertificateRow>,
    #[serde(with = "ext_f64_map")]
    pub constants: BTreeMap<String, f64>,
    /// Every ingredient was certified.
    pub sound: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub const CSV_HEADER: &str = "t,f_abs,s_value,bound,satisfied";

impl DecayCertificate {
    pub fn all_satisfied(&self) -> bool {
        self.grid.iter().all(|r| r.satisfied)
    }

    pub fn violations(&self) -> impl Iterator<Item = &CertificateRow> {
        self.grid.iter().filter(|r| !r.satisfied)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.grid {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.t, r.f_abs, r.s_value, r.bound, r.satisfied
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

/// Shared knobs for certificate construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateOptions {
    /// Tolerance for `S(t)` and norm computations.
    pub tol: f64,
    pub policy: HorizonPolicy,
    /// Accept uncertified (sampled) moduli; the certificate is then unsound.
    pub allow_empirical: bool,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            tol: 1e-10,
            policy: HorizonPolicy::default(),
            allow_empirical: false,
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    match grid.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        Some(&t) => Err(Error::NegativeTime(t)),
        None => Ok(()),
    }
}

/// `(t, |f(t)|, S(t) upper)` per grid point.
fn s_rows(spec: &FunctionSpec, grid: &[f64], opts: &CertificateOptions) -> Result<Vec<(f64, f64, f64)>> {
    check_grid(grid)?;
    let tails = tail_supremum_grid(spec, grid, opts.tol, opts.policy)?;
    grid.iter()
        .zip(tails)
        .map(|(&t, s)| Ok((t, evaluate(spec, t)?.abs(), s.upper())))
        .collect()
}

fn modulus_constants(m: &ModulusEstimate) -> BTreeMap<String, f64> {
    match &m.form {
        ModulusForm::Lipschitz { lipschitz_const } => [("lipschitz_const".to_string(), *lipschitz_const)].into(),
        ModulusForm::Holder { c, alpha } => [("c".to_string(), *c), ("alpha".to_string(), *alpha)].into(),
        ModulusForm::Table { .. } => BTreeMap::new(),
    }
}

/// `|f(t)| <= S(t)^{1/2} + omega(S(t)^{1/2})` for a global modulus `omega`.
pub fn lemma2_certificate(
    spec: &FunctionSpec,
    modulus: &ModulusEstimate,
    grid: &[f64],
    opts: &CertificateOptions,
) -> Result<DecayCertificate> {
    if !modulus.certified && !opts.allow_empirical {
        return Err(Error::Unsound(
            "the modulus is a sampled estimate; pass allow_empirical to use it anyway".into(),
        ));
    }
    let rows = s_rows(spec, grid, opts)?
        .into_iter()
        .map(|(t, f, s)| {
            let r = s.sqrt();
            CertificateRow::new(t, f, s, r + modulus.eval(r), None)
        })
        .collect();
    let mut notes = Vec::new();
    if !modulus.certified {
        notes.push("uncertified modulus".to_string());
    }
    Ok(DecayCertificate {
        method: CertificateMethod::Lemma2Modulus,
        grid: rows,
        constants: modulus_constants(modulus),
        sound: modulus.certified,
        notes,
    })
}

/// `|f(t)| <= (1 + c) S(t)^{alpha / (1 + alpha)}` for an `alpha`-Hölder `f`
/// with constant `c`. Soundness requires `c` to dominate the certified
/// global constant.
pub fn holder_certificate(
    spec: &FunctionSpec,
    c: f64,
    alpha: f64,
    grid: &[f64],
    opts: &CertificateOptions,
) -> Result<DecayCertificate> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(c >= 0.0) {
        return Err(Error::InvalidArgument(format!("c must be nonnegative, got {c}")));
    }
    let fit = fit_holder(spec, alpha, (0.0, f64::INFINITY), 256, 7)?;
    let sound = le_tol(fit.c, c);
    let mut notes = Vec::new();
    if !sound {
        if !opts.allow_empirical {
            return Err(Error::Unsound(format!(
                "c = {c} is below the certified Hölder constant {} of order {alpha}; pass allow_empirical to use it anyway",
                fit.c
            )));
        }
        notes.push(format!("c below certified constant {}", fit.c));
    }
    let e = alpha / (1.0 + alpha);
    let rows = s_rows(spec, grid, opts)?
        .into_iter()
        .map(|(t, f, s)| CertificateRow::new(t, f, s, (1.0 + c) * s.powf(e), None))
        .collect();
    Ok(DecayCertificate {
        method: CertificateMethod::HolderRate,
        grid: rows,
        constants: [("c".to_string(), c), ("alpha".to_string(), alpha)].into(),
        sound,
        notes,
    })
}

/// Exponent `(q - 1) / (2q - 1)` of `int_t^inf |f|^p`, `1/2` for `q = inf`.
pub fn sobolev_exponent(q: f64) -> f64 {
    if q.is_infinite() {
        0.5
    } else {
        (q - 1.0) / (2.0 * q - 1.0)
    }
}

/// `|f(t)|^p <= (1 + p M^{p-1} ||f'||_q) (int_t^inf |f|^p)^{(q-1)/(2q-1)}`
/// with `M` the sup-norm bound from the embedding.
pub fn sobolev_certificate(
    spec: &FunctionSpec,
    p: f64,
    q: f64,
    grid: &[f64],
    opts: &CertificateOptions,
) -> Result<DecayCertificate> {
    check_grid(grid)?;
    let report = sobolev_report(spec, p, q, opts.tol)?;
    let (Some(m), Some(lq)) = (report.sup_norm_bound, report.lq_norm_derivative.finite()) else {
        return Err(Error::NotSobolev {
            p,
            q: format_q(q),
            reason: report.failing.unwrap_or_else(|| "norms unavailable".into()),
        });
    };
    let factor = 1.0 + p * m.powf(p - 1.0) * lq;
    let e = sobolev_exponent(q);
    let rows = grid
        .iter()
        .map(|&t| {
            let s = match norms::lp_tail_power(spec, p, t, opts.tol, opts.policy)? {
                NormValue::Finite(v) => v,
                _ => f64::INFINITY,
            };
            let f = evaluate(spec, t)?.abs();
            Ok(CertificateRow::new(t, f, s, (factor * s.powf(e)).powf(1.0 / p), None))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayCertificate {
        method: CertificateMethod::SobolevRate,
        grid: rows,
        constants: [
            ("p".to_string(), p),
            ("q".to_string(), q),
            ("sup_norm_bound".to_string(), m),
            ("lq_norm_derivative".to_string(), lq),
        ]
        .into(),
        sound: true,
        notes: Vec::new(),
    })
}

/// `S/s + local oscillation over [t, t+s] at scale s`, with `0` when
/// `S = 0` (a continuous `f` then vanishes on `[t, inf)`).
fn window_value(s_t: f64, s: f64, osc: f64) -> f64 {
    if s_t == 0.0 {
        0.0
    } else {
        s_t / s + osc
    }
}

/// The window inequality at the default length `s = S(t)^{1/2}`, with the
/// local oscillation on `[t, t + s]`.
pub fn lemma1_window_certificate(
    spec: &FunctionSpec,
    grid: &[f64],
    opts: &CertificateOptions,
) -> Result<DecayCertificate> {
    let rows = s_rows(spec, grid, opts)?
        .into_iter()
        .map(|(t, f, s_t)| {
            if !s_t.is_finite() {
                return CertificateRow::new(t, f, s_t, f64::INFINITY, None);
            }
            let s = s_t.sqrt();
            let osc = modulus::local_oscillation_upper(spec, t, t + s, s, true);
            CertificateRow::new(t, f, s_t, window_value(s_t, s, osc), Some(s))
        })
        .collect();
    Ok(DecayCertificate {
        method: CertificateMethod::Lemma1Window,
        grid: rows,
        constants: [("window_exponent".to_string(), 0.5)].into(),
        sound: true,
        notes: Vec::new(),
    })
}

/// Candidate window lengths for [`optimized_window_certificate`].
/// `S(t)^{1/2}` is always searched, plus `S(t)^{1/(1+alpha)}` when `alpha`
/// is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSearch {
    /// Log-spaced `(s_min, s_max, points_per_decade)`, if any.
    pub grid: Option<(f64, f64, usize)>,
    pub alpha: Option<f64>,
}

impl Default for WindowSearch {
    fn default() -> Self {
        WindowSearch {
            grid: Some((1e-6, 1e3, 64)),
            alpha: None,
        }
    }
}

impl WindowSearch {
    pub fn default_only() -> Self {
        WindowSearch {
            grid: None,
            alpha: None,
        }
    }

    fn lengths(&self) -> Vec<f64> {
        let Some((lo, hi, per)) = self.grid else {
            return Vec::new();
        };
        let decades = (hi / lo).log10();
        let n = (decades * per as f64).round() as usize;
        (0..=n)
            .map(|i| lo * 10f64.powf(decades * i as f64 / n.max(1) as f64))
            .collect()
    }
}

/// `min_s S(t)/s + local oscillation over [t, t+s]` over the search set.
pub fn optimized_window_certificate(
    spec: &FunctionSpec,
    grid: &[f64],
    search: &WindowSearch,
    opts: &CertificateOptions,
) -> Result<DecayCertificate> {
    if let Some((lo, hi, per)) = search.grid {
        if !(lo > 0.0 && hi >= lo && hi.is_finite() && per > 0) {
            return Err(Error::InvalidArgument(format!(
                "window search needs 0 < s_min <= s_max and points per decade > 0, got ({lo}, {hi}, {per})"
            )));
        }
    }
    if let Some(a) = search.alpha {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1], got {a}")));
        }
    }
    let lengths = search.lengths();
    let rows = s_rows(spec, grid, opts)?
        .into_iter()
        .map(|(t, f, s_t)| {
            if !s_t.is_finite() {
                return CertificateRow::new(t, f, s_t, f64::INFINITY, None);
            }
            if s_t == 0.0 {
                return CertificateRow::new(t, f, s_t, 0.0, None);
            }
            // canonical lengths get branch-and-bound enclosures
            let mut canonical = vec![s_t.sqrt()];
            if let Some(a) = search.alpha {
                canonical.push(s_t.powf(1.0 / (1.0 + a)));
            }
            let mut best = (f64::INFINITY, 0.0);
            for &s in &canonical {
                let v = window_value(s_t, s, modulus::local_oscillation_upper(spec, t, t + s, s, true));
                if v < best.0 {
                    best = (v, s);
                }
            }
            let osc = modulus::nested_oscillation_upper(spec, t, &lengths);
            for (&s, o) in lengths.iter().zip(osc) {
                let v = window_value(s_t, s, o);
                if v < best.0 {
                    best = (v, s);
                }
            }
            CertificateRow::new(t, f, s_t, best.0, Some(best.1))
        })
        .collect();
    let mut constants = BTreeMap::new();
    if let Some((lo, hi, per)) = search.grid {
        constants.insert("s_min".to_string(), lo);
        constants.insert("s_max".to_string(), hi);
        constants.insert("points_per_decade".to_string(), per as f64);
    }
    if let Some(a) = search.alpha {
        constants.insert("alpha".to_string(), a);
    }
    Ok(DecayCertificate {
        method: CertificateMethod::OptimizedWindow,
        grid: rows,
        constants,
        sound: true,
        notes: Vec::new(),
    })
}
