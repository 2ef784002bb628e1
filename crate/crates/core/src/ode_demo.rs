//! The adaptive-control example `e' = -e + theta w(t)`, `theta' = -e w(t)`
//! with Lyapunov function `V = e^2 + theta^2`, `V' = -2 e^2`.
//!
//! `w` here is the input signal, not a modulus of continuity.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::certificates::{sobolev_certificate, CertificateOptions, DecayCertificate};
use crate::error::{Error, Result};
use crate::function_model::{evaluate, FunctionSpec, TailRule};
use crate::norms::sup_norm;
use crate::numeric::{le_tol, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub t: f64,
    pub e: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<SystemState>,
    pub omega_spec: FunctionSpec,
    pub step: f64,
    /// `e^2 + theta^2`, recomputed from the states.
    pub v_series: Vec<f64>,
    /// `2 e^2`.
    pub f_series: Vec<f64>,
}

pub const TRAJECTORY_CSV_HEADER: &str = "t,e,theta,V,f";

impl Trajectory {
    fn from_states(states: Vec<SystemState>, omega_spec: FunctionSpec, step: f64) -> Trajectory {
        let v_series = states.iter().map(|s| s.e * s.e + s.theta * s.theta).collect();
        let f_series = states.iter().map(|s| 2.0 * s.e * s.e).collect();
        Trajectory {
            states,
            omega_spec,
            step,
            v_series,
            f_series,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn end_time(&self) -> f64 {
        self.states.last().map_or(0.0, |s| s.t)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRAJECTORY_CSV_HEADER);
        out.push('\n');
        for ((s, v), f) in self.states.iter().zip(&self.v_series).zip(&self.f_series) {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s.t, s.e, s.theta, v, f);
        }
        out
    }
}

fn rhs(e: f64, theta: f64, w: f64) -> (f64, f64) {
    (-e + theta * w, -e * w)
}

/// Classical fixed-step RK4 on `[0, T]`. The step count is `round(T / step)`.
pub fn simulate(e0: f64, theta0: f64, omega_spec: &FunctionSpec, big_t: f64, step: f64) -> Result<Trajectory> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(big_t >= step && big_t.is_finite()) {
        return Err(Error::InvalidArgument(format!("T must be at least the step, got T={big_t}")));
    }
    if !(e0.is_finite() && theta0.is_finite()) {
        return Err(Error::InvalidArgument("initial state must be finite".into()));
    }
    let n = (big_t / step).round() as usize;
    let w = |t: f64| -> Result<f64> {
        let v = evaluate(omega_spec, t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { t, value: v })
        }
    };
    let mut states = Vec::with_capacity(n + 1);
    let (mut e, mut th) = (e0, theta0);
    states.push(SystemState { t: 0.0, e, theta: th });
    let h = step;
    let mut w0 = w(0.0)?;
    for i in 0..n {
        let t = i as f64 * h;
        let wm = w(t + 0.5 * h)?;
        let w1 = w((i + 1) as f64 * h)?;
        let k1 = rhs(e, th, w0);
        let k2 = rhs(e + 0.5 * h * k1.0, th + 0.5 * h * k1.1, wm);
        let k3 = rhs(e + 0.5 * h * k2.0, th + 0.5 * h * k2.1, wm);
        let k4 = rhs(e + h * k3.0, th + h * k3.1, w1);
        e += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        th += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        let t1 = (i + 1) as f64 * h;
        if !(e.is_finite() && th.is_finite()) {
            return Err(Error::BlowUp { t: t1 });
        }
        states.push(SystemState { t: t1, e, theta: th });
        w0 = w1;
    }
    Ok(Trajectory::from_states(states, omega_spec.clone(), step))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    /// `V` is nonincreasing up to `tol`.
    pub monotone: bool,
    /// Largest increase `V_{i+1} - V_i`, or `0`.
    pub max_violation: f64,
    /// First sample index `i` with `V_{i+1} > V_i + tol`.
    pub violation_index: Option<usize>,
    /// `max_i |V_{i+1} - V_i + trapezoid of 2 e^2 over the step|`.
    pub dissipation_residual: f64,
}

pub fn lyapunov_check(traj: &Trajectory, tol: f64) -> LyapunovReport {
    let mut max_violation: f64 = 0.0;
    let mut violation_index = None;
    let mut residual: f64 = 0.0;
    for i in 0..traj.v_series.len().saturating_sub(1) {
        let dv = traj.v_series[i + 1] - traj.v_series[i];
        max_violation = max_violation.max(dv);
        if dv > tol && violation_index.is_none() {
            violation_index = Some(i);
        }
        let dt = traj.states[i + 1].t - traj.states[i].t;
        let dissipated = 0.5 * dt * (traj.f_series[i] + traj.f_series[i + 1]);
        residual = residual.max((dv + dissipated).abs());
    }
    LyapunovReport {
        monotone: violation_index.is_none(),
        max_violation,
        violation_index,
        dissipation_residual: residual,
    }
}

/// `int_0^T 2 e^2` by composite Simpson (trapezoid on a leftover step).
pub fn dissipated_energy(traj: &Trajectory) -> f64 {
    let f = &traj.f_series;
    let h = traj.step;
    let pairs = (f.len() - 1) / 2;
    let mut sum: CompensatedSum = (0..pairs)
        .map(|k| h / 3.0 * (f[2 * k] + 4.0 * f[2 * k + 1] + f[2 * k + 2]))
        .collect();
    if (f.len() - 1) % 2 == 1 {
        sum.add(0.5 * h * (f[f.len() - 2] + f[f.len() - 1]));
    }
    sum.value()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDecayCertificate {
    /// Certificate for `f = 2 e^2` with `p = 1`, `q = inf`.
    pub certificate: DecayCertificate,
    /// `(t, |e(t)|, (bound / 2)^{1/2})` per certificate row.
    pub error_bounds: Vec<(f64, f64, f64)>,
    pub dissipated: f64,
    pub v0: f64,
    /// Largest `|f'|` at the samples, from `f' = -4 e^2 + 4 theta e w`.
    pub fprime_sampled: f64,
}

/// Default certificate grid: every sample spaced at least `0.25` apart.
pub fn default_grid(traj: &Trajectory) -> Vec<f64> {
    let stride = ((0.25 / traj.step).round() as usize).max(1);
    traj.states.iter().step_by(stride).map(|s| s.t).collect()
}

/// Sampled spec of `f = 2 e^2` whose tail past `T` carries the bounds
/// `int_T^inf f <= V(T)`, `f <= 2 V(T)` and `|f'| <= (4 + 2 sup|w|) V(T)`.
pub fn error_energy_spec(traj: &Trajectory, fprime_floor: f64) -> Result<FunctionSpec> {
    let vt = *traj.v_series.last().unwrap_or(&0.0);
    let w_sup = sup_norm(&traj.omega_spec).ok_or_else(|| {
        Error::InvalidArgument("the input signal needs a certified bound on [0, inf)".into())
    })?;
    let tail = TailRule::Bounded {
        abs_integral: vt,
        sup_abs: 2.0 * vt,
        lipschitz: Some(((4.0 + 2.0 * w_sup) * vt).max(fprime_floor)),
    };
    FunctionSpec::sampled(traj.times(), traj.f_series.clone(), Some(tail))
}

/// Decay certificate for the tracking error, refusing trajectories whose
/// Lyapunov function is not dissipated.
pub fn certify_error_decay(traj: &Trajectory, grid: &[f64]) -> Result<ErrorDecayCertificate> {
    let check = lyapunov_check(traj, 1e-9);
    if !check.monotone {
        return Err(Error::LyapunovViolation(format!(
            "V increases by {:e} after sample {}",
            check.max_violation,
            check.violation_index.unwrap_or(0)
        )));
    }
    let v0 = traj.v_series[0];
    let dissipated = dissipated_energy(traj);
    if !le_tol(dissipated, v0) {
        return Err(Error::LyapunovViolation(format!(
            "int 2e^2 = {dissipated} exceeds V(0) = {v0}"
        )));
    }
    if let Some(&t) = grid.iter().find(|&&t| !(t >= 0.0 && t <= traj.end_time())) {
        return Err(Error::BeyondSamples {
            t,
            last: traj.end_time(),
        });
    }
    let mut fprime_sampled: f64 = 0.0;
    for s in &traj.states {
        let w = evaluate(&traj.omega_spec, s.t)?;
        fprime_sampled = fprime_sampled.max((-4.0 * s.e * s.e + 4.0 * s.theta * s.e * w).abs());
    }
    let spec = error_energy_spec(traj, fprime_sampled)?;
    let certificate = sobolev_certificate(&spec, 1.0, f64::INFINITY, grid, &CertificateOptions::default())?;
    let error_bounds = certificate
        .grid
        .iter()
        .map(|r| (r.t, (0.5 * r.f_abs).sqrt(), (0.5 * r.bound).sqrt()))
        .collect();
    Ok(ErrorDecayCertificate {
        certificate,
        error_bounds,
        dissipated,
        v0,
        fprime_sampled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;

    fn sin_input() -> FunctionSpec {
        FunctionSpec::closed_form(Expr::t().sin())
    }

    #[test]
    fn equilibrium_stays_put() {
        let tr = simulate(0.0, 0.0, &sin_input(), 5.0, 0.01).unwrap();
        assert!(tr.states.iter().all(|s| s.e == 0.0 && s.theta == 0.0));
        let l = lyapunov_check(&tr, 1e-12);
        assert!(l.monotone && l.dissipation_residual == 0.0);
        let c = certify_error_decay(&tr, &default_grid(&tr)).unwrap();
        assert!(c.certificate.grid.iter().all(|r| r.bound == 0.0 && r.satisfied));
    }

    #[test]
    fn zero_input_decouples() {
        let tr = simulate(1.0, 1.0, &FunctionSpec::zero(), 3.0, 1e-3).unwrap();
        for s in tr.states.iter().step_by(100) {
            assert!((s.e - (-s.t).exp()).abs() < 1e-12);
            assert_eq!(s.theta, 1.0);
        }
    }

    #[test]
    fn step_halving_agrees() {
        let a = simulate(1.0, 1.0, &sin_input(), 20.0, 1e-2).unwrap();
        let b = simulate(1.0, 1.0, &sin_input(), 20.0, 5e-3).unwrap();
        assert!(a.v_series.last().unwrap() < &2.0);
        let (ea, eb) = (a.states.last().unwrap().e, b.states.last().unwrap().e);
        assert!((ea - eb).abs() < 1e-3, "{ea} vs {eb}");
    }

    #[test]
    fn perturbed_v_is_located() {
        let mut tr = simulate(1.0, 1.0, &sin_input(), 2.0, 1e-2).unwrap();
        tr.v_series[50] += 0.1;
        let l = lyapunov_check(&tr, 1e-9);
        assert!(!l.monotone);
        assert_eq!(l.violation_index, Some(49));
        assert!(matches!(
            certify_error_decay(&tr, &[0.0]),
            Err(Error::LyapunovViolation(_))
        ));
    }

    #[test]
    fn certificate_at_forty() {
        let tr = simulate(1.0, 1.0, &sin_input(), 40.0, 1e-3).unwrap();
        let grid = default_grid(&tr);
        let c = certify_error_decay(&tr, &grid).unwrap();
        assert!(c.certificate.all_satisfied());
        assert!(c.dissipated <= 2.0);
        let &(t, e, bound) = c.error_bounds.last().unwrap();
        assert!((t - 40.0).abs() < 1e-9 && e <= bound);
        // S(t) never exceeds V(t)
        for r in &c.certificate.grid {
            let i = (r.t / tr.step).round() as usize;
            assert!(r.s_value <= tr.v_series[i] * (1.0 + 1e-6) + 1e-9, "t={}", r.t);
        }
    }

    #[test]
    fn dissipation_matches_energy_drop() {
        let tr = simulate(1.0, 1.0, &sin_input(), 10.0, 1e-3).unwrap();
        let drop = tr.v_series[0] - tr.v_series.last().unwrap();
        assert!((dissipated_energy(&tr) - drop).abs() < 1e-10);
    }

    #[test]
    fn csv_rows() {
        let tr = simulate(1.0, 0.5, &sin_input(), 0.02, 0.01).unwrap();
        let csv = tr.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_CSV_HEADER);
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn bad_arguments() {
        assert!(simulate(1.0, 1.0, &sin_input(), 1.0, 0.0).is_err());
        assert!(simulate(1.0, 1.0, &sin_input(), 0.001, 0.01).is_err());
    }
}
