//! `barbalat`: decay certificates, tail integrals and norms from the command
//! line.
//!
//! Exit status: 0 on success, 2 when a bound is violated, 1 on input errors.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use barbalat_core::certificates::{
    holder_certificate, lemma1_window_certificate, lemma2_certificate, optimized_window_certificate,
    sobolev_certificate, CertificateMethod, CertificateOptions, WindowSearch,
};
use barbalat_core::modulus::{certified_modulus, fit_holder, sampled_global_modulus};
use barbalat_core::norms::{counterexample_partial_power, lp_norm, lq_norm_derivative, lq_norm_derivative_on, parse_q, sobolev_report};
use barbalat_core::numeric::le_tol;
use barbalat_core::ode_demo::{certify_error_decay, default_grid, lyapunov_check, simulate};
use barbalat_core::tail_integral::{improper_integral, integrate, tail_supremum_grid, HorizonPolicy};
use barbalat_core::{derivative, evaluate, make_incomparability_witness, CounterexampleParams, Error, Expr, FunctionSpec};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "barbalat", version, about = "Certified pointwise decay bounds from tail integrals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Function spec (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Fixed integration horizon; adaptive when omitted.
    #[arg(long)]
    horizon: Option<f64>,
}

impl Common {
    fn spec(&self) -> Result<FunctionSpec> {
        let path = self.spec.as_deref().context("--spec is required")?;
        load_spec(path)
    }

    fn policy(&self) -> Result<HorizonPolicy> {
        match self.horizon {
            None => Ok(HorizonPolicy::default()),
            Some(h) if h > 0.0 && h.is_finite() => Ok(HorizonPolicy::Fixed(h)),
            Some(h) => bail!("--horizon must be positive and finite, got {h}"),
        }
    }

    fn check_tol(&self) -> Result<()> {
        if self.tol > 0.0 && self.tol.is_finite() {
            Ok(())
        } else {
            bail!("--tol must be positive, got {}", self.tol)
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate f and f' on a grid.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: String,
    },
    /// Definite integral over [a, b], or improper when b is "inf".
    Integrate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        #[arg(long, default_value = "inf")]
        b: String,
    },
    /// Tail suprema S(t) = sup_{s >= t} |int_t^s f| on a grid.
    Tails {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: String,
    },
    /// Lebesgue norms of f and f' and the Sobolev membership report.
    Norms {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value = "inf")]
        q: String,
    },
    /// Build a decay certificate on a grid.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        grid: String,
        /// lemma1_window, lemma2_modulus, holder_rate, sobolev_rate or
        /// optimized_window (short forms lemma1, lemma2, holder, sobolev,
        /// optimized).
        #[arg(long, default_value = "lemma2")]
        method: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value = "inf")]
        q: String,
        #[arg(long)]
        alpha: Option<f64>,
        /// Hölder constant; the certified one when omitted.
        #[arg(long)]
        c: Option<f64>,
        /// Accept sampled moduli and constants; marks the certificate unsound.
        #[arg(long)]
        allow_empirical: bool,
    },
    /// The oscillating bump train: summary, or its spec with --emit-spec.
    Counterexample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        emit_spec: bool,
        #[arg(long, default_value_t = 0.5)]
        height_exponent: f64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        width_exponent: f64,
        #[arg(long, default_value_t = 2)]
        start_index: u64,
    },
    /// sin(ln(1+t)) (1+t)^-gamma: summary, or its spec with --emit-spec.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        emit_spec: bool,
        #[arg(long, default_value_t = 0.75)]
        gamma: f64,
    },
    /// Simulate the adaptive-control example and certify e(t) -> 0.
    OdeDemo {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        e0: f64,
        #[arg(long, default_value_t = 1.0)]
        theta0: f64,
        #[arg(long = "T", default_value_t = 40.0)]
        big_t: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Input signal spec; sin t when omitted.
        #[arg(long)]
        omega: Option<PathBuf>,
        /// Certificate grid; every 0.25 when omitted.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Re-verify a certificate CSV; exits 2 on any violated row.
    Check {
        #[arg(long)]
        certificate: PathBuf,
        /// Also compare f_abs with |f(t)| from this spec.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

enum Outcome {
    Ok,
    Violation(String),
}

fn load_spec(path: &Path) -> Result<FunctionSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    FunctionSpec::from_json_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, h] = parts[..] else {
        bail!("grid must look like start:stop:step, got {text:?}");
    };
    let num = |s: &str, name: &str| -> Result<f64> {
        s.trim().parse::<f64>().with_context(|| format!("grid {name} {s:?} is not a number"))
    };
    let (a, b, h) = (num(a, "start")?, num(b, "stop")?, num(h, "step")?);
    if !(a >= 0.0 && a < b && b.is_finite() && h > 0.0) {
        bail!("grid needs 0 <= start < stop and step > 0, got {text:?}");
    }
    let n = ((b - a) / h * (1.0 + 1e-12)).floor() as usize;
    if n > 10_000_000 {
        bail!("grid has too many points ({n})");
    }
    Ok((0..=n).map(|i| a + i as f64 * h).collect())
}

fn parse_method(s: &str) -> Result<CertificateMethod> {
    Ok(match s {
        "lemma1" => CertificateMethod::Lemma1Window,
        "lemma2" => CertificateMethod::Lemma2Modulus,
        "holder" => CertificateMethod::HolderRate,
        "sobolev" => CertificateMethod::SobolevRate,
        "optimized" => CertificateMethod::OptimizedWindow,
        other => other.parse()?,
    })
}

fn q_arg(s: &str) -> Result<f64> {
    parse_q(s).map_err(anyhow::Error::msg)
}

fn structured_only(format: Option<Format>) -> Result<()> {
    match format {
        None | Some(Format::Structured) => Ok(()),
        Some(f) => bail!("this command only writes structured output, not {f:?}"),
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Eval { common, grid } => {
            let spec = common.spec()?;
            let ts = parse_grid(&grid)?;
            let rows = ts
                .iter()
                .map(|&t| {
                    let d = derivative(&spec, t)?.unwrap_or(f64::NAN);
                    Ok(vec![t, evaluate(&spec, t)?, d])
                })
                .collect::<barbalat_core::Result<Vec<_>>>()?;
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => output::csv("t,f,fprime", rows),
                Format::Structured => output::json(&rows.iter().map(|r| json!({"t": r[0], "f": r[1], "fprime": r[2]})).collect::<Vec<_>>()),
                Format::Svg => {
                    let f: Vec<f64> = rows.iter().map(|r| r[1]).collect();
                    let d: Vec<f64> = rows.iter().map(|r| r[2]).collect();
                    output::svg_plot("f and f'", &ts, &[("f", "#1f77b4", &f), ("f'", "#ff7f0e", &d)])
                }
            };
            output::emit(common.out.as_deref(), &text)?;
        }
        Command::Integrate { common, a, b } => {
            structured_only(common.format)?;
            common.check_tol()?;
            let spec = common.spec()?;
            let doc = if q_arg(&b).is_ok_and(f64::is_infinite) {
                let r = improper_integral(&spec, a, common.tol, common.policy()?)?;
                json!({"a": a, "b": "inf", "result": r})
            } else {
                let b: f64 = b.parse().with_context(|| format!("--b {b:?} is not a number"))?;
                json!({"a": a, "b": b, "value": integrate(&spec, a, b, common.tol)?})
            };
            output::emit(common.out.as_deref(), &output::json(&doc))?;
        }
        Command::Tails { common, grid } => {
            common.check_tol()?;
            let spec = common.spec()?;
            let ts = parse_grid(&grid)?;
            let tails = tail_supremum_grid(&spec, &ts, common.tol, common.policy()?)?;
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => output::csv(
                    "t,s_value,remainder_bound,horizon",
                    tails.iter().map(|r| vec![r.t, r.value, r.remainder_bound, r.horizon]),
                ),
                Format::Structured => output::json(&tails),
                Format::Svg => {
                    let s: Vec<f64> = tails.iter().map(|r| r.upper()).collect();
                    output::svg_plot("tail supremum", &ts, &[("S(t)", "#2ca02c", &s)])
                }
            };
            output::emit(common.out.as_deref(), &text)?;
        }
        Command::Norms { common, p, q } => {
            structured_only(common.format)?;
            common.check_tol()?;
            let spec = common.spec()?;
            let report = sobolev_report(&spec, p, q_arg(&q)?, common.tol)?;
            output::emit(common.out.as_deref(), &output::json(&report))?;
        }
        Command::Certify {
            common,
            grid,
            method,
            p,
            q,
            alpha,
            c,
            allow_empirical,
        } => {
            common.check_tol()?;
            let spec = common.spec()?;
            let ts = parse_grid(&grid)?;
            let opts = CertificateOptions {
                tol: common.tol,
                policy: common.policy()?,
                allow_empirical,
            };
            let cert = match parse_method(&method)? {
                CertificateMethod::Lemma1Window => lemma1_window_certificate(&spec, &ts, &opts)?,
                CertificateMethod::Lemma2Modulus => {
                    let modulus = match certified_modulus(&spec) {
                        Ok(m) => m,
                        Err(_) if allow_empirical => {
                            let deltas: Vec<f64> = (0..=100).map(|k| 1e-6 * 10f64.powf(k as f64 / 10.0)).collect();
                            sampled_global_modulus(&spec, &deltas, ts[ts.len() - 1] + 100.0, 4096)?
                        }
                        Err(e) => return Err(e.into()),
                    };
                    lemma2_certificate(&spec, &modulus, &ts, &opts)?
                }
                CertificateMethod::HolderRate => {
                    let alpha = alpha.unwrap_or(1.0);
                    let c = match c {
                        Some(c) => c,
                        None => {
                            let fit = fit_holder(&spec, alpha, (0.0, f64::INFINITY), 256, 7)?;
                            if !fit.c.is_finite() {
                                bail!("f is not {alpha}-Hölder on [0, inf); pass --alpha or --c");
                            }
                            fit.c
                        }
                    };
                    holder_certificate(&spec, c, alpha, &ts, &opts)?
                }
                CertificateMethod::SobolevRate => sobolev_certificate(&spec, p, q_arg(&q)?, &ts, &opts)?,
                CertificateMethod::OptimizedWindow => {
                    let search = WindowSearch {
                        alpha,
                        ..WindowSearch::default()
                    };
                    optimized_window_certificate(&spec, &ts, &search, &opts)?
                }
            };
            let text = output::certificate(&cert, common.format.unwrap_or(Format::Csv));
            output::emit(common.out.as_deref(), &text)?;
            return Ok(violations(cert.violations().map(|r| r.t)));
        }
        Command::Counterexample {
            common,
            emit_spec,
            height_exponent,
            width_exponent,
            start_index,
        } => {
            structured_only(common.format)?;
            let params = CounterexampleParams {
                height_exponent,
                width_exponent,
                start_index,
            };
            let spec = FunctionSpec::counterexample(params)?;
            let text = if emit_spec {
                let mut s = spec.to_json_string();
                s.push('\n');
                s
            } else {
                let improper = improper_integral(&spec, 0.0, common.tol, common.policy()?)?;
                let l2 = [128u64, 1024].map(|n| counterexample_partial_power(&params, n, 2.0));
                let sup_derivative: Vec<_> = [0.0, 10.0, 100.0]
                    .iter()
                    .map(|&a| Ok(json!({"a": a, "norm": lq_norm_derivative_on(&spec, f64::INFINITY, a, common.tol)?})))
                    .collect::<barbalat_core::Result<_>>()?;
                output::json(&json!({
                    "params": params,
                    "improper_integral": improper,
                    "l2_partial": {"n128": l2[0], "n1024": l2[1], "ratio": l2[1] / l2[0]},
                    "lp_norm_p2": lp_norm(&spec, 2.0, common.tol, common.policy()?)?,
                    "derivative_sup": sup_derivative,
                }))
            };
            output::emit(common.out.as_deref(), &text)?;
        }
        Command::Witness {
            common,
            emit_spec,
            gamma,
        } => {
            structured_only(common.format)?;
            let spec = make_incomparability_witness(gamma)?;
            let text = if emit_spec {
                let mut s = spec.to_json_string();
                s.push('\n');
                s
            } else {
                output::json(&json!({
                    "gamma": gamma,
                    "lp_norm_p2": lp_norm(&spec, 2.0, common.tol, common.policy()?)?,
                    "lp_norm_p1": lp_norm(&spec, 1.0, common.tol, common.policy()?)?,
                    "derivative_sup": lq_norm_derivative(&spec, f64::INFINITY, common.tol)?,
                    "improper_integral": improper_integral(&spec, 0.0, common.tol, common.policy()?)?,
                }))
            };
            output::emit(common.out.as_deref(), &text)?;
        }
        Command::OdeDemo {
            common,
            e0,
            theta0,
            big_t,
            step,
            omega,
            grid,
        } => {
            let omega = match omega {
                Some(p) => load_spec(&p)?,
                None => FunctionSpec::closed_form(Expr::t().sin()),
            };
            let traj = simulate(e0, theta0, &omega, big_t, step)?;
            let ts = match grid {
                Some(g) => parse_grid(&g)?,
                None => default_grid(&traj),
            };
            let lyapunov = lyapunov_check(&traj, 1e-9);
            let cert = match certify_error_decay(&traj, &ts) {
                Ok(c) => c,
                Err(Error::LyapunovViolation(msg)) => {
                    return Ok(Outcome::Violation(format!("Lyapunov check failed: {msg}")))
                }
                Err(e) => return Err(e.into()),
            };
            let text = match common.format.unwrap_or(Format::Csv) {
                Format::Csv => traj.to_csv(),
                Format::Structured => output::json(&json!({
                    "e0": e0,
                    "theta0": theta0,
                    "T": traj.end_time(),
                    "step": step,
                    "lyapunov": lyapunov,
                    "decay": cert,
                })),
                Format::Svg => output::certificate_svg(&cert.certificate),
            };
            output::emit(common.out.as_deref(), &text)?;
            return Ok(violations(cert.certificate.violations().map(|r| r.t)));
        }
        Command::Check { certificate, spec } => {
            let text = std::fs::read_to_string(&certificate)
                .with_context(|| format!("reading {}", certificate.display()))?;
            let rows = output::parse_certificate_csv(&text).with_context(|| format!("parsing {}", certificate.display()))?;
            let spec = spec.as_deref().map(load_spec).transpose()?;
            let mut bad = Vec::new();
            for r in &rows {
                if r.bound < 0.0 || !le_tol(r.f_abs, r.bound) || !r.satisfied {
                    bad.push(r.t);
                } else if let Some(spec) = &spec {
                    let f = evaluate(spec, r.t)?.abs();
                    if !((f - r.f_abs).abs() <= 1e-9 * f.max(r.f_abs) + 1e-12) || !le_tol(f, r.bound) {
                        bad.push(r.t);
                    }
                }
            }
            println!("rows: {}, violations: {}", rows.len(), bad.len());
            return Ok(violations(bad.into_iter()));
        }
    }
    Ok(Outcome::Ok)
}

fn violations(ts: impl Iterator<Item = f64>) -> Outcome {
    let ts: Vec<f64> = ts.collect();
    if ts.is_empty() {
        Outcome::Ok
    } else {
        let shown: Vec<String> = ts.iter().take(5).map(|t| t.to_string()).collect();
        Outcome::Violation(format!(
            "{} row(s) violate the bound, first at t = {}",
            ts.len(),
            shown.join(", ")
        ))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
