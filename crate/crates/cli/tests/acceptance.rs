//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::Path;
use std::process::Command;

use barbalat_core::certificates::{
    holder_certificate, lemma2_certificate, optimized_window_certificate, sobolev_certificate, sobolev_exponent,
    CertificateOptions, DecayCertificate, WindowSearch,
};
use barbalat_core::modulus::{certified_modulus, counterexample_holder_constant, lipschitz_constant, ModulusEstimate};
use barbalat_core::norms::{
    counterexample_partial_power, embedding_r, holder_exponent, lp_norm, lp_tail_power, lq_norm_derivative,
    lq_norm_derivative_on, sobolev_report,
};
use barbalat_core::numeric::{le_tol, CompensatedSum};
use barbalat_core::ode_demo::{certify_error_decay, error_energy_spec, lyapunov_check, simulate, Trajectory};
use barbalat_core::tail_integral::{
    improper_integral, integrate, tail_supremum, tail_supremum_oracle, HorizonPolicy, IntegralStatus,
};
use barbalat_core::{evaluate, make_incomparability_witness, CounterexampleParams, Expr, FunctionSpec};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn sin_input() -> FunctionSpec {
    FunctionSpec::closed_form(Expr::t().sin())
}

fn ode(big_t: f64, step: f64) -> Result<Trajectory, String> {
    ok(simulate(1.0, 1.0, &sin_input(), big_t, step))
}

fn ode_f(big_t: f64) -> Result<FunctionSpec, String> {
    let tr = ode(big_t, 1e-3)?;
    ok(error_energy_spec(&tr, 0.0))
}

fn grid(a: f64, b: f64, h: f64) -> Vec<f64> {
    let n = ((b - a) / h).round() as usize;
    (0..=n).map(|i| a + i as f64 * h).collect()
}

fn series(big_n: u64) -> f64 {
    let c = 2f64.sqrt() / 3.0;
    (2..=big_n)
        .map(|n| if n % 2 == 0 { c } else { -c } / (n as f64).sqrt())
        .collect::<CompensatedSum>()
        .value()
}

fn all_rows_hold(label: &str, c: &DecayCertificate) -> Result<(), String> {
    for r in &c.grid {
        ensure!(
            r.satisfied && r.f_abs <= r.bound * (1.0 + 1e-9) + 1e-12,
            "{label}: t = {} has |f| = {} > bound {}",
            r.t,
            r.f_abs,
            r.bound
        );
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let spec = FunctionSpec::counterexample_default();
    for n in [10u64, 100, 1000] {
        let v = ok(integrate(&spec, 0.0, (n + 1) as f64, 1e-12))?;
        let want = series(n);
        ensure!((v - want).abs() < 1e-12, "N = {n}: {v} vs {want}");
        let imp = ok(improper_integral(&spec, 0.0, 1e-9, HorizonPolicy::Fixed((n + 1) as f64)))?;
        ensure!(imp.status == IntegralStatus::Converged, "N = {n}: status {:?}", imp.status);
        let cap = 2f64.sqrt() / 3.0 / (n as f64).sqrt();
        ensure!(imp.remainder_bound <= cap, "N = {n}: remainder {} > {cap}", imp.remainder_bound);
    }
    Ok("partial sums match to 1e-12; remainders within (sqrt2/3) N^-1/2".into())
}

fn criterion_2() -> Outcome {
    let p = CounterexampleParams::default();
    // int |f_n|^2 = 2 m^2 / 2 = m^2 with m = n^{-1/3} / 2
    let oracle = |big_n: u64| -> f64 { (2..=big_n).map(|n| 0.25 * (n as f64).powf(-2.0 / 3.0)).sum() };
    let (a, b) = (oracle(128), oracle(1024));
    let (la, lb) = (counterexample_partial_power(&p, 128, 2.0), counterexample_partial_power(&p, 1024, 2.0));
    ensure!((la - a).abs() < 1e-12 * a && (lb - b).abs() < 1e-12 * b, "partials {la}, {lb} vs {a}, {b}");
    let ratio = lb / la;
    ensure!(ratio >= 1.8, "L2 growth ratio {ratio} < 1.8");
    let spec = FunctionSpec::counterexample_default();
    for a in [0.0, 10.0, 100.0] {
        let d = ok(lq_norm_derivative_on(&spec, f64::INFINITY, a, 1e-9))?;
        ensure!(d.is_divergent(), "||f'||_inf on ({a}, inf) reported {d:?}");
    }
    Ok(format!("L2 partial ratio {ratio:.4}; ||f'||_inf divergent for a in {{0, 10, 100}}"))
}

struct Family {
    name: &'static str,
    spec: FunctionSpec,
    holder: Option<(f64, f64)>,
    sobolev: Option<(f64, f64)>,
}

fn lipschitz_family(name: &'static str, spec: FunctionSpec, sobolev: Option<(f64, f64)>) -> Result<Family, String> {
    let l = lipschitz_constant(&spec).ok_or_else(|| format!("{name}: no Lipschitz constant"))?;
    Ok(Family {
        name,
        spec,
        holder: Some((l, 1.0)),
        sobolev,
    })
}

fn families() -> Result<Vec<Family>, String> {
    let cx = FunctionSpec::counterexample_default();
    let p = CounterexampleParams::default();
    Ok(vec![
        lipschitz_family("zero", FunctionSpec::zero(), Some((2.0, f64::INFINITY)))?,
        lipschitz_family("exp", support::exp_neg(), Some((2.0, f64::INFINITY)))?,
        lipschitz_family("damped_sine", support::damped_sine(), Some((2.0, f64::INFINITY)))?,
        Family {
            name: "counterexample",
            spec: cx,
            holder: Some((counterexample_holder_constant(&p), 0.5)),
            sobolev: None,
        },
        lipschitz_family("ode_f", ode_f(40.0)?, Some((1.0, f64::INFINITY)))?,
    ])
}

fn certify_all(f: &Family, ts: &[f64], search: &WindowSearch) -> Result<usize, String> {
    let opts = CertificateOptions::default();
    let mut n = 0;
    let m = ok(certified_modulus(&f.spec))?;
    all_rows_hold(&format!("{} lemma2", f.name), &ok(lemma2_certificate(&f.spec, &m, ts, &opts))?)?;
    n += 1;
    if let Some((c, alpha)) = f.holder {
        all_rows_hold(&format!("{} holder", f.name), &ok(holder_certificate(&f.spec, c, alpha, ts, &opts))?)?;
        n += 1;
    }
    if let Some((p, q)) = f.sobolev {
        all_rows_hold(&format!("{} sobolev", f.name), &ok(sobolev_certificate(&f.spec, p, q, ts, &opts))?)?;
        n += 1;
    }
    all_rows_hold(
        &format!("{} optimized", f.name),
        &ok(optimized_window_certificate(&f.spec, ts, search, &opts))?,
    )?;
    Ok(n + 1)
}

fn criterion_3() -> Outcome {
    let ts = grid(0.0, 40.0, 0.25);
    let mut certs = 0;
    for f in families()? {
        certs += certify_all(&f, &ts, &WindowSearch::default())?;
    }
    let mut runner = TestRunner::deterministic();
    let strategy = support::terms();
    for i in 0..200 {
        let terms = strategy.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        let f = lipschitz_family("random", support::spec_of(&terms), Some((2.0, f64::INFINITY)))?;
        certs += certify_all(&f, &ts, &WindowSearch::default()).map_err(|e| format!("spec #{i} {terms:?}: {e}"))?;
    }
    Ok(format!("{certs} certificates on 0:40:0.25, all rows satisfied"))
}

fn criterion_4() -> Outcome {
    for q in [1.5, 2.0, 3.0, 10.0, f64::INFINITY] {
        let alpha = holder_exponent(q);
        let lhs = alpha / (1.0 + alpha);
        let rhs = sobolev_exponent(q);
        ensure!((lhs - rhs).abs() <= 1e-15, "q = {q}: {lhs} vs {rhs}");
        if q.is_finite() {
            ensure!((alpha - (q - 1.0) / q).abs() <= 1e-15, "q = {q}: alpha = {alpha}");
        }
        // by evaluation: the Hölder-rate bound on e^{-t} scales as S^{lhs}
        let c = ok(holder_certificate(&support::exp_neg(), 1.0, alpha, &[3.0], &CertificateOptions {
            allow_empirical: true,
            ..CertificateOptions::default()
        }))?;
        let row = &c.grid[0];
        let want = 2.0 * row.s_value.powf(rhs);
        ensure!((row.bound - want).abs() <= 1e-12 * want, "q = {q}: bound {} vs {want}", row.bound);
    }
    ensure!(sobolev_exponent(f64::INFINITY) == 0.5, "q = inf exponent is not exactly 1/2");
    let a = holder_exponent(f64::INFINITY);
    ensure!(a / (1.0 + a) == 0.5, "alpha/(1+alpha) at q = inf is not exactly 1/2");
    Ok("alpha/(1+alpha) = (q-1)/(2q-1) for q in {1.5, 2, 3, 10, inf}".into())
}

fn criterion_5() -> Outcome {
    let ts = [0.0, 1.0, 5.0, 10.0];
    let mut worst: f64 = 0.0;
    for f in families()? {
        for &t in &ts {
            let s = ok(tail_supremum(&f.spec, t, 1e-10, HorizonPolicy::default()))?;
            let o = ok(tail_supremum_oracle(&f.spec, t, 1e-4, 40.0))?;
            let gap = (s.value - o).abs();
            ensure!(gap < 1e-3, "{} at t = {t}: {} vs oracle {o}", f.name, s.value);
            worst = worst.max(gap);
        }
    }
    let opts = CertificateOptions::default();
    let g = grid(0.0, 40.0, 0.25);
    for f in families()?.into_iter().filter(|f| matches!(f.holder, Some((_, a)) if a == 1.0)) {
        let (l, _) = f.holder.expect("filtered");
        let a = ok(lemma2_certificate(&f.spec, &ModulusEstimate::lipschitz(l, true), &g, &opts))?;
        let b = ok(holder_certificate(&f.spec, l, 1.0, &g, &opts))?;
        for (x, y) in a.grid.iter().zip(&b.grid) {
            ensure!(
                (x.bound - y.bound).abs() <= 1e-12,
                "{} at t = {}: lemma2 {} vs holder {}",
                f.name,
                x.t,
                x.bound,
                y.bound
            );
        }
    }
    Ok(format!("max |S - oracle| = {worst:.2e}; lemma2 = holder(1) row by row"))
}

fn criterion_6() -> Outcome {
    let spec = support::exp_neg();
    let rep = ok(sobolev_report(&spec, 2.0, f64::INFINITY, 1e-12))?;
    ensure!(rep.member, "e^-t reported outside W^(1,2,inf)");
    let c = rep.holder_constant.ok_or("no Hölder constant")?;
    let alpha = rep.holder_exponent;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let x: f64 = rng.gen_range(0.0..20.0);
        let y: f64 = rng.gen_range(0.0..20.0);
        let lhs = (ok(evaluate(&spec, x))? - ok(evaluate(&spec, y))?).abs();
        ensure!(lhs <= c * (x - y).abs().powf(alpha) * (1.0 + 1e-12) + 1e-15, "pair ({x}, {y})");
    }
    let bound = rep.sup_norm_bound.ok_or("no sup-norm bound")?;
    ensure!(bound >= 1.0, "sup bound {bound} below the true sup 1");
    let lp = rep.lp_norm.finite().ok_or("infinite Lp norm")?;
    let lq = rep.lq_norm_derivative.finite().ok_or("infinite Lq norm")?;
    let r = rep.r;
    ensure!(r == embedding_r(2.0, f64::INFINITY), "r = {r}");
    let recomputed = (1.0f64.powf(r + 1.0) + (r + 1.0) * lp.powf(r) * lq).powf(1.0 / (r + 1.0));
    ensure!((recomputed - bound).abs() <= 1e-12, "recomputed {recomputed} vs {bound}");
    // ||f||_2 = 2^{-1/2}, ||f'||_inf = 1, r = 2
    let closed = 2.5f64.cbrt();
    ensure!((bound - closed).abs() <= 1e-9, "bound {bound} vs 2.5^(1/3) = {closed}");
    Ok(format!("Hölder check on 1000 pairs; sup bound {bound:.12} >= 1"))
}

fn criterion_7() -> Outcome {
    let tr = ode(80.0, 1e-3)?;
    let l = lyapunov_check(&tr, 1e-9);
    ensure!(l.monotone && l.max_violation < 1e-9, "V increases by {}", l.max_violation);
    ensure!(l.dissipation_residual < 1e-5, "residual {}", l.dissipation_residual);
    let half = lyapunov_check(&ode(80.0, 5e-4)?, 1e-9);
    let ratio = l.dissipation_residual / half.dissipation_residual;
    ensure!(ratio >= 3.0, "residual improves only by {ratio} under halving");
    let e_end = tr.states.last().ok_or("empty trajectory")?.e.abs();
    ensure!(e_end < 0.05, "|e(80)| = {e_end}");
    let cert = ok(certify_error_decay(&tr, &grid(0.0, 80.0, 0.25)))?;
    ensure!(le_tol(cert.dissipated, 2.0), "dissipated {}", cert.dissipated);
    ensure!(cert.certificate.all_satisfied(), "certificate has violated rows");
    Ok(format!(
        "max V increase {:.1e}, residual {:.2e} (x{ratio:.1} on halving), |e(80)| = {e_end:.4}",
        l.max_violation, l.dissipation_residual
    ))
}

fn criterion_8() -> Outcome {
    let w = ok(make_incomparability_witness(0.75))?;
    let l2 = ok(lp_norm(&w, 2.0, 1e-9, HorizonPolicy::default()))?;
    ensure!(l2.finite().is_some(), "||f||_2 reported {l2:?}");
    for t in [0.0, 10.0, 100.0, 1000.0] {
        let tail = ok(lp_tail_power(&w, 2.0, t, 1e-9, HorizonPolicy::default()))?;
        let v = tail.finite().ok_or(format!("tail at {t} not finite"))?;
        ensure!(v <= 2.0 / (1.0 + t).sqrt(), "tail at {t}: {v}");
    }
    let d = ok(lq_norm_derivative(&w, f64::INFINITY, 1e-9))?;
    let dv = d.finite().ok_or("||f'||_inf not finite")?;
    ensure!(dv <= 2.0, "||f'||_inf = {dv}");
    let imp = ok(improper_integral(&w, 0.0, 1e-9, HorizonPolicy::default()))?;
    ensure!(imp.status == IntegralStatus::Oscillating, "status {:?}", imp.status);
    let peak = imp.evidence.iter().map(|e| e.1.abs()).fold(0.0, f64::max);
    ensure!(peak > 2.0, "cumulative integral peaks at {peak}");
    Ok(format!("||f||_2 = {:.6}, ||f'||_inf = {dv:.6}, cumulative peak {peak:.3}", l2.finite().unwrap_or(0.0)))
}

fn barbalat(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_barbalat"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code().ok_or("killed by signal")?;
    Ok((code, String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr)))
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (name, args) in [("counterexample", vec!["counterexample"]), ("witness", vec!["witness"])] {
        let file = dir.path().join(format!("{name}.json"));
        let mut full = args.clone();
        full.extend(["--emit-spec", "--out", path(&file)]);
        let (code, msg) = barbalat(&full)?;
        ensure!(code == 0, "{name} --emit-spec exited {code}: {msg}");
        let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
        let again = ok(FunctionSpec::from_json_str(&text))?.to_json_string() + "\n";
        ensure!(again == text, "{name} spec is not byte-stable");
    }
    let spec_file = dir.path().join("exp.json");
    let text = support::exp_neg().to_json_string();
    std::fs::write(&spec_file, &text).map_err(|e| e.to_string())?;
    ensure!(ok(FunctionSpec::from_json_str(&text))?.to_json_string() == text, "exp spec is not byte-stable");

    let cert = dir.path().join("cert.csv");
    let (code, msg) = barbalat(&[
        "certify", "--spec", path(&spec_file), "--grid", "0:10:0.1", "--method", "sobolev", "--format", "csv",
        "--out", path(&cert),
    ])?;
    ensure!(code == 0, "certify exited {code}: {msg}");
    let (code, msg) = barbalat(&["check", "--certificate", path(&cert), "--spec", path(&spec_file)])?;
    ensure!(code == 0, "check on a clean certificate exited {code}: {msg}");

    let csv = std::fs::read_to_string(&cert).map_err(|e| e.to_string())?;
    let mut lines: Vec<String> = csv.lines().map(str::to_owned).collect();
    let target = lines
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, l)| {
            let c: Vec<f64> = l.split(',').take(4).filter_map(|x| x.parse().ok()).collect();
            (c.len() == 4 && 0.5 * c[3] < c[1]).then_some(i)
        })
        .ok_or("no row where halving the bound breaks it")?;
    let mut cells: Vec<String> = lines[target].split(',').map(str::to_owned).collect();
    let halved: f64 = cells[3].parse::<f64>().map_err(|e| e.to_string())? * 0.5;
    cells[3] = format!("{halved:.16e}");
    lines[target] = cells.join(",");
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, lines.join("\n") + "\n").map_err(|e| e.to_string())?;
    let (code, msg) = barbalat(&["check", "--certificate", path(&bad)])?;
    ensure!(code == 2, "check on an injected violation exited {code}: {msg}");
    Ok(format!("specs byte-stable; clean check exits 0; halved bound on line {} exits 2", target + 1))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("counterexample series value", criterion_1),
        ("counterexample non-membership", criterion_2),
        ("bound domination", criterion_3),
        ("exponent identities", criterion_4),
        ("oracle equivalence", criterion_5),
        ("sup-norm embedding", criterion_6),
        ("adaptive control demo", criterion_7),
        ("incomparability witness", criterion_8),
        ("cli contract", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
