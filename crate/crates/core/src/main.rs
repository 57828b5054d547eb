//! Command-line front end: expansion coefficients, error curves, rate
//! tables, best-approximation comparisons, and the full verification run,
//! all emitted as CSV.

use clap::{Args, Parser, Subcommand};
use phi_spectral::best_approx::remez;
use phi_spectral::expansion::{
    default_grid, expansion_coeffs, sup_error_all_n, CoefficientTable, ErrorFlavor,
};
use phi_spectral::jacobi::{pointwise_bound, JacobiParams};
use phi_spectral::phi::{PhiFunction, PhiKind, SmoothFn};
use phi_spectral::rates::{
    claim_suite, default_xi_grid, fit_rate, no_log_ratio, report_csv, run_claims,
    sweep_expected_slope, xi_sweep, RateClaim, SweepAnchor,
};
use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "phi-spectral",
    about = "Jacobi expansions of algebraically singular functions: \
             coefficients, truncation errors, and convergence-rate checks"
)]
struct Cli {
    /// Flat key=value config file; command-line flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Expansion coefficients a_k for k <= nmax, as `k,coeff` CSV.
    Coeffs(Common),
    /// Pointwise error curve at fixed n: `x,error,best_error,bound` CSV.
    ErrorCurve(Common),
    /// Run the convergence-rate claim table (optionally filtered).
    RateTable(Common),
    /// Truncation vs best uniform approximation across degrees.
    RemezCompare(Common),
    /// Fixed-degree error growth toward the singularity and endpoints.
    XiSweep(Common),
    /// The full verification run: claims, sweeps, and sharpness checks.
    Verify(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Singularity kind: step | plus | minus | abs | boundary-right | boundary-left.
    #[arg(long)]
    kind: Option<String>,
    /// Interior singular point.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Singularity exponent.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Smooth factor: one | exp | cos | poly:c0,c1,...
    #[arg(long)]
    z: Option<String>,
    /// Jacobi weight exponent at x = 1.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Jacobi weight exponent at x = -1.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Fixed truncation degree.
    #[arg(long)]
    n: Option<usize>,
    /// Largest degree.
    #[arg(long)]
    nmax: Option<usize>,
    /// Degree range lo:hi.
    #[arg(long)]
    nrange: Option<String>,
    /// Number of grid points for curves.
    #[arg(long)]
    grid: Option<usize>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Figure preset selecting a claim subset.
    #[arg(long)]
    figure: Option<String>,
    /// Substring filter on claim ids.
    #[arg(long)]
    claim: Option<String>,
}

fn merge_config(c: &mut Common, path: &PathBuf) -> Result<(), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut kv = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not key=value: {line}", i + 1))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let parse_f64 = |v: &str, k: &str| {
        v.parse::<f64>().map_err(|_| format!("config key {k}: bad number {v}"))
    };
    let parse_usize = |v: &str, k: &str| {
        v.parse::<usize>().map_err(|_| format!("config key {k}: bad count {v}"))
    };
    for (k, v) in kv {
        match k.as_str() {
            "kind" => {
                c.kind.get_or_insert(v);
            }
            "a" => {
                c.a.get_or_insert(parse_f64(&v, &k)?);
            }
            "lambda" => {
                c.lambda.get_or_insert(parse_f64(&v, &k)?);
            }
            "z" => {
                c.z.get_or_insert(v);
            }
            "alpha" => {
                c.alpha.get_or_insert(parse_f64(&v, &k)?);
            }
            "beta" => {
                c.beta.get_or_insert(parse_f64(&v, &k)?);
            }
            "n" => {
                c.n.get_or_insert(parse_usize(&v, &k)?);
            }
            "nmax" => {
                c.nmax.get_or_insert(parse_usize(&v, &k)?);
            }
            "nrange" => {
                c.nrange.get_or_insert(v);
            }
            "grid" => {
                c.grid.get_or_insert(parse_usize(&v, &k)?);
            }
            "out" => {
                c.out.get_or_insert(PathBuf::from(v));
            }
            "figure" => {
                c.figure.get_or_insert(v);
            }
            "claim" => {
                c.claim.get_or_insert(v);
            }
            other => return Err(format!("unknown config key {other}")),
        }
    }
    Ok(())
}

fn parse_z(spec: &str) -> Result<SmoothFn, String> {
    match spec {
        "one" => Ok(SmoothFn::One),
        "exp" => Ok(SmoothFn::Exp),
        "cos" => Ok(SmoothFn::Cos),
        s if s.starts_with("poly:") => {
            let coeffs: Result<Vec<f64>, _> =
                s["poly:".len()..].split(',').map(str::parse::<f64>).collect();
            coeffs.map(SmoothFn::Poly).map_err(|e| format!("bad poly coefficients: {e}"))
        }
        other => Err(format!("unknown smooth factor {other} (one|exp|cos|poly:c0,c1,...)")),
    }
}

fn parse_kind(spec: &str) -> Result<PhiKind, String> {
    match spec {
        "step" => Ok(PhiKind::Step),
        "plus" => Ok(PhiKind::InteriorPlus),
        "minus" => Ok(PhiKind::InteriorMinus),
        "abs" => Ok(PhiKind::InteriorAbs),
        "boundary-right" => Ok(PhiKind::BoundaryRight),
        "boundary-left" => Ok(PhiKind::BoundaryLeft),
        other => Err(format!(
            "unknown kind {other} (step|plus|minus|abs|boundary-right|boundary-left)"
        )),
    }
}

fn parse_nrange(spec: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = spec.split_once(':').ok_or_else(|| format!("nrange must be lo:hi, got {spec}"))?;
    let lo = lo.parse().map_err(|_| format!("bad nrange low end {lo}"))?;
    let hi = hi.parse().map_err(|_| format!("bad nrange high end {hi}"))?;
    if lo == 0 || hi <= lo {
        return Err(format!("nrange must satisfy 0 < lo < hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

struct Problem {
    f: PhiFunction,
    params: JacobiParams,
}

fn build_problem(c: &Common) -> Result<Problem, String> {
    let kind = parse_kind(c.kind.as_deref().unwrap_or("abs"))?;
    let default_lambda = match kind {
        PhiKind::Step => 0.0,
        _ => 1.0,
    };
    let f = PhiFunction::new(
        kind,
        c.a.unwrap_or(0.25),
        c.lambda.unwrap_or(default_lambda),
        parse_z(c.z.as_deref().unwrap_or("one"))?,
    )
    .map_err(|e| e.to_string())?;
    let params = JacobiParams::new(c.alpha.unwrap_or(0.0), c.beta.unwrap_or(0.0))
        .map_err(|e| e.to_string())?;
    Ok(Problem { f, params })
}

fn emit(c: &Common, csv: String) -> Result<(), String> {
    match &c.out {
        Some(p) => std::fs::write(p, csv).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Exit codes: 0 ok, 1 claim failures, 2 config error, 3 numerical failure.
enum Failure {
    Claims,
    Config(String),
    Numerical(String),
}

fn num_err(e: phi_spectral::Error) -> Failure {
    Failure::Numerical(e.to_string())
}

fn cmd_coeffs(c: &Common) -> Result<(), Failure> {
    let p = build_problem(c).map_err(Failure::Config)?;
    let nmax = c.nmax.unwrap_or(64);
    let table = expansion_coeffs(&p.f, p.params, nmax).map_err(num_err)?;
    emit(c, table.to_csv()).map_err(Failure::Config)
}

fn cmd_error_curve(c: &Common) -> Result<(), Failure> {
    let p = build_problem(c).map_err(Failure::Config)?;
    let n = c.n.unwrap_or(100);
    let m = c.grid.unwrap_or(1001).max(1000);
    let table = expansion_coeffs(&p.f, p.params, n).map_err(num_err)?;
    let f = &p.f;
    let best = remez(
        &|x| f.eval(x).unwrap_or(f64::INFINITY),
        n,
        &[f.singular_point(), -1.0, 1.0],
    )
    .map_err(num_err)?;
    let mut csv = String::from("x,error,best_error,bound\n");
    for i in 0..m {
        // Chebyshev-distributed abscissas resolve the endpoint behavior.
        let x = -(std::f64::consts::PI * i as f64 / (m - 1) as f64).cos();
        let e = (f.eval(x).map_err(num_err)? - table.truncated_eval(n, x).map_err(num_err)?).abs();
        let eb = (f.eval(x).map_err(num_err)? - best.eval(x)).abs();
        let bound = pointwise_bound(p.params, n, x);
        csv.push_str(&format!("{x:.16e},{e:.16e},{eb:.16e},{bound:.16e}\n"));
    }
    emit(c, csv).map_err(Failure::Config)
}

fn figure_filter(figure: &str) -> Result<&'static str, String> {
    // Presets naming the experiment families; each selects claims by id.
    Ok(match figure {
        "interior" | "1.4" => "interior-",
        "endpoint" | "1.5" => "endpoint-",
        "weighted" | "1.3" | "5.1" => "weighted-",
        "maxnorm" | "1.6" => "maxnorm-",
        "boundary" | "6.1" => "boundary-",
        "quotient" | "3.1" => "quotient-",
        "step" => "step-",
        other => return Err(format!("unknown figure preset {other}")),
    })
}

fn selected_claims(c: &Common) -> Result<Vec<RateClaim>, String> {
    let mut claims = claim_suite();
    if let Some(fig) = &c.figure {
        let pat = figure_filter(fig)?;
        claims.retain(|cl| cl.id.contains(pat));
    }
    if let Some(pat) = &c.claim {
        claims.retain(|cl| cl.id.contains(pat.as_str()));
    }
    if claims.is_empty() {
        return Err("no claims match the given filters".into());
    }
    Ok(claims)
}

fn cmd_rate_table(c: &Common) -> Result<(), Failure> {
    let claims = selected_claims(c).map_err(Failure::Config)?;
    let reports = run_claims(&claims);
    emit(c, report_csv(&reports)).map_err(Failure::Config)?;
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Claims)
    }
}

fn cmd_remez_compare(c: &Common) -> Result<(), Failure> {
    let p = build_problem(c).map_err(Failure::Config)?;
    let (lo, hi) = match &c.nrange {
        Some(s) => parse_nrange(s).map_err(Failure::Config)?,
        None => (20, 160),
    };
    if hi > 200 {
        return Err(Failure::Config("best approximation is limited to degrees <= 200".into()));
    }
    let f = &p.f;
    let table = expansion_coeffs(f, p.params, hi).map_err(num_err)?;
    let grid = default_grid(f.singular_point());
    let sup_raw = sup_error_all_n(f, &table, &grid, ErrorFlavor::Raw).map_err(num_err)?;
    let sup_hat = sup_error_all_n(f, &table, &grid, ErrorFlavor::WeightedHat).map_err(num_err)?;
    let mut ns = Vec::new();
    let mut n = lo;
    while n <= hi {
        ns.push(n);
        n *= 2;
    }
    let mut csv = String::from("n,maxerr_trunc,maxerr_best,maxerr_hat\n");
    let mut best_errs = Vec::new();
    for &n in &ns {
        let best = remez(
            &|x| f.eval(x).unwrap_or(f64::INFINITY),
            n,
            &[f.singular_point(), -1.0, 1.0],
        )
        .map_err(num_err)?;
        best_errs.push(best.minimax_error);
        csv.push_str(&format!(
            "{n},{:.16e},{:.16e},{:.16e}\n",
            sup_raw[n], best.minimax_error, sup_hat[n]
        ));
    }
    // Footer: fitted slopes of each column over the requested degrees.
    let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    for (name, vals) in [
        ("slope_trunc", ns.iter().map(|&n| sup_raw[n]).collect::<Vec<_>>()),
        ("slope_best", best_errs.clone()),
        ("slope_hat", ns.iter().map(|&n| sup_hat[n]).collect::<Vec<_>>()),
    ] {
        match fit_rate(&nf, &vals, false) {
            Ok(fit) => csv.push_str(&format!("{name},{:.16e},,\n", fit.slope)),
            Err(_) => csv.push_str(&format!("{name},nan,,\n")),
        }
    }
    emit(c, csv).map_err(Failure::Config)
}

fn sweep_rows(
    f: &PhiFunction,
    params: JacobiParams,
    table: &CoefficientTable,
    n: usize,
) -> Result<(String, bool), Failure> {
    let mut csv = String::from("anchor,expected_slope,measured_slope,pass\n");
    let mut all_ok = true;
    let anchors: Vec<(&str, SweepAnchor)> = if f.kind().is_interior() {
        vec![
            ("singular_above", SweepAnchor::SingularAbove),
            ("right_end", SweepAnchor::RightEnd),
            ("left_end", SweepAnchor::LeftEnd),
        ]
    } else {
        vec![("right_end", SweepAnchor::RightEnd), ("left_end", SweepAnchor::LeftEnd)]
    };
    for (name, anchor) in anchors {
        let expected = sweep_expected_slope(params, anchor);
        let fit = xi_sweep(f, table, n, anchor, &default_xi_grid()).map_err(num_err)?;
        let pass = (fit.slope - expected).abs() <= 0.15;
        all_ok &= pass;
        csv.push_str(&format!("{name},{expected:.16e},{:.16e},{pass}\n", fit.slope));
    }
    Ok((csv, all_ok))
}

fn cmd_xi_sweep(c: &Common) -> Result<(), Failure> {
    let p = build_problem(c).map_err(Failure::Config)?;
    let n = c.n.unwrap_or(2000);
    if n < 1000 {
        return Err(Failure::Config("the sweep needs n >= 1000 to resolve the envelope".into()));
    }
    let table = expansion_coeffs(&p.f, p.params, n).map_err(num_err)?;
    let (csv, all_ok) = sweep_rows(&p.f, p.params, &table, n)?;
    emit(c, csv).map_err(Failure::Config)?;
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Claims)
    }
}

fn cmd_verify(c: &Common) -> Result<(), Failure> {
    let mut failures = 0usize;
    let mut lines = Vec::new();

    // Rate claims.
    let claims = selected_claims(c).map_err(Failure::Config)?;
    let reports = run_claims(&claims);
    for r in &reports {
        if !r.pass {
            failures += 1;
        }
        lines.push(format!(
            "claim {:<32} expected {:+.3} measured {:+.3} {}",
            r.id,
            r.expected_slope,
            r.measured_slope,
            if r.pass { "pass" } else { "FAIL" }
        ));
    }
    let filtered = c.figure.is_some() || c.claim.is_some();

    if !filtered {
        // Fixed-degree sweeps at the standard setup.
        let sweep_params = JacobiParams::new(0.5, 0.4).map_err(num_err)?;
        let sweep_f = PhiFunction::new(PhiKind::InteriorPlus, 0.1, 0.5, SmoothFn::One)
            .map_err(num_err)?;
        let sweep_table = expansion_coeffs(&sweep_f, sweep_params, 2000).map_err(num_err)?;
        let (csv, ok) = sweep_rows(&sweep_f, sweep_params, &sweep_table, 2000)?;
        if !ok {
            failures += 1;
        }
        for row in csv.lines().skip(1) {
            lines.push(format!("sweep {row}"));
        }

        // Log-free sharpness of the interior rate.
        let leg = JacobiParams::new(0.0, 0.0).map_err(num_err)?;
        let f = PhiFunction::new(PhiKind::InteriorPlus, 0.25, 0.5, SmoothFn::One)
            .map_err(num_err)?;
        let t = expansion_coeffs(&f, leg, 4096).map_err(num_err)?;
        let errs =
            phi_spectral::expansion::pointwise_error_all_n(&f, &t, 0.5).map_err(num_err)?;
        let ratio = no_log_ratio(&errs, 0.5, 256, 4096);
        let ok = ratio <= 1.5;
        if !ok {
            failures += 1;
        }
        lines.push(format!(
            "no-log ratio of e(n) n^(lambda+1) over [256,4096]: {ratio:.3} {}",
            if ok { "pass" } else { "FAIL" }
        ));
    }

    let mut out = lines.join("\n");
    out.push('\n');
    match &c.out {
        Some(path) => {
            std::fs::write(path, report_csv(&reports))
                .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
            print!("{out}");
        }
        None => print!("{out}"),
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(Failure::Claims)
    }
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("PHI_SPECTRAL_THREADS") {
        match v.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("config error: PHI_SPECTRAL_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let run = |mut c: Common, f: fn(&Common) -> Result<(), Failure>| {
        if let Some(path) = &cli.config {
            if let Err(e) = merge_config(&mut c, path) {
                return Err(Failure::Config(e));
            }
        }
        f(&c)
    };
    let outcome = match &cli.cmd {
        Cmd::Coeffs(c) => run(c.clone(), cmd_coeffs),
        Cmd::ErrorCurve(c) => run(c.clone(), cmd_error_curve),
        Cmd::RateTable(c) => run(c.clone(), cmd_rate_table),
        Cmd::RemezCompare(c) => run(c.clone(), cmd_remez_compare),
        Cmd::XiSweep(c) => run(c.clone(), cmd_xi_sweep),
        Cmd::Verify(c) => run(c.clone(), cmd_verify),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Claims) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
