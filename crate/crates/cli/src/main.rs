mod input;
mod output;

use std::f64::consts::PI;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use mu_entropy::exp_integrals::oracle::{grid_oracle, mc_oracle};
use mu_entropy::exp_integrals::bundle;
use mu_entropy::geodesic_ray::{w_along_ray, ToricRay, DEFAULT_EPS};
use mu_entropy::na_entropy::{
    c_na, dh_measure, max_c_na, mu_futaki, na_entropy, norm_squared, top_intersection, EntropyParams,
    ToricTestConfig, VectorEntropy,
};
use mu_entropy::optimizer::{bifurcation_scan, optimal_degeneration_search, transition_point};
use mu_entropy::toric_metric::{cheb, ToricMetric, DEFAULT_NODES};
use mu_entropy::verify;
use serde_json::json;

use input::{CliError, CliResult};
use output::{Convention, Format, Report, Table};

#[derive(Parser)]
#[command(name = "mu-entropy-lab", version, about = "Toric μ-entropy computations")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "MU_LAB_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TcArgs {
    /// Polytope JSON (path or inline).
    #[arg(long)]
    polytope: String,
    /// PL function JSON `{"pieces":[{"gradient":[..],"constant":c},..]}` (path or inline).
    #[arg(long)]
    q: String,
    /// Shift q so that its maximum on the polytope is 0.
    #[arg(long)]
    normalize: bool,
}

impl TcArgs {
    fn load(&self) -> CliResult<ToricTestConfig> {
        let p = input::polytope(&self.polytope)?;
        let q = input::pl_function(&self.q, p.dim())?;
        Ok(if self.normalize { ToricTestConfig::normalized(p, q)? } else { ToricTestConfig::new(p, q)? })
    }
}

#[derive(Args)]
struct MetricArgs {
    /// Length of the moment interval.
    #[arg(long)]
    a: Option<f64>,
    /// Chebyshev perturbation `{"a":..,"coefficients":[..]}` (path or inline).
    #[arg(long)]
    perturb: Option<String>,
    /// Collocation intervals.
    #[arg(long, default_value_t = DEFAULT_NODES)]
    nodes: usize,
}

impl MetricArgs {
    fn load(&self) -> CliResult<ToricMetric> {
        let u = input::potential(self.a, self.perturb.as_deref())?;
        Ok(ToricMetric::new(&u, self.nodes)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Non-archimedean μ, σ and μ^λ of a toric test configuration.
    NaEntropy {
        #[command(flatten)]
        tc: TcArgs,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        /// Evaluate on `tau=lo:hi:step` instead of a single τ.
        #[arg(long)]
        grid: Option<String>,
    },
    /// μ-entropy of a vector field `ξ` (comma-separated components).
    Vector {
        #[arg(long)]
        polytope: String,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// μ-Futaki invariant of the direction q at `ξ`.
    Futaki {
        #[command(flatten)]
        tc: TcArgs,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// Duistermaat-Heckman measure of `-q`.
    Dh {
        #[command(flatten)]
        tc: TcArgs,
    },
    /// Squared norm of the test configuration.
    Norm2 {
        #[command(flatten)]
        tc: TcArgs,
    },
    /// Donaldson-type quadratic and its maximum over τ.
    Cna {
        #[command(flatten)]
        tc: TcArgs,
        #[arg(long, allow_negative_numbers = true)]
        mna: f64,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Maximizers of the vector μ-entropy across a λ range.
    ScanLambda {
        #[arg(long)]
        polytope: String,
        #[arg(long, default_value_t = -40.0, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 160)]
        steps: usize,
        #[arg(long, default_value_t = 4)]
        multistart: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search over PL test configurations for the largest NA μ-entropy.
    Optimize {
        #[arg(long)]
        polytope: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 3)]
        pieces: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// W-entropy at f = 0 and the μ-entropy of a circle-invariant metric.
    MetricEntropy {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// H-entropy of a metric on the interval of length 2.
    HEntropy {
        #[command(flatten)]
        metric: MetricArgs,
    },
    /// Calabi functional.
    Calabi {
        #[command(flatten)]
        metric: MetricArgs,
    },
    /// W_κ of a momentum given by Chebyshev coefficients, with its κ → 0 limit.
    Wkappa {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        /// Chebyshev coefficients of f in `2x/a - 1`.
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        f: String,
    },
    /// W-entropy and conserved quantities along the geodesic ray of a test configuration.
    Ray {
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long)]
        q: String,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 40.0)]
        tmax: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Mollifier width relative to a.
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Exact integrals against Monte Carlo (and optionally grid) estimates.
    Oracle {
        #[command(flatten)]
        tc: TcArgs,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Grid resolution per axis; skipped when absent.
        #[arg(long)]
        cells: Option<usize>,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Verify {
        /// Comma-separated subset such as `A2,A7`.
        #[arg(long)]
        only: Option<String>,
    },
}

/// `None` when the command printed its own output.
fn run(cli: Cli) -> CliResult<Option<(Report, Format)>> {
    let format = cli.format.unwrap_or(Format::Json);
    let report = match cli.command {
        Command::NaEntropy { tc, tau, lambda, grid } => {
            let tc = tc.load()?;
            match grid {
                None => Report::new(Convention::LatticeVolume, &na_entropy(&tc, EntropyParams { lambda, tau })?),
                Some(g) => {
                    let taus = input::grid(&g, "tau")?;
                    let mut t = Table::new(["tau", "mu", "sigma", "mu_lambda"]);
                    let mut rows = Vec::new();
                    for &tau in &taus {
                        let e = na_entropy(&tc, EntropyParams { lambda, tau })?;
                        t.push_f64([tau, e.mu, e.sigma, e.mu_lambda]);
                        rows.push(json!({"tau": tau, "mu": e.mu, "sigma": e.sigma, "mu_lambda": e.mu_lambda}));
                    }
                    Report::new(Convention::LatticeVolume, &json!({"lambda": lambda, "rows": rows})).with_table(t)
                }
            }
        }
        Command::Vector { polytope, xi, lambda } => {
            let p = input::polytope(&polytope)?;
            let xi = input::f64_list(&xi, "--xi")?;
            let ve = VectorEntropy::new(&p)?;
            let value = ve.value(&xi, lambda)?;
            let grad: Vec<f64> = ve.gradient(&xi, lambda)?.iter().copied().collect();
            Report::new(Convention::LatticeVolume, &json!({"value": value, "gradient": grad}))
        }
        Command::Futaki { tc, xi, lambda } => {
            let tc = tc.load()?;
            let xi = input::f64_list(&xi, "--xi")?;
            let f = mu_futaki(tc.polytope(), &xi, tc.q(), lambda)?;
            Report::new(Convention::LatticeVolume, &json!({"futaki": f}))
        }
        Command::Dh { tc } => {
            let dh = dh_measure(&tc.load()?);
            let mut t = Table::new(["kind", "t_lo", "t_hi", "c0", "c1"]);
            for (k, c) in dh.densities.iter().enumerate() {
                t.rows.push(
                    ["density".to_string()]
                        .into_iter()
                        .chain([dh.breakpoints[k], dh.breakpoints[k + 1], c[0], c[1]].map(output::fmt_f64))
                        .collect(),
                );
            }
            for &(at, mass) in &dh.point_masses {
                t.rows.push(["atom".to_string()].into_iter().chain([at, at, mass, 0.0].map(output::fmt_f64)).collect());
            }
            let total = dh.total_mass();
            let mean = dh.mean();
            Report::new(Convention::LatticeVolume, &json!({"total_mass": total, "mean": mean, "measure": dh})).with_table(t)
        }
        Command::Norm2 { tc } => Report::new(Convention::LatticeVolume, &json!({"norm2": norm_squared(&tc.load()?)})),
        Command::Cna { tc, mna, grid } => {
            let tc = tc.load()?;
            let (tau_star, max_value) = max_c_na(&tc, mna)?;
            let body = json!({
                "m_na": mna,
                "norm2": norm_squared(&tc),
                "l_n": top_intersection(tc.polytope()),
                "tau_star": tau_star,
                "max_value": max_value,
            });
            let mut r = Report::new(Convention::DonaldsonQuadratic, &body);
            if let Some(g) = grid {
                let mut t = Table::new(["tau", "c_na"]);
                for tau in input::grid(&g, "tau")? {
                    t.push_f64([tau, c_na(&tc, tau, mna)]);
                }
                r = r.with_table(t);
            }
            r
        }
        Command::ScanLambda { polytope, from, to, steps, multistart, seed } => {
            let p = input::polytope(&polytope)?;
            let scan = bifurcation_scan(&p, from, to, steps, multistart, seed)?;
            let exact = transition_point(&p)?;
            let mut header = vec!["lambda".to_string()];
            header.extend((0..p.dim()).map(|i| format!("xi{i}")));
            header.extend(["value", "min_eig", "branches", "trivial_max_eig"].map(String::from));
            let mut t = Table { header, rows: Vec::new() };
            for (k, l) in scan.lambda_grid.iter().enumerate() {
                let m = &scan.maximizers[k];
                let mut row = vec![*l];
                row.extend(&m.xi);
                row.extend([m.value, m.hessian_min_eig, scan.branch_count[k] as f64, scan.trivial_max_eig[k]]);
                t.push_f64(row);
            }
            // the trivial branch loses stability when the temperature -λ drops below -λ*
            let temps: Vec<f64> = scan.transitions.iter().map(|l| -l).collect();
            let body = json!({
                "transitions": scan.transitions,
                "transition_temperatures": temps,
                "exact_transition": exact,
                "zero_is_critical": scan.zero_is_critical,
                "scan": scan,
            });
            Report::new(Convention::LatticeVolume, &body).with_table(t)
        }
        Command::Optimize { polytope, lambda, pieces, restarts, seed } => {
            let p = input::polytope(&polytope)?;
            Report::new(Convention::LatticeVolume, &optimal_degeneration_search(&p, lambda, pieces, restarts, seed)?)
        }
        Command::MetricEntropy { metric, lambda } => {
            let m = metric.load()?;
            let w0 = m.w_entropy(&m.momentum(|_| 0.0), lambda)?;
            let c = m.critical_momentum(lambda, 1e-10, 100, None)?;
            let mut t = Table::new(["x", "f_star"]);
            for (x, f) in c.f.nodes.iter().zip(&c.f.values) {
                t.push_f64([*x, *f]);
            }
            let body = json!({
                "lambda": lambda,
                "w_at_zero": w0,
                "mu_entropy": c.value,
                "residual": c.residual,
                "iterations": c.iterations,
                "f_star_nodes": c.f.nodes,
                "f_star_values": c.f.values,
            });
            Report::new(Convention::Cp1Chart, &body).with_table(t)
        }
        Command::HEntropy { metric } => {
            let m = metric.load()?;
            Report::new(Convention::Cp1Chart, &json!({"h_entropy": m.h_entropy()?, "fubini_study": -2.0 * PI * 2f64.ln()}))
        }
        Command::Calabi { metric } => Report::new(Convention::Cp1Chart, &json!({"calabi": metric.load()?.calabi()})),
        Command::Wkappa { metric, kappa, f } => {
            let m = metric.load()?;
            let coeffs = input::f64_list(&f, "--f")?;
            let a = m.a();
            let mom = m.momentum(|x| cheb::eval(&coeffs, 2.0 * x / a - 1.0));
            let body = json!({"kappa": kappa, "w_kappa": m.w_kappa(&mom, kappa)?, "w_ext": m.w_ext(&mom)?});
            Report::new(Convention::Cp1Chart, &body)
        }
        Command::Ray { metric, q, normalize, tau, lambda, tmax, steps, eps } => {
            let u = input::potential(metric.a, metric.perturb.as_deref())?;
            let p = mu_entropy::polytope::Polytope::interval_f64(u.a())?;
            let mut q = input::pl_function(&q, 1)?;
            if normalize {
                let top = q.max_on(&p);
                q = q.shifted(-top);
            }
            if !(tmax >= 0.0) || steps == 0 {
                return Err(CliError::Schema("need tmax >= 0 and steps >= 1".into()));
            }
            let ray = ToricRay::new(u.clone(), q, tau, eps * u.a())?;
            let grid: Vec<f64> = (0..=steps).map(|k| tmax * k as f64 / steps as f64).collect();
            let tr = w_along_ray(&ray, lambda, &grid)?;
            let mut t = Table::new(["t", "W", "c0", "c1"]);
            for k in 0..grid.len() {
                t.push_f64([grid[k], tr.w[k], tr.c0[k], tr.c1[k]]);
            }
            let monotone = tr.monotone.iter().all(|b| *b);
            let body = json!({
                "lambda": lambda,
                "tau": tau,
                "na_limit": tr.na_limit,
                "max_upward": tr.max_upward,
                "monotone": monotone,
                "trace": tr,
            });
            Report::new(Convention::Cp1Chart, &body).with_table(t)
        }
        Command::Oracle { tc, tau, samples, seed, cells } => {
            let tc = tc.load()?;
            tc.check_tau(tau)?;
            if samples < 2 {
                return Err(CliError::Schema("need at least 2 samples".into()));
            }
            let exact = bundle(tc.polytope(), tc.q(), tau, false)?;
            let mc = mc_oracle(tc.polytope(), tc.q(), tau, samples, seed);
            let z = |x: f64, y: f64, se: f64| if se > 0.0 { (x - y) / se } else { 0.0 };
            let mut body = json!({
                "tau": tau,
                "exact": exact,
                "monte_carlo": mc,
                "z_scores": {
                    "i0": z(exact.i0, mc.i0, mc.se_i0),
                    "i1": z(exact.i1, mc.i1, mc.se_i1),
                    "b0": z(exact.b0, mc.b0, mc.se_b0),
                },
            });
            if let Some(n) = cells {
                let (i0, i1, b0) = grid_oracle(tc.polytope(), tc.q(), tau, n);
                body["grid"] = json!({"cells": n, "i0": i0, "i1": i1, "b0": b0});
            }
            Report::new(Convention::LatticeVolume, &body)
        }
        Command::Verify { only } => return verify_cmd(only.as_deref(), cli.format),
    };
    Ok(Some((report, format)))
}

fn verify_cmd(only: Option<&str>, format: Option<Format>) -> CliResult<Option<(Report, Format)>> {
    let all = ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10"];
    let wanted: Vec<String> = match only {
        Some(s) => s.split(',').map(|x| x.trim().to_uppercase()).collect(),
        None => all.iter().map(|s| s.to_string()).collect(),
    };
    if let Some(bad) = wanted.iter().find(|w| !all.contains(&w.as_str())) {
        return Err(CliError::Schema(format!("unknown criterion {bad}")));
    }
    let mut reports = Vec::new();
    for (id, f) in all.iter().zip(verify::all()) {
        if wanted.iter().any(|w| w == id) {
            let r = f();
            if format.is_none() {
                println!("{}", r.line());
            }
            reports.push(r);
        }
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    match format {
        None => {}
        Some(fmt) => {
            let mut t = Table::new(["id", "passed", "title", "detail"]);
            for r in &reports {
                t.rows.push(vec![r.id.into(), r.passed.to_string(), r.title.into(), r.detail.clone()]);
            }
            let rep = Report::new(Convention::Acceptance, &json!({"criteria": reports})).with_table(t);
            rep.emit(fmt).map_err(|e| CliError::Numeric(e.to_string()))?;
        }
    }
    if failed.is_empty() {
        Ok(None)
    } else {
        Err(CliError::Verify(failed))
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let name = matches.subcommand_name().unwrap_or_default().to_string();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some((report, format))) => match report.emit(format) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(3)
            }
        },
        Err(e @ CliError::Verify(_)) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
        Err(CliError::Schema(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(m)) => {
            let diag = json!({"status": "numeric-failure", "command": name, "error": m});
            println!("{}", serde_json::to_string_pretty(&diag).expect("diagnostic"));
            ExitCode::from(3)
        }
    }
}
