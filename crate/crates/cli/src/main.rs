//! `gnpd`: edge thresholds, inclusion divergences, characteristic
//! functions, inversion contours, and graph inclusion probabilities for
//! spherical random geometric graphs and their Erdos-Renyi surrogates.
//!
//! Every randomized subcommand takes an explicit `--seed` and reports it
//! (with the budgets) in its output, so any line of output can be
//! reproduced byte for byte. Exit codes: 1 usage, 2 domain error,
//! 3 numerical diagnostic failure.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fmt::Write as _;
use std::process::ExitCode;

use gnpd_core::contour::solve_contour;
use gnpd_core::divergence::idiv_er;
use gnpd_core::error::Error;
use gnpd_core::graphs::{sample_er, sample_rgg, Graph};
use gnpd_core::inclusion::{
    inclusion_prob_fourier, inclusion_prob_gaussian, inclusion_prob_mc, ratio_experiment,
    ExperimentConfig, FourierBudget, FourierMode,
};
use gnpd_core::mat::ComplexSymMatrix;
use gnpd_core::mc::Streams;
use gnpd_core::special::{gaussian_edge_prob, pp0_prediction, threshold, ModelParams};
use gnpd_core::wishart::{
    gaussian_cf, spherical_wishart_cf, spherical_wishart_cf_direct, CfBudget,
};
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "gnpd", version, about = "spherical random geometric graph numerics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Edge threshold t, Gaussian surrogate p0, and the p/p0 ratio.
    Tpd(TpdArgs),
    /// Inclusion divergence between two Erdos-Renyi laws.
    Idiv(IdivArgs),
    /// Characteristic function of the spherical Wishart matrix.
    Phi(PhiArgs),
    /// Solve the Fourier-inversion contour and dump it as CSV.
    Contour(ContourArgs),
    /// Graph inclusion probability by one of the three engines.
    Inclusion(InclusionArgs),
    /// Class-sampling ratio experiment from a config file.
    Experiment(ExperimentArgs),
    /// Sample a random graph and write it as an edge list.
    Sample(SampleArgs),
}

#[derive(Args)]
struct TpdArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    d: u32,
}

#[derive(Args)]
struct IdivArgs {
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Sweep mode: comma-separated vertex counts; q_n = c/n^2 with p_n
    /// derived per --pn-mode. Emits CSV rows.
    #[arg(long, value_delimiter = ',')]
    sweep_ns: Vec<usize>,
    /// Coefficient c in q_n = c / n^2 for sweep mode.
    #[arg(long, default_value_t = 4.0)]
    qn_coeff: f64,
    /// p_n rule in sweep mode: "logfactor" for q(1 + 1/ln n), or a number
    /// r for p = r q.
    #[arg(long, default_value = "logfactor")]
    pn_mode: String,
}

#[derive(Args)]
struct PhiArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: u32,
    /// Value of the single off-diagonal pair (real part).
    #[arg(long)]
    theta: f64,
    /// Imaginary part of the pair value.
    #[arg(long, default_value_t = 0.0)]
    theta_im: f64,
    /// Which pair carries theta, as "j,k".
    #[arg(long, default_value = "0,1")]
    pair: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 65536)]
    draws: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Estimators to run: sd, direct, or both.
    #[arg(long, default_value = "both")]
    method: String,
}

#[derive(Args)]
struct ContourArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    xmax: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct InclusionArgs {
    /// Edge-list file ("n <count>" header, then "j k" lines).
    #[arg(long)]
    graph: String,
    #[arg(long)]
    d: u32,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    method: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo draws (method = mc).
    #[arg(long, default_value_t = 1_000_000)]
    draws: u64,
    /// Host graph size for the Monte Carlo engine; defaults to the
    /// pattern's vertex count.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 4096)]
    outer: u64,
    #[arg(long, default_value_t = 256)]
    inner: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Config file: JSON object or flat key=value lines with keys
    /// n, d, p, k, graphs, outer, inner, workers, mode, max_total_inner.
    #[arg(long)]
    config: String,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct SampleArgs {
    /// Model: er or rgg.
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Param(_) | Error::Domain(_) => 2,
                Error::Numerical(_) | Error::Contour { .. } => 3,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Tpd(a) => cmd_tpd(a),
        Command::Idiv(a) => cmd_idiv(a),
        Command::Phi(a) => cmd_phi(a),
        Command::Contour(a) => cmd_contour(a),
        Command::Inclusion(a) => cmd_inclusion(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Sample(a) => cmd_sample(a),
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn complex_json(mean: Complex64, stderr: Complex64, samples: u64) -> serde_json::Value {
    json!({
        "re": mean.re,
        "im": mean.im,
        "stderr_re": stderr.re,
        "stderr_im": stderr.im,
        "samples": samples,
    })
}

fn cmd_tpd(a: TpdArgs) -> Result<(), Error> {
    let t = threshold(a.p, a.d)?;
    let p0 = gaussian_edge_prob(t, a.d);
    print_json(&json!({
        "command": "tpd",
        "d": a.d,
        "p": a.p,
        "t": t,
        "p0": p0,
        "pp0_predicted_ratio": pp0_prediction(t, a.d),
        "actual_ratio": a.p / p0,
    }));
    Ok(())
}

fn cmd_idiv(a: IdivArgs) -> Result<(), Error> {
    if !a.sweep_ns.is_empty() {
        let mut out = String::from("n,p,q,value,argmin_g,ratio_term,tail_term\n");
        for &n in &a.sweep_ns {
            let q = a.qn_coeff / (n as f64 * n as f64);
            let p = match a.pn_mode.as_str() {
                "logfactor" => q * (1.0 + 1.0 / (n as f64).ln()),
                r => {
                    let r: f64 = r
                        .parse()
                        .map_err(|_| Error::param(format!("bad --pn-mode {r:?}")))?;
                    r * q
                }
            };
            let res = idiv_er(n, p, q)?;
            let _ = writeln!(
                out,
                "{n},{p},{q},{},{},{},{}",
                res.value, res.argmin_g, res.ratio_term, res.tail_term
            );
        }
        print!("{out}");
        return Ok(());
    }
    let (p, q) = match (a.p, a.q) {
        (Some(p), Some(q)) => (p, q),
        _ => return Err(Error::param("idiv needs --p and --q (or --sweep-ns)")),
    };
    if a.n < 2 {
        return Err(Error::param("idiv needs --n >= 2"));
    }
    let res = idiv_er(a.n, p, q)?;
    print_json(&json!({
        "command": "idiv",
        "n": a.n,
        "p": p,
        "q": q,
        "value": res.value,
        "argmin_g": res.argmin_g,
        "ratio_term": res.ratio_term,
        "tail_term": res.tail_term,
    }));
    Ok(())
}

fn cmd_phi(a: PhiArgs) -> Result<(), Error> {
    let (j, k) = parse_pair(&a.pair)?;
    let theta = ComplexSymMatrix::single_pair(a.n, j, k, Complex64::new(a.theta, a.theta_im))?;
    let streams = Streams::new(a.seed);
    let budget = CfBudget { draws: a.draws, workers: a.workers };
    let mut result = json!({
        "command": "phi",
        "n": a.n,
        "d": a.d,
        "pair": [j, k],
        "theta_re": a.theta,
        "theta_im": a.theta_im,
        "seed": a.seed,
        "draws": budget.draws,
        "workers": a.workers,
        "gaussian_cf": { "re": gaussian_cf(&theta, a.d)?.re, "im": gaussian_cf(&theta, a.d)?.im },
    });
    let obj = result.as_object_mut().expect("object");
    if a.method == "sd" || a.method == "both" {
        let est = spherical_wishart_cf(&theta, a.d, budget, &streams.derive(1))?;
        obj.insert(
            "steepest_descent".into(),
            complex_json(est.mean, est.stderr, est.samples),
        );
    }
    if a.method == "direct" || a.method == "both" {
        let est = spherical_wishart_cf_direct(&theta, a.d, budget, &streams.derive(2))?;
        obj.insert(
            "direct".into(),
            complex_json(est.mean, est.stderr, est.samples),
        );
    }
    if !matches!(a.method.as_str(), "sd" | "direct" | "both") {
        return Err(Error::param(format!("unknown phi method {:?}", a.method)));
    }
    print_json(&result);
    Ok(())
}

fn parse_pair(s: &str) -> Result<(usize, usize), Error> {
    let mut it = s.split(',');
    match (it.next(), it.next(), it.next()) {
        (Some(j), Some(k), None) => {
            let j = j.trim().parse().map_err(|_| Error::param(format!("bad pair {s:?}")))?;
            let k = k.trim().parse().map_err(|_| Error::param(format!("bad pair {s:?}")))?;
            Ok((j, k))
        }
        _ => Err(Error::param(format!("bad pair {s:?}"))),
    }
}

fn cmd_contour(a: ContourArgs) -> Result<(), Error> {
    let curve = solve_contour(a.d, a.t, a.xmax, a.rtol)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# gnpd contour d={} t={} xmax={} rtol={} truncated_mass_bound={:.3e}",
        a.d,
        a.t,
        curve.x_max(),
        a.rtol,
        curve.truncated_mass_bound()
    );
    out.push_str("x,y,dy\n");
    for (&x, &y) in curve.grid().iter().zip(curve.grid_y()) {
        let _ = writeln!(out, "{x},{y},{}", curve.y_prime(x)?);
    }
    match a.out {
        Some(path) => std::fs::write(&path, out)
            .map_err(|e| Error::param(format!("cannot write {path}: {e}")))?,
        None => print!("{out}"),
    }
    Ok(())
}

fn resolve_params(n: usize, d: u32, p: Option<f64>, t: Option<f64>) -> Result<ModelParams, Error> {
    match (p, t) {
        (Some(p), None) => ModelParams::from_edge_prob(n, d, p),
        (None, Some(t)) => ModelParams::from_threshold(n, d, t),
        _ => Err(Error::param("give exactly one of --p and --t")),
    }
}

fn cmd_inclusion(a: InclusionArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&a.graph)
        .map_err(|e| Error::param(format!("cannot read {}: {e}", a.graph)))?;
    let g = Graph::from_edge_list(&text)?;
    let host_n = a.n.unwrap_or(g.n()).max(g.n());
    let params = resolve_params(host_n, a.d, a.p, a.t)?;
    let base = |seed: Option<u64>| {
        json!({
            "command": "inclusion",
            "graph": a.graph,
            "n": host_n,
            "d": a.d,
            "p": params.p,
            "t": params.t,
            "p0": params.p0,
            "seed": seed,
        })
    };
    match a.method.as_str() {
        "gaussian" => {
            let value = inclusion_prob_gaussian(&g, params.p0)?;
            let mut v = base(None);
            let obj = v.as_object_mut().expect("object");
            obj.insert("method".into(), "exact_gaussian".into());
            obj.insert("value".into(), value.into());
            obj.insert("stderr".into(), 0.0.into());
            obj.insert(
                "log_p0_power".into(),
                (g.edge_count() as f64 * params.p0.ln()).into(),
            );
            print_json(&v);
        }
        "mc" => {
            let seed = a
                .seed
                .ok_or_else(|| Error::param("--seed is required for method mc"))?;
            let est = inclusion_prob_mc(
                &g,
                host_n,
                a.d,
                params.t,
                a.draws,
                a.workers,
                &Streams::new(seed),
            )?;
            let mut v = base(Some(seed));
            let obj = v.as_object_mut().expect("object");
            obj.insert("method".into(), "monte_carlo".into());
            obj.insert("value".into(), est.value.into());
            obj.insert("stderr".into(), est.stderr.into());
            obj.insert("draws".into(), a.draws.into());
            obj.insert("workers".into(), a.workers.into());
            print_json(&v);
        }
        "fourier" => {
            let seed = a
                .seed
                .ok_or_else(|| Error::param("--seed is required for method fourier"))?;
            let curve = solve_contour(a.d, params.t, None, 1e-10)?;
            let budget = FourierBudget {
                outer: a.outer,
                inner: a.inner,
                workers: a.workers,
            };
            let est = inclusion_prob_fourier(
                &g,
                &params,
                &curve,
                budget,
                FourierMode::Spherical,
                &Streams::new(seed),
            )?;
            let ratio = est.ratio.expect("fourier ratio");
            let diag = est.diagnostics.expect("fourier diagnostics");
            let mut v = base(Some(seed));
            let obj = v.as_object_mut().expect("object");
            obj.insert("method".into(), "fourier".into());
            obj.insert("value".into(), est.value.into());
            obj.insert("stderr".into(), est.stderr.into());
            obj.insert("log_p0_power".into(), est.log_p0_power.into());
            obj.insert("ratio_mean".into(), ratio.mean.re.into());
            obj.insert("ratio_stderr".into(), ratio.stderr.re.into());
            obj.insert("outer".into(), a.outer.into());
            obj.insert("inner".into(), a.inner.into());
            obj.insert("workers".into(), a.workers.into());
            obj.insert(
                "diagnostics".into(),
                json!({
                    "opnorm_violations": diag.opnorm_violations,
                    "opnorm_skipped": diag.opnorm_skipped,
                    "imag_residual": diag.imag_residual,
                    "imag_stderr": diag.imag_stderr,
                    "truncated_mass": diag.truncated_mass,
                }),
            );
            print_json(&v);
        }
        other => return Err(Error::param(format!("unknown method {other:?}"))),
    }
    Ok(())
}

fn parse_config(text: &str) -> Result<serde_json::Map<String, serde_json::Value>, Error> {
    if let Ok(serde_json::Value::Object(map)) = serde_json::from_str(text) {
        return Ok(map);
    }
    let mut map = serde_json::Map::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::param(format!("bad config line {line:?}")))?;
        let v = v.trim();
        let value = v
            .parse::<u64>()
            .map(Into::into)
            .or_else(|_| v.parse::<f64>().map(Into::into))
            .unwrap_or_else(|_| serde_json::Value::String(v.to_string()));
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}

fn get_u64(map: &serde_json::Map<String, serde_json::Value>, key: &str, default: u64) -> u64 {
    map.get(key).and_then(|v| v.as_u64()).unwrap_or(default)
}

fn cmd_experiment(a: ExperimentArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&a.config)
        .map_err(|e| Error::param(format!("cannot read {}: {e}", a.config)))?;
    let map = parse_config(&text)?;
    let n = get_u64(&map, "n", 0) as usize;
    let d = get_u64(&map, "d", 0) as u32;
    let p = map.get("p").and_then(|v| v.as_f64()).unwrap_or(0.0);
    if n == 0 || d == 0 || p == 0.0 {
        return Err(Error::param("config must set n, d, p"));
    }
    let mode = match map.get("mode").and_then(|v| v.as_str()).unwrap_or("spherical") {
        "spherical" => FourierMode::Spherical,
        "gaussian" => FourierMode::GaussianIdentity,
        other => return Err(Error::param(format!("unknown mode {other:?}"))),
    };
    let cfg = ExperimentConfig {
        n,
        d,
        p,
        class_k: map.get("k").and_then(|v| v.as_f64()).unwrap_or(10.0),
        sampled_graphs: get_u64(&map, "graphs", 100),
        budget: FourierBudget {
            outer: get_u64(&map, "outer", 4096),
            inner: get_u64(&map, "inner", 256),
            workers: get_u64(&map, "workers", 1) as usize,
        },
        mode,
        max_total_inner: map.get("max_total_inner").and_then(|v| v.as_u64()),
    };
    let rec = ratio_experiment(&cfg, &Streams::new(a.seed))?;
    let per_graph: Vec<serde_json::Value> = rec
        .per_graph
        .iter()
        .map(|g| {
            json!({
                "index": g.index,
                "mu": g.stats.mu,
                "sigma": g.stats.sigma,
                "delta": g.stats.delta,
                "tau": g.stats.tau,
                "ratio_abs": g.ratio_abs,
                "stderr": g.stderr,
            })
        })
        .collect();
    print_json(&json!({
        "command": "experiment",
        "seed": a.seed,
        "n": n,
        "d": d,
        "p": p,
        "t": rec.params.t,
        "p0": rec.params.p0,
        "k": cfg.class_k,
        "graphs": cfg.sampled_graphs,
        "outer": cfg.budget.outer,
        "inner": cfg.budget.inner,
        "workers": cfg.budget.workers,
        "kept": rec.kept,
        "class_rejection_rate": rec.class_rejection_rate,
        "max_ratio": rec.max_ratio,
        "bound": rec.bound,
        "incomplete": rec.incomplete,
        "per_graph": per_graph,
    }));
    Ok(())
}

fn cmd_sample(a: SampleArgs) -> Result<(), Error> {
    let mut rng = Streams::new(a.seed).stream(0);
    let g = match a.model.as_str() {
        "er" => {
            let p = a.p.ok_or_else(|| Error::param("er model needs --p"))?;
            sample_er(a.n, p, &mut rng)?
        }
        "rgg" => {
            let d = a.d.ok_or_else(|| Error::param("rgg model needs --d"))?;
            let t = match (a.t, a.p) {
                (Some(t), None) => t,
                (None, Some(p)) => threshold(p, d)?,
                _ => return Err(Error::param("rgg model needs exactly one of --t, --p")),
            };
            sample_rgg(a.n, d, t, &mut rng)
        }
        other => return Err(Error::param(format!("unknown model {other:?}"))),
    };
    let text = g.to_edge_list();
    match a.out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Error::param(format!("cannot write {path}: {e}")))?,
        None => print!("{text}"),
    }
    Ok(())
}
