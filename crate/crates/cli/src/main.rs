use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ssrelay::analysis::{
    e2e_cdf, e2e_cdf_k2, gains, limiting_cdf, normalizer, outage_bounds, rate_approx,
    rate_bound, rate_k2, Bound,
};
use ssrelay::experiments::{self, metrics, run_figure, run_sweep, SweepSpec, SweepVariable};
use ssrelay::model::{build_topology, RunConfig};
use ssrelay::montecarlo::Scenario;
use ssrelay::waterfill::{hop_laws, ShapeConvention};

#[derive(Parser)]
#[command(name = "ssrelay", version, about = "Spectrum-sharing multi-hop AF relaying: simulation and analysis")]
struct Cli {
    /// JSON scenario file; missing keys take defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (directory for `figure`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Outage,
    Rate,
}

impl MetricArg {
    fn name(self) -> &'static str {
        match self {
            MetricArg::Outage => "outage",
            MetricArg::Rate => "rate",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Node distances of the canonical chain.
    Topology,
    /// Water level and derived per-hop constants.
    Waterlevel,
    /// Monte-Carlo estimate at the configured point, as one CSV row.
    Simulate {
        #[arg(long, value_enum, default_value = "outage")]
        metric: MetricArg,
    },
    /// Closed-form and numerically inverted quantities at the configured point.
    Analyze,
    /// Figure dataset, one CSV per curve.
    Figure {
        #[arg(long, value_parser = ["3", "4", "5", "6"])]
        figure: String,
    },
}

fn load_config(cli: &Cli) -> ssrelay::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> ssrelay::Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn topology(cfg: &RunConfig) -> ssrelay::Result<String> {
    let t = build_topology(cfg.k, cfg.eta, cfg.epsilon)?;
    Ok(pretty(json!({
        "K": cfg.k,
        "desired": t.desired,
        "interference": t.interference,
        "eta_k": t.path_loss_ratios(cfg.epsilon),
    })))
}

fn waterlevel(cfg: &RunConfig) -> ssrelay::Result<String> {
    let sys = cfg.system();
    let topo = build_topology(cfg.k, cfg.eta, cfg.epsilon)?;
    let laws = hop_laws(&sys, &topo)?;
    let hops: Vec<_> = laws
        .iter()
        .map(|l| {
            json!({
                "water_level": l.water_level,
                "shape_exact": l.shape_exact,
                "shape_approx": l.shape_approx,
                "zero_prob": l.zero_prob,
            })
        })
        .collect();
    Ok(pretty(json!({
        "water_rule": sys.water_rule,
        "interference_cap": sys.interference_cap(),
        "avg_snr": sys.avg_snr,
        "hops": hops,
    })))
}

fn simulate(cfg: &RunConfig, metric: MetricArg) -> ssrelay::Result<String> {
    let spec = SweepSpec {
        variable: SweepVariable::WDb,
        values: vec![cfg.w_db],
        fixed: cfg.system(),
        gamma_th_db: cfg.gamma_th_db,
        trials: cfg.trials,
        seed: cfg.seed,
    };
    let reg = metrics();
    let points = run_sweep(&spec, reg.get(metric.name())?)?;
    Ok(experiments::to_csv_string(&points))
}

fn analyze(cfg: &RunConfig) -> ssrelay::Result<String> {
    let sc = Scenario::new(cfg.system())?;
    let law = sc.laws[0];
    let k = sc.hop_count();
    let a: Vec<f64> = sc.laws.iter().map(|l| l.shape_exact).collect();
    let th = cfg.gamma_th();
    let ob = outage_bounds(th, &a);
    let mut out = json!({
        "K": k,
        "gamma_th": th,
        "water_level": law.water_level,
        "shape_exact": law.shape_exact,
        "shape_approx": law.shape_approx,
        "outage": {
            "inverted": e2e_cdf(th, &a)?,
            "bound_lower": ob.lower,
            "bound_upper": ob.upper,
        },
    });
    if k == 2 {
        out["outage"]["closed_form_k2"] = json!(e2e_cdf_k2(th, a[0], a[1])?);
        out["rate_k2"] = json!(rate_k2(a[0], a[1])?);
    }
    if k >= 2 {
        let conv = |c: ShapeConvention| -> ssrelay::Result<serde_json::Value> {
            let shape = law.shape(c);
            let up = normalizer(k, shape, Bound::Upper)?;
            let lo = normalizer(k, shape, Bound::Lower)?;
            let g = gains(k, shape, cfg.p)?;
            let ra = rate_approx(k, shape)?;
            Ok(json!({
                "d_K_upper": up.d_k,
                "d_K_lower": lo.d_k,
                "outage_limit": limiting_cdf(th / up.d_k),
                "diversity_gain": g.diversity_gain,
                "coding_gain": g.coding_gain,
                "b": g.b,
                "rate_bound": rate_bound(k, shape)?,
                "rate_approx": ra.value,
                "rate_approx_valid": ra.valid,
            }))
        };
        out["exact_shape"] = conv(ShapeConvention::Exact)?;
        out["printed_shape"] = conv(ShapeConvention::Printed)?;
    }
    Ok(pretty(out))
}

fn figure(cfg: &RunConfig, id: &str, out: Option<&Path>) -> ssrelay::Result<()> {
    let sets = run_figure(id, cfg)?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for d in &sets {
                let path = dir.join(format!("fig{id}_{}.csv", d.label));
                fs::write(&path, experiments::to_csv_string(&d.points))?;
                log::info!("wrote {}", path.display());
            }
        }
        None => {
            let mut text = String::new();
            for d in &sets {
                text.push_str(&format!("# series: fig{id}_{} ({})\n", d.label, d.metric));
                text.push_str(&experiments::to_csv_string(&d.points));
            }
            emit(None, &text)?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> ssrelay::Result<()> {
    let cfg = load_config(cli)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Topology => emit(out, &topology(&cfg)?),
        Command::Waterlevel => emit(out, &waterlevel(&cfg)?),
        Command::Simulate { metric } => emit(out, &simulate(&cfg, *metric)?),
        Command::Analyze => emit(out, &analyze(&cfg)?),
        Command::Figure { figure: id } => figure(&cfg, id, out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
