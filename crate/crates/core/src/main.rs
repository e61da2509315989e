use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tfim_gp::ising::exact_diag_correlators;
use tfim_gp::output::{emit_csv, emit_svg};
use tfim_gp::phases::{phase_record, PhaseKinds, DEFAULT_RANK_EPS};
use tfim_gp::states::{LoopSpec, DEFAULT_LOOP_STEPS};
use tfim_gp::sweep::{parse_angle, parse_config, ConfigOverrides, SweepConfig};
use tfim_gp::{CouplingRatio, Error, IsingChain, Result};

#[derive(Parser)]
#[command(name = "tfim-gp", version, about = "Geometric phases of transverse-field Ising chain reduced states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Magnetization and two-point correlators in the thermodynamic limit.
    Correlators {
        #[arg(long)]
        lambda: f64,
        /// Separations, comma separated.
        #[arg(long, default_value = "1", value_delimiter = ',')]
        r: Vec<usize>,
        #[arg(long, default_value_t = 1e-10)]
        quad_tol: f64,
    },
    /// Phases at a single (lambda, r, theta) point.
    Phase {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, value_parser = angle, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value = "both", value_parser = kinds)]
        kinds: PhaseKinds,
        #[arg(long, default_value_t = DEFAULT_LOOP_STEPS)]
        loop_steps: usize,
        #[arg(long, default_value_t = DEFAULT_RANK_EPS)]
        rank_eps: f64,
        #[arg(long, default_value_t = 1e-10)]
        quad_tol: f64,
    },
    /// Sweep over a (lambda, r, theta) grid and write CSV.
    Sweep {
        /// Plain key = value file; flags take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: SweepFlags,
        #[command(flatten)]
        plot: PlotFlags,
    },
    /// Run one of the built-in sweeps: fig1, fig2 or fig3.
    Preset {
        name: String,
        #[command(flatten)]
        flags: SweepFlags,
        #[command(flatten)]
        plot: PlotFlags,
    },
    /// Compare the limit correlators with exact diagonalization of small rings.
    Oracle {
        #[arg(long, default_value = "0.5,1,1.5", value_delimiter = ',')]
        lambda: Vec<f64>,
        #[arg(long, default_value = "8,10,12", value_delimiter = ',')]
        sites: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        r_max: usize,
    },
}

#[derive(Args)]
struct SweepFlags {
    #[arg(long)]
    lambda_min: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
    #[arg(long)]
    lambda_steps: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    r_list: Option<Vec<usize>>,
    #[arg(long, value_parser = angle, value_delimiter = ',', allow_hyphen_values = true)]
    theta_list: Option<Vec<f64>>,
    #[arg(long, value_parser = kinds)]
    kinds: Option<PhaseKinds>,
    #[arg(long)]
    loop_steps: Option<usize>,
    #[arg(long)]
    quad_tol: Option<f64>,
    #[arg(long)]
    rank_eps: Option<f64>,
    #[arg(long)]
    unwrap: Option<bool>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

impl SweepFlags {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            lambda_steps: self.lambda_steps,
            r_list: self.r_list.clone(),
            theta_list: self.theta_list.clone(),
            kinds: self.kinds,
            loop_steps: self.loop_steps,
            quad_tol: self.quad_tol,
            rank_eps: self.rank_eps,
            unwrap: self.unwrap,
            output_path: self.output.clone(),
            workers: self.workers,
        }
    }
}

#[derive(Args)]
struct PlotFlags {
    /// Also write an SVG plot here.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Column to plot.
    #[arg(long, default_value = "delta_gamma_unwrapped")]
    svg_column: String,
}

fn angle(s: &str) -> std::result::Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

fn kinds(s: &str) -> std::result::Result<PhaseKinds, String> {
    s.parse::<PhaseKinds>().map_err(|e| e.to_string())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.12}"))
}

fn run_and_write(config: SweepConfig, plot: &PlotFlags) -> Result<()> {
    let records = tfim_gp::sweep::run_sweep(&config)?;
    emit_csv(&records, &config.output_path)?;
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    for rec in records.iter().filter(|r| !r.is_ok()) {
        eprintln!(
            "lambda={} r={} theta={}: {}",
            rec.lambda,
            rec.r,
            rec.theta,
            rec.detail.as_deref().unwrap_or(&rec.status)
        );
    }
    println!("wrote {} rows to {} ({failed} with errors)", records.len(), config.output_path.display());
    if let Some(path) = &plot.svg {
        emit_svg(&records, path, &plot.svg_column)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Correlators { lambda, r, quad_tol } => {
            let chain = IsingChain::new(CouplingRatio::with_tolerance(lambda, quad_tol)?)?;
            println!("m = {:.15}", chain.magnetization()?);
            println!("{:>4} {:>20} {:>20} {:>20}", "r", "c_xx", "c_yy", "c_zz");
            for r in r {
                let c = chain.correlators(r)?;
                println!("{:>4} {:>20.15} {:>20.15} {:>20.15}", r, c.c_xx, c.c_yy, c.c_zz);
            }
        }
        Command::Phase { lambda, r, theta, kinds, loop_steps, rank_eps, quad_tol } => {
            let chain = IsingChain::new(CouplingRatio::with_tolerance(lambda, quad_tol)?)?;
            let spec = LoopSpec::new(theta, loop_steps)?;
            let (rec, err) = phase_record(&chain, r, &spec, kinds, rank_eps);
            println!("gamma_int_2site = {}", fmt_opt(rec.gamma_int_pair));
            println!("gamma_int_1site = {}", fmt_opt(rec.gamma_int_single));
            println!("delta_gamma     = {}", fmt_opt(rec.delta_gamma));
            println!("gamma_u_2site   = {}", fmt_opt(rec.gamma_u_pair));
            println!("gamma_u_1site   = {}", fmt_opt(rec.gamma_u_single));
            println!("delta_gamma_u   = {}", fmt_opt(rec.delta_gamma_u));
            if kinds.uhlmann {
                println!("convergence     = {:.3e} ({} steps)", rec.convergence_estimate, rec.steps_used);
            }
            match err {
                Some(e) => println!("status          = {} ({e})", e.tag()),
                None => println!("status          = ok"),
            }
        }
        Command::Sweep { config, flags, plot } => {
            let mut cfg = SweepConfig::default();
            if let Some(path) = &config {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                cfg.apply(&parse_config(&text)?);
            }
            cfg.apply(&flags.overrides());
            run_and_write(cfg, &plot)?;
        }
        Command::Preset { name, flags, plot } => {
            let mut cfg = tfim_gp::sweep::preset(&name)?;
            cfg.apply(&flags.overrides());
            run_and_write(cfg, &plot)?;
        }
        Command::Oracle { lambda, sites, r_max } => {
            for l in lambda {
                let limit = IsingChain::new(CouplingRatio::new(l)?)?;
                println!("lambda = {l}: m = {:.10}", limit.magnetization()?);
                println!("{:>4} {:>4} {:>14} {:>14} {:>14}", "N", "r", "|d c_xx|", "|d c_yy|", "|d c_zz|");
                for &n in &sites {
                    let finite = exact_diag_correlators(n, l)?;
                    for r in 1..=r_max.min(n / 2) {
                        let exact = limit.correlators(r)?;
                        let c = finite.at(r).expect("r <= n / 2");
                        println!(
                            "{:>4} {:>4} {:>14.3e} {:>14.3e} {:>14.3e}",
                            n,
                            r,
                            (c.c_xx - exact.c_xx).abs(),
                            (c.c_yy - exact.c_yy).abs(),
                            (c.c_zz - exact.c_zz).abs()
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
