//! Command-line front end for the `qsearch` library.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qsearch::runner::{self, Format, RunConfig, ScenarioKind, ScenarioParams, SweepAxis};
use qsearch::secular::solve_secular;
use qsearch::spectral::{merge_degenerate, predict, SpectralModel, MARGIN_WARNING};
use qsearch::{parse_angle, Engine, Error};

const EXIT_VALIDATION: u8 = 2;
const EXIT_STRICT: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qsearch",
    version,
    about = "Spectral prediction and simulation of quantum search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form prediction for a model file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// Exit with code 3 when the validity margin is below 10.
        #[arg(long)]
        strict: bool,
    },
    /// Exact eigenphases and overlaps from the secular equation.
    Secular {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Write the spectrum JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run engines on a model file.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Build and run a named scenario.
    Scenario {
        name: ScenarioKind,
        #[command(flatten)]
        params: ParamFlags,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run a scenario over a one- or two-parameter grid and emit one CSV row per point.
    Sweep {
        name: ScenarioKind,
        /// Grid axis as `param=v1,v2,...` or `param=lo..hi`; repeat for a second axis.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, value_delimiter = ',')]
        engines: Option<Vec<Engine>>,
        #[arg(long)]
        q_max: Option<u64>,
        /// CSV output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunFlags {
    /// Comma-separated subset of predicted,secular,iterated,lattice,dense.
    #[arg(long, value_delimiter = ',')]
    engines: Option<Vec<Engine>>,
    #[arg(long)]
    q_max: Option<u64>,
    /// Output directory for summary.json and trace files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Exit with code 3 when the validity margin is below 10.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Default)]
struct ParamFlags {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    phi_t: Option<f64>,
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    phi_s: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long)]
    side: Option<usize>,
    #[arg(long)]
    base: Option<ScenarioKind>,
    #[arg(long, value_parser = angle)]
    zeta: Option<f64>,
    #[arg(long)]
    optimize_zeta: bool,
    #[arg(long)]
    simulate: bool,
    #[arg(long)]
    skip_alg1: bool,
    /// Spectral model JSON for the custom scenario.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    gap: Option<f64>,
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    theta_s: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn angle(text: &str) -> Result<f64, String> {
    parse_angle(text).map_err(|e| e.to_string())
}

impl ParamFlags {
    fn into_params(self) -> ScenarioParams {
        let d = ScenarioParams::default();
        ScenarioParams {
            alpha: self.alpha.unwrap_or(d.alpha),
            phi_t: self.phi_t.unwrap_or(d.phi_t),
            phi_s: self.phi_s.unwrap_or(d.phi_s),
            n: self.n.unwrap_or(d.n),
            phi: self.phi.unwrap_or(d.phi),
            side: self.side.unwrap_or(d.side),
            base: self.base.unwrap_or(d.base),
            zeta: self.zeta,
            optimize_zeta: self.optimize_zeta,
            simulate: self.simulate,
            skip_alg1: self.skip_alg1,
            model_path: self.model,
            levels: self.levels.unwrap_or(d.levels),
            gap: self.gap.unwrap_or(d.gap),
            theta_s: self.theta_s.unwrap_or(d.theta_s),
            seed: self.seed.unwrap_or(d.seed),
        }
    }
}

fn config(scenario: ScenarioKind, params: ScenarioParams, flags: RunFlags) -> RunConfig {
    RunConfig {
        scenario,
        params,
        engines: flags.engines,
        q_max: flags.q_max,
        out: flags.out,
        format: flags.format,
        strict: flags.strict,
    }
}

fn load(path: &PathBuf) -> Result<SpectralModel, Error> {
    SpectralModel::from_json(&fs::read_to_string(path)?)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), Error> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn execute(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Predict { model, strict } => {
            let p = predict(&load(&model)?)?;
            print_json(&p)?;
            Ok(if strict && p.validity_margin < MARGIN_WARNING {
                EXIT_STRICT
            } else {
                0
            })
        }
        Command::Secular { model, tol, out } => {
            let spectrum = solve_secular(&merge_degenerate(&load(&model)?), tol)?;
            match out {
                Some(path) => fs::write(path, serde_json::to_string_pretty(&spectrum)?)?,
                None => print_json(&spectrum)?,
            }
            Ok(0)
        }
        Command::Simulate { model, run } => {
            let params = ScenarioParams {
                model_path: Some(model),
                ..ScenarioParams::default()
            };
            run_config(config(ScenarioKind::Custom, params, run))
        }
        Command::Scenario { name, params, run } => {
            run_config(config(name, params.into_params(), run))
        }
        Command::Sweep {
            name,
            axes,
            params,
            engines,
            q_max,
            out,
        } => {
            let axes = axes
                .iter()
                .map(|a| {
                    let (k, v) = a
                        .split_once('=')
                        .ok_or_else(|| Error::Config(format!("axis '{a}' is not param=values")))?;
                    SweepAxis::parse(k.trim(), v)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut cfg = RunConfig::new(name);
            cfg.params = params.into_params();
            cfg.engines = engines;
            cfg.q_max = q_max;
            let table = runner::sweep(&cfg, &axes)?;
            let comments = vec![format!("qsearch sweep {name}")];
            match out {
                Some(path) => {
                    let mut w = io::BufWriter::new(fs::File::create(path)?);
                    table.write_csv(&mut w, &comments)?;
                    w.flush()?;
                }
                None => table.write_csv(io::stdout().lock(), &comments)?,
            }
            Ok(0)
        }
    }
}

fn run_config(cfg: RunConfig) -> Result<u8, Error> {
    let to_stdout = cfg.out.is_none();
    let out = runner::run(&cfg)?;
    if to_stdout {
        print_json(&out.summary)?;
    }
    Ok(if out.strict_violation { EXIT_STRICT } else { 0 })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_IO
            })
        }
    }
}
