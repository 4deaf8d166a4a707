use std::path::{Path, PathBuf};
use std::process::ExitCode;

use accelbeam::config::RunConfig;
use accelbeam::export::{meta_path, raster_from_rows, read_csv};
use accelbeam::figures::{figure, presets, run_config, FigureId};
use accelbeam::grid::GridSpec;
use accelbeam::pixmap::{render, write_pixmap, Normalization, Quantity};
use accelbeam::suites::{format_study, run_suite, sweep, Suite, SweepBeam};
use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "accelbeam", version, about = "Accelerating electromagnetic beams: evaluation, verification and figures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a configured beam on a grid and write CSV and pixmaps.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Artifact base name; defaults to the config file stem.
        #[arg(long)]
        name: Option<String>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a named check suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Vec<Suite>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Median relative Maxwell residual over a list of tau values.
    Sweep {
        #[arg(long, value_enum)]
        beam: SweepBeam,
        #[arg(long, value_delimiter = ',')]
        taus: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Render an exported CSV raster (with its meta sidecar) to a pixmap.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "abs")]
        quantity: Quantity,
        /// 0, 1, 2 or `norm`.
        #[arg(long, default_value = "0", value_parser = parse_component)]
        component: ComponentArg,
        #[arg(long, value_enum, default_value = "linear")]
        normalization: Normalization,
    },
    /// Reproduce the figure presets.
    Figures {
        #[arg(long, value_enum, default_value = "all")]
        which: Which,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Fig1,
    Fig2,
    Fig4,
    All,
}

#[derive(Clone, Copy, Debug)]
struct ComponentArg(Option<usize>);

fn parse_component(s: &str) -> Result<ComponentArg, String> {
    match s {
        "norm" => Ok(ComponentArg(None)),
        "0" | "1" | "2" => Ok(ComponentArg(Some(s.parse().expect("digit")))),
        _ => Err(format!("expected 0, 1, 2 or norm, got `{s}`")),
    }
}

#[derive(clap::Args)]
struct Overrides {
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    quantity: Option<Vec<Quantity>>,
    #[arg(long, value_enum)]
    normalization: Option<Normalization>,
    #[arg(long, value_parser = parse_component)]
    component: Option<ComponentArg>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) -> anyhow::Result<()> {
        if let Some(t) = self.tau {
            cfg.beam.set_tau(t)?;
        }
        if let Some(l) = self.lambda {
            cfg.beam.set_lambda(l)?;
        }
        if let Some(r) = self.rho {
            cfg.beam.set_rho(r)?;
        }
        if let Some(w) = self.omega {
            cfg.beam.medium_mut().omega = w;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(q) = &self.quantity {
            cfg.quantities = q.clone();
        }
        if let Some(n) = self.normalization {
            cfg.normalization = n;
        }
        if let Some(c) = self.component {
            cfg.component = c.0;
        }
        Ok(())
    }
}

/// Usage errors exit with 2, failed checks with 1.
enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
    Checks,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Run(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("usage error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Eval { config, out, name, overrides } => {
            let mut cfg = RunConfig::load(&config).map_err(Failure::Usage)?;
            overrides.apply(&mut cfg).map_err(Failure::Usage)?;
            cfg.beam.build().map_err(Failure::Usage)?;
            cfg.grid.validate().map_err(|e| Failure::Usage(e.into()))?;
            let name = name.unwrap_or_else(|| config.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned()));
            println!("seed = {}", cfg.seed);
            println!("config = {}", cfg.to_json());
            let (raster, files) = run_config(&cfg, &name, &[], &out)?;
            println!("masked = {}, missing = {}", raster.masked, raster.missing);
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Verify { suite, seed } => {
            if suite.is_empty() {
                return Err(Failure::Usage(anyhow!(
                    "pass at least one --suite ({})",
                    Suite::ALL.map(Suite::name).join(", ")
                )));
            }
            println!("seed = {seed}");
            let mut ok = true;
            for s in suite {
                let rep = run_suite(s, seed)?;
                print!("{rep}");
                ok &= rep.passed();
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Command::Sweep { beam, taus, seed } => {
            let taus = taus.unwrap_or_else(|| beam.default_taus().to_vec());
            println!("seed = {seed}");
            println!("beam = {beam:?}, taus = {taus:?}");
            let st = sweep(beam, &taus, seed).map_err(Failure::Usage)?;
            print!("{}", format_study(&st));
            Ok(())
        }
        Command::Render { input, out, quantity, component, normalization } => render_csv(&input, &out, quantity, component.0, normalization),
        Command::Figures { which, out, seed } => {
            let ids: Vec<FigureId> = match which {
                Which::Fig1 => vec![FigureId::Fig1],
                Which::Fig2 => vec![FigureId::Fig2],
                Which::Fig4 => vec![FigureId::Fig4],
                Which::All => FigureId::ALL.to_vec(),
            };
            println!("seed = {seed}");
            let mut ok = true;
            for id in ids {
                for p in presets(id, seed) {
                    println!("{} config = {}", p.name, serde_json::to_string(&p.config).map_err(anyhow::Error::from)?);
                }
                let rep = figure(id, &out, seed)?;
                for f in &rep.files {
                    println!("wrote {}", f.display());
                }
                for m in &rep.metrics {
                    println!("  [{}] {}: {:.6e} ({})", if m.passed { "pass" } else { "FAIL" }, m.name, m.value, m.bound);
                }
                ok &= rep.passed();
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
    }
}

fn render_csv(input: &Path, out: &Path, q: Quantity, component: Option<usize>, n: Normalization) -> Result<(), Failure> {
    let mp = meta_path(input);
    let meta: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(&mp).with_context(|| format!("cannot read {}", mp.display())).map_err(Failure::Usage)?,
    )
    .with_context(|| format!("cannot parse {}", mp.display()))
    .map_err(Failure::Usage)?;
    let spec: GridSpec = serde_json::from_value(meta["grid"].clone())
        .with_context(|| format!("{} has no valid `grid`", mp.display()))
        .map_err(Failure::Usage)?;
    let rows = read_csv(input).map_err(Failure::Usage)?;
    let mut raster = raster_from_rows(&rows, spec).map_err(Failure::Usage)?;
    raster.meta = meta["provenance"].clone();
    println!("input = {}", input.display());
    println!("provenance = {}", raster.meta);
    let img = render(&raster, q, component, n).map_err(|e| Failure::Usage(e.into()))?;
    write_pixmap(&img, &raster, component, out, &[])?;
    println!("wrote {}", out.display());
    Ok(())
}
