use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use akfit::empirical::read_samples;
use akfit::experiment::{l1_error, run_sweep_with, DensitySpec, MixtureDensity, SweepConfig};
use akfit::merging::discrete_merging;
use akfit::{build_empirical, construct_histogram, general_merging, Error, Interval, MergeConfig};
use akfit::{PiecewiseHypothesis, PolynomialOracles, Solver};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "akfit", version, about = "Piecewise polynomial density estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a hypothesis to a file of samples (whitespace or newline separated).
    Fit(FitArgs),
    /// Run an estimation sweep described by a TOML or JSON file and write CSV.
    Sweep {
        config: PathBuf,
        /// CSV destination; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// L1 distance between a hypothesis and a known density.
    Eval {
        hypothesis: PathBuf,
        /// A named density (gmm, beta, gamma, uniform) or a JSON/TOML mixture file.
        #[arg(short, long)]
        density: String,
    },
}

#[derive(clap::Args)]
struct FitArgs {
    samples: PathBuf,
    #[arg(long, default_value_t = 80)]
    pieces: usize,
    #[arg(long, default_value_t = 0)]
    degree: usize,
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    /// Defaults to the accuracy the sample size supports.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Fit a pmf on 1..=N instead of a density.
    #[arg(long, value_name = "N")]
    discrete: Option<i64>,
    /// Domain bounds; the sampled range when absent.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    domain: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = SolverArg::CuttingLp)]
    solver: SolverArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Ellipsoid,
    CuttingLp,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Ellipsoid => Solver::Ellipsoid,
            SolverArg::CuttingLp => Solver::CuttingLp,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.command {
        Command::Fit(args) => fit(args),
        Command::Sweep { config, output } => sweep(&config, output.as_deref()),
        Command::Eval { hypothesis, density } => eval(&hypothesis, &density),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = matches!(e.downcast_ref::<Error>(), Some(Error::Config(_) | Error::Parse(_)));
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn fit(args: FitArgs) -> Result<()> {
    let samples = read_samples(&args.samples).with_context(|| format!("reading {}", args.samples.display()))?;
    let mut cfg = MergeConfig::for_pieces(args.pieces, args.alpha, args.degree);
    cfg.delta = args.delta;
    cfg.epsilon = args.epsilon.unwrap_or_else(|| cfg.epsilon_for(samples.len().max(1)).min(0.5));
    cfg.validate()?;
    let domain = match &args.domain {
        Some(b) => Interval::closed(b[0], b[1]),
        None => {
            let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Interval::closed(lo, hi)
        }
    };
    let f = build_empirical(&samples, domain)?;
    let json = if let Some(n_max) = args.discrete {
        if n_max < 1 {
            return Err(Error::Config("--discrete needs N >= 1".into()).into());
        }
        let (h, _) = discrete_merging(&f, n_max, &cfg, args.solver.into())?;
        serde_json::to_string_pretty(&h)?
    } else if args.degree == 0 {
        construct_histogram(&f, &cfg)?.to_json()
    } else {
        general_merging(&f, &cfg, &PolynomialOracles::new(args.degree, args.solver.into()))?.to_json()
    };
    write_out(args.output.as_deref(), &(json + "\n"))
}

fn sweep(config: &Path, output: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = SweepConfig::parse(&text)?;
    let mut sink: Box<dyn Write> = match output {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut out = csv::Writer::from_writer(&mut sink);
    let mut failed = None;
    run_sweep_with(&cfg, |row| {
        if failed.is_none() {
            failed = out.serialize(row).and_then(|_| Ok(out.flush()?)).err();
        }
    })?;
    match failed {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn density(spec: &str) -> Result<MixtureDensity> {
    if let Ok(d) = MixtureDensity::named(spec) {
        return Ok(d);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Error::Config(format!("{spec} is neither a known density nor a file")).into());
    }
    let text = fs::read_to_string(path)?;
    let parsed: std::result::Result<DensitySpec, String> = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    Ok(parsed.map_err(Error::Config)?.resolve()?)
}

fn eval(hypothesis: &Path, spec: &str) -> Result<()> {
    let text = fs::read_to_string(hypothesis).with_context(|| format!("reading {}", hypothesis.display()))?;
    let h = PiecewiseHypothesis::from_json(&text)?;
    let err = l1_error(&h, &density(spec)?)?;
    println!("{err}");
    Ok(())
}
