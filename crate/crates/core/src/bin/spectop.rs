use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};
use spectop::harness::{run, ExperimentConfig, ExperimentKind, PSpec};

/// Reproducible spectral-gap experiments on random graphs and complexes.
#[derive(Debug, Parser)]
#[command(version, about)]
#[command(group(ArgGroup::new("prob").args(["p", "coeff", "c"])))]
struct Cli {
    /// graph-gap, below-threshold, connectivity-gap, link-audit,
    /// poisson-betti, cohomology-hit, t-hit, certify or tail-check
    #[arg(value_parser = parse_kind)]
    kind: ExperimentKind,
    /// Number of vertices.
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Dimension of the complex (ignored by graph experiments).
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Literal edge or face probability.
    #[arg(long)]
    p: Option<f64>,
    /// p = COEFF · ln n / n.
    #[arg(long)]
    coeff: Option<f64>,
    /// p = (d · ln n + C) / n.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Master seed; trial seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fuzz divisor.
    #[arg(long = "M", default_value_t = 20.0)]
    m: f64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Number of evenly spaced checkpoints for t-hit.
    #[arg(long, default_value_t = 20)]
    grid: usize,
    /// Edge list to certify instead of sampling.
    #[arg(long)]
    import: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<ExperimentKind, String> {
    ExperimentKind::parse(s).ok_or_else(|| {
        let names: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown kind {s:?}; expected one of {}", names.join(", "))
    })
}

impl Cli {
    fn config(&self) -> Result<ExperimentConfig, String> {
        let p = match (self.p, self.coeff, self.c) {
            (Some(p), _, _) => PSpec::Literal { p },
            (_, Some(coefficient), _) => PSpec::Coefficient { coefficient },
            (_, _, Some(c)) => PSpec::Shift { c },
            _ => match self.kind {
                ExperimentKind::Certify if self.import.is_some() => PSpec::MeanDegree,
                ExperimentKind::PoissonBetti => PSpec::Shift { c: 0.0 },
                // Processes run until they hit; p only labels the end density.
                ExperimentKind::TailCheck
                | ExperimentKind::ConnectivityGap
                | ExperimentKind::CohomologyHit
                | ExperimentKind::THit => PSpec::Literal { p: 1.0 },
                _ => return Err("one of --p, --coeff or --c is required".into()),
            },
        };
        let mut config = ExperimentConfig::new(self.kind, self.n, &self.out);
        config.d = self.d;
        config.p = p;
        config.trials = self.trials;
        config.master_seed = self.seed;
        config.m = self.m;
        config.grid_points = self.grid;
        config.import = self.import.clone();
        Ok(config)
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 1 like every other error; help and version
    // still exit 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match cli.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&config) {
        Ok(out) => {
            println!(
                "{}: {} trial(s) written to {}",
                config.kind,
                out.records.len(),
                config.out.display()
            );
            match out.passed() {
                Some(false) => {
                    println!("check FAILED");
                    ExitCode::from(2)
                }
                Some(true) => {
                    println!("check passed");
                    ExitCode::SUCCESS
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
