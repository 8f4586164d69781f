//! Command-line front end: parse a run configuration from flags and/or a JSON
//! file, execute the check suite, emit the JSON report, and signal pass/fail
//! through the exit code (0 = all executed checks passed, 1 = some check
//! failed, 2 = configuration error).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use verifold::checks::{self, RunConfig, SpaceSpec};
use verifold::spaces;

#[derive(Parser, Debug)]
#[command(
    name = "verifold",
    about = "Runs residual checks for conformal Sasakian geometry over a catalog of spaces and immersions",
    after_help = "Exit codes: 0 all executed checks passed, 1 at least one check failed, 2 configuration error.\n\
                  VERIFY_THREADS caps check-job parallelism (0 or unset = auto)."
)]
struct Cli {
    /// Space spec `sasakian:n=<1|2|3>`, repeatable; combined with every --factor
    #[arg(long = "space")]
    spaces: Vec<String>,

    /// Conformal factor `const:c=..`, `linear_z:a=..`, `quad:c=..`,
    /// `linear_coord:i=..,a=..`; repeatable
    #[arg(long = "factor")]
    factors: Vec<String>,

    /// Catalog immersion id (see --list); repeatable
    #[arg(long = "immersion")]
    immersions: Vec<String>,

    /// Comma-separated check ids, or `all`
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,

    /// Sample points per check job
    #[arg(long)]
    samples: Option<usize>,

    /// Probe tuples per sample point
    #[arg(long)]
    probes: Option<usize>,

    /// Master seed for all sampling
    #[arg(long)]
    seed: Option<u64>,

    /// Pass/fail tolerance on relative residuals
    #[arg(long)]
    tol: Option<f64>,

    /// Write the JSON report here
    #[arg(long)]
    report: Option<PathBuf>,

    /// Base config as a JSON file (flags override its fields)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Scale phi by this factor on every space (fault injection)
    #[arg(long)]
    phi_scale: Option<f64>,

    /// Print the check registry and immersion catalog, then exit
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.list {
        println!("checks:");
        for id in checks::CHECK_IDS {
            println!("  {id}");
        }
        println!("immersions (with the model parameter n each requires):");
        for (id, n) in spaces::catalog_ids() {
            if n == 0 {
                println!("  {id} (any n)");
            } else {
                println!("  {id} (n = {n})");
            }
        }
        println!("factors: const:c=<v>  linear_z:a=<v>  quad:c=<v>  linear_coord:i=<idx>,a=<v>");
        return ExitCode::SUCCESS;
    }

    match run(&cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    let threads = std::env::var("VERIFY_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }

    let mut config: RunConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("malformed config: {e}"))?
        }
        None => RunConfig::default(),
    };

    // Flags override file/defaults.
    if !cli.spaces.is_empty() || !cli.factors.is_empty() {
        let models: Vec<usize> = if cli.spaces.is_empty() {
            config.spaces.iter().map(|s| s.n).collect()
        } else {
            cli.spaces
                .iter()
                .map(|s| parse_space(s))
                .collect::<Result<_, _>>()?
        };
        let factors: Vec<String> = if cli.factors.is_empty() {
            vec!["linear_z:a=0.3".to_string()]
        } else {
            cli.factors.clone()
        };
        config.spaces = models
            .iter()
            .flat_map(|&n| {
                factors.iter().map(move |f| SpaceSpec {
                    n,
                    factor: f.clone(),
                    phi_scale: 1.0,
                })
            })
            .collect();
    }
    if let Some(scale) = cli.phi_scale {
        for s in &mut config.spaces {
            s.phi_scale = scale;
        }
    }
    if !cli.immersions.is_empty() {
        config.immersions = cli.immersions.clone();
    }
    if !cli.checks.is_empty() {
        config.checks = cli.checks.clone();
    }
    if let Some(v) = cli.samples {
        config.samples = v;
    }
    if let Some(v) = cli.probes {
        config.probes = v;
    }
    if let Some(v) = cli.seed {
        config.seed = v;
    }
    if let Some(v) = cli.tol {
        config.tolerance = v;
    }

    let report = checks::run_suite(&config).map_err(|e| e.to_string())?;

    for c in &report.checks {
        let imm = c.immersion.as_deref().unwrap_or("-");
        let status = if !c.applicable {
            "not applicable"
        } else if c.pass {
            "pass"
        } else {
            "FAIL"
        };
        println!(
            "{:8} {:44} {:18} max {:9.2e} rel {:9.2e}  {status}",
            c.id, c.space, imm, c.max_residual, c.relative_residual
        );
        if let Some(reason) = &c.reason {
            println!("         ({reason})");
        }
    }

    if let Some(path) = &cli.report {
        std::fs::write(path, report.to_json())
            .map_err(|e| format!("cannot write report {}: {e}", path.display()))?;
    }

    let executed = report.checks.iter().filter(|c| c.applicable).count();
    let failed = report
        .checks
        .iter()
        .filter(|c| c.applicable && !c.pass)
        .count();
    println!(
        "{} checks executed, {} failed, {} not applicable",
        executed,
        failed,
        report.checks.len() - executed
    );
    Ok(report.all_passed())
}

fn parse_space(s: &str) -> Result<usize, String> {
    let rest = s
        .strip_prefix("sasakian:n=")
        .ok_or_else(|| format!("bad space spec `{s}` (expected sasakian:n=<1|2|3>)"))?;
    rest.parse::<usize>()
        .map_err(|_| format!("bad space spec `{s}`"))
}
