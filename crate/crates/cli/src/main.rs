//! divlab: batch front end for the divisor-error-term laboratory.
//!
//! One experiment kind per invocation; numeric parameters map one-to-one
//! onto library operation arguments. Reports go to stdout, or to `--out`
//! as CSV/JSON. Exit codes: 0 success, 2 invalid parameters, 3 resource
//! budget exceeded, 4 numerical non-convergence, 5 insufficient data.

use clap::Parser;
use divlab_core::experiment::{report, run, ExperimentConfig, ExperimentKind, OutputFormat};

#[derive(Parser, Debug)]
#[command(
    name = "divlab",
    version,
    about = "Numerical laboratory for the divisor-sum error term",
    after_help = "Kinds: delta, diff, voronoi, moment, cramer, jutila, maxdiff, signs, \
                  persist, largeval, tsang, omega.\n\
                  The sieve window memory cap (MB) comes from DIVLAB_MEM_BUDGET_MB (default 512)."
)]
struct Cli {
    /// Experiment kind to run.
    kind: String,

    /// Base point / left endpoint T (grid kinds sweep decades 10^5..=T).
    #[arg(long = "t")]
    t: Option<f64>,

    /// Window length H (the range is [T, T+H]).
    #[arg(long = "h-len")]
    h_len: Option<f64>,

    /// Shift length U.
    #[arg(long = "u")]
    u: Option<f64>,

    /// Truncation length N for series approximations.
    #[arg(long = "n-terms")]
    n_terms: Option<u64>,

    /// Moment exponent k.
    #[arg(long = "k")]
    k: Option<f64>,

    /// Window exponent beta (H = T^beta).
    #[arg(long = "beta")]
    beta: Option<f64>,

    /// Threshold coefficient c (thresholds scale as c*T^{1/4}).
    #[arg(long = "c")]
    c: Option<f64>,

    /// Minimum interval length L.
    #[arg(long = "min-len")]
    min_len: Option<f64>,

    /// Large-value threshold V.
    #[arg(long = "v-thresh")]
    v_thresh: Option<f64>,

    /// Margin delta for the omega detector.
    #[arg(long = "delta")]
    delta: Option<f64>,

    /// Epsilon parameter for comparison bounds.
    #[arg(long = "eps")]
    eps: Option<f64>,

    /// Sampling density per unit length.
    #[arg(long = "samples-per-unit")]
    samples_per_unit: Option<u32>,

    /// Seed for deterministic sampling.
    #[arg(long = "seed", default_value_t = 42)]
    seed: u64,

    /// Worker thread count (results are identical for any value).
    #[arg(long = "workers", default_value_t = 1)]
    workers: usize,

    /// Output file path (stdout when omitted).
    #[arg(long = "out")]
    out: Option<String>,

    /// Output format: csv or json.
    #[arg(long = "format", default_value = "csv")]
    format: String,
}

fn build_config(cli: &Cli) -> divlab_core::Result<ExperimentConfig> {
    let kind: ExperimentKind = cli.kind.parse()?;
    let format: OutputFormat = cli.format.parse()?;
    let mut config = ExperimentConfig::new(kind);
    config.t = cli.t;
    config.h = cli.h_len;
    config.u = cli.u;
    config.n_terms = cli.n_terms;
    config.k = cli.k;
    config.beta = cli.beta;
    config.c = cli.c;
    config.min_len = cli.min_len;
    config.v_thresh = cli.v_thresh;
    config.delta = cli.delta;
    config.epsilon = cli.eps;
    config.samples_per_unit = cli.samples_per_unit;
    config.seed = cli.seed;
    config.worker_count = cli.workers;
    config.out = cli.out.clone();
    config.format = format;
    Ok(config)
}

fn main() {
    let cli = Cli::parse();
    let code = match build_config(&cli).and_then(|config| {
        let rpt = run(&config)?;
        if config.out.is_none() {
            let rendered = report::render_string(&rpt)?;
            print!("{rendered}");
        }
        Ok(())
    }) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("divlab: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
