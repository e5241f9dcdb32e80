//! `isorearr`: command-line driver for the rearrangement, transform and
//! Bessel-flow checks. Every run writes `manifest.json` to the output
//! directory; the exit status is 0 iff every verdict passed, 1 if a verdict
//! failed and 2 on configuration or runtime errors.

mod commands;
mod run;
mod settings;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use run::{output_dir, Run};
use settings::Settings;

#[derive(Parser, Debug)]
#[command(
    name = "isorearr",
    version,
    about = "Rearrangement inequalities and the Bessel-flow Santalo harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Base seed for every random instance.
    #[arg(long)]
    seed: Option<u64>,
    /// Scale instance counts, grid sizes and budgets by 1/8.
    #[arg(long)]
    fast: bool,
    /// Output directory (overrides ISOREARR_OUT and the config file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` file whose keys are the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Omit the generation-time comment from SVG plots.
    #[arg(long)]
    no_timestamp: bool,
    /// Run batch loops on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Increasing rearrangement of a random convex function, with level-set masses.
    Rearrange {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: commands::RearrangeArgs,
    },
    /// Level-set comparison of inf-convolutions of f and f_*.
    Infconv {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: commands::InfconvArgs,
    },
    /// Hopf-Lax sublevel comparison of f and f_* at one or more times.
    HjCompare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: commands::HopfLaxArgs,
    },
    /// Exact Legendre conjugate of a radial profile.
    Legendre {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: commands::RadialArgs,
    },
    /// Exact polar of a radial profile, checked against a scan.
    Polar {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: commands::RadialArgs,
    },
    /// Level-set comparison of a transform of f and of f_* on a planar grid.
    TransformCompare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: commands::TransformArgs,
    },
    /// Bessel flow of a radial profile: mass, alpha(t) and the residual.
    SantaloFlow {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: commands::FlowArgs,
    },
    /// Search for a radial maximizer of the product functional.
    Extremize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        args: commands::ExtremizeArgs,
    },
    /// Run all nine acceptance criteria.
    VerifyAll {
        #[command(flatten)]
        common: Common,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(dispatch(cli.command));
}

fn dispatch(command: Command) -> i32 {
    let (name, common) = match &command {
        Command::Rearrange { common, .. } => ("rearrange", common),
        Command::Infconv { common, .. } => ("infconv", common),
        Command::HjCompare { common, .. } => ("hj-compare", common),
        Command::Legendre { common, .. } => ("legendre", common),
        Command::Polar { common, .. } => ("polar", common),
        Command::TransformCompare { common, .. } => ("transform-compare", common),
        Command::SantaloFlow { common, .. } => ("santalo-flow", common),
        Command::Extremize { common, .. } => ("extremize", common),
        Command::VerifyAll { common } => ("verify-all", common),
    };
    let common = common.clone();
    let (mut settings, load_error) = match Settings::load(common.config.as_deref()) {
        Ok(s) => (s, None),
        Err(e) => (Settings::default(), Some(e)),
    };
    let out_cfg = settings
        .get::<String>("out", None, String::new())
        .ok()
        .filter(|s| !s.is_empty());
    let dir = output_dir(common.out.clone(), out_cfg);
    let no_ts = settings.switch("no-timestamp", common.no_timestamp);
    let mut run = Run::new(dir, !matches!(no_ts, Ok(true)));
    let outcome = match (load_error, no_ts) {
        (Some(e), _) => Err(e),
        (None, Err(e)) => Err(e),
        (None, Ok(_)) => commands::execute(command, &common, &mut settings, &mut run),
    };
    let mut config = settings.resolved().clone();
    config.insert("out".into(), run.dir().display().to_string());
    run.finish(name, config, outcome)
}
