//! `liftac`: derive products, run lifted analyses, check support of
//! variational assurance cases and regress them across model evolutions.
//!
//! Exit codes: 0 success, 2 malformed input, 3 negative outcome (a
//! violation, an unsupported case, or configurations to revise or recheck).

mod commands;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const GRAMMAR: &str = "\
Formulas: true, false, identifiers, !, &, |, =>, xor and parentheses.
Configurations: comma-separated feature names, e.g. `A,B`.
Queries: `label:L` or `prefix:P`.
Specs: `response TRIGGER => SAFE` or `after-action ACT forbid LABEL`.
Store directories hold one `MODEL@VERSION.json` file per model version.";

#[derive(Parser)]
#[command(name = "liftac", version, about, after_help = GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the product of a product-line model under one configuration.
    Derive {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: String,
    },
    /// List the configurations of a model's feature model or of a formula.
    Configs {
        #[arg(long, conflicts_with = "formula", required_unless_present = "formula")]
        model: Option<PathBuf>,
        #[arg(long)]
        formula: Option<String>,
        /// Feature alphabet for `--formula`; defaults to its variables.
        #[arg(long, value_delimiter = ',')]
        features: Vec<String>,
    },
    /// Check whether an assurance case is supported by its evidence.
    CheckSupport {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(
            long,
            conflicts_with = "all_configs",
            required_unless_present = "all_configs"
        )]
        config: Option<String>,
        #[arg(long)]
        all_configs: bool,
    },
    /// Develop one goal of an assurance case with a lifted template.
    Instantiate {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        template: String,
        /// Id of the goal to develop.
        #[arg(long)]
        node: String,
        /// Template input as JSON, or `@FILE`.
        #[arg(long)]
        input: String,
        #[arg(long, default_value = "S")]
        label: String,
    },
    /// Run a lifted state query.
    Query {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value = "true")]
        restrict: String,
    },
    /// Run a lifted property check.
    ModelCheck {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        spec: String,
        #[arg(long, default_value = "true")]
        restrict: String,
    },
    /// Compare two versions of a product-line model.
    Diff {
        #[arg(long)]
        old: PathBuf,
        #[arg(long)]
        new: PathBuf,
        #[arg(long, value_enum, default_value_t = DeltaArg::Exact)]
        mode: DeltaArg,
    },
    /// Graphviz rendering of an assurance case or a model.
    ExportDot {
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        ac: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Regress an assurance case across a model evolution.
    Regress(RegressArgs),
    /// Write a built-in example case as files.
    Fixture {
        #[arg(value_enum)]
        name: FixtureName,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct CaseArgs {
    /// Model store directory.
    #[arg(long)]
    store: PathBuf,
    /// Variational assurance case (JSON).
    #[arg(long)]
    ac: PathBuf,
    /// Evidence ledger (JSON); empty when omitted.
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// Product line the case ranges over, as MODEL@VERSION.
    #[arg(long)]
    product_line: Option<String>,
}

#[derive(Args)]
struct RegressArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// A model change MODEL:FROM:TO; its extent is computed by diffing.
    #[arg(long = "change", conflicts_with = "delta")]
    changes: Vec<String>,
    /// Precomputed evolution (JSON list of {model, from, to, delta}).
    #[arg(long)]
    delta: Option<PathBuf>,
    #[arg(long, conflicts_with = "approx_delta")]
    exact_delta: bool,
    #[arg(long)]
    approx_delta: bool,
    /// Treat the change as a feature-model evolution: new configurations
    /// are reported as revise, removed ones are dropped.
    #[arg(long)]
    variability: bool,
    #[arg(long, value_enum, default_value_t = RegistryArg::Reverify)]
    registry: RegistryArg,
    /// Also write the annotated case as DOT to this file.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeltaArg {
    Exact,
    Approx,
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegistryArg {
    /// Evidence of touched goals is rechecked.
    None,
    /// Analysis results are re-verified by rerunning the analysis.
    Reverify,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureName {
    XorLoop,
    Requirements,
    Alarm,
    AlarmNewState,
    AlarmFeatureC,
    AlarmNoop,
    Pump,
}

/// A command finished; `false` reports a negative outcome.
type Outcome = anyhow::Result<bool>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
