//! `mapt`: validate, explore and model-check MAPT models from the shell.
//!
//! Exit status is 0 on success or a true verdict, 1 on a false verdict or a
//! failed validation, 2 on any error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mapt_core::mc::{Order, Strategy};
use mapt_core::Semantics;

#[derive(Parser)]
#[command(name = "mapt", version, about = "On-the-fly model checker for multi-agent timed periodic tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON record per line.
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SemanticsArg {
    Original,
    Accelerated,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Original => Semantics::Original,
            SemanticsArg::Accelerated => Semantics::Accelerated,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Width,
    Layered,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Width => Strategy::Width,
            StrategyArg::Layered => Strategy::Layered,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum OrderArg {
    Ascending,
    Descending,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Ascending => Order::Ascending,
            OrderArg::Descending => Order::Descending,
        }
    }
}

#[derive(Args)]
pub struct ModelArgs {
    /// Model file, or `fixture:NAME` for a bundled model (ex1, intervals, toy-vehicles).
    pub model: String,

    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "accelerated")]
    pub semantics: SemanticsArg,

    /// Exploration bound `name=value`; states where every bounded component
    /// reached its value are final. Repeatable.
    #[arg(long = "bound", value_name = "NAME=VALUE")]
    pub bounds: Vec<String>,

    /// Maximum number of expanded states.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check strong liveness and acyclicity.
    Validate {
        #[command(flatten)]
        model: ModelArgs,

        /// Accept models without any X component.
        #[arg(long)]
        allow_missing_x: bool,
    },
    /// Enumerate the bounded state space.
    Explore {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,

        /// Write the state graph in DOT format.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,

        /// Refuse DOT export above this many states.
        #[arg(long, default_value_t = 10_000)]
        dot_cap: usize,
    },
    /// List the coherent cuts of one period.
    Cuts {
        #[command(flatten)]
        model: ModelArgs,

        /// Treat interval endpoints as forbidden too.
        #[arg(long)]
        exclude_endpoints: bool,

        /// Print only the cut chosen automatically for layered searches.
        #[arg(long)]
        select: bool,
    },
    /// Evaluate a CTL query.
    Check {
        #[command(flatten)]
        model: ModelArgs,

        /// Query such as `EF x > 3`, `AG !at(A1, l2)` or `p --> q`.
        query: String,

        #[command(flatten)]
        run: RunArgs,

        #[arg(long, value_enum, default_value = "layered")]
        strategy: StrategyArg,

        /// Heuristic `name:arg,...` (distance, estimated_travel_time, time_to_overtake).
        #[arg(long, value_name = "SPEC")]
        heuristic: Option<String>,

        /// Override the heuristic's default order.
        #[arg(long, value_enum)]
        order: Option<OrderArg>,

        /// Cut list file, or `auto`.
        #[arg(long, default_value = "auto")]
        cuts: String,

        /// Strong components used for clustering (comma separated); all
        /// others become weak.
        #[arg(long, value_delimiter = ',', conflicts_with = "weak")]
        strong: Option<Vec<String>>,

        /// Weak components (comma separated); all others become strong.
        #[arg(long, value_delimiter = ',')]
        weak: Option<Vec<String>>,
    },
    /// Track per-path (min, max) bounds of indicators up to final states.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,

        /// Indicator `expr` or `name=expr`; conditions count as 0/1. Repeatable.
        #[arg(long = "indicator", required = true)]
        indicators: Vec<String>,
    },
    /// Translate to a high-level Petri net and compare its token game with
    /// the semantics.
    PetriCheck {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { model, allow_missing_x } => commands::validate(&model, allow_missing_x),
        Command::Explore {
            model,
            run,
            dot,
            dot_cap,
        } => commands::explore(&model, &run, dot.as_deref(), dot_cap),
        Command::Cuts {
            model,
            exclude_endpoints,
            select,
        } => commands::cuts(&model, exclude_endpoints, select),
        Command::Check {
            model,
            query,
            run,
            strategy,
            heuristic,
            order,
            cuts,
            strong,
            weak,
        } => commands::check(
            &model,
            &run,
            &commands::CheckArgs {
                query,
                strategy: strategy.into(),
                heuristic,
                order: order.map(Into::into),
                cuts,
                strong,
                weak,
            },
        ),
        Command::Sweep { model, run, indicators } => commands::sweep(&model, &run, &indicators),
        Command::PetriCheck { model, run } => commands::petri_check(&model, &run),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
