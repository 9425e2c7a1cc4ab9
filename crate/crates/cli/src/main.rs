mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use xlate_core::Error;

#[derive(Debug, Parser)]
#[command(name = "xlate", version, about = "Translate propositions between languages with differing awareness")]
pub struct Cli {
    /// Cross-check results against the brute-force oracle.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Worker threads for the parallel checks.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Largest number of elementary propositions per language.
    #[arg(long, global = true, value_name = "N")]
    pub max_atoms: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Include wall-clock timing in JSON reports.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct Inputs {
    /// Directory holding language1.lang, language2.lang and a translation
    /// or implication file.
    #[arg(long, value_name = "DIR", conflicts_with_all = ["lang1", "lang2", "translation", "implication"])]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "lang2")]
    pub lang1: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "lang1")]
    pub lang2: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub translation: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub implication: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckMode {
    Translation,
    Implication,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DotTarget {
    Algebra1,
    Algebra2,
    Cross,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the translation or implication axioms.
    Check {
        #[command(flatten)]
        inputs: Inputs,
        /// Which axiom family to check; defaults to what the inputs provide.
        #[arg(long, value_enum)]
        mode: Option<CheckMode>,
    },
    /// Translate a proposition into the other language.
    Translate {
        #[command(flatten)]
        inputs: Inputs,
        /// Source language.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        from: u8,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// A formula of the source language.
        #[arg(allow_hyphen_values = true)]
        formula: String,
    },
    /// Build the joint state space.
    Joint {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Perfect translations, fixed points and the common language.
    Common {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Compare the awareness of the two languages.
    Classify {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Probability bounds for a proposition seen from the other language.
    Bounds {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        from: u8,
        /// JSON object mapping state indices to weights.
        #[arg(long, value_name = "FILE", conflicts_with = "uniform")]
        probability: Option<PathBuf>,
        /// Use the uniform distribution over states.
        #[arg(long)]
        uniform: bool,
        #[arg(allow_hyphen_values = true)]
        formula: String,
    },
    /// Graphviz rendering of a lattice or of the cross relation.
    ExportDot {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value = "cross")]
        what: DotTarget,
        /// Draw every cross pair instead of the transitive reduction.
        #[arg(long)]
        closure: bool,
    },
}

/// Failures that decide the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or usage: exit 2.
    Usage(anyhow::Error),
    /// Axioms fail or results disagree: exit 1.
    Unsound(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        let unsound = matches!(
            e.downcast_ref::<Error>(),
            Some(
                Error::Inconsistent { .. }
                    | Error::CharacterizationMismatch { .. }
                    | Error::MalformedStateSpace(_)
                    | Error::DegenerateCommonLanguage
            )
        );
        if unsound {
            Failure::Unsound(e)
        } else {
            Failure::Usage(e)
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::from(anyhow::Error::new(e))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Unsound(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
