mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orm2dlr_core::{TopMode, TranslateOptions};

/// Translate ORM2 conceptual schemas into DLR_ifd knowledge bases and
/// check both sides by bounded model search.
#[derive(Parser, Debug)]
#[command(name = "orm2dlr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a model; list its constructs by mapping rule.
    Check {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Translate a model into a knowledge base.
    Translate {
        path: PathBuf,
        #[command(flatten)]
        opts: TranslateFlags,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the knowledge base here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the translation report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Search a knowledge base for a finite model.
    Sat {
        kb: PathBuf,
        #[command(flatten)]
        search: SearchFlags,
        /// Require this concept to be nonempty.
        #[arg(long)]
        concept: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Check each object type of a model for a finite model of the
    /// translation in which it is nonempty.
    Classify {
        path: PathBuf,
        #[command(flatten)]
        opts: TranslateFlags,
        #[command(flatten)]
        search: SearchFlags,
        #[arg(long)]
        json: bool,
    },
    /// Compare bounded satisfiability of a model and of its translation.
    Crosscheck {
        path: PathBuf,
        #[command(flatten)]
        opts: TranslateFlags,
        #[command(flatten)]
        search: SearchFlags,
        #[arg(long)]
        json: bool,
    },
    /// List each construct with its mapping rule and axioms.
    Explain {
        path: PathBuf,
        #[command(flatten)]
        opts: TranslateFlags,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct TranslateFlags {
    /// Represent every stored fact type of arity ≥ 2 as a concept.
    #[arg(long)]
    reify: bool,
    /// Report untranslatable constructs instead of failing.
    #[arg(long)]
    partial: bool,
    /// Restrict frequency lower bounds to participating instances.
    #[arg(long)]
    fol_faithful: bool,
}

impl From<TranslateFlags> for TranslateOptions {
    fn from(f: TranslateFlags) -> Self {
        TranslateOptions { reify: f.reify, partial: f.partial, fol_faithful: f.fol_faithful }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Top {
    /// ⊤ₙ is all of Δⁿ.
    Full,
    /// ⊤ₙ ranges over supersets of the relations.
    Enum,
}

impl From<Top> for TopMode {
    fn from(t: Top) -> Self {
        match t {
            Top::Full => TopMode::FullProduct,
            Top::Enum => TopMode::Enumerated,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SearchFlags {
    #[arg(long, default_value_t = 3)]
    max_domain: usize,
    /// ⊤ semantics; `full` for sat, `enum` otherwise.
    #[arg(long, value_enum)]
    top: Option<Top>,
    /// Largest grounded instance before giving up; overrides ORM2DLR_CEILING.
    #[arg(long)]
    ceiling: Option<u64>,
}

/// Stable process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Diagnostics = 1,
    Rejected = 2,
    Ceiling = 3,
    Internal = 4,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap would exit 2, which is reserved for rejections
            return ExitCode::from(if e.use_stderr() { Status::Diagnostics as u8 } else { 0 });
        }
    };
    let status = commands::run(cli.command);
    ExitCode::from(status as u8)
}
