//! The `nfr` command line.
//!
//! Exit codes: 0 success, 1 validation or domain error, 2 usage error,
//! 3 I/O error. Diagnostics go to stderr, artifacts to stdout unless `-o`
//! names a file.

pub mod commands;
pub mod interactive;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Domain = 1,
    Usage = 2,
    Io = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// A failed command: what to print on stderr and how to exit.
#[derive(Debug)]
pub struct Failure {
    pub status: ExitStatus,
    pub lines: Vec<String>,
}

impl Failure {
    pub fn new(status: ExitStatus, line: impl Into<String>) -> Self {
        Self {
            status,
            lines: vec![line.into()],
        }
    }

    pub fn domain(line: impl Into<String>) -> Self {
        Self::new(ExitStatus::Domain, line)
    }

    pub fn usage(line: impl Into<String>) -> Self {
        Self::new(ExitStatus::Usage, line)
    }

    pub fn io(path: &std::path::Path, e: &std::io::Error) -> Self {
        Self::new(ExitStatus::Io, format!("error io {}: {e}", path.display()))
    }
}

#[derive(Debug, Parser)]
#[command(name = "nfr", version, about = "Elicit, categorize and report non-functional requirements over use-case models")]
pub struct Cli {
    /// Category list, one name per line, replacing the default taxonomy
    #[arg(long, global = true, value_name = "FILE")]
    pub taxonomy: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a model and print its diagnostics
    Validate { model: PathBuf },
    /// Record answers into a session file (created when missing)
    Elicit {
        model: PathBuf,
        #[arg(long)]
        session: PathBuf,
        /// CSV with columns question,answer,category[,actor]
        #[arg(long)]
        answers: Option<PathBuf>,
        /// Prompt for each pending question on the terminal
        #[arg(long)]
        interactive: bool,
    },
    /// Render the elicitation table, checklist or coverage report
    Report {
        kind: ReportArg,
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        format: FormatArg,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Emit the use-case diagram as DOT
    Diagram {
        model: PathBuf,
        #[arg(long)]
        session: Option<PathBuf>,
        #[arg(long)]
        view: ViewArg,
        #[arg(long, default_value = "LR")]
        rankdir: RankDirArg,
        /// Leave out questions that have no answer (categorized view)
        #[arg(long)]
        hide_unanswered: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Run the HTTP API
    Serve {
        #[arg(long, default_value_t = 7878)]
        port: u16,
        /// Data directory; NFR_DATA_DIR takes precedence when set
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReportArg {
    Table,
    Checklist,
    Coverage,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Md,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ViewArg {
    Questions,
    Categorized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RankDirArg {
    #[value(name = "LR")]
    Lr,
    #[value(name = "TB")]
    Tb,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_are_clap_errors() {
        for args in [
            &["nfr", "report", "pie", "--session", "s.json", "--format", "md"][..],
            &["nfr", "report", "table", "--session", "s.json", "--format", "pdf"],
            &["nfr", "diagram", "m.ucm"],
        ] {
            let err = Cli::try_parse_from(args).unwrap_err();
            assert_eq!(err.exit_code(), ExitStatus::Usage.code());
        }
    }

    #[test]
    fn taxonomy_flag_is_global() {
        let cli = Cli::try_parse_from(["nfr", "validate", "m.ucm", "--taxonomy", "t.txt"]).unwrap();
        assert_eq!(cli.taxonomy, Some(PathBuf::from("t.txt")));
    }

    #[test]
    fn io_failures_name_the_path() {
        let err = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        let f = Failure::io(std::path::Path::new("a/b.ucm"), &err);
        assert_eq!(f.status.code(), 3);
        assert_eq!(f.lines, ["error io a/b.ucm: gone"]);
    }
}
