//! `sqdist`: determinant, inverse and identity checks for squared distance
//! matrices of matrix-weighted trees.
//!
//! Exit status is 0 on success, 1 when a check fails or a formula does not
//! apply to the input, and 2 on usage, I/O or parse errors.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sqdist", version, about = "Squared distance matrices of matrix-weighted trees")]
pub struct Cli {
    /// Emit machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form determinant with its factor breakdown and the LU value.
    Det { file: PathBuf },
    /// Closed-form inverse; `--check` compares it against LU.
    Inv {
        file: PathBuf,
        #[arg(long)]
        check: bool,
    },
    /// Run every identity and oracle check on one tree.
    Verify { file: PathBuf },
    /// Print one of the derived matrices.
    Dump {
        file: PathBuf,
        #[arg(long, value_enum)]
        matrix: MatrixKind,
        /// Print `Q ⊗ I_s` and `H ⊗ I_s` instead of `Q` and `H`.
        #[arg(long)]
        lifted: bool,
    },
    /// Seeded random campaign over every check.
    Fuzz(FuzzArgs),
    /// Print a bundled example tree file.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    #[value(name = "D")]
    D,
    #[value(name = "delta")]
    Delta,
    #[value(name = "L")]
    L,
    #[value(name = "Q")]
    Q,
    #[value(name = "H")]
    H,
    #[value(name = "F")]
    F,
    #[value(name = "beta")]
    Beta,
    #[value(name = "eta")]
    Eta,
    /// The tree itself in canonical file form.
    #[value(name = "tree")]
    Tree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    T1,
    T2,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Vertex count range `A:B` (inclusive) or a single value.
    #[arg(long = "n", default_value = "3:12", value_parser = parse_range)]
    pub n_range: (usize, usize),
    /// Weight order range `A:B` (inclusive) or a single value.
    #[arg(long = "s", default_value = "1:3", value_parser = parse_range)]
    pub s_range: (usize, usize),
    /// diagonal, commuting or general.
    #[arg(long, default_value = "diagonal")]
    pub mode: sqdist::WeightMode,
    /// uniform, no-deg2 or path.
    #[arg(long, default_value = "uniform")]
    pub topology: sqdist::TopologyKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rebuild and check a single trial instead of running the campaign.
    #[arg(long)]
    pub replay: Option<usize>,
    #[arg(long)]
    pub tol_identity: Option<f64>,
    #[arg(long)]
    pub tol_det: Option<f64>,
    #[arg(long)]
    pub tol_inverse: Option<f64>,
    #[arg(long)]
    pub tol_pivot: Option<f64>,
}

fn parse_range(text: &str) -> Result<(usize, usize), String> {
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("'{s}': {e}"));
    match text.split_once(':') {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b)?);
            if a > b {
                return Err(format!("empty range {a}:{b}"));
            }
            Ok((a, b))
        }
        None => {
            let a = parse(text)?;
            Ok((a, a))
        }
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
    match commands::run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3:12"), Ok((3, 12)));
        assert_eq!(parse_range("4"), Ok((4, 4)));
        assert!(parse_range("5:4").is_err());
        assert!(parse_range("a:4").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
