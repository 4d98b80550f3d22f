//! Command-line front end: argument parsing, report rendering and exit codes.

pub mod commands;
pub mod output;
pub mod report;
pub mod sampling;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csbi_core::{LogBase, QuadOptions64};

use commands::{AnalyzeFlags, IdentityFlags, VerifyFlags, EXIT_INPUT};
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "csbi", version, about = "Complementary sensitivity Bode integrals of SISO feedback loops")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    Natural,
    #[value(name = "2")]
    Two,
}

impl From<BaseArg> for LogBase {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Natural => LogBase::Natural,
            BaseArg::Two => LogBase::Base2,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Open-loop transfer function, e.g. "-2*(s-1)/(s^2+3*s+2)".
    #[arg(allow_hyphen_values = true)]
    pub tf: String,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Distance below which a zero counts as lying on the stability boundary.
    #[arg(long, default_value_t = csbi_core::transfer_function::DEFAULT_BOUNDARY_TOL)]
    pub boundary_tol: f64,
    /// Report values in this base instead of the domain's own.
    #[arg(long, value_enum)]
    pub log_base: Option<BaseArg>,
    /// Remove near-coincident zero/pole pairs before analysis.
    #[arg(long)]
    pub cancel: bool,
}

impl CommonArgs {
    fn flags(&self) -> AnalyzeFlags {
        AnalyzeFlags { boundary_tol: self.boundary_tol, log_base: self.log_base.map(Into::into), cancel: self.cancel }
    }
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// Absolute tolerance of the quadrature oracle.
    #[arg(long = "tol", default_value_t = 1e-6)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 2_000_000)]
    pub max_evals: usize,
    /// Frequency separating the low- and high-frequency continuous segments.
    #[arg(long, default_value_t = 1.0)]
    pub split: f64,
    /// Integrate over the whole axis instead of folding by symmetry.
    #[arg(long)]
    pub full_axis: bool,
}

impl QuadArgs {
    fn options(&self) -> QuadOptions64 {
        QuadOptions64 {
            abs_tol: self.abs_tol,
            max_evaluations: self.max_evals,
            split_frequency: self.split,
            use_symmetry: !self.full_axis,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form integral, loop structure and closed-loop stability.
    Analyze(CommonArgs),
    /// Closed form checked against adaptive quadrature and cross-check formulas.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        quad: QuadArgs,
        /// Absolute agreement tolerance between closed form and quadrature.
        #[arg(long, default_value_t = 1e-3)]
        agree_tol: f64,
    },
    /// Seeded randomized check of the two primitive integral identities.
    Identities {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Use equal arguments in every two-argument case.
        #[arg(long)]
        equal_pair: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Parse and echo a transfer function with its structure.
    Parse {
        #[arg(allow_hyphen_values = true)]
        tf: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

/// Text written to stdout and stderr plus the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String, code: i32) -> Self {
        Outcome { stdout, stderr: String::new(), code }
    }

    fn error(e: commands::CliError) -> Self {
        Outcome { stdout: String::new(), stderr: output::render_error(&e), code: EXIT_INPUT }
    }
}

/// Runs one parsed invocation without touching the process streams.
pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Analyze(common) => match commands::cmd_analyze(&common.tf, &common.flags()) {
            Ok((r, code)) => Outcome::ok(output::render_analysis(&r, common.format), code),
            Err(e) => Outcome::error(e),
        },
        Command::Verify { common, quad, agree_tol } => {
            let flags = VerifyFlags { analyze: common.flags(), quad: quad.options(), agree_tol };
            match commands::cmd_verify(&common.tf, &flags) {
                Ok((r, code)) => Outcome::ok(output::render_analysis(&r, common.format), code),
                Err(e) => Outcome::error(e),
            }
        }
        Command::Identities { count, seed, tol, equal_pair, format } => {
            let flags = IdentityFlags { count, seed, equal_pair, quad: QuadOptions64::default().with_abs_tol(tol) };
            match commands::cmd_identities(&flags) {
                Ok((r, code)) => Outcome::ok(output::render_identities(&r, format), code),
                Err(e) => Outcome::error(e),
            }
        }
        Command::Parse { tf, format } => match commands::cmd_parse(&tf) {
            Ok(r) => Outcome::ok(output::render_parse(&r, format), 0),
            Err(e) => Outcome::error(e),
        },
    }
}
