//! `opamp-screen`: simulate, analyze and screen TL074-class op-amps.
//!
//! Exit codes: 0 success or pass, 2 screening verdict other than pass,
//! 1 usage or data error.

mod analyze;
mod params;
mod report;
mod screen;
mod simulate;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use opamp_screen::dataio::{format_sig9, round_sig9};

#[derive(Parser)]
#[command(
    name = "opamp-screen",
    version,
    about = "Counterfeit op-amp screening toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate sweeps or transient captures from the behavioral model
    #[command(subcommand)]
    Simulate(simulate::SimulateCmd),
    /// Extract characteristics from sweep or waveform files
    #[command(subcommand)]
    Analyze(analyze::AnalyzeCmd),
    /// Fit supply-current thresholds or classify a part
    #[command(subcommand)]
    Screen(screen::ScreenCmd),
    /// Summarize a component database
    Report(report::ReportArgs),
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The part under test did not pass screening.
    Rejected,
}

/// Formats a report value: plain decimal for ordinary magnitudes,
/// exponent form otherwise, always at 9 significant digits.
pub fn num(x: f64) -> String {
    let r = round_sig9(x);
    if r == 0.0 {
        "0".to_string()
    } else if (1e-4..1e9).contains(&r.abs()) {
        r.to_string()
    } else {
        format_sig9(r)
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<Status> {
    match cli.command {
        Command::Simulate(cmd) => simulate::run(cmd, out),
        Command::Analyze(cmd) => analyze::run(cmd, out),
        Command::Screen(cmd) => screen::run(cmd, out),
        Command::Report(args) => report::run(args, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut stdout = std::io::stdout().lock();
    let result = run(cli, &mut stdout).and_then(|s| {
        stdout.flush()?;
        Ok(s)
    });
    match result {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Rejected) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(num(247_619.047_619), "247619.048");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-13.5), "-13.5");
        assert_eq!(num(7.02e-15), "7.02e-15");
        assert_eq!(num(5.2e9), "5.2e9");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
