use anyhow::Context;
use std::process::ExitCode;

use discrepancy_lab::cli;

fn main() -> anyhow::Result<ExitCode> {
    let cmd = match cli::parse(std::env::args().skip(1)) {
        Ok(cmd) => cmd,
        Err(e) => e.exit(),
    };
    let outcome = cli::execute(&cmd).with_context(|| format!("{} failed", cmd.subcommand_name()))?;
    print!("{}", outcome.stdout);
    for path in &outcome.artifacts {
        eprintln!("wrote {}", path.display());
    }
    Ok(if outcome.success { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
