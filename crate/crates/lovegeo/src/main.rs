use std::process::ExitCode;

use clap::Parser;
use lovegeo::commands::{run, Command};

/// Numerical geometry of null 2k-mean-curvature hypersurfaces.
#[derive(Debug, Parser)]
#[command(name = "lovegeo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_out = std::env::var_os("LOVEGEO_OUT").map(Into::into);
    match run(&cli.command, env_out) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            for v in report.verdicts.iter().filter(|v| !v.pass) {
                eprintln!("check {} failed: value {:e}, tolerance {:e}", v.check, v.value, v.tolerance);
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("lovegeo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
