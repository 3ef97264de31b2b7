use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use scalemix_cli::{run_args, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let start = Instant::now();
    match run_args(&args) {
        Ok(report) => {
            // Write errors are ignored so a closed pipe does not panic.
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", report.message);
            for f in &report.files {
                let _ = writeln!(out, "wrote {f}");
            }
            eprintln!("elapsed {:.2}s", start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::FAILURE
        }
    }
}
