mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Context;
use output::{write_file, CliError, Outcome};

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let ctx = Context::from_env(cli.seed)?;
    match &cli.command {
        Command::ValidatePot(a) => commands::validate_pot(&ctx, a),
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Ladder(a) => commands::ladder(&ctx, a),
        Command::Search(a) => commands::search(&ctx, a),
        Command::Bounds(a) => commands::bounds(&ctx, a),
        Command::CertifyPath(a) => commands::certify_path(&ctx, a),
        Command::Table1(a) => commands::table1(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if code == 0 {
                let _ = e.print();
            } else {
                let text = e.render().to_string();
                let first = text.lines().next().unwrap_or("error: invalid arguments");
                eprintln!("{first}");
            }
            return ExitCode::from(code);
        }
    };
    let outcome = run(&cli).and_then(|o| {
        match &cli.out {
            Some(path) => write_file(path, &o.text, "--out")?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(o.text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError::runtime(format!("cannot write standard output: {e}")))?;
            }
        }
        Ok(o)
    });
    match outcome {
        Ok(o) if o.violation => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
