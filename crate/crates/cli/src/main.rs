use std::process::ExitCode;

use clap::Parser;

use regcorr_cli::{error_json, execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            for line in &out.trace {
                println!("{}", line);
            }
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("report serialises"));
            } else {
                print!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let body = error_json(&e);
            if cli.json {
                println!("{}", body);
            } else {
                eprintln!("{}", body);
            }
            ExitCode::from(2)
        }
    }
}
