use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use vicious_cli::report::{render_json, ErrorBody};
use vicious_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            print!(
                "{}",
                render_json(&ErrorBody::new("usage", message.trim_end().to_string()))
            );
            return ExitCode::from(1);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(cli) {
        Ok(out) => {
            let _ = stdout.write_all(out.text.as_bytes());
            ExitCode::from(out.exit_code as u8)
        }
        Err(e) => {
            let _ = stdout.write_all(e.to_json().as_bytes());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
