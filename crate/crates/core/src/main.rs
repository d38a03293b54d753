use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = semiqft::cli::parse_and_run(std::env::args_os());
    // Write errors such as a closed pipe are ignored.
    let mut out = std::io::stdout().lock();
    if let Some(doc) = &outcome.document {
        let _ = writeln!(out, "{}", doc.to_json());
    }
    if let Some(message) = &outcome.message {
        if outcome.exit_code == 0 {
            let _ = write!(out, "{message}");
        } else {
            let _ = writeln!(std::io::stderr(), "{}", message.trim_end());
        }
    }
    let _ = out.flush();
    ExitCode::from(outcome.exit_code as u8)
}
