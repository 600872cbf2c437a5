use std::io::Write;

fn main() {
    let (code, report) = tangleforge_cli::run(std::env::args_os());
    // A closed pipe is not worth a panic.
    let _ = writeln!(std::io::stdout(), "{}", report.to_json());
    std::process::exit(code);
}
