use std::process::exit;

fn main() {
    // `exit` prints help/version with status 0 and usage errors with
    // status 2, matching the documented contract.
    let config = satike::cli::parse_args(std::env::args_os()).unwrap_or_else(|e| e.exit());
    exit(satike::cli::execute(&config));
}
