use std::io;

fn main() {
    let code = goldstates::cli::run_from(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
