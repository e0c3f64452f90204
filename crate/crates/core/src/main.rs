use mzqfi::cli::{run, CliError};

fn main() {
    let code = match run(std::env::args_os()) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("{}", msg.trim_end());
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
