use std::process::ExitCode;

fn main() -> ExitCode {
    let code = match rayleigh_walk_cli::parse_args(std::env::args_os()) {
        Ok(cfg) => rayleigh_walk_cli::run(&cfg),
        Err(e) => {
            if e.exit_code() == rayleigh_walk_cli::EXIT_OK {
                print!("{e}");
            } else {
                eprint!("{e}");
                if !e.to_string().ends_with('\n') {
                    eprintln!();
                }
            }
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
