use clap::Parser;

fn main() {
    let cli = conelab::cli::Cli::parse();
    match conelab::cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
