use clap::Parser;
use mlq::Cli;

fn main() {
    let cli = Cli::parse();
    match mlq::run(&cli) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprintln!("mlq: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
