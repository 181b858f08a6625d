use clap::Parser;
use modeforest_cli::{configure_threads, run, write_stdout, Cli};

fn main() {
    let cli = Cli::parse();
    let threads = std::env::var("MODEFOREST_THREADS").ok();
    let outcome = configure_threads(threads.as_deref()).and_then(|()| run(cli));
    match outcome {
        Ok(text) => write_stdout(&text),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
