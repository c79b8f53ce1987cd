use barron_cli::{execute, Cli, WORKERS_ENV};
use clap::Parser;

fn main() {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .expect("global pool is configured once");
            }
            _ => {
                eprintln!("error: {WORKERS_ENV} must be a positive integer, got `{v}`");
                std::process::exit(1);
            }
        }
    }
    std::process::exit(execute(&cli.command));
}
