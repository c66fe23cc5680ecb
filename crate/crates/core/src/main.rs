use clap::Parser;
use qdarwin::cli::{run, RunConfig};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cfg = RunConfig::parse();
    match run(&cfg) {
        Ok(out) => {
            for path in &out.written {
                log::info!("wrote {}", path.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
