use clap::Parser;

use pcgraph_cli::{init_thread_pool, run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_thread_pool();

    // Usage mistakes are input errors (exit 1); --help and --version are
    // not errors at all. Exit 2 is reserved for an empty solver result.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(if e.is_empty_result() { 2 } else { 1 });
    }
}
