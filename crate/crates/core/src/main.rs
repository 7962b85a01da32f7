use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    if let Some(n) = std::env::var("LIPEMBED_THREADS").ok().and_then(|v| v.parse().ok()) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    let config = match lipembed::cli::RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // a malformed command line is a parse error, like malformed input
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            std::process::exit(code);
        }
    };
    std::process::exit(lipembed::cli::run(&config));
}
