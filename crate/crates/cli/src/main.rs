use clap::Parser;
use segre_cli::{run, run_cli, Cli, EXIT_OK, EXIT_USAGE};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(_) => {
            let out = run(argv);
            if out.code == EXIT_OK {
                print!("{}", out.text);
            } else {
                eprint!("{}", out.text);
            }
            std::process::exit(if out.code == EXIT_OK { EXIT_OK } else { EXIT_USAGE });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let out = run_cli(&cli, &argv[1..]);
    print!("{}", out.render(cli.format));
    std::process::exit(out.code);
}
