use clap::Parser;
use compers_cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = run(&cli);
    println!("{}", outcome.render(cli.format));
    std::process::exit(outcome.code);
}
