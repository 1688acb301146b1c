use clap::Parser;

fn main() {
    let cli = match mbcr_cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = mbcr_cli::run(cli, &mut out) {
        eprintln!("mbcr: {e}");
        std::process::exit(e.exit_code());
    }
}
