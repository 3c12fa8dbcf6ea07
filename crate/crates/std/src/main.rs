use clap::Parser;

fn main() {
    let cli = homsim_std::cli::Cli::parse();
    std::process::exit(homsim_std::cli::execute(cli));
}
