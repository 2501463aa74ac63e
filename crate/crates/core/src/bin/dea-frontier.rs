fn main() {
    std::process::exit(dea_frontier::cli::run_command(std::env::args_os()));
}
