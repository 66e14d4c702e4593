fn main() {
    std::process::exit(isoembed::cli::run_cli(std::env::args_os()));
}
