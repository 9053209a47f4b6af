fn main() {
    std::process::exit(harmlab::cli::run_args(std::env::args_os()));
}
