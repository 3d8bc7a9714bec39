fn main() {
    std::process::exit(stablerange::cli::run(std::env::args_os()));
}
