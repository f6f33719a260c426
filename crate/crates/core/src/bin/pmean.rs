fn main() {
    std::process::exit(pmean::cli::run(std::env::args_os()));
}
