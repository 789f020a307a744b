fn main() {
    std::process::exit(anonimos::cli::run(std::env::args_os()));
}
