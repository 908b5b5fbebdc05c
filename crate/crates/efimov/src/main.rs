fn main() {
    std::process::exit(efimov::cli::run(std::env::args_os()));
}
