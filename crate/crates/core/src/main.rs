fn main() {
    std::process::exit(sgbounds::cli::run(std::env::args_os()));
}
