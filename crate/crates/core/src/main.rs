fn main() {
    std::process::exit(plucker::cli::run(std::env::args_os()));
}
