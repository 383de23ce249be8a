fn main() {
    std::process::exit(eulershape::cli::run(std::env::args_os()));
}
