fn main() {
    std::process::exit(bistellar::cli::run(std::env::args_os()));
}
