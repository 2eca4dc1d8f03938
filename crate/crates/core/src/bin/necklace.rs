fn main() {
    std::process::exit(necklace::cli::run(std::env::args_os()));
}
