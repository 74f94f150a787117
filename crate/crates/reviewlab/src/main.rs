fn main() {
    std::process::exit(reviewlab::cli::run(std::env::args_os()));
}
