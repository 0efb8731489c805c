fn main() {
    std::process::exit(episignal::cli::run(std::env::args_os()));
}
