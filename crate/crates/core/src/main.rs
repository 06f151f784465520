fn main() {
    std::process::exit(magic_purify::cli::run(std::env::args_os()));
}
