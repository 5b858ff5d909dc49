fn main() {
    std::process::exit(qwjoin::cli::run(std::env::args_os()));
}
