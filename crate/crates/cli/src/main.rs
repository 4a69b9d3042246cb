fn main() {
    std::process::exit(deteval_cli::run(std::env::args_os()));
}
