fn main() {
    std::process::exit(spinchain_cli::run(std::env::args_os()));
}
