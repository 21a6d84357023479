fn main() {
    std::process::exit(heavylayer::cli::main_with_args(std::env::args_os()));
}
