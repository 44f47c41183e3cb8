fn main() {
    std::process::exit(streett::cli::main_with_args(std::env::args_os()));
}
