fn main() {
    std::process::exit(rmlab::cli::main_with_args(std::env::args_os()));
}
