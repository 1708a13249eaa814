fn main() {
    std::process::exit(stark_window::cli::main_with_args(std::env::args_os()));
}
