fn main() {
    std::process::exit(evenfactor_core::cli::main_with_args(std::env::args_os()));
}
