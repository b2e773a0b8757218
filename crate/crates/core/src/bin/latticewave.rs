fn main() {
    std::process::exit(latticewave::cli::main_with_args(std::env::args_os()));
}
