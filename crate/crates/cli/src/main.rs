fn main() {
    std::process::exit(ffmzm_cli::main_with_args(std::env::args_os()));
}
