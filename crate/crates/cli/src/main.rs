fn main() {
    std::process::exit(threshnet_cli::main_with_args(std::env::args_os()));
}
