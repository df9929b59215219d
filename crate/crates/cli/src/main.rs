fn main() {
    std::process::exit(itlab_cli::main_with_args(std::env::args_os()));
}
