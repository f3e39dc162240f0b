fn main() {
    std::process::exit(ktrace_cli::main_with_args(std::env::args_os()));
}
