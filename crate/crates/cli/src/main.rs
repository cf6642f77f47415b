fn main() {
    std::process::exit(ehrhart_cli::main_with_args(std::env::args_os()));
}
