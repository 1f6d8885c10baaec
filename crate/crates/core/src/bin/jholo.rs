fn main() {
    std::process::exit(jholo::cli::main_with_args(std::env::args_os()));
}
