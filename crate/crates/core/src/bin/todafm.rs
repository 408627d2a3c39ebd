fn main() {
    std::process::exit(toda_frobenius::cli::main_with_args(std::env::args_os()));
}
