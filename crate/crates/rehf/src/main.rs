fn main() {
    std::process::exit(rehf::cli::main_with_args(std::env::args_os()));
}
