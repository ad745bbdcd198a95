fn main() {
    std::process::exit(rootsurf::cli::main_with_args(std::env::args_os()));
}
