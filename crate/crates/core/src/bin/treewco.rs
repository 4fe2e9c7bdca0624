fn main() {
    std::process::exit(treewco::cli::main_with_args(std::env::args_os()));
}
