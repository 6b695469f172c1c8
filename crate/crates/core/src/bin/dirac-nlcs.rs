fn main() {
    std::process::exit(dirac_nlcs::cli::main_with_args(std::env::args_os()));
}
