fn main() {
    std::process::exit(ifs_shadow::cli::run_with_args(std::env::args_os()));
}
