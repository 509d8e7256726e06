fn main() {
    std::process::exit(mmf_sphere::cli::run_from_args(std::env::args_os()));
}
