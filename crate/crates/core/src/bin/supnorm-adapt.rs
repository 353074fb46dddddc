fn main() {
    std::process::exit(supnorm_adapt::cli::run(std::env::args_os()));
}
