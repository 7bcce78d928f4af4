fn main() {
    std::process::exit(coqsim::cli::run(std::env::args_os()));
}
