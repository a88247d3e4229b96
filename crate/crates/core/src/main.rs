fn main() {
    std::process::exit(causal_qram::cli::run(std::env::args_os()));
}
