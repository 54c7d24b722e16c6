fn main() {
    std::process::exit(cec_edge::cli::run(std::env::args_os()));
}
