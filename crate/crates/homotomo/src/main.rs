fn main() {
    std::process::exit(homotomo::cli::run(std::env::args_os()));
}
