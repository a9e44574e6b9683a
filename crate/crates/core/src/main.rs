fn main() {
    std::process::exit(cpmine::cli::run(std::env::args_os()));
}
