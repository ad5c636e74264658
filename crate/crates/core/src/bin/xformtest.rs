fn main() {
    std::process::exit(xformtest::cli::run(std::env::args_os()));
}
