fn main() {
    std::process::exit(actionwave::cli::run(std::env::args_os()));
}
