fn main() {
    std::process::exit(partrace::cli::run(std::env::args_os()));
}
