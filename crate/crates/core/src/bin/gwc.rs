fn main() {
    std::process::exit(gwc::cli::run(std::env::args_os()));
}
