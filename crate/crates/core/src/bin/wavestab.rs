fn main() {
    std::process::exit(wavestab::cli::run(std::env::args_os()));
}
