fn main() {
    std::process::exit(maintlens::cli::run(std::env::args_os()));
}
