fn main() {
    std::process::exit(radpair::cli::run(std::env::args_os()));
}
