fn main() {
    std::process::exit(pinq::cli::run(std::env::args_os()));
}
