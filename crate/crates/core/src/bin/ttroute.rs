fn main() {
    std::process::exit(ttroute::cli::run(std::env::args_os()));
}
