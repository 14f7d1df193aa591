fn main() {
    std::process::exit(pmwpm::cli::run(std::env::args_os()));
}
