fn main() {
    std::process::exit(hall_edge::cli::run_from(std::env::args_os()));
}
