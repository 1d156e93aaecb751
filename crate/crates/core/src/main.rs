fn main() {
    std::process::exit(fatpoints::cli::parse_and_dispatch(std::env::args_os()));
}
