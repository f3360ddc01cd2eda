fn main() {
    std::process::exit(kgo_core::cli::run(std::env::args_os()));
}
