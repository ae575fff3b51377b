fn main() {
    std::process::exit(qkforms::cli::run(std::env::args_os()));
}
