fn main() {
    std::process::exit(fuzzyslic_cli::run(std::env::args_os()));
}
