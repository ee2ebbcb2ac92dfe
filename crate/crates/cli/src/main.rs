fn main() {
    std::process::exit(aninorm_cli::run(std::env::args_os()));
}
