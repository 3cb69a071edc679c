fn main() {
    std::process::exit(locsol_cli::run(std::env::args_os()));
}
