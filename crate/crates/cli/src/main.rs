fn main() {
    std::process::exit(lpim_cli::run(std::env::args_os()));
}
