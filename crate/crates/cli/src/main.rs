fn main() {
    std::process::exit(schottky_lab_cli::run(std::env::args_os()));
}
