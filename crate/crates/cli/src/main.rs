fn main() {
    std::process::exit(kenclose_cli::main_with(std::env::args_os()));
}
