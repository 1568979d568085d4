fn main() {
    std::process::exit(lazygibbs::cli::main_with(std::env::args_os()));
}
