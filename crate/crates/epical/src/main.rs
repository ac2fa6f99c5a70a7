fn main() {
    std::process::exit(epical::cli::main(std::env::args_os()));
}
