fn main() {
    std::process::exit(compsec::cli::main(std::env::args_os()));
}
