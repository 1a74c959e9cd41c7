fn main() {
    std::process::exit(dirq::main_with_args(std::env::args_os()));
}
