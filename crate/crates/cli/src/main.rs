fn main() {
    std::process::exit(pucli::run(std::env::args_os()));
}
