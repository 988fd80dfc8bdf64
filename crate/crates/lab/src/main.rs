fn main() {
    std::process::exit(subgauss_lab::run(std::env::args_os()));
}
