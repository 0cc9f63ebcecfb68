fn main() {
    std::process::exit(potline::cli::main_with(std::env::args().collect()));
}
