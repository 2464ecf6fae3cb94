fn main() {
    std::process::exit(poincare_halfmap::cli::main());
}
