fn main() {
    std::process::exit(triquad::cli::run());
}
