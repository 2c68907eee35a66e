fn main() {
    std::process::exit(odvp::cli::run());
}
