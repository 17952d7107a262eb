fn main() {
    std::process::exit(bellsim::cli::run());
}
