fn main() {
    std::process::exit(trienorm::cli::run());
}
