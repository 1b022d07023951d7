fn main() {
    std::process::exit(spikestego::cli::run());
}
