fn main() {
    std::process::exit(dehnlab::cli::run(std::env::args()));
}
