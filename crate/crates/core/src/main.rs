fn main() {
    std::process::exit(filter_games::cli::run(std::env::args().collect()));
}
