fn main() {
    std::process::exit(specbandit_cli::run(std::env::args()));
}
