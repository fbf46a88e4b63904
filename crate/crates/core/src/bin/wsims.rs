fn main() {
    std::process::exit(weighted_sims::cli::main());
}
