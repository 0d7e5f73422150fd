fn main() {
    std::process::exit(lle_comb::cli::run());
}
