fn main() {
    std::process::exit(lattice_ci_cli::run());
}
