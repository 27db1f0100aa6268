fn main() {
    std::process::exit(thermo_opt::cli::run());
}
