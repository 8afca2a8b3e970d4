fn main() {
    std::process::exit(cartan_heegner::cli::run_cli());
}
