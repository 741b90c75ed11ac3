fn main() {
    std::process::exit(ratfit_cli::run_from_env());
}
