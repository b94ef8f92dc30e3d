fn main() {
    std::process::exit(switchlab::cli::main_from_env());
}
