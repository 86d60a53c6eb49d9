fn main() {
    std::process::exit(pglearn::cli::main_with_exit_code());
}
