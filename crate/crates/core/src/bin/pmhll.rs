fn main() {
    std::process::exit(pmhll_core::cli::main());
}
