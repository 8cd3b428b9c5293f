fn main() {
    std::process::exit(septic_bvp::cli::main_with_std());
}
