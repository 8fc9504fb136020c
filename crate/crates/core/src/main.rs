fn main() {
    std::process::exit(katofan::cli::main());
}
