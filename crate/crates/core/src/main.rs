fn main() {
    std::process::exit(malfare::cli::main());
}
