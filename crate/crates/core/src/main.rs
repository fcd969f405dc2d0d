fn main() {
    std::process::exit(fknn::cli::main());
}
