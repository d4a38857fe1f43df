fn main() {
    profcheck::cli::main();
}
