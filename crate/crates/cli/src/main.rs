fn main() {
    std::process::exit(walkbench::main_with(std::env::args_os()));
}
