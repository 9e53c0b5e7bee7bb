fn main() {
    std::process::exit(flrn::cli::main_with(std::env::args_os()));
}
