fn main() {
    std::process::exit(multicontact::cli::main_with_args(std::env::args_os()));
}
