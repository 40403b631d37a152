fn main() {
    std::process::exit(galerkin_dynamo::cli::main_with_args(std::env::args_os()));
}
