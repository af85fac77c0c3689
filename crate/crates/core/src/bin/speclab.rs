fn main() {
    std::process::exit(speclab::experiments::cli_main(std::env::args_os()));
}
