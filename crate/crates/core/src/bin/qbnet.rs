fn main() {
    std::process::exit(qbnet::cli::cli_main(std::env::args_os()));
}
