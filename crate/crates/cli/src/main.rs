fn main() {
    std::process::exit(dadmm_cli::cli_main(std::env::args_os()));
}
