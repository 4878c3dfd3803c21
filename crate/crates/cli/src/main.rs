fn main() {
    std::process::exit(randseries_cli::run(std::env::args_os()));
}
