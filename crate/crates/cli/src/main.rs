fn main() {
    std::process::exit(twmatch_cli::run(std::env::args_os()));
}
