fn main() {
    std::process::exit(cli_io::run(std::env::args_os()));
}
