fn main() {
    std::process::exit(listdec_cli::run(std::env::args_os()));
}
