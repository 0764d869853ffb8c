fn main() {
    std::process::exit(hecke_tools::cli::run(std::env::args_os()));
}
