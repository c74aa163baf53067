fn main() {
    std::process::exit(jostlt::cli::run(std::env::args_os()));
}
