fn main() {
    std::process::exit(liftbell::cli::run(std::env::args_os()));
}
