fn main() {
    env_logger::init();
    std::process::exit(se3h::cli::run(std::env::args_os()));
}
