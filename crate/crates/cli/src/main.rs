fn main() {
    std::process::exit(relstance::app::run_from(std::env::args_os()));
}
