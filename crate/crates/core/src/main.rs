fn main() {
    std::process::exit(vanvisc::lab::cli::run(std::env::args_os()));
}
