fn main() {
    std::process::exit(fluxpulse::cli::main_with_args(std::env::args_os()));
}
