fn main() {
    std::process::exit(nls_harmonic::harness::run_cli(std::env::args_os()));
}
