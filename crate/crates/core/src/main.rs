fn main() {
    let code = dipole_eet::cli::run(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
