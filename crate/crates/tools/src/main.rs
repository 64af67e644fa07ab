fn main() {
    let code = oneshot_pir_tools::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
