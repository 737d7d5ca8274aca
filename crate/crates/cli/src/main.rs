fn main() {
    if let Err(e) = pfk_cli::run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
