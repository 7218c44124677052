fn main() { std::process::exit(dgru_core::cli::run()); }
