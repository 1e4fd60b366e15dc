fn main() { std::process::exit(listexp::cli::run(std::env::args_os())); }
