fn main() {
    std::process::exit(ns_apriori::cli::run(std::env::args_os()));
}
