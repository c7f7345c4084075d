fn main() {
    std::process::exit(ehrhart::cli::run());
}
