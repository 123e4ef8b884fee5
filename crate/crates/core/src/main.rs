fn main() {
    std::process::exit(folsurf::cli_main());
}
