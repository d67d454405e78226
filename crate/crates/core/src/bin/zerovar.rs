fn main() {
    std::process::exit(zerovar::cli::run(std::env::args_os()));
}
