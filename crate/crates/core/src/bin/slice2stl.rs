fn main() {
    std::process::exit(slice2stl::cli::run(std::env::args_os()));
}
