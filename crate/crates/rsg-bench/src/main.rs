fn main() {
    std::process::exit(rsg_bench::cli::run(std::env::args_os()));
}
