use airy_process::cli;

fn main() {
    std::process::exit(cli::run());
}
