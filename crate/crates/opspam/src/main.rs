fn main() {
    std::process::exit(opspam::cli::run(std::env::args_os()));
}
