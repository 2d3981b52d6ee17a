fn main() {
    std::process::exit(mutagen::cli::main_exit_code());
}
