fn main() -> std::process::ExitCode {
    sudler::cli::main()
}
