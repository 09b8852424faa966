fn main() -> std::process::ExitCode {
    wavecorner::cli::main()
}
