fn main() -> std::process::ExitCode {
    resodyn::cli::run()
}
