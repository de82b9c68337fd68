fn main() {
    // A panic anywhere in a run means an internal invariant broke; that
    // is exit code 1, distinct from code 2 for config/usage problems.
    let code = std::panic::catch_unwind(fogsim::cli::run_from_env).unwrap_or(1);
    std::process::exit(code);
}
