fn main() {
    let out = uncertainty_extremal::cli::run(std::env::args_os());
    print!("{}", out.stdout);
    if !out.stderr.is_empty() {
        eprintln!("{}", out.stderr.trim_end());
    }
    std::process::exit(out.code);
}
