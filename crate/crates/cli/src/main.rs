use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<_> = std::env::args_os().collect();
    let output_dir = output_dir_from(&args);
    let outcome = psl2z_cli::run(args);

    print!("{}", outcome.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", outcome.stderr);

    let mut status = outcome.status;
    if let Some(dir) = output_dir {
        if let Err(e) = outcome.write_files(&dir) {
            eprintln!("error: cannot write to {}: {e}", dir.display());
            status = psl2z_cli::EXIT_USAGE;
        }
    }
    ExitCode::from(status as u8)
}

/// Resolves the output directory the same way clap does: flag first, then
/// the environment.
fn output_dir_from(args: &[std::ffi::OsString]) -> Option<std::path::PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--output" {
            return it.next().map(Into::into);
        }
        if let Some(v) = s.strip_prefix("--output=") {
            return Some(v.into());
        }
    }
    std::env::var_os(psl2z_cli::OUTPUT_DIR_ENV).map(Into::into)
}
