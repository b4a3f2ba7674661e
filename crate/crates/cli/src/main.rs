use std::io::Write;

fn main() {
    let invocation = groupoid_cli::run_command(std::env::args_os());
    if !invocation.stdout.is_empty() {
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(invocation.stdout.as_bytes());
    }
    if !invocation.stderr.is_empty() {
        eprint!("{}", invocation.stderr);
    }
    std::process::exit(invocation.exit_code);
}
