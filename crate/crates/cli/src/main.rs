use std::io::Write;
use std::process::ExitCode;

use k3moduli::numerics::set_series_cap;
use k3moduli_cli::{run, EXIT_INPUT};

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("K3MODULI_SERIES_CAP") {
        match v.trim().parse::<usize>() {
            Ok(cap) if cap > 0 => set_series_cap(cap),
            _ => {
                eprintln!("error: K3MODULI_SERIES_CAP must be a positive integer, got {v:?}");
                return ExitCode::from(EXIT_INPUT as u8);
            }
        }
    }
    let out = run(std::env::args_os());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
