use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = qbh::run(std::env::args_os());
    let written = if out.report.is_some() || out.code == 0 {
        std::io::stdout().write_all(out.rendered.as_bytes())
    } else {
        std::io::stderr().write_all(out.rendered.as_bytes())
    };
    if written.is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(out.code as u8)
}
