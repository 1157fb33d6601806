use std::io::IsTerminal;
use std::process::ExitCode;

fn main() -> ExitCode {
    let color = std::io::stdout().is_terminal()
        && std::env::var("ANP_COLOR").map_or(true, |v| v != "0");
    let code = anp_psi::cli::run_cli(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
        color,
    );
    ExitCode::from(code as u8)
}
