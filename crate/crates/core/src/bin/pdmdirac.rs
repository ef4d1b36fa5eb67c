use std::path::PathBuf;

fn main() {
    let env_out = std::env::var_os(pdm_dirac::cli::OUT_DIR_ENV).map(PathBuf::from);
    let code = pdm_dirac::cli::run(
        std::env::args_os(),
        env_out.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
