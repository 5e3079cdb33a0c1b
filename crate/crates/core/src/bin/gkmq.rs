use std::io;

fn main() {
    gkm_quadrics::cli::init_threads();
    let code = gkm_quadrics::cli::run(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
