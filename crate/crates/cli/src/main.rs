use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let code = optomech_cli::run(&args, &mut lock);
    let _ = lock.flush();
    std::process::exit(code);
}
