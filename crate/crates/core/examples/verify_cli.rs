//! Drives the `verify` suite in process, the same way the `decat` binary does.

fn main() {
    let args = ["decat", "verify", "--n", "3", "--N", "2", "--seed", "1"];
    let code = decat::cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit code {code}");
}
