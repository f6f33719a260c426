//! Drives the command-line front end in-process.

fn main() {
    for args in [
        vec!["pmean", "samplesize", "--p", "2", "--d", "100", "--theta", "equalized:1.0"],
        vec!["pmean", "--format", "csv", "ap-curve", "--from", "1.9", "--to", "2.1", "--step", "0.05", "--psi"],
        vec!["pmean", "--format", "csv", "are-finite", "--p", "1", "--u", "1,1"],
        vec!["pmean", "feasible", "--p", "-2", "--d", "10000", "--u", "block:5000:1"],
    ] {
        println!("$ {}", args[1..].join(" "));
        let code = pmean::cli::run(args);
        println!("exit code {code}\n");
    }
}
