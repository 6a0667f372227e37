//! Searches grading conventions for the braid operators and prints every
//! candidate with its outcome.

use decat::braiding::derive_grading_convention;

fn main() {
    let bound = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    match derive_grading_convention(bound) {
        Ok(d) => {
            for c in &d.candidates {
                println!("{} {c}", if c.passed() { "PASS" } else { "fail" });
            }
            println!("chosen: {}", d.chosen);
        }
        Err(e) => println!("{e}"),
    }
}
