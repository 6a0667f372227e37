//! Normal forms of formal sums of divided-power words, checked against the
//! tensor model.

use std::sync::Arc;

use decat::cartan::CartanData;
use decat::rewrite::{normal_form, oracle_equal, parse_sum, terms_text};
use decat::tensor_rep::build_module;

fn main() {
    let cartan = Arc::new(CartanData::type_a(2));
    let m = build_module(3, 4).unwrap();
    for text in [
        "E1 E1 @ (2,1,1)",
        "E1 F1 @ (2,1,1)",
        "E1 E2 E1 @ (2,1,1)",
        "F2 F1 F2 - F1 F2 F2 @ (0,2,2)",
        "(q + q^-1) * E2 E2 @ (1,2,1)",
    ] {
        let sum = parse_sum(text, cartan.clone(), None).unwrap();
        let nf = normal_form(&sum).unwrap();
        let verdict = oracle_equal(&sum, &nf.sum, &m).unwrap();
        println!("{text}\n  -> {}  ({} steps, oracle {:?})", terms_text(&nf.sum), nf.steps, verdict.status);
    }
}
