//! Exact checks of divided powers, straightening and Serre relations on
//! `V^{⊗N}` for `sl_n`.

use decat::cartan::Content;
use decat::tensor_rep::{
    build_module, verify_divided_power_rule, verify_ef_straightening_all, verify_mixed_decompositions, verify_serre,
    Letter,
};

fn main() {
    let m = build_module(3, 3).unwrap();
    println!("V^(x3) for sl_3: {} weights, total dimension {}", m.weights().len(), m.total_dim());

    let w = Content(vec![1, 1, 1]);
    let e1 = m.word_matrix(&[Letter::e(1, 1)], &w).unwrap();
    println!("E1 at {w:?} -> {:?}:\n{}", e1.target(), e1.to_text());

    let reports = [
        verify_divided_power_rule(&m, 1, 1, 2).unwrap(),
        verify_ef_straightening_all(&m, 1, 2, 1).unwrap(),
        verify_serre(&m, 1, 2).unwrap(),
        verify_mixed_decompositions(&m, 1, 2, 1, 1).unwrap(),
    ];
    for r in &reports {
        println!("{}", r.summary_line());
    }
}
