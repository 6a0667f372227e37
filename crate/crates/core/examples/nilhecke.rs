//! Demazure operators, KLR crossings and the three-strand composite.

use decat::cartan::CartanData;
use decat::nilhecke::{
    check_klr_edge_relation, check_nilhecke, check_theorem6_computation, demazure, klr_crossing, ColoredWord,
    MultiPoly, Samples,
};

fn main() {
    let x = |k| MultiPoly::var(3, k);
    let f = &(&x(1) * &x(1)) * &x(3);
    println!("d1(x1^2 x3) = {}", demazure(1, &f));
    println!("d2(x1^2 x3) = {}", demazure(2, &f));

    let a2 = CartanData::type_a(2);
    let w = ColoredWord::new(vec![2, 1], &a2).unwrap();
    let crossed = klr_crossing(&a2, &w, 1, &MultiPoly::one(2)).unwrap();
    for (word, p) in crossed.components() {
        println!("crossing (2,1) on 1 -> {:?}: {p}", word.0);
    }

    let samples = Samples::new(4, 10, 0);
    for r in [
        check_nilhecke(3, samples).unwrap(),
        check_klr_edge_relation(&a2, 1, 2, samples).unwrap(),
        check_theorem6_computation(&a2, samples).unwrap(),
    ] {
        println!("{}", r.summary_line());
    }
}
