//! Rickard braid operators: invertibility, braid relations and conjugation,
//! under the convention found by the search.

use decat::braiding::{
    braid_operator, check_braid_relation, check_invertible, check_tij_factorization, conjugation_check,
    derive_grading_convention, Specialization,
};
use decat::cartan::Content;
use decat::tensor_rep::build_module;

fn main() {
    let conv = derive_grading_convention(2).unwrap().chosen;
    println!("convention: {conv}");

    let m = build_module(3, 3).unwrap();
    let t1 = braid_operator(&m, &conv, 1).unwrap();
    let block = t1.block(&Content(vec![2, 1, 0]));
    println!("T1 on (2,1,0) -> {:?}:\n{}", block.target(), block.to_text());

    let reports = [
        check_invertible(&m, &conv, 1).unwrap(),
        check_braid_relation(&m, &conv, 1, 2, Specialization::Generic).unwrap(),
        check_braid_relation(&m, &conv, 1, 2, Specialization::QOne).unwrap(),
        conjugation_check(&m, &conv, 1, 2, 2, Specialization::Generic).unwrap(),
        check_tij_factorization(&m, &conv, 1, 2).unwrap(),
    ];
    for r in &reports {
        println!("{}", r.summary_line());
    }
}
