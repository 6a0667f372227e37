//! Quantum integers, binomials and graded dimensions over Z[q, q^-1].

use decat::qalg::{bar_involution, evaluate_at_one, gdim_grassmannian, gdim_proj, qbinom, qfact, qint, LaurentPoly};

fn main() {
    for n in 0..=4 {
        println!("[{n}] = {}", qint(n));
    }
    println!("[3]! = {}", qfact(3));
    println!("[5 choose 2] = {}", qbinom(5, 2));
    println!("gdim H*(P^2) = {}", gdim_proj(2).unwrap());
    println!("gdim H*(Gr(2,4)) = {}", gdim_grassmannian(2, 4));

    let p: LaurentPoly = "q^2 - 3 + 2*q^-1".parse().unwrap();
    println!("p = {p}, bar(p) = {}, p(1) = {}", bar_involution(&p), evaluate_at_one(&p));
    let product = &p * &qint(2);
    println!("p [2] / [2] = {}", product.div_exact(&qint(2)).unwrap());
}
