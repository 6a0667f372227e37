//! Graphs, Cartan data, weights and reflections.

use decat::cartan::{cartan_from_graph, CartanData, Content, SimpleGraph, Weight};

fn main() {
    let d4 = cartan_from_graph(SimpleGraph::parse_spec("D4").unwrap());
    println!("D4 Cartan matrix:");
    for row in d4.matrix() {
        println!("  {row:?}");
    }

    let a3 = CartanData::type_a(3);
    let lambda = Weight::from_content(Content(vec![2, 1, 0, 1]));
    println!("content (2,1,0,1) has pairings {:?}", lambda.pairings());
    for i in 1..=3 {
        println!("  s_{i} lambda = {:?}", a3.reflect(&lambda, i).pairings());
    }
}
