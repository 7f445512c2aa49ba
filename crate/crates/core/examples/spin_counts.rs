//! Counts even and odd spin structures on chains of elliptic and genus-2 components.

use limdiff::curve_graph::DualGraph;
use limdiff::spin_parity::{component_counts, count_spin_parities};

fn chain(genera: &[u32]) -> DualGraph {
    let mut b = DualGraph::builder();
    for (i, &g) in genera.iter().enumerate() {
        b = b.vertex(&format!("X{i}"), g);
    }
    for i in 1..genera.len() {
        b = b.edge(
            &format!("N{i}"),
            (&format!("N{i}a"), &format!("X{}", i - 1)),
            (&format!("N{i}b"), &format!("X{i}")),
        );
    }
    b.build().expect("chain")
}

fn main() {
    for g in 1..=4 {
        let (even, odd) = component_counts(g);
        println!("smooth genus {g}: {even} even, {odd} odd");
    }
    for genera in [
        vec![1, 1],
        vec![1, 1, 1],
        vec![2, 1],
        vec![1, 2, 1],
        vec![1, 1, 1, 1],
        vec![2, 2],
    ] {
        let (even, odd) = count_spin_parities(&chain(&genera)).expect("compact type");
        println!("chain of genera {genera:?}: {even} even, {odd} odd");
    }
}
