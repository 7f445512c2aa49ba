//! Builds a few stable curves, then blows up every node and stabilizes back.

use limdiff::curve_graph::DualGraph;

fn describe(name: &str, g: &DualGraph) {
    println!(
        "{name:<22} vertices {:>2}  edges {:>2}  legs {}  genus {}  stable {:<5}  compact type {}",
        g.vertices().len(),
        g.edges().len(),
        g.legs().len(),
        g.arithmetic_genus(),
        g.is_stable(),
        g.is_compact_type(),
    );
}

fn main() {
    let banana = DualGraph::builder()
        .vertex("X1", 1)
        .vertex("X2", 1)
        .edge("A", ("A1", "X1"), ("A2", "X2"))
        .edge("B", ("B1", "X1"), ("B2", "X2"))
        .build()
        .expect("banana graph");
    let chain = DualGraph::builder()
        .vertex("E0", 1)
        .vertex("E1", 1)
        .vertex("E2", 1)
        .edge("N0", ("N0a", "E0"), ("N0b", "E1"))
        .edge("N1", ("N1a", "E1"), ("N1b", "E2"))
        .leg("Z", "E1")
        .build()
        .expect("elliptic chain");
    let self_node = DualGraph::builder()
        .vertex("X", 1)
        .edge("N", ("N1", "X"), ("N2", "X"))
        .leg("Z", "X")
        .build()
        .expect("irreducible nodal curve");
    for (name, g) in [
        ("banana", &banana),
        ("elliptic chain", &chain),
        ("self-node", &self_node),
    ] {
        describe(name, g);
        let blown = g.blow_up_all_nodes();
        describe("  blown up", &blown);
        let back = blown.stabilize().expect("semistable");
        describe("  stabilized", &back);
        println!("  round trip is the identity: {}", &back == g);
        let tree: Vec<String> = g.spanning_tree().iter().map(ToString::to_string).collect();
        println!("  spanning tree: [{}]", tree.join(", "));
    }
}
