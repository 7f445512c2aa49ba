//! Decides plumbability of the fixture candidates and prints the exact certificates.

use std::path::Path;

use limdiff::candidate_diff::{CycleOutcome, Obstruction, PlumbingVerdict};
use limdiff::cli_io::{read_document, Document};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for name in [
        "obstruction1-k0.json",
        "obstruction1-k2.json",
        "obstruction2.json",
        "principal-boundary-g3.json",
        "banana-same-direction.json",
        "banana-opposite-directions.json",
    ] {
        let Document::CandidateDifferential(c) = read_document(&dir.join(name)).expect("fixture").document else {
            panic!("{name} is not a candidate differential");
        };
        println!("{name}");
        match c.is_plumbable().expect("valid candidate") {
            PlumbingVerdict::Plumbable(cert) => {
                let CycleOutcome::Feasible { exponent } = &cert.outcome else {
                    unreachable!()
                };
                for (edge, x) in exponent {
                    println!("  plumbable, log-modulus of {edge}: {x}");
                }
                let base = c.graph().vertices()[0].id.clone();
                let scalings = c.component_scalings(&cert, &base).expect("feasible");
                for (vertex, e) in &scalings.exponent {
                    println!("  scaling exponent of {vertex}: {e}");
                }
            }
            PlumbingVerdict::NotPlumbable(Obstruction::Cycle(cert)) => {
                let CycleOutcome::Infeasible { farkas } = &cert.outcome else {
                    unreachable!()
                };
                let row: Vec<String> = cert
                    .farkas_row(farkas)
                    .iter()
                    .map(|(e, v)| format!("{e}: {v}"))
                    .collect();
                println!("  not plumbable, Farkas row {{{}}}", row.join(", "));
                println!("  certificate checks: {:?}", cert.verify());
            }
            PlumbingVerdict::NotPlumbable(obstruction) => println!("  not plumbable, {obstruction}"),
            PlumbingVerdict::Undecided(why) => println!("  undecided, {why}"),
        }
    }
}
