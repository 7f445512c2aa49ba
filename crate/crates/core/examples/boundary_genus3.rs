//! Genus-3 boundary verdicts for the fixture candidates, with the reasons behind them.

use std::path::Path;

use limdiff::boundary_classify::classify;
use limdiff::cli_io::{read_document, Document};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for name in [
        "g3-intersection-hyp-odd.json",
        "g3-delta1-4torsion.json",
        "g3-delta1-2torsion.json",
        "g3-delta1-missing-torsion.json",
        "g3-delta1-genus2-side.json",
        "g3-delta1-genus2-side-weierstrass-z.json",
        "g3-delta1-4torsion-n2-inconsistent.json",
    ] {
        let envelope = read_document(&dir.join(name)).expect("fixture");
        let Document::CandidateDifferential(c) = envelope.document else {
            panic!("{name} is not a candidate differential");
        };
        let flags = envelope.flags.unwrap_or_default();
        match classify(&c, &flags) {
            Ok(verdict) => {
                println!("{name}: {verdict}");
                for reason in &verdict.reasons {
                    println!("    {reason}");
                }
            }
            Err(e) => println!("{name}: {e}"),
        }
    }
}
