//! Parses every fixture, prints its kind and expectations, and checks that the canonical
//! serialization reproduces the file. `--rewrite` writes the canonical text back.

use std::path::Path;

use limdiff::cli_io::{parse, serialize};

fn main() {
    let rewrite = std::env::args().any(|a| a == "--rewrite");
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .expect("fixture directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut drifted = 0;
    for path in &paths {
        let text = std::fs::read_to_string(path).expect("readable fixture");
        let envelope = parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let canonical = serialize(&envelope);
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let commands: Vec<&str> = envelope.expect.iter().map(|e| e.command.as_str()).collect();
        let state = if canonical == text { "canonical" } else { "drifted" };
        println!(
            "{name:<48} {:<24} {state:<10} {}",
            envelope.document.kind().to_string(),
            commands.join(" ")
        );
        if canonical != text {
            drifted += 1;
            if rewrite {
                std::fs::write(path, canonical).expect("writable fixture");
            }
        }
    }
    println!(
        "{} fixtures, {drifted} not in canonical form{}",
        paths.len(),
        if rewrite && drifted > 0 { " (rewritten)" } else { "" }
    );
}
