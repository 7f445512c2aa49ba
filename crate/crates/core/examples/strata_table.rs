//! Components, projection dimensions and Kodaira dimensions of the strata of a given genus.
//!
//! Usage: `cargo run --example strata_table -- 5`

use limdiff::strata_taxonomy::all_strata;

fn main() {
    let genus: u32 = std::env::args().nth(1).map_or(4, |a| a.parse().expect("genus"));
    for stratum in all_strata(genus) {
        for info in stratum.components() {
            let component = stratum.component(info.tag).expect("listed component");
            let kodaira = component.kodaira_dimension();
            println!(
                "{:<28} {:<7} projection {:>3}  Kodaira {:<14} {}",
                stratum.to_string(),
                info.tag.to_string(),
                component.projection_dimension(),
                kodaira.value.to_string(),
                kodaira.rule,
            );
        }
    }
}
