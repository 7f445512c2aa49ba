//! Arf invariants of the catalog translation surfaces from their symplectic systems.

use limdiff::flat_surface_arf::{arf, build_surface, catalog, find_symplectic_system, stratum_of};

fn main() {
    for (name, spec) in catalog::all() {
        let surface = build_surface(spec).expect("catalog surface");
        let stratum = stratum_of(&surface);
        match find_symplectic_system(&surface) {
            Ok(system) => match arf(&surface, &system) {
                Ok(value) => println!("{name:<32} genus {}  zeros {stratum:?}  Arf {value}", surface.genus()),
                Err(e) => println!(
                    "{name:<32} genus {}  zeros {stratum:?}  no spin structure: {e}",
                    surface.genus()
                ),
            },
            Err(e) => println!(
                "{name:<32} genus {}  zeros {stratum:?}  no symplectic system: {e}",
                surface.genus()
            ),
        }
    }
}
