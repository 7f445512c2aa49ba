//! Acceptance suite: one PASS or FAIL line per criterion, each within its time budget.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use limdiff::boundary_classify::{classify, Membership};
use limdiff::candidate_diff::{CandidateDifferential, CycleOutcome, Obstruction, PlumbingCertificate, PlumbingVerdict};
use limdiff::cli_io::{read_document, Document};
use limdiff::exact::{rat, Rational};
use limdiff::flags::GeometryFlags;
use limdiff::flat_surface_arf::{arf, build_surface, catalog, find_symplectic_system};
use limdiff::numeric_plumb::LocalPlumbData;
use limdiff::spin_parity::count_spin_parities;
use limdiff::strata_taxonomy::{ComponentTag, Kodaira, Stratum, StratumComponent};
use num_complex::Complex64;
use num_traits::{Signed, Zero};

/// Result of one criterion: `Ok` carries the summary line, `Err` the first failure.
type Outcome = Result<String, String>;

/// Name, time budget and check of one criterion.
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn fixture(name: &str) -> (CandidateDifferential, GeometryFlags) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    let envelope = read_document(&path).unwrap_or_else(|e| panic!("{name}: {e}"));
    let Document::CandidateDifferential(c) = envelope.document else {
        panic!("{name} is not a candidate differential");
    };
    (c, envelope.flags.unwrap_or_default())
}

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn obstruction_fixtures() -> Outcome {
    for k in 0..=2 {
        let name = format!("obstruction1-k{k}.json");
        let (c, _) = fixture(&name);
        let verdict = c.is_plumbable().map_err(|e| format!("{name}: {e}"))?;
        let PlumbingVerdict::NotPlumbable(Obstruction::Cycle(cert)) = verdict else {
            return Err(format!("{name}: expected a cycle obstruction, got {verdict:?}"));
        };
        let CycleOutcome::Infeasible { farkas } = &cert.outcome else {
            return Err(format!("{name}: cycle obstruction without a Farkas vector"));
        };
        let row = cert.farkas_row(farkas);
        ensure(row.values().all(|v| !v.is_negative()), || {
            format!("{name}: Farkas row {row:?} has a negative entry")
        })?;
        ensure(row.values().any(|v| !v.is_zero()), || {
            format!("{name}: Farkas row vanishes")
        })?;
        ensure(row.contains_key("N"), || format!("{name}: Farkas row misses the loop"))?;
    }
    let (c, _) = fixture("obstruction2.json");
    match c.is_plumbable().map_err(|e| e.to_string())? {
        PlumbingVerdict::NotPlumbable(Obstruction::ResidueTheorem(nodes)) if !nodes.is_empty() => {}
        other => {
            return Err(format!(
                "obstruction2.json: expected a residue-theorem obstruction, got {other:?}"
            ))
        }
    }
    Ok("3 loop Farkas certificates, 1 residue-theorem obstruction".into())
}

/// Checks a feasible certificate against the cycle space computed from the graph alone.
fn exponent_solves_cycle_space(c: &CandidateDifferential, cert: &PlumbingCertificate) -> Result<usize, String> {
    let CycleOutcome::Feasible { exponent } = &cert.outcome else {
        return Err("certificate is not feasible".into());
    };
    let edges = c.graph().edges();
    let mut signed: Vec<Option<(i64, Rational)>> = Vec::new();
    for e in edges {
        let (w, s) = common::weight_and_sign(c, [e.half_edges[0].id.as_str(), e.half_edges[1].id.as_str()]);
        if w == 0 {
            signed.push(None);
            continue;
        }
        let x = exponent.get(&e.id).ok_or_else(|| format!("no exponent on {}", e.id))?;
        ensure(x.is_negative(), || format!("exponent {x} on {} is not negative", e.id))?;
        signed.push(Some((w * s, x.clone())));
    }
    let cycles = common::cycle_space(c.graph());
    for z in &cycles {
        let total: Rational = z
            .iter()
            .zip(&signed)
            .filter_map(|(zj, entry)| entry.as_ref().map(|(ws, x)| zj * rat(*ws) * x))
            .sum();
        ensure(total.is_zero(), || format!("cycle {z:?} sums to {total}"))?;
    }
    Ok(cycles.len())
}

fn principal_boundary() -> Outcome {
    let mut equations = 0;
    for g in 2..=4 {
        let name = format!("principal-boundary-g{g}.json");
        let (c, _) = fixture(&name);
        let PlumbingVerdict::Plumbable(cert) = c.is_plumbable().map_err(|e| e.to_string())? else {
            return Err(format!("{name}: not plumbable"));
        };
        equations += exponent_solves_cycle_space(&c, &cert).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!(
        "genus 2, 3, 4 plumbable, {equations} cycle equations exactly zero, every exponent negative"
    ))
}

fn cycle_oracle() -> Outcome {
    let mut rng = common::rng(0x5eed_0003);
    let (mut feasible, mut dag_agree) = (0, 0);
    for i in 0..500 {
        let c = common::random_candidate(&mut rng, 5, 4);
        let cert = c.cycle_condition().map_err(|e| format!("instance {i}: {e}"))?;
        cert.verify().map_err(|e| format!("instance {i}: {e}"))?;
        let oracle = common::kernel_orthant_feasible(&c);
        ensure(cert.is_feasible() == oracle, || {
            format!(
                "instance {i}: LP says {}, kernel oracle says {oracle}",
                cert.is_feasible()
            )
        })?;
        if cert.is_feasible() {
            exponent_solves_cycle_space(&c, &cert).map_err(|e| format!("instance {i}: {e}"))?;
            feasible += 1;
        }
        dag_agree += usize::from(common::contraction_dag_feasible(&c) == oracle);
    }
    ensure(dag_agree == 500, || {
        format!("contraction oracle agrees on {dag_agree}/500")
    })?;
    Ok(format!(
        "500/500 agree with the kernel oracle and the contraction oracle, {feasible} feasible"
    ))
}

fn spin_counts() -> Outcome {
    let mut trees = 0;
    for n in 1..=4usize {
        let g = n as u32;
        let expected = (2u64.pow(g - 1) * (2u64.pow(g) + 1), 2u64.pow(g - 1) * (2u64.pow(g) - 1));
        for edges in common::labelled_trees(n) {
            let graph = common::elliptic_tree(n, &edges);
            let counts = count_spin_parities(&graph).map_err(|e| e.to_string())?;
            ensure(counts == expected, || {
                format!("genus {g}, edges {edges:?}: {counts:?} instead of {expected:?}")
            })?;
            trees += 1;
        }
    }
    Ok(format!("{trees} labelled elliptic trees, genus 1 to 4"))
}

fn delta1_table() -> Outcome {
    let rows = common::delta1::sweep();
    let mismatched: Vec<&str> = rows
        .iter()
        .filter(|r| r.expected != r.observed || !r.reasons_cited)
        .map(|r| r.label.as_str())
        .collect();
    let parity: usize = rows.iter().filter(|r| !r.parity_agrees).count();
    ensure(mismatched.is_empty(), || {
        format!("{} rows differ, first: {}", mismatched.len(), mismatched[0])
    })?;
    ensure(parity == 0, || format!("{parity} parity mismatches"))?;
    Ok(format!("{} flag combinations, 0 parity mismatches", rows.len()))
}

fn intersection() -> Outcome {
    let (c, flags) = fixture("g3-intersection-hyp-odd.json");
    let v = classify(&c, &flags).map_err(|e| e.to_string())?;
    for tag in [ComponentTag::Hyp, ComponentTag::Odd] {
        ensure(v.get(tag) == Some(&Membership::InClosure), || {
            format!("{tag}: {:?}", v.get(tag))
        })?;
    }
    Ok("InClosure for hyp and odd".into())
}

fn arf_suite() -> Outcome {
    let arf_of = |spec| -> Result<u8, String> {
        let s = build_surface(spec).map_err(|e| e.to_string())?;
        let sys = find_symplectic_system(&s).map_err(|e| e.to_string())?;
        let value = arf(&s, &sys).map_err(|e| e.to_string())?;
        ensure(value == sys.arf(), || "the two Arf entry points disagree".into())?;
        Ok(value)
    };
    let torus = arf_of(catalog::square_torus())?;
    ensure(torus == 1, || format!("square torus has Arf {torus}"))?;
    let odd = arf_of(catalog::conjugate_node_odd_smoothing())?;
    let hyp = arf_of(catalog::conjugate_node_hyp_smoothing())?;
    ensure((odd, hyp) == (1, 0), || format!("smoothings have Arf {odd} and {hyp}"))?;
    let mut rng = common::rng(0x5eed_0007);
    let mut surfaces = 0;
    for (name, spec) in catalog::all() {
        let s = build_surface(spec).map_err(|e| format!("{name}: {e}"))?;
        let sys = find_symplectic_system(&s).map_err(|e| format!("{name}: {e}"))?;
        // Surfaces with a zero of odd order carry no spin structure.
        if arf(&s, &sys).is_err() {
            continue;
        }
        for _ in 0..10 {
            let m = common::random_symplectic(&mut rng, sys.genus(), 6);
            ensure(common::is_symplectic(&m), || {
                format!("{name}: generated matrix is not symplectic")
            })?;
            let moved = sys.transformed(&m).map_err(|e| format!("{name}: {e}"))?;
            ensure(moved.arf() == sys.arf(), || format!("{name}: Arf moved under {m:?}"))?;
        }
        surfaces += 1;
    }
    Ok(format!(
        "torus 1, smoothings 1 and 0, 10 basis changes on each of {surfaces} surfaces with a spin structure"
    ))
}

/// Next partition in reverse lexicographic order, parts kept decreasing.
fn next_partition(parts: &mut Vec<u32>) -> bool {
    let mut freed = 0;
    while parts.last() == Some(&1) {
        parts.pop();
        freed += 1;
    }
    let Some(last) = parts.last_mut() else {
        return false;
    };
    *last -= 1;
    let cap = *last;
    let mut rest = freed + 1;
    while rest > 0 {
        let part = rest.min(cap);
        parts.push(part);
        rest -= part;
    }
    true
}

fn expected_projection(genus: u32, orders: &[u32], tag: ComponentTag) -> Option<u32> {
    let n = orders.len() as u32;
    let all_twos = orders.iter().all(|&k| k == 2);
    if tag == ComponentTag::Hyp && (n == 1 || (n == 2 && orders[0] == orders[1])) {
        Some(2 * genus - 1)
    } else if tag == ComponentTag::Even && all_twos {
        Some(3 * genus - 4)
    } else if n < genus - 1 {
        Some(2 * genus - 2 + n)
    } else if tag != ComponentTag::Even {
        Some(3 * genus - 3)
    } else {
        None
    }
}

/// Every applicable Kodaira rule must give the same answer; no rule means unknown.
fn expected_kodaira(genus: u32, orders: &[u32], tag: ComponentTag) -> Result<Kodaira, String> {
    let n = orders.len() as u32;
    let all_twos = orders.iter().all(|&k| k == 2);
    let moduli_general = genus == 22 || genus >= 24;
    let mut found = Vec::new();
    if orders.iter().filter(|&&k| k >= 2).sum::<u32>() <= genus - 2 {
        found.push(Kodaira::MinusInfinity);
    }
    if tag == ComponentTag::Hyp && n == 2 && orders[0] == genus - 1 {
        found.push(Kodaira::MinusInfinity);
    }
    if all_twos && tag == ComponentTag::Even {
        found.push(Kodaira::MinusInfinity);
    }
    if all_twos && tag == ComponentTag::Odd {
        found.push(if genus <= 11 {
            Kodaira::MinusInfinity
        } else {
            Kodaira::GeneralType
        });
    }
    if moduli_general && n == genus - 1 && !all_twos {
        found.push(Kodaira::GeneralType);
    }
    if moduli_general && orders[0] == genus - 1 && orders[1..].iter().all(|&k| k == 1) {
        found.push(Kodaira::GeneralType);
    }
    match found.split_first() {
        None => Ok(Kodaira::Unknown),
        Some((first, rest)) if rest.iter().all(|k| k == first) => Ok(*first),
        Some(_) => Err(format!("rules disagree on genus {genus} {orders:?} {tag}: {found:?}")),
    }
}

fn strata_tables() -> Outcome {
    let (mut rows, mut kodaira_known) = (0usize, 0usize);
    for genus in 2..=30u32 {
        let mut comp = StratumComponent {
            stratum: Stratum::new(genus, vec![2 * genus - 2]).map_err(|e| e.to_string())?,
            tag: ComponentTag::Whole,
        };
        loop {
            for info in comp.stratum.components() {
                comp.tag = info.tag;
                let orders = &comp.stratum.orders;
                let projection = expected_projection(genus, orders, comp.tag);
                ensure(projection == Some(comp.projection_dimension()), || {
                    format!(
                        "projection of genus {genus} {orders:?} {}: {} instead of {projection:?}",
                        comp.tag,
                        comp.projection_dimension()
                    )
                })?;
                let kodaira = expected_kodaira(genus, orders, comp.tag)?;
                let got = comp.kodaira_dimension().value;
                ensure(kodaira == got, || {
                    format!(
                        "Kodaira of genus {genus} {orders:?} {}: {got} instead of {kodaira}",
                        comp.tag
                    )
                })?;
                kodaira_known += usize::from(kodaira != Kodaira::Unknown);
                rows += 1;
            }
            if !next_partition(&mut comp.stratum.orders) {
                break;
            }
        }
    }
    Ok(format!(
        "{rows} components for genus 2 to 30, {kodaira_known} with a known Kodaira dimension"
    ))
}

fn relative(got: Complex64, expected: Complex64) -> f64 {
    let gap = (got - expected).norm();
    if expected.norm() > 0.0 {
        gap / expected.norm()
    } else {
        gap
    }
}

fn local_plumbing() -> Outcome {
    let (mut worst, mut worst_residue, mut charts) = (0.0f64, 0.0f64, 0);
    for k in -1..=3i32 {
        for eps in [1e-2, 1e-3] {
            for a in [
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 1.0),
            ] {
                let epsilon = Complex64::new(eps, 0.0);
                let data = LocalPlumbData::with_grid(k, epsilon, a, 100).map_err(|e| e.to_string())?;
                let lead = if k == -1 { 0.0 } else { 1.0 };
                let scale = epsilon.powi(k + 1);
                for &z in data.samples() {
                    let v = lead * z.powi(k) + scale * a / z;
                    let w = scale * (-lead * z.powi(-k - 2) - a / z);
                    worst = worst.max(relative(data.pullback_v(z).map_err(|e| e.to_string())?, v));
                    worst = worst.max(relative(data.pullback_w(z).map_err(|e| e.to_string())?, w));
                }
                let residue = data.residue_v(0.9, 1024).map_err(|e| e.to_string())?;
                worst_residue = worst_residue.max((residue - scale * a).norm());
                charts += 1;
            }
        }
    }
    ensure(worst < 1e-9, || format!("pullback relative error {worst:.3e}"))?;
    ensure(worst_residue < 1e-6, || format!("residue error {worst_residue:.3e}"))?;
    Ok(format!(
        "{charts} charts, max relative error {worst:.1e}, max residue error {worst_residue:.1e}"
    ))
}

fn degree_sums_hold(c: &CandidateDifferential) -> bool {
    let g = c.graph();
    let genus = g.arithmetic_genus() as i64;
    let n_edges = g.edges().len() as i64;
    let legs: i64 = c.leg_orders().values().sum();
    let branches: i64 = c.branch_orders().values().sum();
    let per_vertex_ok = g
        .vertices()
        .iter()
        .all(|v| c.degree_at(&v.id) == 2 * i64::from(v.genus) - 2);
    c.validate().is_empty() && per_vertex_ok && legs == 2 * genus - 2 && branches == -2 * n_edges
}

fn structural_invariants() -> Outcome {
    const TARGET: usize = 1000;
    let mut rng = common::rng(0x5eed_0010);
    let (mut degrees, mut round_trips, mut scalings, mut drawn) = (0, 0, 0, 0);
    while degrees < TARGET || round_trips < TARGET || scalings < TARGET {
        ensure(drawn < 50 * TARGET, || {
            format!("only {round_trips} semistable and {scalings} feasible inputs in {drawn} draws")
        })?;
        drawn += 1;
        let c = common::random_candidate(&mut rng, 5, 4);
        let g = c.graph();
        if degrees < TARGET {
            ensure(degree_sums_hold(&c), || format!("degree sums fail on draw {drawn}"))?;
            degrees += 1;
        }
        let semistable = g
            .vertices()
            .iter()
            .all(|v| v.genus > 0 || g.valence(&v.id).n_special >= 2);
        if round_trips < TARGET && semistable {
            let blown = g.blow_up_all_nodes();
            let back = blown.stabilize().map_err(|e| e.to_string())?;
            let direct = g.stabilize().map_err(|e| e.to_string())?;
            ensure(
                back == direct && back.arithmetic_genus() == g.arithmetic_genus(),
                || format!("round trip fails on draw {drawn}"),
            )?;
            ensure(!g.is_stable() || &back == g, || {
                format!("stable graph changed on draw {drawn}")
            })?;
            round_trips += 1;
        }
        let cert = c.cycle_condition().map_err(|e| e.to_string())?;
        if scalings < TARGET && cert.is_feasible() {
            let base = g.vertices()[0].id.clone();
            let reference = c.component_scalings(&cert, &base).map_err(|e| e.to_string())?;
            let tree = common::random_spanning_tree(&mut rng, g);
            let other = c
                .component_scalings_along(&cert, &base, &tree)
                .map_err(|e| e.to_string())?;
            ensure(other == reference, || {
                format!("scalings depend on the tree on draw {drawn}")
            })?;
            scalings += 1;
        }
    }
    Ok(format!(
        "{degrees} degree sums, {round_trips} round trips, {scalings} scaling comparisons over {drawn} draws"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("obstruction fixtures", Duration::from_secs(1), obstruction_fixtures),
        (
            "principal boundary smoothing",
            Duration::from_secs(1),
            principal_boundary,
        ),
        ("cycle feasibility oracle", Duration::from_secs(30), cycle_oracle),
        ("spin counting law", Duration::from_secs(5), spin_counts),
        ("genus-3 separating node table", Duration::from_secs(1), delta1_table),
        ("hyp and odd intersection", Duration::from_secs(1), intersection),
        ("Arf suite", Duration::from_secs(10), arf_suite),
        ("projection and Kodaira tables", Duration::from_secs(1), strata_tables),
        ("local plumbing numerics", Duration::from_secs(5), local_plumbing),
        ("structural invariants", Duration::from_secs(30), structural_invariants),
    ];
    let mut failures = 0;
    for (number, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|summary| {
            if elapsed <= budget {
                Ok(summary)
            } else {
                Err(format!("{summary}, over the {budget:?} budget"))
            }
        });
        let (status, detail) = match outcome {
            Ok(summary) => ("PASS", summary),
            Err(reason) => {
                failures += 1;
                ("FAIL", reason)
            }
        };
        println!(
            "{status} {} {name} ({:.3} s): {detail}",
            number + 1,
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
