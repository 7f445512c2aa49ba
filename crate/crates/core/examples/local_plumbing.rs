//! Pulls the plumbed differential back to both charts and compares with the closed forms.

use limdiff::numeric_plumb::LocalPlumbData;
use num_complex::Complex64;

fn main() {
    println!(
        "{:>3} {:>8} {:>8} {:>12} {:>12} {:>12}",
        "k", "eps", "a", "rel err v", "rel err w", "residue err"
    );
    for k in -1..=3 {
        for eps in [1e-2, 1e-3] {
            for a in [
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 1.0),
            ] {
                let data = LocalPlumbData::with_grid(k, Complex64::new(eps, 0.0), a, 100).expect("valid chart");
                let report = data.pullback_check(1e-9).expect("samples off the degenerate locus");
                println!(
                    "{k:>3} {eps:>8.0e} {:>8} {:>12.2e} {:>12.2e} {:>12.2e}",
                    a.to_string(),
                    report.max_rel_err_v,
                    report.max_rel_err_w,
                    report.residue_abs_err,
                );
            }
        }
    }
}
