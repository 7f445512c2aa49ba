//! Exact phase-one simplex over big rationals.
//!
//! Decides `{s ≥ 0 : A s = b}` and returns either a point or a Farkas vector `u` with `uᵀA ≥ 0` and
//! `uᵀb < 0`. Bland's rule guarantees termination.

use num_traits::{One, Signed, Zero};

use crate::exact::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// A nonnegative solution `s`.
    Feasible(Vec<Rational>),
    /// A vector `u` over the rows with `uᵀA ≥ 0` and `uᵀb < 0`.
    Infeasible(Vec<Rational>),
}

/// Solves `A s = b, s ≥ 0` for `A` given as rows of length `n`.
pub fn nonnegative_solution(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Outcome {
    let m = a.len();
    assert_eq!(b.len(), m, "one right-hand side per row");
    if m == 0 {
        return Outcome::Feasible(vec![Rational::zero(); n]);
    }
    // Row signs making the right-hand side nonnegative.
    let flip: Vec<bool> = b.iter().map(|x| x.is_negative()).collect();
    let width = n + m;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let sign = if flip[i] { -Rational::one() } else { Rational::one() };
            let mut row: Vec<Rational> = a[i].iter().map(|x| x * &sign).collect();
            assert_eq!(row.len(), n, "row {i} has wrong length");
            row.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row.push(&b[i] * &sign);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..width).collect();
    // Reduced costs of the phase-one objective `Σ artificials`, last entry is minus the objective.
    let mut cost: Vec<Rational> = vec![Rational::zero(); width + 1];
    for row in &t {
        for (j, x) in row.iter().enumerate() {
            if j < n || j == width {
                cost[j] -= x;
            }
        }
    }

    while let Some(enter) = (0..n).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            leave = match leave {
                None => Some(i),
                Some(k) => {
                    let ri = &t[i][width] / &t[i][enter];
                    let rk = &t[k][width] / &t[k][enter];
                    if ri < rk || (ri == rk && basis[i] < basis[k]) {
                        Some(i)
                    } else {
                        Some(k)
                    }
                }
            };
        }
        let Some(r) = leave else {
            // Unbounded direction cannot occur: the phase-one objective is bounded below by zero.
            unreachable!("phase-one objective is bounded");
        };
        pivot(&mut t, &mut cost, r, enter);
        basis[r] = enter;
    }

    let objective = -cost[width].clone();
    if objective.is_positive() {
        // y_i = 1 − (reduced cost of artificial i); u = −D y.
        let u = (0..m)
            .map(|i| {
                let y = Rational::one() - &cost[n + i];
                if flip[i] {
                    y
                } else {
                    -y
                }
            })
            .collect();
        Outcome::Infeasible(u)
    } else {
        let mut s = vec![Rational::zero(); n];
        for (i, &j) in basis.iter().enumerate() {
            if j < n {
                s[j] = t[i][width].clone();
            }
        }
        Outcome::Feasible(s)
    }
}

fn pivot(t: &mut [Vec<Rational>], cost: &mut [Rational], r: usize, c: usize) {
    let p = t[r][c].clone();
    for x in t[r].iter_mut() {
        *x /= &p;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, y) in row.iter_mut().zip(&pivot_row) {
            *x -= &f * y;
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for (x, y) in cost.iter_mut().zip(&pivot_row) {
            *x -= &f * y;
        }
    }
}
