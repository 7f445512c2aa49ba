//! Homology generators, integer symplectic reduction and the Arf invariant.
//!
//! Generators are the fundamental cycles of a spanning tree of the dual graph, plus for every node
//! an admissible path and the core circle of its cylinder. The quadratic form `q` takes the value
//! `index + double points + 1` on an immersed curve and satisfies `q(x + y) = q(x) + q(y) + x·y`
//! modulo 2; the Arf invariant is `Σ q(aᵢ) q(bᵢ)`.

use std::collections::VecDeque;

use super::curves::{reduce_cyclic, reduce_walk, Realization, SurfacePath};
use super::triangulation::Triangulation;
use super::{CurveChoices, SurfaceError, TranslationSurface};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Fundamental cycle of a non-tree side of the dual graph.
    Cycle,
    /// Admissible path of a node.
    Arc { node: usize },
    /// Core circle of the cylinder of a node, oriented along the first edge of the pair.
    NodeCircle { node: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub kind: GeneratorKind,
    /// Drawn representative; node circles live in the cylinder and have none.
    pub path: Option<SurfacePath>,
    /// For cycles: the walk from the root triangle and back, before cyclic reduction.
    pub based_walk: Vec<usize>,
    pub q: u8,
}

/// An admissible symplectic system, stored as integer combinations of generators.
#[derive(Clone, Debug)]
pub struct SymplecticSystem {
    triangulation: Triangulation,
    root: usize,
    choices: CurveChoices,
    generators: Vec<Generator>,
    gram: Vec<Vec<i64>>,
    a: Vec<Vec<i64>>,
    b: Vec<Vec<i64>>,
    kernel: Vec<Vec<i64>>,
    genus: u64,
}

fn form(gram: &[Vec<i64>], x: &[i64], y: &[i64]) -> i64 {
    let mut total = 0;
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        for (j, &yj) in y.iter().enumerate() {
            total += xi * gram[i][j] * yj;
        }
    }
    total
}

fn axpy(target: &mut [i64], c: i64, x: &[i64]) {
    for (t, &v) in target.iter_mut().zip(x) {
        *t += c * v;
    }
}

/// Coordinates of one symplectic pair `(a, b)` in the original generators.
type BasisPair = (Vec<i64>, Vec<i64>);

/// Splits the form into hyperbolic pairs and a kernel. Pairs listed in `forced` are split first,
/// in order; each must pair to ±1.
fn symplectic_reduction(
    gram: &[Vec<i64>],
    forced: &[(usize, usize)],
) -> Result<(Vec<BasisPair>, Vec<Vec<i64>>), SurfaceError> {
    let n = gram.len();
    let mut vecs: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::new();

    // Clears every remaining vector against the pair (i, j), or returns false after shrinking an
    // entry below |d|.
    let clear = |vecs: &mut Vec<Vec<i64>>, remaining: &[usize], i: usize, j: usize, d: i64| -> bool {
        for &k in remaining {
            if k == i || k == j {
                continue;
            }
            let fik = form(gram, &vecs[i], &vecs[k]);
            let fjk = form(gram, &vecs[j], &vecs[k]);
            if fik % d != 0 {
                let (vj, q) = (vecs[j].clone(), fik / d);
                axpy(&mut vecs[k], -q, &vj);
                return false;
            }
            if fjk % d != 0 {
                let (vi, c) = (vecs[i].clone(), fjk / d);
                axpy(&mut vecs[k], c, &vi);
                return false;
            }
            let (vi, vj) = (vecs[i].clone(), vecs[j].clone());
            axpy(&mut vecs[k], -(fik / d), &vj);
            axpy(&mut vecs[k], fjk / d, &vi);
        }
        true
    };

    let mut split = |vecs: &mut Vec<Vec<i64>>, remaining: &mut Vec<usize>, i: usize, j: usize, d: i64| {
        let a = vecs[i].clone();
        let b: Vec<i64> = vecs[j].iter().map(|&v| v * d).collect();
        remaining.retain(|&k| k != i && k != j);
        pairs.push((a, b));
    };

    for &(i, j) in forced {
        let d = form(gram, &vecs[i], &vecs[j]);
        if d.abs() != 1 {
            return Err(SurfaceError::Degenerate(format!("node pair generators meet {d} times")));
        }
        let cleared = clear(&mut vecs, &remaining, i, j, d);
        debug_assert!(cleared);
        split(&mut vecs, &mut remaining, i, j, d);
    }
    loop {
        let mut best: Option<(usize, usize, i64)> = None;
        for (x, &i) in remaining.iter().enumerate() {
            for &j in &remaining[x + 1..] {
                let d = form(gram, &vecs[i], &vecs[j]);
                if d != 0 && best.is_none_or(|(_, _, b)| d.abs() < b.abs()) {
                    best = Some((i, j, d));
                }
            }
        }
        let Some((i, j, d)) = best else { break };
        if !clear(&mut vecs, &remaining, i, j, d) {
            continue;
        }
        if d.abs() != 1 {
            return Err(SurfaceError::Degenerate(format!("elementary divisor {d}")));
        }
        split(&mut vecs, &mut remaining, i, j, d);
    }
    let kernel = remaining.iter().map(|&k| vecs[k].clone()).collect();
    Ok((pairs, kernel))
}

impl SymplecticSystem {
    pub fn find(s: &TranslationSurface, choices: CurveChoices) -> Result<Self, SurfaceError> {
        let tri = s.triangulate(choices.triangulation_offset)?;
        let triangles = tri.triangles().len();
        let root = choices.tree_root % triangles;

        // Breadth-first spanning tree of the dual graph; `parent_exit[t]` leaves the parent of t.
        let mut parent_exit: Vec<Option<usize>> = vec![None; triangles];
        let mut seen = vec![false; triangles];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            for side in 3 * t..3 * t + 3 {
                if let Some(other) = tri.partner(side) {
                    let u = other / 3;
                    if !seen[u] {
                        seen[u] = true;
                        parent_exit[u] = Some(side);
                        queue.push_back(u);
                    }
                }
            }
        }
        let from_root = |mut t: usize| {
            let mut walk = Vec::new();
            while let Some(e) = parent_exit[t] {
                walk.push(e);
                t = e / 3;
            }
            walk.reverse();
            walk
        };
        let to_root = |mut t: usize| {
            let mut walk = Vec::new();
            while let Some(e) = parent_exit[t] {
                walk.push(tri.partner(e).expect("tree sides are glued"));
                t = e / 3;
            }
            walk
        };
        let is_tree_side = |s: usize, p: usize| parent_exit[p / 3] == Some(s) || parent_exit[s / 3] == Some(p);

        let mut generators = Vec::new();
        for s in 0..tri.side_count() {
            let Some(p) = tri.partner(s) else { continue };
            if s > p || is_tree_side(s, p) {
                continue;
            }
            let mut based = from_root(s / 3);
            based.push(s);
            based.extend(to_root(p / 3));
            let exits = reduce_cyclic(&tri, &based);
            generators.push(Generator {
                kind: GeneratorKind::Cycle,
                path: Some(SurfacePath::closed(exits)),
                based_walk: based,
                q: 0,
            });
        }
        let mut forced = Vec::new();
        for k in 0..tri.node_count() {
            let mut walk = to_root(tri.node_entry_side(k) / 3);
            walk.extend(from_root(tri.node_exit_side(k) / 3));
            let mut exits = reduce_walk(&tri, &walk);
            exits.push(tri.node_exit_side(k));
            forced.push((generators.len(), generators.len() + 1));
            generators.push(Generator {
                kind: GeneratorKind::Arc { node: k },
                path: Some(SurfacePath::admissible(k, exits)),
                based_walk: Vec::new(),
                q: 0,
            });
            generators.push(Generator {
                kind: GeneratorKind::NodeCircle { node: k },
                path: None,
                based_walk: Vec::new(),
                q: 1,
            });
        }

        let drawn: Vec<usize> = (0..generators.len())
            .filter(|&i| generators[i].path.is_some())
            .collect();
        let paths: Vec<SurfacePath> = drawn.iter().map(|&i| generators[i].path.clone().unwrap()).collect();
        let realization = Realization::new(&tri, &paths, choices.reverse_positions)?;
        let n = generators.len();
        let mut gram = vec![vec![0i64; n]; n];
        for (x, &i) in drawn.iter().enumerate() {
            generators[i].q = realization.quadratic_value(x)?;
            for (y, &j) in drawn.iter().enumerate() {
                gram[i][j] = realization.intersection(x, y);
            }
        }
        for i in 0..n {
            if let GeneratorKind::NodeCircle { node } = generators[i].kind {
                let arc = i - 1;
                debug_assert_eq!(generators[arc].kind, GeneratorKind::Arc { node });
                gram[i][arc] = 1;
                gram[arc][i] = -1;
            }
        }

        let (pairs, kernel) = symplectic_reduction(&gram, &forced)?;
        if pairs.len() as u64 != s.genus() {
            return Err(SurfaceError::Degenerate(format!(
                "found {} symplectic pairs on a surface of genus {}",
                pairs.len(),
                s.genus()
            )));
        }
        let (a, b) = pairs.into_iter().unzip();
        let sys = SymplecticSystem {
            triangulation: tri,
            root,
            choices,
            generators,
            gram,
            a,
            b,
            kernel,
            genus: s.genus(),
        };
        sys.check()?;
        Ok(sys)
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.triangulation
    }

    pub fn choices(&self) -> CurveChoices {
        self.choices
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator_gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn a(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn kernel(&self) -> &[Vec<i64>] {
        &self.kernel
    }

    pub fn genus(&self) -> usize {
        self.genus as usize
    }

    /// Basis in the order `a₁..a_g, b₁..b_g`.
    pub fn basis(&self) -> Vec<Vec<i64>> {
        self.a.iter().chain(&self.b).cloned().collect()
    }

    pub fn intersection(&self, x: &[i64], y: &[i64]) -> i64 {
        form(&self.gram, x, y)
    }

    /// Intersection matrix of the basis `a₁..a_g, b₁..b_g`.
    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let basis = self.basis();
        basis
            .iter()
            .map(|x| basis.iter().map(|y| self.intersection(x, y)).collect())
            .collect()
    }

    /// Checks `aᵢ·bⱼ = δᵢⱼ`, `aᵢ·aⱼ = bᵢ·bⱼ = 0`, and that node `i` owns `aᵢ` and `bᵢ`.
    pub fn check(&self) -> Result<(), SurfaceError> {
        let g = self.genus();
        if self.a.len() != g || self.b.len() != g {
            return Err(SurfaceError::Degenerate("basis size differs from the genus".into()));
        }
        let m = self.intersection_matrix();
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let expected = if j == i + g {
                    1
                } else if i == j + g {
                    -1
                } else {
                    0
                };
                if v != expected {
                    return Err(SurfaceError::Degenerate(format!(
                        "entry ({i}, {j}) is {v}, expected {expected}"
                    )));
                }
            }
        }
        for k in 0..self.triangulation.node_count() {
            let arc = self
                .generators
                .iter()
                .position(|gen| gen.kind == GeneratorKind::Arc { node: k })
                .expect("every node has an arc");
            let unit = |v: &[i64], i: usize| v.iter().enumerate().all(|(x, &c)| c == i64::from(x == i));
            if !unit(&self.a[k], arc)
                || self.b[k][arc + 1].abs() != 1
                || self.b[k].iter().filter(|&&c| c != 0).count() != 1
            {
                return Err(SurfaceError::Degenerate(format!(
                    "node {k} does not own the pair a{k}, b{k}"
                )));
            }
        }
        Ok(())
    }

    /// `q(Σ xᵢ eᵢ) = Σ xᵢ q(eᵢ) + Σ_{i<j} xᵢ xⱼ (eᵢ·eⱼ)` modulo 2.
    pub fn quadratic_value(&self, x: &[i64]) -> u8 {
        let mut total: i64 = 0;
        for (i, &xi) in x.iter().enumerate() {
            total += xi * i64::from(self.generators[i].q);
            for (j, &xj) in x.iter().enumerate().skip(i + 1) {
                total += xi * xj * self.gram[i][j];
            }
        }
        total.rem_euclid(2) as u8
    }

    pub fn arf(&self) -> u8 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| self.quadratic_value(a) * self.quadratic_value(b))
            .sum::<u8>()
            % 2
    }

    /// Indices `ind(aᵢ)`, `ind(bᵢ)` as `q − 1` modulo 2, valid for simple representatives.
    pub fn indices(&self) -> (Vec<u8>, Vec<u8>) {
        let ind = |v: &Vec<i64>| (self.quadratic_value(v) + 1) % 2;
        (self.a.iter().map(ind).collect(), self.b.iter().map(ind).collect())
    }

    /// New basis `M · (a; b)` for an integer matrix `M` of size `2g`, which must be symplectic.
    pub fn transformed(&self, matrix: &[Vec<i64>]) -> Result<SymplecticSystem, SurfaceError> {
        let g = self.genus();
        let basis = self.basis();
        let n = self.generators.len();
        let combine = |row: &Vec<i64>| {
            let mut v = vec![0i64; n];
            for (c, vector) in row.iter().zip(&basis) {
                axpy(&mut v, *c, vector);
            }
            v
        };
        let rows: Vec<Vec<i64>> = matrix.iter().map(combine).collect();
        let mut out = self.clone();
        out.a = rows[..g].to_vec();
        out.b = rows[g..].to_vec();
        let m = out.intersection_matrix();
        let standard = (0..2 * g).all(|i| {
            (0..2 * g).all(|j| {
                m[i][j]
                    == if j == i + g {
                        1
                    } else if i == j + g {
                        -1
                    } else {
                        0
                    }
            })
        });
        if !standard {
            return Err(SurfaceError::Degenerate("basis change is not symplectic".into()));
        }
        Ok(out)
    }

    /// A single closed walk in the class `Σ xᵢ eᵢ`, when it only involves cycles: the based
    /// loops concatenated at the root triangle and cyclically reduced.
    pub fn closed_walk(&self, x: &[i64]) -> Option<Vec<usize>> {
        let tri = &self.triangulation;
        let mut walk = Vec::new();
        for (gen, &c) in self.generators.iter().zip(x) {
            if c == 0 {
                continue;
            }
            if gen.kind != GeneratorKind::Cycle {
                return None;
            }
            let inverse: Vec<usize> = gen
                .based_walk
                .iter()
                .rev()
                .map(|&s| tri.partner(s).expect("cycles cross glued sides"))
                .collect();
            for _ in 0..c.unsigned_abs() {
                walk.extend(if c > 0 { &gen.based_walk } else { &inverse });
            }
        }
        Some(reduce_cyclic(tri, &walk))
    }

    /// `q` of a class computed from a drawn closed curve in it: zero for the trivial walk,
    /// otherwise index plus double points plus one.
    pub fn geometric_quadratic_value(&self, x: &[i64]) -> Result<Option<u8>, SurfaceError> {
        let Some(walk) = self.closed_walk(x) else {
            return Ok(None);
        };
        if walk.is_empty() {
            return Ok(Some(0));
        }
        let path = SurfacePath::closed(walk);
        let r = Realization::new(&self.triangulation, &[path], self.choices.reverse_positions)?;
        r.quadratic_value(0).map(Some)
    }

    /// Compares the algebraic `q` of every basis element with the value read off a drawn curve.
    /// Returns the number of elements compared.
    pub fn verify_geometric(&self) -> Result<usize, SurfaceError> {
        let mut compared = 0;
        for (i, x) in self.basis().iter().enumerate() {
            if let Some(geometric) = self.geometric_quadratic_value(x)? {
                let algebraic = self.quadratic_value(x);
                if geometric != algebraic {
                    return Err(SurfaceError::Inconsistent(format!(
                        "basis element {i}: drawn curve gives q = {geometric}, the quadratic form gives {algebraic}"
                    )));
                }
                compared += 1;
            }
        }
        Ok(compared)
    }

    pub fn root(&self) -> usize {
        self.root
    }
}
