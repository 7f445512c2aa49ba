//! Random inputs and independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod delta1;

use std::collections::{BTreeMap, BTreeSet};

use limdiff::candidate_diff::CandidateDifferential;
use limdiff::curve_graph::DualGraph;
use limdiff::exact::{rat, GaussianRational, Rational};
use limdiff::ids::EdgeId;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// One node of a generated candidate: endpoints and the order on each branch.
#[derive(Clone, Debug)]
pub struct NodeSpec {
    pub ends: [usize; 2],
    pub orders: [i64; 2],
    pub residue: i64,
}

/// A connected graph with at most `max_edges` nodes, loops and multi-edges allowed, carrying a
/// compatible candidate. Every weighted node has weight at most `max_weight`.
pub fn random_candidate(rng: &mut ChaCha8Rng, max_edges: usize, max_weight: i64) -> CandidateDifferential {
    let n_vertices = rng.gen_range(1..=4usize.min(max_edges + 1));
    let n_edges = rng.gen_range(n_vertices - 1..=max_edges.max(n_vertices - 1));
    let mut nodes = Vec::new();
    for i in 0..n_edges {
        let ends = if i + 1 < n_vertices {
            [rng.gen_range(0..=i), i + 1]
        } else {
            [rng.gen_range(0..n_vertices), rng.gen_range(0..n_vertices)]
        };
        let node = if rng.gen_bool(0.25) {
            let r = rng.gen_range(-3..=3);
            NodeSpec {
                ends,
                orders: [-1, -1],
                residue: r,
            }
        } else {
            let k = rng.gen_range(0..max_weight);
            let orders = if rng.gen_bool(0.5) { [k, -k - 2] } else { [-k - 2, k] };
            NodeSpec {
                ends,
                orders,
                residue: 0,
            }
        };
        nodes.push(node);
    }
    candidate_from_nodes(rng, n_vertices, &nodes)
}

/// Completes `nodes` with vertex genera and legs so that every component has the right degree.
pub fn candidate_from_nodes(rng: &mut ChaCha8Rng, n_vertices: usize, nodes: &[NodeSpec]) -> CandidateDifferential {
    let mut branch_sum = vec![0i64; n_vertices];
    for n in nodes {
        branch_sum[n.ends[0]] += n.orders[0];
        branch_sum[n.ends[1]] += n.orders[1];
    }
    let mut builder = DualGraph::builder();
    let mut leg_orders = Vec::new();
    let mut legs = Vec::new();
    for (v, &b) in branch_sum.iter().enumerate() {
        let mut genus = 0i64;
        while 2 * genus - 2 - b < 0 {
            genus += 1;
        }
        genus += rng.gen_range(0..=1);
        builder = builder.vertex(&format!("V{v}"), genus as u32);
        let mut rest = 2 * genus - 2 - b;
        while rest > 0 {
            let k = if rest > 1 && rng.gen_bool(0.5) {
                rng.gen_range(1..rest)
            } else {
                rest
            };
            let id = format!("Z{}", legs.len());
            legs.push((id.clone(), v));
            leg_orders.push((id, k));
            rest -= k;
        }
    }
    let mut branch_orders = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        let (a, b) = (format!("E{i}a"), format!("E{i}b"));
        builder = builder.edge(
            &format!("E{i}"),
            (&a, &format!("V{}", n.ends[0])),
            (&b, &format!("V{}", n.ends[1])),
        );
        branch_orders.push((a, n.orders[0]));
        branch_orders.push((b, n.orders[1]));
    }
    for (id, v) in &legs {
        builder = builder.leg(id, &format!("V{v}"));
    }
    let graph = builder.build().expect("generated graph is valid");
    let legs: Vec<(&str, i64)> = leg_orders.iter().map(|(id, k)| (id.as_str(), *k)).collect();
    let branches: Vec<(&str, i64)> = branch_orders.iter().map(|(id, k)| (id.as_str(), *k)).collect();
    let mut c = CandidateDifferential::from_orders(graph, &legs, &branches).expect("generated candidate");
    for (i, n) in nodes.iter().enumerate() {
        if n.orders == [-1, -1] {
            c = c
                .with_residue(&format!("E{i}a"), GaussianRational::real(n.residue))
                .with_residue(&format!("E{i}b"), GaussianRational::real(-n.residue));
        }
    }
    c
}

/// Weight and zero side of a node: weight `k + 1` for orders `(k, −k − 2)`, with `+1` when the
/// first stored half-edge carries the zero.
pub fn weight_and_sign(c: &CandidateDifferential, half_edges: [&str; 2]) -> (i64, i64) {
    let a = c.branch_order(half_edges[0]).expect("order");
    let b = c.branch_order(half_edges[1]).expect("order");
    if a == -1 && b == -1 {
        (0, 0)
    } else if a >= 0 {
        (a + 1, 1)
    } else {
        (b + 1, -1)
    }
}

/// Reduced row echelon form over the rationals; returns the pivot columns.
fn rref(m: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Rational::one() / m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot_row).take(cols) {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// A basis of `{x : m x = 0}`.
pub fn nullspace(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a, cols);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][free].clone();
            }
            v
        })
        .collect()
}

/// The kernel of the vertex-edge incidence matrix, indexed like `graph.edges()`, with each edge
/// running from its first stored half-edge to its second.
pub fn cycle_space(graph: &DualGraph) -> Vec<Vec<Rational>> {
    let vertex_index: BTreeMap<_, _> = graph
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.clone(), i))
        .collect();
    let edges = graph.edges();
    let mut incidence = vec![vec![Rational::zero(); edges.len()]; graph.vertices().len()];
    for (j, e) in edges.iter().enumerate() {
        if !e.is_loop() {
            incidence[vertex_index[&e.half_edges[0].vertex]][j] -= Rational::one();
            incidence[vertex_index[&e.half_edges[1].vertex]][j] += Rational::one();
        }
    }
    nullspace(&incidence, edges.len())
}

/// Cycle feasibility through the elementary vectors of the cycle equations.
///
/// The equations are `Σ_e z_e · s_e · w_e · x_e = 0` for `z` in the cycle space (the kernel of the
/// incidence matrix). A strictly negative solution exists exactly when the sign-consistent
/// elementary vectors of the solution space cover every weighted node.
pub fn kernel_orthant_feasible(c: &CandidateDifferential) -> bool {
    let graph = c.graph();
    let edges = graph.edges();
    let cycles = cycle_space(graph);
    let weighted: Vec<(usize, i64)> = edges
        .iter()
        .enumerate()
        .filter_map(|(j, e)| {
            let (w, s) = weight_and_sign(c, [e.half_edges[0].id.as_str(), e.half_edges[1].id.as_str()]);
            (w > 0).then_some((j, w * s))
        })
        .collect();
    if weighted.is_empty() {
        return true;
    }
    let n = weighted.len();
    let equations: Vec<Vec<Rational>> = cycles
        .iter()
        .map(|z| weighted.iter().map(|&(j, ws)| z[j].clone() * rat(ws)).collect())
        .collect();
    let mut covered = vec![false; n];
    for mask in 0u32..(1 << n) {
        let mut rows = equations.clone();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                let mut unit = vec![Rational::zero(); n];
                unit[i] = Rational::one();
                rows.push(unit);
            }
        }
        let basis = nullspace(&rows, n);
        if basis.len() != 1 {
            continue;
        }
        let v = &basis[0];
        let positive = v.iter().any(Signed::is_positive);
        let negative = v.iter().any(Signed::is_negative);
        if positive != negative {
            for (i, x) in v.iter().enumerate() {
                covered[i] |= !x.is_zero();
            }
        }
    }
    covered.iter().all(|&c| c)
}

/// Cycle feasibility as acyclicity: after contracting the nodes of weight 0, the nodes pointing
/// from zero to pole must form a directed graph without cycles.
pub fn contraction_dag_feasible(c: &CandidateDifferential) -> bool {
    let graph = c.graph();
    let index: BTreeMap<_, _> = graph
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.clone(), i))
        .collect();
    let mut class: Vec<usize> = (0..index.len()).collect();
    fn find(class: &mut [usize], x: usize) -> usize {
        if class[x] != x {
            class[x] = find(class, class[x]);
        }
        class[x]
    }
    let mut arrows = Vec::new();
    for e in graph.edges() {
        let (w, s) = weight_and_sign(c, [e.half_edges[0].id.as_str(), e.half_edges[1].id.as_str()]);
        let (u, v) = (index[&e.half_edges[0].vertex], index[&e.half_edges[1].vertex]);
        if w == 0 {
            let (a, b) = (find(&mut class, u), find(&mut class, v));
            class[a] = b;
        } else if s > 0 {
            arrows.push((u, v));
        } else {
            arrows.push((v, u));
        }
    }
    let arrows: BTreeSet<(usize, usize)> = arrows
        .into_iter()
        .map(|(a, b)| (find(&mut class, a), find(&mut class, b)))
        .collect();
    if arrows.iter().any(|(a, b)| a == b) {
        return false;
    }
    let nodes: BTreeSet<usize> = (0..index.len()).map(|x| find(&mut class, x)).collect();
    let mut indegree: BTreeMap<usize, usize> = nodes.iter().map(|&n| (n, 0)).collect();
    for (_, b) in &arrows {
        *indegree.get_mut(b).expect("class") += 1;
    }
    let mut ready: Vec<usize> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
    let mut seen = 0;
    while let Some(n) = ready.pop() {
        seen += 1;
        for (a, b) in &arrows {
            if *a == n {
                let d = indegree.get_mut(b).expect("class");
                *d -= 1;
                if *d == 0 {
                    ready.push(*b);
                }
            }
        }
    }
    seen == nodes.len()
}

/// A uniformly shuffled spanning tree, built by Kruskal over a random edge order.
pub fn random_spanning_tree(rng: &mut ChaCha8Rng, graph: &DualGraph) -> BTreeSet<EdgeId> {
    let index: BTreeMap<_, _> = graph
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.clone(), i))
        .collect();
    let mut class: Vec<usize> = (0..index.len()).collect();
    let mut order: Vec<_> = graph.edges().iter().collect();
    order.shuffle(rng);
    let mut tree = BTreeSet::new();
    for e in order {
        let (mut a, mut b) = (index[&e.half_edges[0].vertex], index[&e.half_edges[1].vertex]);
        while class[a] != a {
            a = class[a];
        }
        while class[b] != b {
            b = class[b];
        }
        if a != b {
            class[a] = b;
            tree.insert(e.id.clone());
        }
    }
    tree
}

/// Every labelled tree on `n` vertices, as edge lists, decoded from Prüfer sequences.
pub fn labelled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![vec![]];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let total = n.pow((n - 2) as u32);
    for code in 0..total {
        let mut seq = Vec::with_capacity(n - 2);
        let mut x = code;
        for _ in 0..n - 2 {
            seq.push(x % n);
            x /= n;
        }
        let mut degree = vec![1usize; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::new();
        for &s in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).expect("leaf");
            edges.push((leaf, s));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

/// The tree with `edges` and one genus-1 vertex per label.
pub fn elliptic_tree(n: usize, edges: &[(usize, usize)]) -> DualGraph {
    let mut b = DualGraph::builder();
    for v in 0..n {
        b = b.vertex(&format!("E{v}"), 1);
    }
    for (i, (u, v)) in edges.iter().enumerate() {
        b = b.edge(
            &format!("N{i}"),
            (&format!("N{i}a"), &format!("E{u}")),
            (&format!("N{i}b"), &format!("E{v}")),
        );
    }
    b.build().expect("tree of elliptic curves")
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn multiply(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// A random integer symplectic matrix of size `2g` for the form `J = [[0, I], [−I, 0]]`, as a
/// product of shears `[[I, S], [0, I]]`, `[[I, 0], [S, I]]` with `S` symmetric and block
/// transforms `diag(A, A^{−T})` with `A` an elementary unimodular matrix.
pub fn random_symplectic(rng: &mut ChaCha8Rng, genus: usize, factors: usize) -> Vec<Vec<i64>> {
    let n = 2 * genus;
    let mut m = identity(n);
    for _ in 0..factors {
        let mut f = identity(n);
        match rng.gen_range(0..3) {
            kind @ (0 | 1) => {
                let (i, j) = (rng.gen_range(0..genus), rng.gen_range(0..genus));
                let s = rng.gen_range(-2..=2);
                let (row, col) = if kind == 0 { (0, genus) } else { (genus, 0) };
                f[row + i][col + j] += s;
                if i != j {
                    f[row + j][col + i] += s;
                }
            }
            _ => {
                if genus < 2 {
                    continue;
                }
                let i = rng.gen_range(0..genus);
                let j = (i + rng.gen_range(1..genus)) % genus;
                let s = rng.gen_range(-2..=2);
                // A = I + s·E_ij, so A^{−T} = I − s·E_ji.
                f[i][j] += s;
                f[genus + j][genus + i] -= s;
            }
        }
        m = multiply(&f, &m);
    }
    m
}

/// `Mᵀ J M = J` for the standard symplectic form.
pub fn is_symplectic(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    let g = n / 2;
    let j = |a: usize, b: usize| -> i64 {
        if b == a + g {
            1
        } else if a == b + g {
            -1
        } else {
            0
        }
    };
    (0..n).all(|r| {
        (0..n).all(|c| {
            let mut total = 0;
            for a in 0..n {
                for b in 0..n {
                    total += m[a][r] * j(a, b) * m[b][c];
                }
            }
            total == j(r, c)
        })
    })
}
