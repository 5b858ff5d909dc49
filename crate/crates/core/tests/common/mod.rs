//! Graph generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use qwjoin::graph::{complete, complete_bipartite, cocktail_party, cycle, empty_graph, path, WeightedGraph};
use qwjoin::matrix::{CMat, Mat};
use qwjoin::spectral::{decompose, MatrixKind, SpectralDecomposition};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random simple graph on `n` vertices with edge probability `p` and integer weights in `1..=max_w`.
pub fn random_simple(r: &mut StdRng, n: usize, p: f64, max_w: u32) -> WeightedGraph {
    let mut g = empty_graph(n).unwrap();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                g.add_edge(u, v, r.gen_range(1..=max_w) as f64).unwrap();
            }
        }
    }
    g
}

/// Random circulant graph on `n` vertices (regular), optionally with a uniform loop weight.
pub fn random_circulant(r: &mut StdRng, n: usize, loop_w: u32) -> WeightedGraph {
    let mut g = empty_graph(n).unwrap();
    for s in 1..=n / 2 {
        if r.gen_bool(0.5) {
            for u in 0..n {
                let v = (u + s) % n;
                if g.weight(u, v) == 0.0 {
                    g.add_edge(u, v, 1.0).unwrap();
                }
            }
        }
    }
    if loop_w > 0 {
        for u in 0..n {
            g.set_loop(u, loop_w as f64).unwrap();
        }
    }
    g
}

/// Regular graphs of order `n` from the named families.
pub fn regular_family(n: usize) -> Vec<(String, WeightedGraph)> {
    let mut out = vec![(format!("O{n}"), empty_graph(n).unwrap()), (format!("K{n}"), complete(n).unwrap())];
    if n >= 3 {
        out.push((format!("C{n}"), cycle(n).unwrap()));
    }
    if n >= 4 && n % 2 == 0 {
        out.push((format!("CP{n}"), cocktail_party(n).unwrap()));
        out.push((format!("K{},{}", n / 2, n / 2), complete_bipartite(n / 2, n / 2).unwrap()));
    }
    out
}

/// Simple graphs of order `n` from the named families (not necessarily regular).
pub fn simple_family(n: usize) -> Vec<(String, WeightedGraph)> {
    let mut out = regular_family(n);
    if n >= 3 {
        out.push((format!("P{n}"), path(n).unwrap()));
    }
    if n >= 3 {
        out.push((format!("K1,{}", n - 1), complete_bipartite(1, n - 1).unwrap()));
    }
    out
}

/// Every labelled simple unweighted graph on `n` vertices.
pub fn all_labelled(n: usize) -> Vec<WeightedGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<(usize, usize, f64)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &(u, v))| (u, v, 1.0))
                .collect();
            WeightedGraph::from_parts(n, &edges, &[]).unwrap()
        })
        .collect()
}

pub fn matrix_of(g: &WeightedGraph, kind: MatrixKind) -> Mat {
    match kind {
        MatrixKind::A => g.adjacency(),
        MatrixKind::L => g.laplacian(),
    }
}

/// `e^{itM}` by a truncated Taylor series with scaling and squaring; independent of the eigensolver.
pub fn expm_taylor(m: &Mat, t: f64) -> CMat {
    let n = m.order();
    let norm = m.max_abs() * n as f64 * t.abs();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let h = t / 2f64.powi(squarings as i32);
    let mut a = CMat::zeros(n);
    a.add_real_scaled(m, Complex64::new(0.0, h));
    let mut result = CMat::identity(n);
    let mut term = CMat::identity(n);
    for k in 1..=30 {
        term = term.mul(&a);
        for i in 0..n {
            for j in 0..n {
                term[(i, j)] /= k as f64;
                result[(i, j)] += term[(i, j)];
            }
        }
    }
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    result
}

/// Largest `|U(t)_{u,v}|` over `u != v` and the given times.
pub fn max_offdiag_magnitude(d: &SpectralDecomposition, times: &[f64]) -> f64 {
    let n = d.order();
    let mut best = 0.0f64;
    let mut acc = vec![Complex64::new(0.0, 0.0); n * n];
    for &t in times {
        acc.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for (l, e) in d.eigenvalues.iter().zip(&d.projectors) {
            let z = Complex64::from_polar(1.0, t * l);
            for u in 0..n {
                for v in u + 1..n {
                    acc[u * n + v] += z * e[(u, v)];
                }
            }
        }
        for u in 0..n {
            for v in u + 1..n {
                best = best.max(acc[u * n + v].norm());
            }
        }
    }
    best
}

pub fn grid(t_max: f64, step: f64) -> Vec<f64> {
    let count = (t_max / step).ceil() as usize;
    (0..=count).map(|i| i as f64 * step).collect()
}

pub fn decomp(g: &WeightedGraph, kind: MatrixKind) -> SpectralDecomposition {
    decompose(g, kind).unwrap()
}

/// Proptest strategy: random simple weighted graph of order `2..=max_n`.
pub fn simple_graph_strategy(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n, any::<u64>()).prop_map(|(n, seed)| {
        let mut r = rng(seed);
        let p = r.gen_range(0.2..0.9);
        random_simple(&mut r, n, p, 3)
    })
}

/// Proptest strategy: random regular graph (circulant) of order `1..=max_n`, optionally looped.
pub fn regular_graph_strategy(max_n: usize, loops: bool) -> impl Strategy<Value = WeightedGraph> {
    (1..=max_n, any::<u64>(), 0u32..3).prop_map(move |(n, seed, w)| {
        let mut r = rng(seed);
        random_circulant(&mut r, n, if loops { w } else { 0 })
    })
}

pub fn kind_strategy() -> impl Strategy<Value = MatrixKind> {
    prop_oneof![Just(MatrixKind::A), Just(MatrixKind::L)]
}

/// A random pair `(X, Y)` satisfying the join assumptions for `kind`.
pub fn random_operands(r: &mut StdRng, kind: MatrixKind) -> (WeightedGraph, WeightedGraph) {
    match kind {
        MatrixKind::L => {
            let (m, n) = (r.gen_range(1..=7), r.gen_range(1..=5));
            let (px, py) = (r.gen_range(0.1..0.9), r.gen_range(0.1..0.9));
            (random_simple(r, m, px, 2), random_simple(r, n, py, 2))
        }
        MatrixKind::A => {
            let (m, n) = (r.gen_range(1..=8), r.gen_range(1..=5));
            let (lx, ly) = (r.gen_range(0..3), r.gen_range(0..3));
            (random_circulant(r, m, lx), random_circulant(r, n, ly))
        }
    }
}

pub fn random_kind(r: &mut StdRng) -> MatrixKind {
    if r.gen_bool(0.5) {
        MatrixKind::A
    } else {
        MatrixKind::L
    }
}
