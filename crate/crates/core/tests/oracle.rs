//! Closed-form join results against dense decompositions of the built graphs.

mod common;

use std::f64::consts::PI;

use common::*;
use qwjoin::graph::{
    cocktail_party, complete, complete_bipartite, cycle, disjoint_union, empty_graph, empty_with_loops, hypercube,
    join, path, self_join, Connective, IteratedJoinSpec, WeightedGraph,
};
use qwjoin::spectral::{eigenvalue_support, iterated_join_support, join_support, sets_equal, JoinParams, MatrixKind};
use qwjoin::transfer::{
    double_cone_pst, iterated_join_analysis, join_period_ratio, join_pst, join_strong_cospectral, pst_certificate,
    pst_induced, pst_preserved, pst_preserved_padded, self_join_analysis, strong_cospectral, vertex_period,
};
use qwjoin::walk::{alpha, in_t, transition_entry, JoinWalk};
use qwjoin::Error;
use rand::rngs::StdRng;
use rand::Rng;

#[test]
fn join_partitions_match_the_projector_test() {
    let mut r = rng(11);
    for _ in 0..300 {
        let kind = random_kind(&mut r);
        let (x, y) = random_operands(&mut r, kind);
        let total = x.order() + y.order();
        if total < 2 {
            continue;
        }
        let u = r.gen_range(0..total);
        let v = (u + r.gen_range(1..total)) % total;
        let closed = match join_strong_cospectral(&x, &y, u, v, kind) {
            Ok(c) => c,
            Err(Error::Precondition(_)) if x.order().max(y.order()) < 2 => continue,
            Err(e) => panic!("{e}"),
        };
        let dense = strong_cospectral(&decomp(&join(&x, &y), kind), u, v).unwrap();
        assert_eq!(closed.is_some(), dense.is_some(), "{kind:?} {x:?} {y:?} ({u},{v})");
        if let (Some(a), Some(b)) = (closed, dense) {
            assert!(a.same_sets(&b), "{kind:?} ({u},{v}): {a:?} vs {b:?}");
        }
    }
}

#[test]
fn join_supports_match_the_dense_support() {
    let mut r = rng(12);
    for _ in 0..300 {
        let kind = random_kind(&mut r);
        let (x, y) = random_operands(&mut r, kind);
        let u = r.gen_range(0..x.order());
        let closed = join_support(&x, &y, u, kind).unwrap();
        let dense = eigenvalue_support(&decomp(&join(&x, &y), kind), u).unwrap();
        assert!(sets_equal(&closed, &dense), "{kind:?} u={u}: {closed:?} vs {dense:?}");
    }
}

#[test]
fn join_walk_entries_match_the_dense_walk() {
    let mut r = rng(13);
    for _ in 0..300 {
        let kind = random_kind(&mut r);
        let (x, y) = random_operands(&mut r, kind);
        let walk = JoinWalk::new(&x, &y, kind).unwrap();
        let dj = decomp(&join(&x, &y), kind);
        let t = r.gen_range(0.0..4.0 * PI);
        let n = walk.order();
        for u in 0..n {
            for v in 0..n {
                let closed = walk.entry(u, v, t).unwrap();
                let dense = transition_entry(&dj, u, v, t);
                assert!((closed - dense).norm() < 1e-9, "{kind:?} ({u},{v}) at {t}: {closed} vs {dense}");
            }
        }
    }
}

#[test]
fn join_pst_matches_the_dense_certificate() {
    let mut r = rng(14);
    for _ in 0..300 {
        let kind = random_kind(&mut r);
        let (x, y) = random_operands(&mut r, kind);
        let total = x.order() + y.order();
        if total < 2 {
            continue;
        }
        let u = r.gen_range(0..total);
        let v = (u + r.gen_range(1..total)) % total;
        let closed = match join_pst(&x, &y, u, v, kind) {
            Ok(c) => c,
            Err(e @ Error::Inconsistency(_)) => panic!("{e}"),
            Err(_) => continue,
        };
        let dense = pst_certificate(&decomp(&join(&x, &y), kind), u, v).unwrap();
        assert_eq!(closed.pst, dense.pst, "{kind:?} ({u},{v})");
        if closed.pst {
            assert!((closed.tau.unwrap() - dense.tau.unwrap()).abs() < 1e-9);
        }
    }
}

/// Random alternating join/union folds of up to four simple parts.
fn random_spec(r: &mut StdRng) -> IteratedJoinSpec {
    let p = r.gen_range(2..=4);
    let parts: Vec<WeightedGraph> = (0..p)
        .map(|_| {
            let n = r.gen_range(1..=4);
            let prob = r.gen_range(0.0..1.0);
            random_simple(r, n, prob, 1)
        })
        .collect();
    IteratedJoinSpec::new(parts).unwrap()
}

#[test]
fn iterated_supports_match_the_dense_support() {
    let mut r = rng(15);
    for _ in 0..300 {
        let spec = random_spec(&mut r);
        let g = spec.build();
        let u = r.gen_range(0..g.order());
        let part = spec.part_of(u).unwrap();
        let closed = iterated_join_support(&spec, u, part).unwrap();
        let dense = eigenvalue_support(&decomp(&g, MatrixKind::L), u).unwrap();
        assert!(sets_equal(&closed, &dense), "sizes {:?} u={u}: {closed:?} vs {dense:?}", spec.sizes());
    }
}

#[test]
fn iterated_analysis_matches_the_dense_certificate() {
    let mut r = rng(16);
    let mut checked = 0;
    while checked < 200 {
        let spec = random_spec(&mut r);
        let g = spec.build();
        let u = r.gen_range(0..g.order());
        let part = spec.part_of(u).unwrap();
        let size = spec.sizes()[part - 1];
        if size < 2 {
            continue;
        }
        let off = spec.offset(part);
        let v = off + (u - off + r.gen_range(1..size)) % size;
        let report = iterated_join_analysis(&spec, part, u, v).unwrap();
        let d = decomp(&g, MatrixKind::L);
        let sc = strong_cospectral(&d, u, v).unwrap();
        assert_eq!(report.sc.is_some(), sc.is_some());
        assert_eq!(report.pst.pst, pst_certificate(&d, u, v).unwrap().pst);
        checked += 1;
    }
}

#[test]
fn connectives_are_validated() {
    let parts = vec![empty_graph(2).unwrap(), complete(2).unwrap(), empty_graph(1).unwrap()];
    assert!(IteratedJoinSpec::with_connectives(parts.clone(), &[Connective::Union, Connective::Join]).is_ok());
    assert!(IteratedJoinSpec::with_connectives(parts, &[Connective::Join, Connective::Join]).is_err());
}

#[test]
fn discrepancy_vanishes_on_the_lattice() {
    let mut r = rng(17);
    for _ in 0..100 {
        let kind = random_kind(&mut r);
        let (x, y) = random_operands(&mut r, kind);
        let p = JoinParams::for_graphs(&x, &y, kind).unwrap();
        let Some(g) = qwjoin::walk::lattice_gcd(&p, kind).filter(|&g| g > 0) else { continue };
        for j in 0..8 {
            let t = 2.0 * PI * j as f64 / g as f64;
            assert!(in_t(&p, kind, t));
            assert!(alpha(&p, kind, t).norm() < 1e-9);
        }
    }
}

#[test]
fn preservation_verdicts_match_the_oracle() {
    let cases: Vec<(WeightedGraph, usize, usize)> = vec![
        (cycle(4).unwrap(), 0, 2),
        (hypercube(3).unwrap(), 0, 7),
        (complete(2).unwrap(), 0, 1),
        (path(2).unwrap(), 0, 1),
        (cocktail_party(8).unwrap(), 0, 1),
    ];
    for kind in [MatrixKind::L, MatrixKind::A] {
        for (x, u, v) in &cases {
            for n in 1..=9 {
                let y = empty_graph(n).unwrap();
                let report = match pst_preserved(x, &y, *u, *v, kind) {
                    Ok(r) => r,
                    Err(e @ Error::Inconsistency(_)) => panic!("{e}"),
                    Err(_) => continue,
                };
                let dense = pst_certificate(&decomp(&join(x, &y), kind), *u, *v).unwrap();
                assert_eq!(report.preserved, dense.pst, "{kind:?} order {} n={n}", x.order());
            }
        }
    }
}

#[test]
fn padding_verdicts_match_the_oracle() {
    let x = complete(2).unwrap();
    for r in 1..=5 {
        for n in 1..=8 {
            let (z, y) = (empty_graph(r).unwrap(), empty_graph(n).unwrap());
            let report = pst_preserved_padded(&x, &z, &y, 0, 1).unwrap();
            let dense = pst_certificate(&decomp(&join(&disjoint_union(&x, &z), &y), MatrixKind::L), 0, 1).unwrap();
            assert_eq!(report.preserved, dense.pst, "r={r} n={n}");
        }
    }
}

#[test]
fn induction_verdicts_match_the_oracle() {
    let cases: Vec<(WeightedGraph, usize, usize)> = vec![
        (path(3).unwrap(), 0, 2),
        (cocktail_party(6).unwrap(), 0, 1),
        (cocktail_party(10).unwrap(), 0, 1),
        (empty_graph(2).unwrap(), 0, 1),
        (complete_bipartite(2, 2).unwrap(), 0, 1),
        (path(5).unwrap(), 0, 4),
    ];
    for kind in [MatrixKind::L, MatrixKind::A] {
        for (x, u, v) in &cases {
            for n in 1..=9 {
                for y in [empty_graph(n).unwrap(), complete(n).unwrap()] {
                    let report = match pst_induced(x, &y, *u, *v, kind) {
                        Ok(r) => r,
                        Err(e @ Error::Inconsistency(_)) => panic!("{e}"),
                        Err(_) => continue,
                    };
                    let dense = pst_certificate(&decomp(&join(x, &y), kind), *u, *v).unwrap();
                    assert_eq!(report.induced, dense.pst, "{kind:?} order {} n={n}", x.order());
                }
            }
        }
    }
}

#[test]
fn double_cone_and_self_join_verdicts_match_the_oracle() {
    for n in 1..=12 {
        for y in [empty_graph(n).unwrap(), complete(n).unwrap()] {
            let report = double_cone_pst(&y, MatrixKind::L, None).unwrap();
            let dense = pst_certificate(&decomp(&join(&empty_graph(2).unwrap(), &y), MatrixKind::L), 0, 1).unwrap();
            assert_eq!(report.pst, dense.pst, "n={n}");
        }
        let looped = empty_with_loops(n, 1.0).unwrap();
        let report = double_cone_pst(&looped, MatrixKind::A, Some(1.0)).unwrap();
        let x = empty_with_loops(2, 1.0).unwrap();
        let dense = pst_certificate(&decomp(&join(&x, &looped), MatrixKind::A), 0, 1).unwrap();
        assert_eq!(report.pst, dense.pst, "looped n={n}");
    }
    for (x, u, v) in [(empty_graph(2).unwrap(), 0, 1), (path(3).unwrap(), 0, 2), (cocktail_party(6).unwrap(), 0, 1)] {
        for r in 1..=4 {
            for kind in [MatrixKind::L, MatrixKind::A] {
                let report = match self_join_analysis(&x, r, u, v, kind) {
                    Ok(rep) => rep,
                    Err(e @ Error::Inconsistency(_)) => panic!("{e}"),
                    Err(_) => continue,
                };
                let d = decomp(&self_join(&x, r).unwrap(), kind);
                assert_eq!(report.pst.pst, pst_certificate(&d, u, v).unwrap().pst, "{kind:?} r={r}");
            }
        }
    }
}

#[test]
fn period_ratios_match_the_minimum_periods() {
    let mut r = rng(18);
    let mut checked = 0;
    for _ in 0..400 {
        let kind = random_kind(&mut r);
        let (x, y) = random_operands(&mut r, kind);
        let u = r.gen_range(0..x.order());
        let ratio = match join_period_ratio(&x, &y, u, kind) {
            Ok(c) => c,
            Err(e @ Error::Inconsistency(_)) => panic!("{e}"),
            Err(_) => continue,
        };
        let px = vertex_period(&decomp(&x, kind), u).unwrap();
        let pj = vertex_period(&decomp(&join(&x, &y), kind), u).unwrap();
        let (rx, rj) = (px.rho.unwrap(), pj.rho.unwrap());
        assert!((ratio.rho_x - rx).abs() <= 1e-9 * rx);
        assert!((ratio.rho_join - rj).abs() <= 1e-9 * rj);
        assert!((ratio.c.value() * rx - rj).abs() <= 1e-9 * rj);
        if !x.is_connected() {
            assert_eq!(ratio.c.den, 1, "c must be integral for disconnected X");
        }
        checked += 1;
    }
    assert!(checked >= 50, "only {checked} periodic samples");
}

#[test]
fn bound_identities_hold_against_dense_walks() {
    let mut r = rng(19);
    for _ in 0..100 {
        let kind = random_kind(&mut r);
        let (x, y) = random_operands(&mut r, kind);
        let p = JoinParams::for_graphs(&x, &y, kind).unwrap();
        let (dx, dj) = (decomp(&x, kind), decomp(&join(&x, &y), kind));
        let m = x.order();
        let comps = x.components();
        for _ in 0..20 {
            let t = r.gen_range(0.0..4.0 * PI);
            if in_t(&p, kind, t) {
                continue;
            }
            let a = alpha(&p, kind, t).norm();
            if a < 1e-6 {
                continue;
            }
            for u in 0..m {
                for v in 0..m {
                    let f = transition_entry(&dj, u, v, t).norm() - transition_entry(&dx, u, v, t).norm();
                    assert!(f.abs() <= 2.0 / m as f64 + 1e-9);
                    let same = comps.iter().any(|c| c.contains(&u) && c.contains(&v));
                    if !same {
                        assert!((f - a).abs() < 1e-9 && f > 0.0, "cross-component F = {f}, |alpha| = {a}");
                    }
                    if u == v && x.is_isolated(u) {
                        assert!(f < 0.0, "isolated vertex F = {f}");
                    }
                }
            }
        }
    }
}
