//! Transition matrices `U_M(t) = sum_j e^{it lambda_j} E_j` and the closed-form
//! entries of walks on joins.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, reconstruct_integer};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::matrix::CMat;
use crate::spectral::{check_join_assumptions, decompose, JoinParams, MatrixKind, SpectralDecomposition};

/// Tolerance for membership in the lattices `T_M` and for exponential equality.
pub const LATTICE_TOL: f64 = 1e-9;

pub fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// `U_M(t)` as a dense matrix.
pub fn transition_matrix(decomp: &SpectralDecomposition, t: f64) -> CMat {
    let mut u = CMat::zeros(decomp.order());
    for (l, e) in decomp.eigenvalues.iter().zip(&decomp.projectors) {
        u.add_real_scaled(e, cis(t * l));
    }
    u
}

/// A single entry `U_M(t)_{u,v}`, without forming the whole matrix.
pub fn transition_entry(decomp: &SpectralDecomposition, u: usize, v: usize, t: f64) -> Complex64 {
    decomp
        .eigenvalues
        .iter()
        .zip(&decomp.projectors)
        .map(|(l, e)| cis(t * l) * e[(u, v)])
        .sum()
}

/// Precomputed coefficients `(E_j)_{u,v}` for fast repeated evaluation of one entry.
#[derive(Debug, Clone)]
pub struct EntryEvaluator {
    terms: Vec<(f64, f64)>,
}

impl EntryEvaluator {
    pub fn new(decomp: &SpectralDecomposition, u: usize, v: usize) -> Self {
        let terms = decomp
            .eigenvalues
            .iter()
            .zip(&decomp.projectors)
            .map(|(&l, e)| (l, e[(u, v)]))
            .filter(|&(_, c)| c != 0.0)
            .collect();
        EntryEvaluator { terms }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms.iter().map(|&(l, c)| cis(t * l) * c).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntrySource {
    Direct,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionEntryReport {
    pub t: f64,
    pub u: usize,
    pub v: usize,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub source: EntrySource,
}

impl TransitionEntryReport {
    pub fn new(t: f64, u: usize, v: usize, value: Complex64, source: EntrySource) -> Self {
        TransitionEntryReport { t, u, v, re: value.re, im: value.im, magnitude: value.norm(), source }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

pub fn direct_entry_report(decomp: &SpectralDecomposition, u: usize, v: usize, t: f64) -> TransitionEntryReport {
    TransitionEntryReport::new(t, u, v, transition_entry(decomp, u, v, t), EntrySource::Direct)
}

/// Closed-form walk on `X v Y` from the spectral data of `X` and `Y` alone.
///
/// Vertices are numbered as in [`crate::graph::join`]: `X` first, then `Y`.
#[derive(Debug, Clone)]
pub struct JoinWalk {
    pub kind: MatrixKind,
    pub params: JoinParams,
    pub x: SpectralDecomposition,
    pub y: SpectralDecomposition,
}

impl JoinWalk {
    pub fn new(x: &WeightedGraph, y: &WeightedGraph, kind: MatrixKind) -> Result<Self> {
        check_join_assumptions(x, y, kind)?;
        Ok(JoinWalk {
            kind,
            params: JoinParams::for_graphs(x, y, kind)?,
            x: decompose(x, kind)?,
            y: decompose(y, kind)?,
        })
    }

    pub fn order(&self) -> usize {
        self.params.m + self.params.n
    }

    /// `U_M(X v Y, t)_{u,v}`.
    pub fn entry(&self, u: usize, v: usize, t: f64) -> Result<Complex64> {
        let (m, n) = (self.params.m, self.params.n);
        if u >= m + n || v >= m + n {
            return Err(Error::Domain(format!("pair ({u},{v}) out of range for order {}", m + n)));
        }
        let in_x = |w: usize| w < m;
        Ok(match (in_x(u), in_x(v)) {
            (true, true) => self.same_side(&self.x, &self.params, u, v, t),
            (false, false) => self.same_side(&self.y, &self.swapped(), u - m, v - m, t),
            _ => self.cross(t),
        })
    }

    pub fn entry_report(&self, u: usize, v: usize, t: f64) -> Result<TransitionEntryReport> {
        Ok(TransitionEntryReport::new(t, u, v, self.entry(u, v, t)?, EntrySource::ClosedForm))
    }

    fn swapped(&self) -> JoinParams {
        let p = &self.params;
        JoinParams::new(p.n, p.m, p.ell, p.k)
    }

    fn cross(&self, t: f64) -> Complex64 {
        let p = &self.params;
        match self.kind {
            MatrixKind::L => {
                let s = (p.m + p.n) as f64;
                (1.0 - cis(t * s)) / s
            }
            MatrixKind::A => (cis(t * p.lambda_plus) - cis(t * p.lambda_minus)) / p.d.sqrt(),
        }
    }

    fn same_side(&self, side: &SpectralDecomposition, p: &JoinParams, u: usize, v: usize, t: f64) -> Complex64 {
        let base = transition_entry(side, u, v, t);
        match self.kind {
            MatrixKind::L => cis(t * p.n as f64) * base + cis(t * p.n as f64) * alpha(p, MatrixKind::L, t),
            MatrixKind::A => base + alpha(p, MatrixKind::A, t),
        }
    }
}

/// Laplacian closed-form entry of `X v Y` (pair indices in the join).
pub fn join_entry_l(x: &WeightedGraph, y: &WeightedGraph, u: usize, v: usize, t: f64) -> Result<Complex64> {
    JoinWalk::new(x, y, MatrixKind::L)?.entry(u, v, t)
}

/// Adjacency closed-form entry of `X v Y` (pair indices in the join).
pub fn join_entry_a(x: &WeightedGraph, y: &WeightedGraph, u: usize, v: usize, t: f64) -> Result<Complex64> {
    JoinWalk::new(x, y, MatrixKind::A)?.entry(u, v, t)
}

/// The discrepancy `alpha_M(t)` between a same-side entry of the join and
/// the (phase-corrected) entry of `X`.
pub fn alpha(p: &JoinParams, kind: MatrixKind, t: f64) -> Complex64 {
    let (m, n) = (p.m as f64, p.n as f64);
    match kind {
        MatrixKind::L => (m * cis(-t * n) + n * cis(t * m) - (m + n)) / (m * (m + n)),
        MatrixKind::A => {
            let s = m * p.d.sqrt();
            cis(t * p.lambda_plus) * (p.k - p.lambda_minus) / s
                - cis(t * p.lambda_minus) * (p.k - p.lambda_plus) / s
                - cis(t * p.k) / m
        }
    }
}

/// The gcd whose lattice `{2 j pi / g}` is `T_M`, when it is exact:
/// `gcd(m, n)` for `L`; `gcd(lambda+ - k, lambda- - k)` for `A` with integer `k`, `lambda+-`.
pub fn lattice_gcd(p: &JoinParams, kind: MatrixKind) -> Option<i64> {
    match kind {
        MatrixKind::L => Some(gcd(p.m as i64, p.n as i64)),
        MatrixKind::A => {
            let k = reconstruct_integer(p.k, LATTICE_TOL)?;
            let lp = reconstruct_integer(p.lambda_plus, LATTICE_TOL)?;
            let lm = reconstruct_integer(p.lambda_minus, LATTICE_TOL)?;
            Some(gcd(lp - k, lm - k))
        }
    }
}

/// Whether `t` is an integer multiple of `step` within [`LATTICE_TOL`].
pub fn on_lattice(t: f64, step: f64) -> bool {
    let q = t / step;
    (q - q.round()).abs() * step <= LATTICE_TOL * t.abs().max(1.0)
}

/// Membership of `t` in `T_M`, the zero set of `alpha_M`.
pub fn in_t(p: &JoinParams, kind: MatrixKind, t: f64) -> bool {
    match lattice_gcd(p, kind) {
        Some(g) => on_lattice(t, 2.0 * PI / g as f64),
        None => {
            let (a, b, c) = (cis(t * p.lambda_plus), cis(t * p.lambda_minus), cis(t * p.k));
            (a - c).norm() <= LATTICE_TOL && (b - c).norm() <= LATTICE_TOL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, empty_graph, join, path};

    fn unitary_defect(u: &CMat) -> f64 {
        u.mul(&u.adjoint()).max_abs_diff(&CMat::identity(u.order()))
    }

    #[test]
    fn identity_at_zero_and_unitary() {
        let d = decompose(&cycle(5).unwrap(), MatrixKind::A).unwrap();
        assert!(transition_matrix(&d, 0.0).max_abs_diff(&CMat::identity(5)) < 1e-12);
        assert!(unitary_defect(&transition_matrix(&d, 1.3)) < 1e-8);
    }

    #[test]
    fn k2_and_c4_transfer() {
        let d = decompose(&complete(2).unwrap(), MatrixKind::A).unwrap();
        assert!((transition_entry(&d, 0, 1, PI / 2.0).norm() - 1.0).abs() < 1e-12);
        let d = decompose(&cycle(4).unwrap(), MatrixKind::L).unwrap();
        assert!((transition_entry(&d, 0, 2, PI / 2.0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_direct() {
        let cases = [
            (path(3).unwrap(), empty_graph(1).unwrap(), MatrixKind::L, 0.7),
            (complete(3).unwrap(), complete(3).unwrap(), MatrixKind::A, 0.3),
            (empty_graph(2).unwrap(), empty_graph(2).unwrap(), MatrixKind::A, PI / 2.0),
            (cycle(5).unwrap(), complete(2).unwrap(), MatrixKind::A, 1.1),
        ];
        for (x, y, kind, t) in cases {
            let w = JoinWalk::new(&x, &y, kind).unwrap();
            let d = decompose(&join(&x, &y), kind).unwrap();
            for u in 0..w.order() {
                for v in 0..w.order() {
                    let diff = (w.entry(u, v, t).unwrap() - transition_entry(&d, u, v, t)).norm();
                    assert!(diff < 1e-9, "{kind} ({u},{v}) diff {diff}");
                }
            }
        }
    }

    #[test]
    fn cross_entry_vanishes_on_period() {
        let x = path(3).unwrap();
        let y = empty_graph(2).unwrap();
        assert!(join_entry_l(&x, &y, 0, 4, 0.0).unwrap().norm() < 1e-15);
        assert!(join_entry_l(&x, &y, 0, 4, 2.0 * PI / 5.0).unwrap().norm() < 1e-12);
    }

    #[test]
    fn adjacency_requires_regular() {
        let x = path(3).unwrap();
        assert!(matches!(join_entry_a(&x, &x, 0, 1, 0.1), Err(Error::Precondition(_))));
    }

    #[test]
    fn alpha_values() {
        let p = JoinParams::laplacian(6, 2);
        assert!((alpha(&p, MatrixKind::L, PI / 2.0) - Complex64::new(-1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!(alpha(&p, MatrixKind::L, 0.0).norm() < 1e-15);
        assert!(in_t(&p, MatrixKind::L, 0.0));
        let p = JoinParams::laplacian(4, 2);
        assert!(alpha(&p, MatrixKind::L, PI).norm() < 1e-12);
        assert!(in_t(&p, MatrixKind::L, PI));
        assert!(!in_t(&p, MatrixKind::L, PI / 2.0));
    }
}
