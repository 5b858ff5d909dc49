//! Spectral decompositions `M = sum_j lambda_j E_j`, eigenvalue supports and
//! the closed-form supports of vertices in joins.

mod iterated;
pub mod jacobi;

pub use iterated::{iterated_join_support, IteratedJoinSupportParams};

use serde::{Deserialize, Serialize};

use crate::arith::{reconstruct_integer, squarefree_part, QuadraticEigenvalue};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::matrix::{norm2, Mat};

/// Threshold on `||E_j e_u||` for membership in a support.
pub const SUPPORT_TOL: f64 = 1e-8;
/// Relative tolerance used when comparing eigenvalues as set elements.
pub const VALUE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixKind {
    A,
    L,
}

impl MatrixKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "A" | "a" | "adjacency" => Ok(MatrixKind::A),
            "L" | "l" | "laplacian" => Ok(MatrixKind::L),
            _ => Err(Error::Parse(format!("matrix kind must be A or L, got '{s}'"))),
        }
    }
}

impl std::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatrixKind::A => "A",
            MatrixKind::L => "L",
        })
    }
}

/// `|a - b| <= VALUE_TOL * max(1, |a|, |b|)`.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= VALUE_TOL * 1f64.max(a.abs()).max(b.abs())
}

/// An eigenvalue together with its exact form when known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralValue {
    pub value: f64,
    pub exact: Option<QuadraticEigenvalue>,
}

impl SpectralValue {
    pub fn float(value: f64) -> Self {
        SpectralValue { value, exact: None }
    }

    pub fn integer(v: i64) -> Self {
        SpectralValue { value: v as f64, exact: Some(QuadraticEigenvalue::integer(v)) }
    }

    pub fn quadratic(q: QuadraticEigenvalue) -> Self {
        SpectralValue { value: q.value(), exact: Some(q) }
    }

    /// Adds an integer, keeping the exact form.
    pub fn shift(&self, n: i64) -> Self {
        SpectralValue {
            value: self.value + n as f64,
            exact: self.exact.and_then(|q| q.shift(n).ok()),
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        self.exact.and_then(|q| q.as_integer())
    }
}

/// Sorts descending and merges values that agree within [`VALUE_TOL`].
pub fn normalize_set(mut values: Vec<SpectralValue>) -> Vec<SpectralValue> {
    values.sort_by(|a, b| b.value.total_cmp(&a.value));
    let mut out: Vec<SpectralValue> = Vec::with_capacity(values.len());
    for v in values {
        match out.last_mut() {
            Some(last) if approx_eq(last.value, v.value) => {
                if last.exact.is_none() {
                    last.exact = v.exact;
                }
            }
            _ => out.push(v),
        }
    }
    out
}

pub fn set_contains(set: &[SpectralValue], x: f64) -> bool {
    set.iter().any(|s| approx_eq(s.value, x))
}

/// Set equality within [`VALUE_TOL`] (inputs need not be normalised).
pub fn sets_equal(a: &[f64], b: &[f64]) -> bool {
    a.iter().all(|x| b.iter().any(|y| approx_eq(*x, *y))) && b.iter().all(|y| a.iter().any(|x| approx_eq(*x, *y)))
}

pub fn values(set: &[SpectralValue]) -> Vec<f64> {
    set.iter().map(|s| s.value).collect()
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub kind: MatrixKind,
    /// Distinct eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// Orthogonal projectors onto the eigenspaces, aligned with `eigenvalues`.
    pub projectors: Vec<Mat>,
    /// Exact forms of every eigenvalue, when each one is an integer or a
    /// quadratic integer whose conjugate is also an eigenvalue.
    pub classified: Option<Vec<QuadraticEigenvalue>>,
    matrix: Mat,
}

impl SpectralDecomposition {
    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    fn check_vertex(&self, u: usize) -> Result<()> {
        if u >= self.order() {
            return Err(Error::Domain(format!("vertex {u} out of range for order {}", self.order())));
        }
        Ok(())
    }

    /// `E_j e_u`.
    pub fn projected(&self, j: usize, u: usize) -> Vec<f64> {
        self.projectors[j].column(u)
    }

    /// The `j`-th distinct eigenvalue; classified values carry their exact value.
    pub fn spectral_value(&self, j: usize) -> SpectralValue {
        match self.classified.as_ref() {
            Some(c) => SpectralValue::quadratic(c[j]),
            None => SpectralValue::float(self.eigenvalues[j]),
        }
    }

    /// Indices `j` with `||E_j e_u|| > SUPPORT_TOL`.
    pub fn support_indices(&self, u: usize) -> Result<Vec<usize>> {
        self.check_vertex(u)?;
        Ok((0..self.eigenvalues.len())
            .filter(|&j| norm2(&self.projected(j, u)) > SUPPORT_TOL)
            .collect())
    }

    /// `sigma_u` with exact forms. When the whole spectrum is not classified,
    /// the support on its own is classified (it is closed under algebraic
    /// conjugation whenever the characteristic polynomial is integral).
    pub fn support(&self, u: usize) -> Result<Vec<SpectralValue>> {
        let idx = self.support_indices(u)?;
        Ok(self.values_at(&idx))
    }

    /// Spectral values at the given indices, classified as a set.
    pub fn values_at(&self, idx: &[usize]) -> Vec<SpectralValue> {
        if self.classified.is_some() {
            return idx.iter().map(|&j| self.spectral_value(j)).collect();
        }
        let eigs: Vec<f64> = idx.iter().map(|&j| self.eigenvalues[j]).collect();
        let mults: Vec<usize> = idx.iter().map(|&j| self.multiplicities[j]).collect();
        match classify(&eigs, &mults, self.matrix.max_abs().max(1.0)) {
            Some(exact) => exact.into_iter().map(SpectralValue::quadratic).collect(),
            None => eigs.into_iter().map(SpectralValue::float).collect(),
        }
    }

    /// Index of the distinct eigenvalue equal to `x`, if any.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.eigenvalues.iter().position(|&l| approx_eq(l, x))
    }
}

pub fn graph_matrix(graph: &WeightedGraph, kind: MatrixKind) -> Result<Mat> {
    match kind {
        MatrixKind::A => Ok(graph.adjacency()),
        MatrixKind::L => {
            if !graph.is_simple() {
                return Err(Error::Precondition(
                    "the Laplacian walk is only defined here for simple graphs (no loops)".into(),
                ));
            }
            Ok(graph.laplacian())
        }
    }
}

pub fn decompose(graph: &WeightedGraph, kind: MatrixKind) -> Result<SpectralDecomposition> {
    decompose_matrix(&graph_matrix(graph, kind)?, kind)
}

/// Decomposes a symmetric matrix into distinct eigenvalues and projectors.
pub fn decompose_matrix(m: &Mat, kind: MatrixKind) -> Result<SpectralDecomposition> {
    let n = m.order();
    let eig = jacobi::symmetric_eigen(m)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.values[b].total_cmp(&eig.values[a]));
    let group_tol = 1e-7 * m.max_abs().max(1.0);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in &idx {
        match groups.last_mut() {
            Some(g) if eig.values[*g.last().unwrap()] - eig.values[i] <= group_tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut eigenvalues = Vec::with_capacity(groups.len());
    let mut multiplicities = Vec::with_capacity(groups.len());
    let mut projectors = Vec::with_capacity(groups.len());
    for g in &groups {
        eigenvalues.push(g.iter().map(|&i| eig.values[i]).sum::<f64>() / g.len() as f64);
        multiplicities.push(g.len());
        let mut p = Mat::zeros(n);
        for &c in g {
            let v = eig.vectors.column(c);
            for r in 0..n {
                if v[r] == 0.0 {
                    continue;
                }
                for s in 0..n {
                    p[(r, s)] += v[r] * v[s];
                }
            }
        }
        projectors.push(p);
    }
    let classified = classify(&eigenvalues, &multiplicities, m.max_abs().max(1.0));
    Ok(SpectralDecomposition { kind, eigenvalues, multiplicities, projectors, classified, matrix: m.clone() })
}

/// All-or-nothing recognition of integer and quadratic-integer eigenvalues.
fn classify(eigs: &[f64], mults: &[usize], scale: f64) -> Option<Vec<QuadraticEigenvalue>> {
    let tol = 1e-7 * scale;
    let mut out = Vec::with_capacity(eigs.len());
    for (i, &l) in eigs.iter().enumerate() {
        if let Some(v) = reconstruct_integer(l, tol) {
            out.push(QuadraticEigenvalue::integer(v));
            continue;
        }
        let mut found = None;
        for (j, &mu) in eigs.iter().enumerate() {
            if j == i || mults[j] != mults[i] {
                continue;
            }
            let Some(a) = reconstruct_integer(l + mu, tol) else { continue };
            let diff = l - mu;
            let Some(d) = reconstruct_integer(diff * diff, tol * (1.0 + diff.abs()) * 4.0) else { continue };
            if d <= 0 {
                continue;
            }
            let Ok((delta, f)) = squarefree_part(d) else { continue };
            if delta == 1 {
                continue;
            }
            let b = if diff > 0.0 { f } else { -f };
            if let Ok(q) = QuadraticEigenvalue::new(a, b, delta) {
                if (q.value() - l).abs() <= tol {
                    found = Some(q);
                    break;
                }
            }
        }
        out.push(found?);
    }
    Some(out)
}

pub fn eigenvalue_support(decomp: &SpectralDecomposition, u: usize) -> Result<Vec<f64>> {
    Ok(values(&decomp.support(u)?))
}

/// Parameters of a join `X v Y` with `|X| = m`, `|Y| = n`.
///
/// `k` and `ell` are the regularity degrees used by the adjacency formulas;
/// the Laplacian formulas only read `m` and `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JoinParams {
    pub m: usize,
    pub n: usize,
    pub k: f64,
    pub ell: f64,
    pub d: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl JoinParams {
    pub fn new(m: usize, n: usize, k: f64, ell: f64) -> Self {
        let d = (k - ell).powi(2) + 4.0 * (m * n) as f64;
        let s = d.sqrt();
        JoinParams { m, n, k, ell, d, lambda_plus: (k + ell + s) / 2.0, lambda_minus: (k + ell - s) / 2.0 }
    }

    pub fn laplacian(m: usize, n: usize) -> Self {
        Self::new(m, n, 0.0, 0.0)
    }

    /// Validates the standing assumptions for `kind` and reads `k`, `ell`.
    pub fn for_graphs(x: &WeightedGraph, y: &WeightedGraph, kind: MatrixKind) -> Result<Self> {
        check_join_assumptions(x, y, kind)?;
        match kind {
            MatrixKind::L => Ok(Self::laplacian(x.order(), y.order())),
            MatrixKind::A => {
                let k = x.is_regular().unwrap();
                let ell = y.is_regular().unwrap();
                Ok(Self::new(x.order(), y.order(), k, ell))
            }
        }
    }

    /// `(k, ell)` when both are integers.
    pub fn integer_degrees(&self) -> Option<(i64, i64)> {
        Some((reconstruct_integer(self.k, 1e-9)?, reconstruct_integer(self.ell, 1e-9)?))
    }

    /// Exact `D`, when `k` and `ell` are integers.
    pub fn exact_d(&self) -> Option<i64> {
        let (k, l) = self.integer_degrees()?;
        (k - l)
            .checked_mul(k - l)?
            .checked_add(4i64.checked_mul(self.m as i64)?.checked_mul(self.n as i64)?)
    }

    /// Exact `(lambda_plus, lambda_minus)`, when `k` and `ell` are integers.
    pub fn exact_lambdas(&self) -> Option<(QuadraticEigenvalue, QuadraticEigenvalue)> {
        let (k, l) = self.integer_degrees()?;
        let d = self.exact_d()?;
        let plus = QuadraticEigenvalue::with_radicand(k + l, 1, d).ok()?;
        let minus = QuadraticEigenvalue::with_radicand(k + l, -1, d).ok()?;
        Some((plus, minus))
    }

    pub fn lambda_plus_value(&self) -> SpectralValue {
        SpectralValue { value: self.lambda_plus, exact: self.exact_lambdas().map(|p| p.0) }
    }

    pub fn lambda_minus_value(&self) -> SpectralValue {
        SpectralValue { value: self.lambda_minus, exact: self.exact_lambdas().map(|p| p.1) }
    }

    pub fn k_value(&self) -> SpectralValue {
        match reconstruct_integer(self.k, 1e-9) {
            Some(k) => SpectralValue::integer(k),
            None => SpectralValue::float(self.k),
        }
    }
}

/// The standing assumptions for walks on joins: both graphs simple for the
/// Laplacian, both graphs weighted-regular for the adjacency matrix.
pub fn check_join_assumptions(x: &WeightedGraph, y: &WeightedGraph, kind: MatrixKind) -> Result<()> {
    match kind {
        MatrixKind::L => {
            if !x.is_simple() || !y.is_simple() {
                return Err(Error::Precondition(
                    "Laplacian joins assume both X and Y are simple (loopless)".into(),
                ));
            }
        }
        MatrixKind::A => {
            if x.is_regular().is_none() {
                return Err(Error::Precondition("adjacency joins assume X is weighted regular".into()));
            }
            if y.is_regular().is_none() {
                return Err(Error::Precondition("adjacency joins assume Y is weighted regular".into()));
            }
        }
    }
    Ok(())
}

/// Support of `u` in `X v Y` from the support of `u` in `X`.
///
/// Laplacian: `{lambda + n : lambda in sigma_u(L(X)) \ {0}} ∪ R` with
/// `R = {0, m+n}` (X connected) or `{0, m+n, n}`. Adjacency:
/// `sigma_u(A(X)) \ {k} ∪ R` with `R = {lambda+, lambda-}` or `{lambda+, lambda-, k}`.
pub fn join_support_from(
    support_x: &[SpectralValue],
    x_connected: bool,
    params: &JoinParams,
    kind: MatrixKind,
) -> Vec<SpectralValue> {
    let (m, n) = (params.m as i64, params.n as i64);
    let mut out = Vec::new();
    match kind {
        MatrixKind::L => {
            out.extend(support_x.iter().filter(|s| !approx_eq(s.value, 0.0)).map(|s| s.shift(n)));
            out.push(SpectralValue::integer(0));
            out.push(SpectralValue::integer(m + n));
            if !x_connected {
                out.push(SpectralValue::integer(n));
            }
        }
        MatrixKind::A => {
            out.extend(support_x.iter().filter(|s| !approx_eq(s.value, params.k)).copied());
            out.push(params.lambda_plus_value());
            out.push(params.lambda_minus_value());
            if !x_connected {
                out.push(params.k_value());
            }
        }
    }
    normalize_set(out)
}

/// Closed-form support of `u in V(X)` in `X v Y`.
pub fn join_support(x: &WeightedGraph, y: &WeightedGraph, u: usize, kind: MatrixKind) -> Result<Vec<f64>> {
    Ok(values(&join_support_values(x, y, u, kind)?))
}

pub fn join_support_values(
    x: &WeightedGraph,
    y: &WeightedGraph,
    u: usize,
    kind: MatrixKind,
) -> Result<Vec<SpectralValue>> {
    let params = JoinParams::for_graphs(x, y, kind)?;
    if u >= x.order() {
        return Err(Error::Domain(format!("vertex {u} is not a vertex of X (order {})", x.order())));
    }
    let dx = decompose(x, kind)?;
    Ok(join_support_from(&dx.support(u)?, x.is_connected(), &params, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, empty_graph, join, path};

    fn check_projectors(d: &SpectralDecomposition) {
        let n = d.order();
        let mut sum = Mat::zeros(n);
        let mut recon = Mat::zeros(n);
        for (j, p) in d.projectors.iter().enumerate() {
            sum.add_scaled(p, 1.0);
            recon.add_scaled(p, d.eigenvalues[j]);
            for (k, q) in d.projectors.iter().enumerate() {
                let prod = p.mul(q);
                let want = if j == k { p.clone() } else { Mat::zeros(n) };
                assert!(prod.sub(&want).max_abs() < 1e-9);
            }
        }
        assert!(sum.sub(&Mat::identity(n)).max_abs() < 1e-9);
        assert!(recon.sub(d.matrix()).max_abs() < 1e-8 * (1.0 + d.matrix().max_abs()));
    }

    #[test]
    fn c4_laplacian() {
        let d = decompose(&cycle(4).unwrap(), MatrixKind::L).unwrap();
        check_projectors(&d);
        assert_eq!(d.multiplicities, vec![1, 2, 1]);
        for (got, want) in d.eigenvalues.iter().zip([4.0, 2.0, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn small_examples() {
        let d = decompose(&complete(2).unwrap(), MatrixKind::A).unwrap();
        assert!(sets_equal(&d.eigenvalues, &[1.0, -1.0]));
        let d = decompose(&empty_graph(3).unwrap(), MatrixKind::L).unwrap();
        assert_eq!(d.eigenvalues.len(), 1);
        assert!(d.projectors[0].sub(&Mat::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn supports() {
        let d = decompose(&path(3).unwrap(), MatrixKind::L).unwrap();
        assert!(sets_equal(&eigenvalue_support(&d, 0).unwrap(), &[0.0, 1.0, 3.0]));
        assert!(sets_equal(&eigenvalue_support(&d, 1).unwrap(), &[0.0, 3.0]));
        let d = decompose(&complete(5).unwrap(), MatrixKind::L).unwrap();
        assert!(sets_equal(&eigenvalue_support(&d, 2).unwrap(), &[0.0, 5.0]));
        assert!(eigenvalue_support(&d, 5).is_err());
    }

    #[test]
    fn classification_recognises_quadratics() {
        let d = decompose(&path(4).unwrap(), MatrixKind::L).unwrap();
        let c = d.classified.clone().expect("P_4 Laplacian is quadratic");
        assert!(c.iter().any(|q| q.delta == 2));
        let d = decompose(&cycle(5).unwrap(), MatrixKind::A).unwrap();
        assert!(d.classified.unwrap().iter().any(|q| q.delta == 5));
        let mut g = WeightedGraph::empty(2).unwrap();
        g.add_edge(0, 1, 2f64.sqrt()).unwrap();
        assert!(decompose(&g, MatrixKind::L).unwrap().classified.is_none());
    }

    #[test]
    fn join_support_examples() {
        let o2 = empty_graph(2).unwrap();
        for n in 1..6 {
            let s = join_support(&o2, &empty_graph(n).unwrap(), 0, MatrixKind::L).unwrap();
            assert!(sets_equal(&s, &[0.0, n as f64 + 2.0, n as f64]));
        }
        let eta = 2f64.sqrt();
        let mut k2 = WeightedGraph::empty(2).unwrap();
        k2.add_edge(0, 1, eta).unwrap();
        let s = join_support(&k2, &empty_graph(1).unwrap(), 0, MatrixKind::L).unwrap();
        assert!(sets_equal(&s, &[0.0, 3.0, 1.0 + 2.0 * eta]));
        let km = complete(4).unwrap();
        let y = cycle(5).unwrap();
        let p = JoinParams::for_graphs(&km, &y, MatrixKind::A).unwrap();
        let s = join_support(&km, &y, 1, MatrixKind::A).unwrap();
        assert!(sets_equal(&s, &[p.lambda_plus, p.lambda_minus, -1.0]));
        let direct = decompose(&join(&km, &y), MatrixKind::A).unwrap();
        assert!(sets_equal(&s, &eigenvalue_support(&direct, 1).unwrap()));
    }

    #[test]
    fn join_assumptions_enforced() {
        let loops = crate::graph::empty_with_loops(2, 1.0).unwrap();
        assert!(matches!(
            join_support(&loops, &empty_graph(2).unwrap(), 0, MatrixKind::L),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            join_support(&path(3).unwrap(), &empty_graph(2).unwrap(), 0, MatrixKind::A),
            Err(Error::Precondition(_))
        ));
    }
}
