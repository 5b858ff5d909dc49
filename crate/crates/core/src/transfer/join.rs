//! Closed-form strong cospectrality and PST for pairs of vertices in `X v Y`.

use crate::arith::{is_perfect_square, nu2_eq, nu2_gt, reconstruct_integer};
use crate::error::{Error, Result};
use crate::graph::{join, WeightedGraph};
use crate::spectral::{
    approx_eq, decompose, set_contains, JoinParams, MatrixKind, SpectralDecomposition, SpectralValue,
};

use super::{certify, pst_certificate, strong_cospectral, PSTCertificate, SupportPartition};

/// A same-side pair rewritten so that it lies in the first operand.
pub(crate) struct Oriented<'a> {
    pub x: &'a WeightedGraph,
    pub y: &'a WeightedGraph,
    pub u: usize,
    pub v: usize,
}

/// Moves a pair in `Y` to the first operand; `None` for a cross pair.
pub(crate) fn orient<'a>(
    x: &'a WeightedGraph,
    y: &'a WeightedGraph,
    u: usize,
    v: usize,
) -> Result<Option<Oriented<'a>>> {
    let (m, n) = (x.order(), y.order());
    if u == v {
        return Err(Error::Domain("a transfer pair needs two distinct vertices".into()));
    }
    if u >= m + n || v >= m + n {
        return Err(Error::Domain(format!("pair ({u},{v}) out of range for order {}", m + n)));
    }
    Ok(match (u < m, v < m) {
        (true, true) => Some(Oriented { x, y, u, v }),
        (false, false) => Some(Oriented { x: y, y: x, u: u - m, v: v - m }),
        _ => None,
    })
}

pub(crate) fn integer_degrees(params: &JoinParams) -> Result<(i64, i64)> {
    params
        .integer_degrees()
        .ok_or_else(|| Error::Precondition("adjacency transfer on joins assumes integer degrees k and l".into()))
}

/// Closed-form `(sigma+, sigma-)` of a pair of `X` inside `X v Y`, given the
/// partition of the pair in `X` (ignored for the empty pair `O_2`).
pub(crate) fn lift_partition(
    x: &WeightedGraph,
    in_x: Option<&SupportPartition>,
    params: &JoinParams,
    kind: MatrixKind,
) -> Option<(Vec<SpectralValue>, Vec<SpectralValue>)> {
    let (m, n) = (params.m as i64, params.n as i64);
    match kind {
        MatrixKind::L => {
            if x.is_empty_pair() {
                let plus = vec![SpectralValue::integer(0), SpectralValue::integer(n + 2)];
                return Some((plus, vec![SpectralValue::integer(n)]));
            }
            let p = in_x?;
            if set_contains(&p.minus, m as f64) {
                return None;
            }
            let mut plus: Vec<SpectralValue> =
                p.plus.iter().filter(|s| !approx_eq(s.value, 0.0)).map(|s| s.shift(n)).collect();
            plus.push(SpectralValue::integer(0));
            plus.push(SpectralValue::integer(m + n));
            if !x.is_connected() {
                plus.push(SpectralValue::integer(n));
            }
            Some((plus, p.minus.iter().map(|s| s.shift(n)).collect()))
        }
        MatrixKind::A => {
            let (lp, lm) = (params.lambda_plus_value(), params.lambda_minus_value());
            if x.is_empty_pair() {
                return Some((vec![lp, lm], vec![params.k_value()]));
            }
            let p = in_x?;
            if set_contains(&p.minus, lp.value) || set_contains(&p.minus, lm.value) {
                return None;
            }
            let mut plus: Vec<SpectralValue> =
                p.plus.iter().filter(|s| !approx_eq(s.value, params.k)).copied().collect();
            plus.extend([lp, lm]);
            if !x.is_connected() {
                plus.push(params.k_value());
            }
            Some((plus, p.minus.clone()))
        }
    }
}

/// Closed-form partition for an oriented pair, together with the partition in `X`.
fn closed_partition(
    o: &Oriented,
    params: &JoinParams,
    kind: MatrixKind,
) -> Result<(Option<SupportPartition>, Option<(Vec<SpectralValue>, Vec<SpectralValue>)>)> {
    let in_x = if o.x.is_empty_pair() { None } else { strong_cospectral(&decompose(o.x, kind)?, o.u, o.v)? };
    let lifted = lift_partition(o.x, in_x.as_ref(), params, kind);
    Ok((in_x, lifted))
}

fn oriented_params(o: &Oriented, kind: MatrixKind) -> Result<JoinParams> {
    JoinParams::for_graphs(o.x, o.y, kind)
}

fn cross_pair_check(x: &WeightedGraph, y: &WeightedGraph) -> Result<()> {
    if x.order() == 1 && y.order() == 1 {
        return Err(Error::Precondition(
            "the cross-pair rule needs max(m, n) >= 2; K_1 v K_1 is a single edge".into(),
        ));
    }
    Ok(())
}

/// Strong cospectrality of `u`, `v` in `X v Y` from the data of the side
/// containing them. Cross pairs are never strongly cospectral. The result is
/// compared with the projector test on the built join.
pub fn join_strong_cospectral(
    x: &WeightedGraph,
    y: &WeightedGraph,
    u: usize,
    v: usize,
    kind: MatrixKind,
) -> Result<Option<SupportPartition>> {
    JoinParams::for_graphs(x, y, kind)?;
    let closed = match orient(x, y, u, v)? {
        None => {
            cross_pair_check(x, y)?;
            None
        }
        Some(o) => {
            let params = oriented_params(&o, kind)?;
            closed_partition(&o, &params, kind)?.1.map(|(p, q)| SupportPartition::new(u, v, p, q))
        }
    };
    check_partition(&closed, &decompose(&join(x, y), kind)?, u, v)?;
    Ok(closed)
}

/// Compares a closed-form partition with the projector test on the dense decomposition.
pub(crate) fn check_partition(
    closed: &Option<SupportPartition>,
    oracle: &SpectralDecomposition,
    u: usize,
    v: usize,
) -> Result<()> {
    let dense = strong_cospectral(oracle, u, v)?;
    match (closed, &dense) {
        (None, None) => Ok(()),
        (Some(a), Some(b)) if a.same_sets(b) => Ok(()),
        _ => Err(Error::Inconsistency(format!(
            "strong cospectrality of ({u},{v}): closed form {closed:?}, projector test {dense:?}"
        ))),
    }
}

/// Which valuation pattern, if any, the Laplacian data of a connected `X` follow.
///
/// `lams` ranges over the nonzero plus eigenvalues of `X` together with `m`,
/// `mus` over the minus eigenvalues.
pub(crate) fn laplacian_pattern(lams: &[i64], mus: &[i64], n: i64) -> Option<&'static str> {
    if mus.is_empty() {
        return None;
    }
    let mu0 = mus[0];
    let mus_equal = mus.iter().all(|&m| nu2_eq(m, mu0));
    if mus_equal && lams.iter().all(|&l| nu2_gt(l, mu0)) && nu2_gt(n, mu0) {
        return Some("plus-dominant");
    }
    if lams.iter().all(|&l| nu2_eq(l, n)) && mus.iter().all(|&m| nu2_gt(m, n)) {
        return Some("minus-dominant");
    }
    let all_equal = lams.iter().chain(mus).all(|&x| nu2_eq(x, n));
    if all_equal
        && mus.iter().all(|&m| nu2_eq(m + n, mu0 + n))
        && lams.iter().all(|&l| nu2_gt(l + n, mu0 + n))
    {
        return Some("equal-valuation");
    }
    None
}

/// Integer values of a support, or `None` if some value is irrational.
pub(crate) fn integers(set: &[SpectralValue]) -> Option<Vec<i64>> {
    set.iter().map(|s| s.as_integer().or_else(|| reconstruct_integer(s.value, 1e-9))).collect()
}

/// Verdict of a closed-form tree before the generic cross-checks.
pub(crate) struct TreeVerdict {
    pub pst: bool,
    pub clause: Option<String>,
    pub reason: Option<String>,
}

impl TreeVerdict {
    pub fn yes(clause: &str) -> Self {
        TreeVerdict { pst: true, clause: Some(clause.into()), reason: None }
    }

    pub fn no(reason: impl Into<String>) -> Self {
        TreeVerdict { pst: false, clause: None, reason: Some(reason.into()) }
    }

    pub fn with_clause(pst: bool, clause: &str, reason: &str) -> Self {
        TreeVerdict { pst, clause: Some(clause.into()), reason: (!pst).then(|| reason.to_string()) }
    }
}

fn laplacian_tree(o: &Oriented, in_x: Option<&SupportPartition>, params: &JoinParams) -> TreeVerdict {
    let (m, n) = (params.m as i64, params.n as i64);
    if o.x.is_empty_pair() {
        return TreeVerdict::with_clause(n % 4 == 2, "double-cone", "n is not 2 mod 4");
    }
    let Some(p) = in_x else {
        return TreeVerdict::no("u and v are not strongly cospectral in X");
    };
    if set_contains(&p.minus, m as f64) {
        return TreeVerdict::no("m lies in the minus support of X");
    }
    let (Some(plus), Some(mus)) = (integers(&p.plus), integers(&p.minus)) else {
        return TreeVerdict::no("the support of u in X is not integral");
    };
    if mus.is_empty() {
        return TreeVerdict::no("the minus support is empty");
    }
    let mut lams: Vec<i64> = plus.into_iter().filter(|&l| l != 0).collect();
    lams.push(m);
    match laplacian_pattern(&lams, &mus, n) {
        Some(c) if o.x.is_connected() => TreeVerdict::yes(c),
        Some("plus-dominant") => TreeVerdict::yes("disconnected-plus-dominant"),
        Some(_) => TreeVerdict::no("X is disconnected and the plus eigenvalues do not dominate"),
        None => TreeVerdict::no("no valuation pattern holds"),
    }
}

fn adjacency_tree(
    o: &Oriented,
    in_x: Option<&SupportPartition>,
    params: &JoinParams,
    lifted: Option<&SupportPartition>,
) -> Result<TreeVerdict> {
    let (k, ell) = integer_degrees(params)?;
    if o.x.is_empty_pair() {
        let d = params.exact_d().ok_or(Error::Overflow("join discriminant"))?;
        let lp = reconstruct_integer(params.lambda_plus, 1e-9);
        let lm = reconstruct_integer(params.lambda_minus, 1e-9);
        let valuation = match (lp, lm) {
            (Some(a), Some(b)) if is_perfect_square(d) => nu2_eq(a - k, b - k),
            _ => false,
        };
        return Ok(TreeVerdict::with_clause(
            ell == k || valuation,
            if ell == k { "double-cone-equal-degree" } else { "double-cone" },
            "D is not a square with nu2(lambda+ - k) = nu2(lambda- - k), and l != k",
        ));
    }
    let Some(p) = in_x else {
        return Ok(TreeVerdict::no("u and v are not strongly cospectral in X"));
    };
    if set_contains(&p.minus, params.lambda_plus) || set_contains(&p.minus, params.lambda_minus) {
        return Ok(TreeVerdict::no("lambda+ or lambda- lies in the minus support of X"));
    }
    let lifted = lifted.expect("lifted partition exists when the pair is cospectral");
    let crit = super::pst_criterion(lifted);
    let clause = match crit.delta {
        Some(1) => "integral",
        Some(_) if o.x.is_connected() => "quadratic",
        Some(_) => "disconnected-quadratic",
        None => "unclassified",
    };
    Ok(match crit.holds {
        true => TreeVerdict::yes(clause),
        false => TreeVerdict { pst: false, clause: Some(clause.into()), reason: crit.reason },
    })
}

/// Certificate for a partition computed in closed form, checked against the
/// generic certificate on the dense decomposition of the same graph.
pub(crate) fn certify_closed(
    closed: Option<SupportPartition>,
    oracle: &SpectralDecomposition,
    u: usize,
    v: usize,
    tree: TreeVerdict,
) -> Result<PSTCertificate> {
    let mut cert = certify(closed, oracle, u, v)?;
    if cert.pst != tree.pst {
        return Err(Error::Inconsistency(format!(
            "closed-form verdict {} ({:?}) disagrees with the valuation criterion on the closed-form partition ({})",
            tree.pst, tree.clause, cert.pst
        )));
    }
    let generic = pst_certificate(oracle, u, v)?;
    if generic.pst != cert.pst {
        return Err(Error::Inconsistency(format!(
            "closed-form PST verdict {} for ({u},{v}) disagrees with the dense certificate",
            cert.pst
        )));
    }
    if let (Some(a), Some(b)) = (cert.tau, generic.tau) {
        if !approx_eq(a, b) {
            return Err(Error::Inconsistency(format!("closed-form PST time {a} differs from the dense time {b}")));
        }
    }
    cert.clause = tree.clause;
    if !cert.pst {
        cert.reason = tree.reason.or(cert.reason);
    }
    Ok(cert)
}

/// PST between `u` and `v` in `X v Y`, decided by the closed-form condition
/// trees (Laplacian) or the valuation criterion on the closed-form partition
/// (adjacency), and confirmed on the built join.
pub fn join_pst(x: &WeightedGraph, y: &WeightedGraph, u: usize, v: usize, kind: MatrixKind) -> Result<PSTCertificate> {
    let params = JoinParams::for_graphs(x, y, kind)?;
    if kind == MatrixKind::A {
        integer_degrees(&params)?;
    }
    let oracle = decompose(&join(x, y), kind)?;
    let Some(o) = orient(x, y, u, v)? else {
        cross_pair_check(x, y)?;
        return certify_closed(None, &oracle, u, v, TreeVerdict::no("a cross pair is never strongly cospectral"));
    };
    if o.x.order() < 2 {
        return Err(Error::Precondition("PST inside one side of a join needs at least two vertices there".into()));
    }
    let params = oriented_params(&o, kind)?;
    let (in_x, lifted) = closed_partition(&o, &params, kind)?;
    let lifted = lifted.map(|(p, q)| SupportPartition::new(u, v, p, q));
    let tree = match kind {
        MatrixKind::L => laplacian_tree(&o, in_x.as_ref(), &params),
        MatrixKind::A => adjacency_tree(&o, in_x.as_ref(), &params, lifted.as_ref())?,
    };
    certify_closed(lifted, &oracle, u, v, tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, empty_graph, empty_with_loops, path};
    use crate::spectral::{sets_equal, values};

    #[test]
    fn cycle_as_double_cone() {
        let o2 = empty_graph(2).unwrap();
        let p = join_strong_cospectral(&o2, &o2, 0, 1, MatrixKind::L).unwrap().unwrap();
        assert!(sets_equal(&values(&p.plus), &[0.0, 4.0]));
        assert!(sets_equal(&values(&p.minus), &[2.0]));
        let c = join_pst(&o2, &o2, 0, 1, MatrixKind::L).unwrap();
        assert!(c.pst);
        assert_eq!(c.clause.as_deref(), Some("double-cone"));
    }

    #[test]
    fn k2_side_never_cospectral_for_laplacian() {
        let k2 = complete(2).unwrap();
        for y in [empty_graph(1).unwrap(), cycle(5).unwrap(), complete(3).unwrap()] {
            assert!(join_strong_cospectral(&k2, &y, 0, 1, MatrixKind::L).unwrap().is_none());
        }
    }

    #[test]
    fn k2_side_adjacency_depends_on_completeness() {
        let k2 = complete(2).unwrap();
        assert!(join_strong_cospectral(&k2, &complete(3).unwrap(), 0, 1, MatrixKind::A).unwrap().is_none());
        assert!(join_strong_cospectral(&k2, &cycle(5).unwrap(), 0, 1, MatrixKind::A).unwrap().is_some());
    }

    #[test]
    fn large_empty_side_not_cospectral() {
        let o3 = empty_graph(3).unwrap();
        let y = path(2).unwrap();
        assert!(join_strong_cospectral(&o3, &y, 0, 1, MatrixKind::L).unwrap().is_none());
    }

    #[test]
    fn cross_pairs() {
        let x = cycle(4).unwrap();
        let y = empty_graph(2).unwrap();
        assert!(join_strong_cospectral(&x, &y, 0, 4, MatrixKind::L).unwrap().is_none());
        let k1 = complete(1).unwrap();
        assert!(matches!(join_strong_cospectral(&k1, &k1, 0, 1, MatrixKind::L), Err(Error::Precondition(_))));
    }

    #[test]
    fn y_side_pairs_are_oriented() {
        let x = path(2).unwrap();
        let y = empty_graph(2).unwrap();
        let c = join_pst(&x, &y, 2, 3, MatrixKind::L).unwrap();
        assert!(c.pst);
        assert_eq!((c.u, c.v), (2, 3));
    }

    #[test]
    fn odd_order_join_has_no_laplacian_pst() {
        let x = cycle(4).unwrap();
        let y = empty_graph(3).unwrap();
        for (u, v) in [(0, 2), (4, 5)] {
            assert!(!join_pst(&x, &y, u, v, MatrixKind::L).unwrap().pst);
        }
    }

    #[test]
    fn adjacency_double_cones() {
        let o2 = empty_graph(2).unwrap();
        // O_2 v O_1 = P_3: equal degrees, quadratic PST time
        let c = join_pst(&o2, &empty_graph(1).unwrap(), 0, 1, MatrixKind::A).unwrap();
        assert!(c.pst);
        assert_eq!(c.clause.as_deref(), Some("double-cone-equal-degree"));
        assert_eq!(c.delta, Some(2));
        // K_2 on the other side: D = 17
        assert!(!join_pst(&o2, &complete(2).unwrap(), 0, 1, MatrixKind::A).unwrap().pst);
        let looped = empty_with_loops(2, 1.0).unwrap();
        assert!(join_pst(&looped, &complete(2).unwrap(), 0, 1, MatrixKind::A).unwrap().pst);
    }

    #[test]
    fn laplacian_patterns() {
        assert_eq!(laplacian_pattern(&[4], &[2], 4), Some("plus-dominant"));
        assert_eq!(laplacian_pattern(&[1, 3], &[2], 1), Some("minus-dominant"));
        assert_eq!(laplacian_pattern(&[5], &[1], 1), None);
        assert_eq!(laplacian_pattern(&[3], &[1], 1), Some("equal-valuation"));
        assert_eq!(laplacian_pattern(&[7], &[1], 1), Some("equal-valuation"));
        assert_eq!(laplacian_pattern(&[2], &[], 2), None);
    }
}
