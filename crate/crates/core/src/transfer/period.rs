//! Periodicity: the ratio condition, minimum periods and the period of a
//! vertex of `X` inside `X v Y` relative to its period in `X`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, lcm, lcm_all, reconstruct_rational, QuadraticEigenvalue, QuadraticFrame, Rational};
use crate::error::{Error, Result};
use crate::graph::{join, WeightedGraph};
use crate::spectral::{
    approx_eq, decompose, join_support_from, normalize_set, JoinParams, MatrixKind, SpectralDecomposition,
    SpectralValue,
};
use crate::walk::transition_entry;

use super::{PiMultiple, PST_TOL};

/// Denominator bound and tolerance for deciding that a ratio of eigenvalue
/// differences is rational when no exact forms are available.
pub(crate) const RATIO_MAX_DENOMINATOR: i64 = 10_000;
pub(crate) const RATIO_TOL: f64 = 1e-9;

pub(crate) fn rational_ratio(x: f64) -> Option<Rational> {
    reconstruct_rational(x, RATIO_MAX_DENOMINATOR, RATIO_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PeriodKind {
    Integer,
    Quadratic,
    /// Ratios recovered by rational reconstruction of floating-point data.
    Numeric,
}

/// `(lambda_1 - lambda_j)/(lambda_1 - lambda_2) = ratio` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodRatioTerm {
    pub eigenvalue: f64,
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodCertificate {
    pub vertex: Option<usize>,
    pub periodic: bool,
    /// Minimum period; `0` for a single-eigenvalue support (see `trivial`).
    pub rho: Option<f64>,
    pub rho_exact: Option<PiMultiple>,
    pub kind: Option<PeriodKind>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub ratios: Vec<PeriodRatioTerm>,
    /// `lcm` of the ratio denominators.
    pub q: Option<i64>,
    /// Set when the support has one element, so every time is a period.
    pub trivial: bool,
    /// `|U(rho)_{u,u}|`, when computed from a decomposition.
    pub numeric_check: Option<f64>,
}

impl PeriodCertificate {
    fn empty(periodic: bool) -> Self {
        PeriodCertificate {
            vertex: None,
            periodic,
            rho: None,
            rho_exact: None,
            kind: None,
            lambda1: None,
            lambda2: None,
            ratios: Vec::new(),
            q: None,
            trivial: false,
            numeric_check: None,
        }
    }
}

fn exact_frame(support: &[SpectralValue]) -> Option<std::result::Result<QuadraticFrame, String>> {
    let exact: Option<Vec<QuadraticEigenvalue>> = support.iter().map(|s| s.exact).collect();
    exact.map(|e| QuadraticFrame::build(&e))
}

/// The ratio condition: `(lambda_1 - lambda_j)/(lambda_1 - lambda_2)` is rational for all `j`.
pub fn is_periodic(support: &[SpectralValue]) -> bool {
    let s = normalize_set(support.to_vec());
    if s.len() <= 2 {
        return true;
    }
    match exact_frame(&s) {
        Some(frame) => frame.is_ok(),
        None => {
            let d = s[0].value - s[1].value;
            s[2..].iter().all(|x| rational_ratio((s[0].value - x.value) / d).is_some())
        }
    }
}

/// Minimum period `2 pi q/(lambda_1 - lambda_2)` of a vertex with the given support.
pub fn minimum_period(support: &[SpectralValue]) -> Result<PeriodCertificate> {
    let s = normalize_set(support.to_vec());
    if s.is_empty() {
        return Err(Error::Domain("empty eigenvalue support".into()));
    }
    if !is_periodic(&s) {
        return Err(Error::Domain("the support does not satisfy the ratio condition".into()));
    }
    if s.len() == 1 {
        let mut cert = PeriodCertificate::empty(true);
        cert.rho = Some(0.0);
        cert.trivial = true;
        cert.lambda1 = Some(s[0].value);
        return Ok(cert);
    }
    let mut cert = PeriodCertificate::empty(true);
    cert.lambda1 = Some(s[0].value);
    cert.lambda2 = Some(s[1].value);
    match exact_frame(&s) {
        Some(Ok(frame)) => {
            let c = &frame.coords;
            for j in 2..s.len() {
                let ratio = Rational::new(c[0] - c[j], c[0] - c[1])?;
                cert.ratios.push(PeriodRatioTerm { eigenvalue: s[j].value, ratio });
            }
            let q = lcm_all(&cert.ratios.iter().map(|t| t.ratio.den).chain([1]).collect::<Vec<_>>())?;
            let d = frame.scaled_difference(0, 1);
            let two_q = q.checked_mul(2).ok_or(Error::Overflow("period numerator"))?;
            let rho = PiMultiple::new(two_q, d, frame.delta)?;
            cert.q = Some(q);
            cert.rho = Some(rho.value());
            cert.rho_exact = Some(rho);
            cert.kind = Some(if frame.delta == 1 { PeriodKind::Integer } else { PeriodKind::Quadratic });
        }
        _ => {
            let d = s[0].value - s[1].value;
            for x in &s[2..] {
                let ratio = rational_ratio((s[0].value - x.value) / d)
                    .ok_or_else(|| Error::Domain("the support does not satisfy the ratio condition".into()))?;
                cert.ratios.push(PeriodRatioTerm { eigenvalue: x.value, ratio });
            }
            let q = lcm_all(&cert.ratios.iter().map(|t| t.ratio.den).chain([1]).collect::<Vec<_>>())?;
            cert.q = Some(q);
            cert.rho = Some(2.0 * PI * q as f64 / d);
            cert.kind = Some(PeriodKind::Numeric);
        }
    }
    Ok(cert)
}

/// Periodicity certificate of `u`, with the numeric confirmation `|U(rho)_{u,u}|`.
pub fn vertex_period(decomp: &SpectralDecomposition, u: usize) -> Result<PeriodCertificate> {
    let support = decomp.support(u)?;
    if !is_periodic(&support) {
        let mut cert = PeriodCertificate::empty(false);
        cert.vertex = Some(u);
        return Ok(cert);
    }
    let mut cert = minimum_period(&support)?;
    cert.vertex = Some(u);
    let rho = cert.rho.unwrap_or(0.0);
    let check = transition_entry(decomp, u, u, rho).norm();
    if check < 1.0 - PST_TOL {
        return Err(Error::Inconsistency(format!("vertex {u} certified periodic at {rho} but |U(rho)_uu| = {check:.9}")));
    }
    cert.numeric_check = Some(check);
    Ok(cert)
}

/// Places `u` in the first operand, swapping the operands if needed.
fn orient_vertex<'a>(
    x: &'a WeightedGraph,
    y: &'a WeightedGraph,
    u: usize,
) -> Result<(&'a WeightedGraph, &'a WeightedGraph, usize)> {
    let (m, n) = (x.order(), y.order());
    if u >= m + n {
        return Err(Error::Domain(format!("vertex {u} out of range for order {}", m + n)));
    }
    Ok(if u < m { (x, y, u) } else { (y, x, u - m) })
}

/// Periodicity of `u` in `X v Y` from the support of `u` in its own side.
///
/// Laplacian: every eigenvalue in the support must be rational. Adjacency:
/// `(lambda+ - lambda)/sqrt(D)` must be rational for every support eigenvalue
/// other than `k` (all of them when the side is disconnected).
pub fn join_periodic(x: &WeightedGraph, y: &WeightedGraph, u: usize, kind: MatrixKind) -> Result<bool> {
    JoinParams::for_graphs(x, y, kind)?;
    let (xs, ys, lu) = orient_vertex(x, y, u)?;
    let params = JoinParams::for_graphs(xs, ys, kind)?;
    let support = decompose(xs, kind)?.support(lu)?;
    let rational = |v: &SpectralValue| v.as_integer().is_some() || rational_ratio(v.value).is_some();
    let verdict = match kind {
        MatrixKind::L => support.iter().all(rational),
        MatrixKind::A => {
            let sd = params.d.sqrt();
            support
                .iter()
                .filter(|s| !xs.is_connected() || !approx_eq(s.value, params.k))
                .all(|s| rational_ratio((params.lambda_plus - s.value) / sd).is_some())
        }
    };
    let closed = is_periodic(&join_support_from(&support, xs.is_connected(), &params, kind));
    let oracle = is_periodic(&decompose(&join(x, y), kind)?.support(u)?);
    if verdict != closed || closed != oracle {
        return Err(Error::Inconsistency(format!(
            "periodicity of {u} in the {kind} join: rule {verdict}, closed-form support {closed}, dense support {oracle}"
        )));
    }
    Ok(verdict)
}

/// Whether `U(tau)` is a scalar multiple of the identity for some `tau > 0`,
/// i.e. whether the whole spectrum satisfies the ratio condition.
pub fn graph_periodic(graph: &WeightedGraph, kind: MatrixKind) -> Result<bool> {
    let d = decompose(graph, kind)?;
    let all: Vec<usize> = (0..d.eigenvalues.len()).collect();
    Ok(is_periodic(&d.values_at(&all)))
}

/// `rho_{X v Y} = c rho_X` with the subcase that produced `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinPeriodRatio {
    pub case_id: String,
    pub c: Rational,
    pub rho_x: f64,
    pub rho_join: f64,
    /// Number of support eigenvalues of `u` in `X` other than `0` (Laplacian) or `k` (adjacency).
    pub r: usize,
    pub q: Option<i64>,
    pub q_prime: Option<i64>,
    pub big_q: Option<i64>,
    pub big_r: Option<i64>,
    pub r1: Option<i64>,
    pub r2: Option<i64>,
    /// The denominators `q_j` used by the case formula, by index `j`.
    pub q_terms: Vec<(usize, i64)>,
}

fn denominator(x: f64) -> Result<i64> {
    rational_ratio(x)
        .map(|r| r.den)
        .ok_or_else(|| Error::Inconsistency(format!("expected a rational eigenvalue ratio, got {x}")))
}

fn lcm_of(values: impl IntoIterator<Item = i64>) -> Result<i64> {
    values.into_iter().try_fold(1, lcm)
}

/// Period ratio of a non-isolated vertex `u` that is periodic both in its side
/// and in the join. The case formula is verified against the ratio of the
/// minimum periods computed from the two supports.
pub fn join_period_ratio(x: &WeightedGraph, y: &WeightedGraph, u: usize, kind: MatrixKind) -> Result<JoinPeriodRatio> {
    JoinParams::for_graphs(x, y, kind)?;
    let (xs, ys, lu) = orient_vertex(x, y, u)?;
    let p = JoinParams::for_graphs(xs, ys, kind)?;
    if xs.is_isolated(lu) {
        return Err(Error::Domain(format!("vertex {u} is isolated in its side of the join")));
    }
    let dx = decompose(xs, kind)?;
    let px = vertex_period(&dx, lu)?;
    if !px.periodic {
        return Err(Error::Domain(format!("vertex {u} is not periodic in its side of the join")));
    }
    let pj = vertex_period(&decompose(&join(x, y), kind)?, u)?;
    if !pj.periodic {
        return Err(Error::Domain(format!("vertex {u} is not periodic in the join")));
    }
    let (m, n) = (p.m as f64, p.n as f64);
    let (base, special, extra) = match kind {
        MatrixKind::L => (0.0, m, -n),
        MatrixKind::A => (p.k, p.lambda_minus, p.lambda_plus),
    };
    let mut lam: Vec<f64> = dx.support(lu)?.iter().map(|s| s.value).filter(|&l| !approx_eq(l, base)).collect();
    let has_special = lam.iter().any(|&l| approx_eq(l, special));
    lam.retain(|&l| !approx_eq(l, special));
    if has_special {
        lam.push(special);
    }
    let r = lam.len();
    if r == 0 {
        return Err(Error::Domain(format!("vertex {u} has a trivial support in its side of the join")));
    }
    // 1-based labels: lambda_1..lambda_r, then base, special, extra
    let mut l = vec![f64::NAN];
    l.extend(&lam);
    l.extend([base, special, extra]);
    let sd = p.d.sqrt();
    let connected = xs.is_connected();
    let mut out = JoinPeriodRatio {
        case_id: String::new(),
        c: Rational::integer(0),
        rho_x: px.rho.unwrap_or(0.0),
        rho_join: pj.rho.unwrap_or(0.0),
        r,
        q: None,
        q_prime: None,
        big_q: None,
        big_r: None,
        r1: None,
        r2: None,
        q_terms: Vec::new(),
    };
    // q_j from (a - lambda_j)/(a - b) over the given indices
    let q_from = |a: f64, b: f64, js: std::ops::RangeInclusive<usize>| -> Result<Vec<(usize, i64)>> {
        js.map(|j| Ok((j, denominator((a - l[j]) / (a - b))?))).collect()
    };
    let get = |qs: &[(usize, i64)], j: usize| qs.iter().find(|t| t.0 == j).map_or(1, |t| t.1);
    let c: f64 = match (connected, r, has_special) {
        (true, 1, _) => {
            out.case_id = "connected-single".into();
            let (q, c) = match kind {
                MatrixKind::L => {
                    let q = denominator((m + n) / (l[1] + n))?;
                    (q, l[1] * q as f64 / (l[1] + n))
                }
                MatrixKind::A => {
                    let q = denominator((p.lambda_plus - l[1]) / sd)?;
                    (q, q as f64 * (p.k - l[1]) / sd)
                }
            };
            out.q = Some(q);
            c
        }
        (true, 2, true) => {
            out.case_id = "connected-pair-with-special".into();
            let (q, qp, c) = match kind {
                MatrixKind::L => {
                    let q = denominator((m + n) / (l[1] + n))?;
                    let qp = denominator(m / l[1])?;
                    (q, qp, l[1] * q as f64 / (qp as f64 * (l[1] + n)))
                }
                MatrixKind::A => {
                    let q = denominator((p.lambda_plus - l[1]) / sd)?;
                    let qp = denominator((l[1] - p.k) / (l[1] - p.lambda_minus))?;
                    (q, qp, (l[1] - p.lambda_minus).abs() * q as f64 / (qp as f64 * sd))
                }
            };
            out.q = Some(q);
            out.q_prime = Some(qp);
            c
        }
        (true, _, false) => {
            out.case_id = "connected-general".into();
            let qs = q_from(l[1], l[2], 3..=r + 3)?;
            let g = |j| get(&qs, j);
            let r1 = lcm_of((3..=r).map(g))?;
            let r2 = lcm_of((3..=r).map(g).chain([g(r + 2)]))?;
            let num = g(r + 2) as f64 * g(r + 3) as f64 * gcd(r1, g(r + 1)) as f64;
            let den = g(r + 1) as f64 * gcd(r1, g(r + 2)) as f64 * gcd(r2, g(r + 3)) as f64;
            out.r1 = Some(r1);
            out.r2 = Some(r2);
            out.q_terms = qs;
            num / den
        }
        (true, _, true) => {
            out.case_id = "connected-special-last".into();
            let qs = q_from(l[1], l[2], 3..=r + 3)?;
            let g = |j| get(&qs, j);
            let r1 = lcm_of((3..r).map(g))?;
            let big_q = lcm_of([r1, g(r + 2), g(r + 3)])?;
            let qx = lcm_of([r1, g(r), g(r + 1)])?;
            out.r1 = Some(r1);
            out.big_q = Some(big_q);
            out.q = Some(qx);
            out.q_terms = qs;
            big_q as f64 / qx as f64
        }
        (false, 1, _) => {
            out.case_id = "disconnected-single".into();
            // lambda_2 is the base eigenvalue, lambda_3 the special, lambda_4 the extra one
            let (a, b) = match kind {
                MatrixKind::L => (l[1], base),
                MatrixKind::A => (base, l[1]),
            };
            let q3 = denominator((a - special) / (a - b))?;
            let q4 = denominator((a - extra) / (a - b))?;
            out.q_terms = vec![(3, q3), (4, q4)];
            lcm(q3, q4)? as f64
        }
        (false, 2, true) => {
            out.case_id = "disconnected-pair-with-special".into();
            let (a, b) = match kind {
                MatrixKind::L => (l[1], base),
                MatrixKind::A => (base, l[1]),
            };
            let q_special = denominator((a - special) / (a - b))?;
            let q_extra = denominator((a - extra) / (a - b))?;
            out.q_terms = vec![(2, q_special), (5, q_extra)];
            lcm(q_special, q_extra)? as f64 / q_special as f64
        }
        (false, _, false) => {
            out.case_id = "disconnected-general".into();
            let qs = q_from(l[1], l[2], 3..=r + 3)?;
            let g = |j| get(&qs, j);
            let q = lcm_of((3..=r + 1).map(g))?;
            let big_r = lcm_of((3..=r + 2).map(g))?;
            out.q = Some(q);
            out.big_r = Some(big_r);
            let ratio = (g(r + 2) * g(r + 3)) as f64 / (gcd(q, g(r + 2)) * gcd(big_r, g(r + 3))) as f64;
            out.q_terms = qs;
            ratio
        }
        (false, _, true) => {
            out.case_id = "disconnected-special-last".into();
            // reference pair (lambda_1, base)
            let qs: Vec<(usize, i64)> = (2..=r)
                .chain([r + 3])
                .map(|j| Ok((j, denominator((l[1] - l[j]) / (l[1] - base))?)))
                .collect::<Result<_>>()?;
            let g = |j| get(&qs, j);
            let q = lcm_of((2..=r).map(g))?;
            let big_q = lcm_of((2..=r).map(g).chain([g(r + 3)]))?;
            out.q = Some(q);
            out.big_q = Some(big_q);
            let ratio = big_q as f64 / q as f64;
            out.q_terms = qs;
            ratio
        }
    };
    out.c = rational_ratio(c).ok_or_else(|| Error::Inconsistency(format!("period ratio {c} is not rational")))?;
    let generic = out.rho_join / out.rho_x;
    if (out.c.value() - generic).abs() > 1e-9 * generic.abs().max(1.0) {
        return Err(Error::Inconsistency(format!(
            "period ratio case {} gives c = {} but the minimum periods give {generic}",
            out.case_id, out.c
        )));
    }
    if !connected && out.c.den != 1 {
        return Err(Error::Inconsistency(format!("period ratio {} is not an integer for a disconnected side", out.c)));
    }
    Ok(out)
}
