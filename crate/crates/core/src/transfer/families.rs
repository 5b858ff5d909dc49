//! PST in specific join constructions: preservation and induction of PST
//! from `X` to `X v Y`, double cones, self-joins and iterated joins.

use serde::{Deserialize, Serialize};

use crate::arith::{is_perfect_square, nu2, nu2_eq, nu2_gt, nu2_or_inf, Rational};
use crate::error::{Error, Result};
use crate::graph::{disjoint_union, empty_graph, empty_with_loops, join, self_join, Connective, IteratedJoinSpec, WeightedGraph};
use crate::spectral::{decompose, set_contains, JoinParams, MatrixKind, SpectralValue};

use super::join::{
    certify_closed, check_partition, integer_degrees, integers, join_pst, laplacian_pattern, lift_partition, orient,
    TreeVerdict,
};
use super::{certify, pst_certificate, pst_criterion, strong_cospectral, PSTCertificate, PiMultiple, SupportPartition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreservationReport {
    pub preserved: bool,
    pub clause: String,
    pub tau_x: PiMultiple,
    pub tau_join: Option<PiMultiple>,
    /// `h/g` for `tau_X = pi/h` and `tau_join = pi/g` over the same radicand.
    pub ratio_h_over_g: Option<Rational>,
    pub nu2_g_equals_nu2_h: Option<bool>,
    pub x_certificate: PSTCertificate,
    pub join_certificate: PSTCertificate,
}

fn unweighted(x: &WeightedGraph) -> bool {
    x.is_simple() && x.edges().all(|(_, _, w)| w == 1.0)
}

/// Whether PST between `u` and `v` in `X` survives in `X v Y`.
///
/// Laplacian: `m` must avoid the minus support and both `m` and `n` must be
/// divisible by a higher power of two than `h`, where `tau_X = pi/h`; for an
/// unweighted `X` on `2^p` vertices this reduces to a congruence on `n`.
/// Adjacency (integral support, `D` a square, `s = lambda+ - k`): `l - s` must
/// avoid the minus support and `nu2(s)`, `nu2(l - k)` must exceed `nu2(k - mu)`.
pub fn pst_preserved(
    x: &WeightedGraph,
    y: &WeightedGraph,
    u: usize,
    v: usize,
    kind: MatrixKind,
) -> Result<PreservationReport> {
    JoinParams::for_graphs(x, y, kind)?;
    let o = orient(x, y, u, v)?.ok_or_else(|| Error::Domain("the pair must lie in one side of the join".into()))?;
    let cx = pst_certificate(&decompose(o.x, kind)?, o.u, o.v)?;
    if !cx.pst {
        return Err(Error::Domain(format!(
            "no PST between {} and {} in X; use pst_induced for that case",
            o.u, o.v
        )));
    }
    let p = JoinParams::for_graphs(o.x, o.y, kind)?;
    let jc = join_pst(x, y, u, v, kind)?;
    let h = cx.g.expect("a PST certificate carries g");
    let minus = &cx.partition.as_ref().expect("a PST certificate carries its partition").minus;
    let (m, n) = (p.m as i64, p.n as i64);
    let (predicted, clause) = match kind {
        MatrixKind::L => {
            if unweighted(o.x) && m.count_ones() == 1 {
                if m == 2 {
                    (false, "order-two-side")
                } else {
                    (n % (1i64 << (nu2(h)? + 1)) == 0, "power-of-two-order")
                }
            } else {
                (!set_contains(minus, m as f64) && nu2_gt(m, h) && nu2_gt(n, h), "valuation-exceeds-gcd")
            }
        }
        MatrixKind::A => {
            let (k, ell) = integer_degrees(&p)?;
            let d = p.exact_d().ok_or(Error::Overflow("join discriminant"))?;
            match (cx.delta, integers(minus)) {
                (Some(1), Some(mus)) if is_perfect_square(d) => {
                    let s = crate::arith::exact_sqrt(d).expect("square") + k + ell;
                    // lambda+ = (k + l + sqrt(D))/2, so s = lambda+ - k
                    let s = s / 2 - k;
                    let ok = !mus.contains(&(ell - s))
                        && mus.iter().all(|&mu| nu2_gt(s, k - mu) && nu2_gt(ell - k, k - mu));
                    (ok, "square-discriminant")
                }
                (Some(1), Some(_)) => (jc.pst, "non-square-discriminant"),
                _ => (jc.pst, "quadratic-support"),
            }
        }
    };
    if predicted != jc.pst {
        return Err(Error::Inconsistency(format!(
            "preservation rule ({clause}) predicts {predicted} but the join certificate says {}",
            jc.pst
        )));
    }
    let same_radicand = jc.delta.is_some() && jc.delta == cx.delta;
    let (ratio, nu2_match) = match (jc.pst, jc.g) {
        (true, Some(g)) if same_radicand => (Some(Rational::new(h, g)?), Some(nu2_eq(g, h))),
        _ => (None, None),
    };
    if kind == MatrixKind::L && nu2_match == Some(false) {
        return Err(Error::Inconsistency(format!("preserved PST but nu2(g) != nu2(h) (g = {:?}, h = {h})", jc.g)));
    }
    Ok(PreservationReport {
        preserved: jc.pst,
        clause: clause.into(),
        tau_x: cx.tau_exact.expect("a PST certificate carries tau"),
        tau_join: jc.tau_exact,
        ratio_h_over_g: ratio,
        nu2_g_equals_nu2_h: nu2_match,
        x_certificate: cx,
        join_certificate: jc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaddedPreservationReport {
    /// PST in `X v Y` (always false under the hypothesis `m ∈ sigma-`).
    pub preserved_without_padding: bool,
    /// PST in `(X ∪ Z) v Y`.
    pub preserved: bool,
    pub clause: String,
    pub padding_order: usize,
    pub certificate: PSTCertificate,
}

/// Laplacian PST in `X` with `m` in the minus support never survives in
/// `X v Y`, but can survive in `(X ∪ Z) v Y`: when `m + r` avoids the minus
/// support (`r = |Z|`), exactly when `nu2(n) > nu2(m) = nu2(r)`.
pub fn pst_preserved_padded(
    x: &WeightedGraph,
    z: &WeightedGraph,
    y: &WeightedGraph,
    u: usize,
    v: usize,
) -> Result<PaddedPreservationReport> {
    let kind = MatrixKind::L;
    let m = x.order();
    if u >= m || v >= m {
        return Err(Error::Domain("the pair must lie in X".into()));
    }
    let xz = disjoint_union(x, z);
    JoinParams::for_graphs(&xz, y, kind)?;
    let cx = pst_certificate(&decompose(x, kind)?, u, v)?;
    if !cx.pst {
        return Err(Error::Domain(format!("no PST between {u} and {v} in X")));
    }
    let minus = &cx.partition.as_ref().expect("partition").minus;
    if !set_contains(minus, m as f64) {
        return Err(Error::Domain("m is not in the minus support; use pst_preserved".into()));
    }
    let plain = join_pst(x, y, u, v, kind)?;
    let padded = join_pst(&xz, y, u, v, kind)?;
    let (r, n) = (z.order() as i64, y.order() as i64);
    let mi = m as i64;
    let clause = if !set_contains(minus, (mi + r) as f64) {
        let predicted = nu2_gt(n, mi) && nu2_eq(mi, r);
        if predicted != padded.pst || plain.pst {
            return Err(Error::Inconsistency(format!(
                "padding rule predicts {predicted} (unpadded {}) but the certificate says {}",
                plain.pst, padded.pst
            )));
        }
        "padding-valuation"
    } else {
        "general"
    };
    Ok(PaddedPreservationReport {
        preserved_without_padding: plain.pst,
        preserved: padded.pst,
        clause: clause.into(),
        padding_order: z.order(),
        certificate: padded,
    })
}

/// The parameterisation `lambda_r = 2^a (2 p_r - 1)`, `mu_s = 2^a (2 q_s - 1)`,
/// `m = 2^a (2y - 1)`, `n = 2^a (2z + 1)` used when all support valuations equal `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddValuationParams {
    pub alpha: u32,
    pub p: Vec<i64>,
    pub q: Vec<i64>,
    pub y: Option<i64>,
    pub z: Option<i64>,
    /// Which of the three valuation cases on `p_r, q_s, y, z` holds, if any.
    pub case: Option<String>,
}

impl OddValuationParams {
    fn new(lams: &[i64], mus: &[i64], m: i64, n: i64, alpha: u32) -> Self {
        let unit = 1i64 << alpha;
        let odd = |x: i64| x / unit;
        let p: Vec<i64> = lams.iter().map(|&l| (odd(l) + 1) / 2).collect();
        let q: Vec<i64> = mus.iter().map(|&mu| (odd(mu) + 1) / 2).collect();
        let y = (nu2_or_inf(m) == Some(alpha)).then(|| (odd(m) + 1) / 2);
        let z = (nu2_or_inf(n) == Some(alpha)).then(|| (odd(n) - 1) / 2);
        let mut out = OddValuationParams { alpha, p, q, y, z, case: None };
        out.case = out.classify().map(str::to_string);
        out
    }

    /// `nu2(p_r + z) > nu2(q_s + z) = nu2(q_t + z)` and `nu2(y + z) > nu2(q_s + z)`.
    fn transfer_condition(&self) -> bool {
        let (Some(y), Some(z)) = (self.y, self.z) else { return false };
        let Some(&q0) = self.q.first() else { return false };
        self.q.iter().all(|&q| nu2_eq(q + z, q0 + z))
            && self.p.iter().all(|&p| nu2_gt(p + z, q0 + z))
            && nu2_gt(y + z, q0 + z)
    }

    fn classify(&self) -> Option<&'static str> {
        let (y, z) = (self.y?, self.z?);
        let q0 = *self.q.first()?;
        let qs_equal = self.q.iter().all(|&q| nu2_eq(q, q0));
        if qs_equal && self.p.iter().all(|&p| nu2_gt(p, q0)) && nu2_gt(z, q0) && nu2_gt(y, q0) {
            return Some("p-dominant");
        }
        let p0 = self.p.first().copied();
        if let Some(p0) = p0 {
            if self.p.iter().all(|&p| nu2_eq(p, p0))
                && nu2_eq(p0, y)
                && nu2_eq(y, z)
                && self.q.iter().all(|&q| nu2_gt(q, p0))
            {
                return Some("q-dominant");
            }
        }
        let all_equal = self.p.iter().chain(&self.q).all(|&x| nu2_eq(x, z)) && nu2_eq(y, z);
        if all_equal && self.transfer_condition() {
            return Some("equal");
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducedReport {
    pub induced: bool,
    /// The rule that decided the verdict.
    pub which_theorem: String,
    pub odd_valuation: Option<OddValuationParams>,
    pub certificate: PSTCertificate,
}

/// Whether `X v Y` has PST between `u` and `v` when `X` does not.
pub fn pst_induced(x: &WeightedGraph, y: &WeightedGraph, u: usize, v: usize, kind: MatrixKind) -> Result<InducedReport> {
    JoinParams::for_graphs(x, y, kind)?;
    let o = orient(x, y, u, v)?.ok_or_else(|| Error::Domain("the pair must lie in one side of the join".into()))?;
    let p = JoinParams::for_graphs(o.x, o.y, kind)?;
    if kind == MatrixKind::A {
        integer_degrees(&p)?;
    }
    let jc = join_pst(x, y, u, v, kind)?;
    let report = |induced: bool, which: &str, odd: Option<OddValuationParams>| -> Result<InducedReport> {
        if induced != jc.pst {
            return Err(Error::Inconsistency(format!(
                "induction rule ({which}) predicts {induced} but the join certificate says {}",
                jc.pst
            )));
        }
        Ok(InducedReport { induced, which_theorem: which.into(), odd_valuation: odd, certificate: jc.clone() })
    };
    if o.x.is_empty_pair() {
        return report(jc.pst, "double-cone", None);
    }
    let dx = decompose(o.x, kind)?;
    let part = strong_cospectral(&dx, o.u, o.v)?
        .ok_or_else(|| Error::Precondition("u and v are not strongly cospectral in X".into()))?;
    if certify(Some(part.clone()), &dx, o.u, o.v)?.pst {
        return Err(Error::Domain("PST already occurs in X; use pst_preserved".into()));
    }
    let (m, n) = (p.m as i64, p.n as i64);
    let connected = o.x.is_connected();
    match kind {
        MatrixKind::L => {
            let (Some(plus), Some(mus)) = (integers(&part.plus), integers(&part.minus)) else {
                return report(false, "general", None);
            };
            let lams: Vec<i64> = plus.into_iter().filter(|&l| l != 0).collect();
            let m_ok = !mus.contains(&m) && connected;
            if !lams.is_empty() && !mus.is_empty() && lams.iter().all(|&l| mus.iter().all(|&mu| nu2_gt(mu, l))) {
                let induced = m_ok && lams.iter().all(|&l| nu2_eq(l, m)) && nu2_eq(m, n);
                return report(induced, "minus-dominant-in-X", None);
            }
            if let Some(&l0) = lams.first() {
                if lams.iter().chain(&mus).all(|&x| nu2_eq(x, l0)) {
                    let alpha = nu2(l0)?;
                    let odd = OddValuationParams::new(&lams, &mus, m, n, alpha);
                    let induced = m_ok && odd.transfer_condition();
                    return report(induced, "equal-valuations-in-X", Some(odd));
                }
            }
            let mut with_m = lams.clone();
            with_m.push(m);
            let pattern = laplacian_pattern(&with_m, &mus, n);
            let induced = m_ok && nu2_eq(m, n) && matches!(pattern, Some("minus-dominant" | "equal-valuation"));
            report(induced, "general", None)
        }
        MatrixKind::A => {
            let (k, _) = integer_degrees(&p)?;
            let ints = (integers(&part.plus), integers(&part.minus));
            if let (true, (Some(plus), Some(mus))) = (connected, ints) {
                let rest: Vec<i64> = plus.iter().copied().filter(|&l| l != k).collect();
                let pattern = |lam: i64, etas: &[i64]| {
                    !mus.is_empty()
                        && mus.iter().all(|&mu| nu2_eq(lam - mu, lam - mus[0]))
                        && etas.iter().all(|&eta| nu2_gt(lam - eta, lam - mus[0]))
                };
                if rest.iter().all(|&l| pattern(l, &rest)) && !pattern(k, &rest) {
                    let d = p.exact_d().ok_or(Error::Overflow("join discriminant"))?;
                    let induced = match (
                        crate::arith::reconstruct_integer(p.lambda_plus, 1e-9),
                        crate::arith::reconstruct_integer(p.lambda_minus, 1e-9),
                    ) {
                        (Some(lp), Some(lm)) if is_perfect_square(d) && !mus.contains(&lm) => {
                            let mut etas = rest.clone();
                            etas.extend([lp, lm]);
                            pattern(lp, &etas) && pattern(lm, &etas)
                        }
                        _ => false,
                    };
                    return report(induced, "partial-plus-pattern-in-X", None);
                }
            }
            report(jc.pst, "general", None)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleConeReport {
    pub pst: bool,
    pub clause: Option<String>,
    pub certificate: PSTCertificate,
}

/// PST between the two apexes of `O_2 v Y` (Laplacian) or `O_2(k) v Y` (adjacency).
///
/// Laplacian: exactly when `n ≡ 2 (mod 4)`. Adjacency: exactly when `l = k`, or
/// `D` is a perfect square and `nu2(lambda+ - k) = nu2(lambda- - k)`.
pub fn double_cone_pst(y: &WeightedGraph, kind: MatrixKind, loop_k: Option<f64>) -> Result<DoubleConeReport> {
    let x = match (kind, loop_k) {
        (MatrixKind::L, Some(k)) if k != 0.0 => {
            return Err(Error::Precondition("the Laplacian double cone has no loops".into()))
        }
        (MatrixKind::L, _) => empty_graph(2)?,
        (MatrixKind::A, k) => empty_with_loops(2, k.unwrap_or(0.0))?,
    };
    let cert = join_pst(&x, y, 0, 1, kind)?;
    Ok(DoubleConeReport { pst: cert.pst, clause: cert.clause.clone(), certificate: cert })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfJoinReport {
    pub r: usize,
    pub sc: Option<SupportPartition>,
    pub pst: PSTCertificate,
}

/// `nu2` conditions for PST in `X^r`, by kind; `lams` and `mus` are the plus
/// (without the trivial eigenvalue) and minus eigenvalues of the pair in `X`.
fn self_join_tree(kind: MatrixKind, lams: &[i64], mus: &[i64], m: i64, k: i64, r: i64, connected: bool) -> TreeVerdict {
    if mus.is_empty() {
        return TreeVerdict::no("the minus support is empty");
    }
    let r_even = r % 2 == 0;
    match kind {
        MatrixKind::L => {
            let mut lam: Vec<i64> = lams.to_vec();
            lam.push(m);
            let mu0 = mus[0];
            if mus.iter().all(|&mu| nu2_eq(mu, mu0)) && lam.iter().all(|&l| nu2_gt(l, mu0)) {
                return TreeVerdict::yes("plus-dominant");
            }
            if !connected {
                return TreeVerdict::no("X is disconnected and the plus eigenvalues do not dominate");
            }
            if lam.iter().all(|&l| nu2_eq(l, m)) && mus.iter().all(|&mu| nu2_gt(mu, m)) {
                return TreeVerdict::with_clause(r_even, "minus-dominant", "r is odd");
            }
            let n = (r - 1) * m;
            if lam.iter().chain(mus).all(|&x| nu2_eq(x, m))
                && mus.iter().all(|&mu| nu2_eq(mu + n, mu0 + n))
                && lam.iter().all(|&l| nu2_gt(l + n, mu0 + n))
            {
                return TreeVerdict::with_clause(r_even, "equal-valuation", "r is odd");
            }
            TreeVerdict::no("no valuation pattern holds")
        }
        MatrixKind::A => {
            let b = k - mus[0];
            if mus.iter().all(|&mu| nu2_eq(k - mu, b)) && nu2_gt(m, b) && lams.iter().all(|&l| nu2_gt(k - l, b)) {
                return TreeVerdict::yes("plus-dominant");
            }
            if !connected {
                return TreeVerdict::no("X is disconnected and the plus eigenvalues do not dominate");
            }
            if mus.iter().all(|&mu| nu2_gt(k - mu, m)) && lams.iter().all(|&l| nu2_eq(k - l, m)) {
                return TreeVerdict::with_clause(r_even, "minus-dominant", "r is odd");
            }
            let c = k - m - mus[0];
            if lams.iter().map(|&l| k - l).chain(mus.iter().map(|&mu| k - mu)).all(|x| nu2_eq(x, m))
                && mus.iter().all(|&mu| nu2_eq(k - m - mu, c))
                && lams.iter().all(|&l| nu2_gt(k - m - l, c))
            {
                return TreeVerdict::with_clause(nu2_gt(r * m, c), "equal-valuation", "nu2(r m) does not exceed the minus valuation");
            }
            TreeVerdict::no("no valuation pattern holds")
        }
    }
}

/// Strong cospectrality and PST between `u`, `v` of the first copy of `X` in
/// the self-join `X^r = X v X^{r-1}`.
pub fn self_join_analysis(x: &WeightedGraph, r: usize, u: usize, v: usize, kind: MatrixKind) -> Result<SelfJoinReport> {
    if r < 2 {
        return Err(Error::Precondition("self-joins need r >= 2".into()));
    }
    if !x.is_simple() {
        return Err(Error::Precondition("self-joins assume X is simple".into()));
    }
    let m = x.order();
    if u == v || u >= m || v >= m {
        return Err(Error::Domain(format!("({u},{v}) must be two distinct vertices of X")));
    }
    let k = match kind {
        MatrixKind::L => 0,
        MatrixKind::A => {
            let k = x.is_regular().ok_or_else(|| Error::Precondition("adjacency self-joins assume X is regular".into()))?;
            crate::arith::reconstruct_integer(k, 1e-9)
                .ok_or_else(|| Error::Precondition("adjacency self-joins need an integer degree".into()))?
        }
    };
    let (mi, ri) = (m as i64, r as i64);
    let n = (r - 1) * m;
    let params = match kind {
        MatrixKind::L => JoinParams::laplacian(m, n),
        MatrixKind::A => JoinParams::new(m, n, k as f64, (k + (ri - 2) * mi) as f64),
    };
    let oracle = decompose(&self_join(x, r)?, kind)?;
    let in_x = if x.is_empty_pair() { None } else { strong_cospectral(&decompose(x, kind)?, u, v)? };
    let sc = lift_partition(x, in_x.as_ref(), &params, kind).map(|(p, q)| SupportPartition::new(u, v, p, q));
    check_partition(&sc, &oracle, u, v)?;
    let tree = if x.is_empty_pair() {
        TreeVerdict::with_clause(r % 2 == 0, "empty-pair", "r is odd")
    } else {
        match (&in_x, &sc) {
            (Some(p), Some(_)) => match (integers(&p.plus), integers(&p.minus)) {
                (Some(plus), Some(mus)) => {
                    let trivial = if kind == MatrixKind::L { 0 } else { k };
                    let lams: Vec<i64> = plus.into_iter().filter(|&l| l != trivial).collect();
                    self_join_tree(kind, &lams, &mus, mi, k, ri, x.is_connected())
                }
                _ => TreeVerdict::no("the support of u in X is not integral"),
            },
            _ => TreeVerdict::no("u and v are not strongly cospectral in X^r"),
        }
    };
    let pst = certify_closed(sc.clone(), &oracle, u, v, tree)?;
    Ok(SelfJoinReport { r, sc, pst })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdVerdict {
    pub pst: bool,
    pub tau: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IteratedJoinReport {
    pub part_index: usize,
    pub sc: Option<SupportPartition>,
    pub pst: PSTCertificate,
    /// Set when every part is empty or complete in the threshold pattern.
    pub threshold: Option<ThresholdVerdict>,
}

fn is_threshold(spec: &IteratedJoinSpec) -> bool {
    let sizes = spec.sizes();
    let Ok(t) = IteratedJoinSpec::threshold(&sizes) else { return false };
    spec.parts().iter().zip(t.parts()).all(|(a, b)| a == b)
}

/// Laplacian strong cospectrality and PST between two vertices of one part
/// of an iterated join, by folding the single-join partition rule along the
/// joins and unions that follow the part.
pub fn iterated_join_analysis(
    spec: &IteratedJoinSpec,
    part_index: usize,
    u: usize,
    v: usize,
) -> Result<IteratedJoinReport> {
    let p = spec.len();
    if part_index == 0 || part_index > p {
        return Err(Error::Domain(format!("part index {part_index} outside 1..={p}")));
    }
    if spec.part_of(u) != Some(part_index) || spec.part_of(v) != Some(part_index) || u == v {
        return Err(Error::Domain(format!("({u},{v}) must be two distinct vertices of part {part_index}")));
    }
    if spec.parts().iter().any(|x| !x.is_simple()) {
        return Err(Error::Precondition("Laplacian iterated joins assume every part is simple".into()));
    }
    let kind = MatrixKind::L;
    let parts = spec.parts();
    let mut prefixes = vec![parts[0].clone()];
    for h in 2..=p {
        let prev = prefixes.last().unwrap();
        prefixes.push(match spec.connective(h) {
            Connective::Join => join(prev, &parts[h - 1]),
            Connective::Union => disjoint_union(prev, &parts[h - 1]),
        });
    }
    let j = part_index;
    let xj = &parts[j - 1];
    let off = spec.offset(j);
    let in_part = if xj.is_empty_pair() { None } else { strong_cospectral(&decompose(xj, kind)?, u - off, v - off)? };
    let to_partition = |pair: Option<(Vec<SpectralValue>, Vec<SpectralValue>)>| {
        pair.map(|(a, b)| SupportPartition::new(u, v, a, b))
    };
    let mut state = if j >= 2 && spec.connective(j) == Connective::Join {
        let params = JoinParams::laplacian(xj.order(), prefixes[j - 2].order());
        to_partition(lift_partition(xj, in_part.as_ref(), &params, kind))
    } else {
        in_part
    };
    for h in j + 1..=p {
        if spec.connective(h) == Connective::Join {
            let current = &prefixes[h - 2];
            let params = JoinParams::laplacian(current.order(), parts[h - 1].order());
            state = to_partition(lift_partition(current, state.as_ref(), &params, kind));
        }
    }
    let sc = state.map(|s| SupportPartition::new(u, v, s.plus, s.minus));
    let oracle = decompose(&prefixes[p - 1], kind)?;
    check_partition(&sc, &oracle, u, v)?;
    let tree = match &sc {
        Some(part) => {
            let crit = pst_criterion(part);
            TreeVerdict { pst: crit.holds, clause: Some("iterated-fold".into()), reason: crit.reason }
        }
        None => TreeVerdict::no("not strongly cospectral"),
    };
    let pst = certify_closed(sc.clone(), &oracle, u, v, tree)?;
    let threshold = if is_threshold(spec) {
        let m = spec.sizes();
        let fast = j == 1 && m[0] == 2 && m[1] % 4 == 2 && m[2..].iter().all(|&s| s % 4 == 0);
        if fast != pst.pst {
            return Err(Error::Inconsistency(format!(
                "threshold congruences predict {fast} but the certificate says {}",
                pst.pst
            )));
        }
        if let (true, Some(t)) = (fast, pst.tau) {
            if (t - std::f64::consts::FRAC_PI_2).abs() > 1e-9 {
                return Err(Error::Inconsistency(format!("threshold PST time {t} differs from pi/2")));
            }
        }
        Some(ThresholdVerdict {
            pst: fast,
            tau: fast.then_some(std::f64::consts::FRAC_PI_2),
            note: "uses m_1 = 2, m_2 ≡ 2 (mod 4) and m_j ≡ 0 (mod 4) for j >= 3; \
                   the variant m_j ≡ 2 (mod 4) for j >= 3 is rejected by the spectral check"
                .into(),
        })
    } else {
        None
    };
    Ok(IteratedJoinReport { part_index, sc, pst, threshold })
}
