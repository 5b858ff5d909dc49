//! Strong cospectrality, periodicity and perfect state transfer: generic
//! certificates from spectral data and closed-form predicates for joins.

mod families;
mod join;
mod period;

pub use families::{
    double_cone_pst, iterated_join_analysis, pst_induced, pst_preserved, pst_preserved_padded, self_join_analysis,
    DoubleConeReport, InducedReport, IteratedJoinReport, OddValuationParams, PaddedPreservationReport,
    PreservationReport, SelfJoinReport,
};
pub use join::{join_pst, join_strong_cospectral};
pub use period::{
    graph_periodic, is_periodic, join_period_ratio, join_periodic, minimum_period, vertex_period, JoinPeriodRatio,
    PeriodCertificate, PeriodKind, PeriodRatioTerm,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, gcd_all, nu2_eq, nu2_gt, nu2_or_inf, squarefree_part, QuadraticEigenvalue, QuadraticFrame};
use crate::error::{Error, Result};
use crate::matrix::norm2;
use crate::spectral::{normalize_set, sets_equal, values, SpectralDecomposition, SpectralValue, SUPPORT_TOL};
use crate::walk::transition_entry;

/// A walk attains a target entry when its magnitude is at least `1 - PST_TOL`.
pub const PST_TOL: f64 = 1e-6;

/// The angle `numerator * pi / (denominator * sqrt(sqrt_denominator))`,
/// reduced so that the radicand is square-free and the fraction is in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiMultiple {
    pub numerator: i64,
    pub denominator: i64,
    pub sqrt_denominator: i64,
}

impl PiMultiple {
    pub fn new(numerator: i64, denominator: i64, sqrt_denominator: i64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::Domain("zero denominator in a multiple of pi".into()));
        }
        let (s, f) = squarefree_part(sqrt_denominator)?;
        let den = denominator.checked_mul(f).ok_or(Error::Overflow("multiple of pi"))?;
        let g = gcd(numerator, den).max(1) * den.signum();
        Ok(PiMultiple { numerator: numerator / g, denominator: den / g, sqrt_denominator: s })
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 * PI / (self.denominator as f64 * (self.sqrt_denominator as f64).sqrt())
    }
}

impl std::fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.numerator {
            0 => return f.write_str("0"),
            1 => f.write_str("π")?,
            -1 => f.write_str("-π")?,
            n => write!(f, "{n}π")?,
        }
        match (self.denominator, self.sqrt_denominator) {
            (1, 1) => Ok(()),
            (d, 1) => write!(f, "/{d}"),
            (1, s) => write!(f, "/√{s}"),
            (d, s) => write!(f, "/({d}√{s})"),
        }
    }
}

/// The split `sigma_u = sigma+ ∪ sigma-` of a strongly cospectral pair, with
/// `E_j e_u = E_j e_v` on `plus` and `E_j e_u = -E_j e_v` on `minus`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPartition {
    pub u: usize,
    pub v: usize,
    pub plus: Vec<SpectralValue>,
    pub minus: Vec<SpectralValue>,
}

impl SupportPartition {
    pub fn new(u: usize, v: usize, plus: Vec<SpectralValue>, minus: Vec<SpectralValue>) -> Self {
        SupportPartition { u, v, plus: normalize_set(plus), minus: normalize_set(minus) }
    }

    pub fn support(&self) -> Vec<SpectralValue> {
        normalize_set(self.plus.iter().chain(&self.minus).copied().collect())
    }

    /// Equality of the plus and minus sets as real numbers.
    pub fn same_sets(&self, other: &SupportPartition) -> bool {
        sets_equal(&values(&self.plus), &values(&other.plus)) && sets_equal(&values(&self.minus), &values(&other.minus))
    }
}

/// Tests `E_j e_u = ±E_j e_v` for every eigenvalue and returns the partition,
/// or `None` when some projector matches neither sign.
pub fn strong_cospectral(decomp: &SpectralDecomposition, u: usize, v: usize) -> Result<Option<SupportPartition>> {
    if u == v {
        return Err(Error::Domain("strong cospectrality needs two distinct vertices".into()));
    }
    let n = decomp.order();
    if u >= n || v >= n {
        return Err(Error::Domain(format!("pair ({u},{v}) out of range for order {n}")));
    }
    let mut idx = Vec::new();
    let mut signs = Vec::new();
    for j in 0..decomp.eigenvalues.len() {
        let a = decomp.projected(j, u);
        let b = decomp.projected(j, v);
        if norm2(&a) <= SUPPORT_TOL && norm2(&b) <= SUPPORT_TOL {
            continue;
        }
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        if norm2(&diff) <= SUPPORT_TOL {
            signs.push(true);
        } else if norm2(&sum) <= SUPPORT_TOL {
            signs.push(false);
        } else {
            return Ok(None);
        }
        idx.push(j);
    }
    let vals = decomp.values_at(&idx);
    let (plus, minus): (Vec<_>, Vec<_>) = vals.into_iter().zip(signs).partition(|(_, s)| *s);
    Ok(Some(SupportPartition::new(
        u,
        v,
        plus.into_iter().map(|p| p.0).collect(),
        minus.into_iter().map(|p| p.0).collect(),
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

/// One line of the valuation ledger: `difference = (lambda_0 - eigenvalue)/sqrt(delta)`
/// for a fixed reference `lambda_0 ∈ sigma+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nu2Entry {
    pub eigenvalue: f64,
    pub sign: Sign,
    pub difference: i64,
    /// `None` stands for an infinite valuation (zero difference).
    pub nu2: Option<u32>,
}

/// Outcome of the integrality, sign and valuation test on a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PstCriterion {
    pub holds: bool,
    pub reason: Option<String>,
    pub reference: Option<f64>,
    pub delta: Option<i64>,
    pub g: Option<i64>,
    pub ledger: Vec<Nu2Entry>,
}

impl PstCriterion {
    fn fail(reason: impl Into<String>) -> Self {
        PstCriterion { holds: false, reason: Some(reason.into()), reference: None, delta: None, g: None, ledger: Vec::new() }
    }

    /// `pi / (g sqrt(delta))`, when the frame exists.
    pub fn tau(&self) -> Option<PiMultiple> {
        match (self.g, self.delta) {
            (Some(g), Some(d)) if g > 0 => PiMultiple::new(1, g, d).ok(),
            _ => None,
        }
    }
}

/// PST between a strongly cospectral pair holds exactly when the support lies
/// on a quadratic frame `(a + c_j sqrt(delta))/2`, `sigma-` is nonempty, and
/// with `lambda_0 ∈ sigma+` fixed, the valuations `nu2((lambda_0 - mu)/sqrt(delta))`
/// agree over `mu ∈ sigma-` and are strictly exceeded over `sigma+`.
pub fn pst_criterion(partition: &SupportPartition) -> PstCriterion {
    if partition.minus.is_empty() {
        return PstCriterion::fail("the minus support is empty");
    }
    if partition.plus.is_empty() {
        return PstCriterion::fail("the plus support is empty");
    }
    let all: Vec<(SpectralValue, Sign)> = partition
        .plus
        .iter()
        .map(|s| (*s, Sign::Plus))
        .chain(partition.minus.iter().map(|s| (*s, Sign::Minus)))
        .collect();
    let Some(exact) = all.iter().map(|(s, _)| s.exact).collect::<Option<Vec<QuadraticEigenvalue>>>() else {
        return PstCriterion::fail("condition (1) unverifiable: the support is not integral or quadratic");
    };
    let frame = match QuadraticFrame::build(&exact) {
        Ok(f) => f,
        Err(e) => return PstCriterion::fail(format!("no common quadratic frame: {e}")),
    };
    let ledger: Vec<Nu2Entry> = (1..all.len())
        .map(|i| {
            let d = frame.scaled_difference(0, i);
            Nu2Entry { eigenvalue: all[i].0.value, sign: all[i].1, difference: d, nu2: nu2_or_inf(d) }
        })
        .collect();
    let diffs: Vec<i64> = ledger.iter().map(|e| e.difference).collect();
    let g = gcd_all(&diffs).ok().filter(|&g| g > 0);
    let minus: Vec<i64> = ledger.iter().filter(|e| e.sign == Sign::Minus).map(|e| e.difference).collect();
    let plus: Vec<i64> = ledger.iter().filter(|e| e.sign == Sign::Plus).map(|e| e.difference).collect();
    let equal = minus.iter().all(|&d| nu2_eq(d, minus[0]));
    let dominant = plus.iter().all(|&d| nu2_gt(d, minus[0]));
    let reason = if !equal {
        Some("valuations over the minus support differ".to_string())
    } else if !dominant {
        Some("a plus eigenvalue does not exceed the minus valuation".to_string())
    } else {
        None
    };
    PstCriterion {
        holds: reason.is_none(),
        reason,
        reference: Some(all[0].0.value),
        delta: Some(frame.delta),
        g,
        ledger,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PSTCertificate {
    pub u: usize,
    pub v: usize,
    pub pst: bool,
    pub reason: Option<String>,
    /// Name of the closed-form branch that decided the verdict, when one did.
    pub clause: Option<String>,
    pub tau: Option<f64>,
    pub tau_exact: Option<PiMultiple>,
    pub delta: Option<i64>,
    pub g: Option<i64>,
    pub nu2_ledger: Vec<Nu2Entry>,
    pub partition: Option<SupportPartition>,
    /// `|U(tau)_{u,v}|` from the dense decomposition at the candidate time.
    pub numeric_check: Option<f64>,
}

impl PSTCertificate {
    fn not_cospectral(u: usize, v: usize) -> Self {
        PSTCertificate {
            u,
            v,
            pst: false,
            reason: Some("not strongly cospectral".into()),
            clause: None,
            tau: None,
            tau_exact: None,
            delta: None,
            g: None,
            nu2_ledger: Vec::new(),
            partition: None,
            numeric_check: None,
        }
    }
}

/// Builds a certificate from a partition and confirms it numerically on `decomp`.
pub(crate) fn certify(
    partition: Option<SupportPartition>,
    decomp: &SpectralDecomposition,
    u: usize,
    v: usize,
) -> Result<PSTCertificate> {
    let Some(partition) = partition else {
        return Ok(PSTCertificate::not_cospectral(u, v));
    };
    let crit = pst_criterion(&partition);
    let tau_exact = crit.tau();
    let numeric_check = tau_exact.map(|t| transition_entry(decomp, u, v, t.value()).norm());
    if let Some(check) = numeric_check {
        if crit.holds && check < 1.0 - PST_TOL {
            return Err(Error::Inconsistency(format!(
                "PST certified between {u} and {v} at {} but |U(tau)_uv| = {check:.9}",
                tau_exact.unwrap()
            )));
        }
        if !crit.holds && check >= 1.0 - PST_TOL {
            return Err(Error::Inconsistency(format!(
                "PST rejected between {u} and {v} but |U({})_uv| = {check:.9}",
                tau_exact.unwrap()
            )));
        }
    }
    Ok(PSTCertificate {
        u,
        v,
        pst: crit.holds,
        reason: crit.reason,
        clause: None,
        tau: if crit.holds { tau_exact.map(|t| t.value()) } else { None },
        tau_exact: if crit.holds { tau_exact } else { None },
        delta: crit.delta,
        g: crit.g,
        nu2_ledger: crit.ledger,
        partition: Some(partition),
        numeric_check,
    })
}

/// Decides PST between `u` and `v` from the dense decomposition.
pub fn pst_certificate(decomp: &SpectralDecomposition, u: usize, v: usize) -> Result<PSTCertificate> {
    let partition = strong_cospectral(decomp, u, v)?;
    certify(partition, decomp, u, v)
}
