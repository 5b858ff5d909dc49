//! How far `|U_M(X v Y, t)_{u,v}|` can drift from `|U_M(X, t)_{u,v}|`:
//! the sweep of `F(t) = |U_M(X v Y,t)_{u,v}| - |U_M(X,t)_{u,v}|`, the `2/m`
//! envelope, its equality conditions and the large-`m` mimicry sweep.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_perfect_square, nu2_eq, nu2_or_inf, reconstruct_integer};
use crate::error::{Error, Result};
use crate::graph::{join, WeightedGraph};
use crate::spectral::{decompose, JoinParams, MatrixKind, SpectralDecomposition};
use crate::transfer::PiMultiple;
use crate::walk::{alpha, cis, lattice_gcd, EntryEvaluator};

/// Slack on `|F| <= 2/m` and on the closed-form discrepancy identity.
pub const ENVELOPE_TOL: f64 = 1e-9;
/// `|F|` within this of `2/m` counts as attaining the envelope.
pub const TIGHT_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 4096;
/// Sweep horizon when the spectra are not all integral.
pub const DEFAULT_T_MAX_NONINTEGRAL: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub t: f64,
    pub mag_join: f64,
    pub mag_base: f64,
    #[serde(rename = "F")]
    pub f: f64,
    /// `|U(X v Y,t)_{u,v} - phase * U(X,t)_{u,v}|`, with `phase = e^{itn}` for `L` and 1 for `A`.
    pub pre_triangle: f64,
}

/// When `|U(X v Y,t) - phase * U(X,t)| = 2/m` can happen: `nu2(m) = nu2(n)` (L)
/// or `nu2(lambda+ - k) = nu2(lambda- - k)` (A, integer `k, l` and square `D`),
/// at the odd multiples of `pi/g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityDiagnosis {
    /// `None` when the spectrum is irrational and the test does not apply.
    pub possible: Option<bool>,
    /// `gcd(m, n)` (L) or `gcd(lambda+ - k, lambda- - k)` (A).
    pub g: Option<i64>,
    pub nu2_left: Option<u32>,
    pub nu2_right: Option<u32>,
    /// `pi/g`; equality holds at its odd multiples.
    pub first_time: Option<PiMultiple>,
    pub times: String,
}

pub fn equality_condition(x: &WeightedGraph, y: &WeightedGraph, kind: MatrixKind) -> Result<EqualityDiagnosis> {
    let p = JoinParams::for_graphs(x, y, kind)?;
    Ok(equality_from_params(&p, kind))
}

fn integer_spectrum(p: &JoinParams) -> Option<(i64, i64, i64)> {
    let d = p.exact_d()?;
    if !is_perfect_square(d) {
        return None;
    }
    let k = reconstruct_integer(p.k, 1e-9)?;
    Some((k, reconstruct_integer(p.lambda_plus, 1e-9)?, reconstruct_integer(p.lambda_minus, 1e-9)?))
}

pub fn equality_from_params(p: &JoinParams, kind: MatrixKind) -> EqualityDiagnosis {
    let (a, b) = match kind {
        MatrixKind::L => (p.m as i64, p.n as i64),
        MatrixKind::A => match integer_spectrum(p) {
            Some((k, lp, lm)) => (lp - k, lm - k),
            None => {
                return EqualityDiagnosis {
                    possible: None,
                    g: None,
                    nu2_left: None,
                    nu2_right: None,
                    first_time: None,
                    times: "undecided (irrational spectrum)".into(),
                }
            }
        },
    };
    let g = lattice_gcd(p, kind).expect("integer lattice");
    let possible = nu2_eq(a, b);
    let first = PiMultiple::new(1, g, 1).ok();
    let times = match (&first, possible) {
        (Some(t), true) => format!("j*{t} for odd j"),
        _ => "none".into(),
    };
    EqualityDiagnosis {
        possible: Some(possible),
        g: Some(g),
        nu2_left: nu2_or_inf(a),
        nu2_right: nu2_or_inf(b),
        first_time: first,
        times,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub pair: (usize, usize),
    pub kind: MatrixKind,
    pub m: usize,
    pub n: usize,
    pub t_max: f64,
    pub samples: Vec<BoundSample>,
    pub max_abs_f: f64,
    pub max_pre_triangle: f64,
    pub envelope: f64,
    pub tight: bool,
    pub witness_t: Option<f64>,
    pub equality_diagnosis: EqualityDiagnosis,
    /// Whether the `|F|` equality conditions hold at some sampled odd multiple
    /// of `pi/g`: for `L`, `U(X,tau)` real and `<= 0` or `>= 2/m`; for `A`,
    /// `U(X,tau) = |U(X,tau)| e^{i tau k}` with modulus `>= 2/m`.
    pub tight_predicted: bool,
}

impl BoundReport {
    /// Number of sign changes of `F` across consecutive samples.
    pub fn zero_crossings(&self) -> usize {
        self.samples.windows(2).filter(|w| w[0].f * w[1].f < 0.0).count()
    }
}

/// `4 pi` when both spectra are integral (every vertex then revives by `2 pi`), else 20.
pub fn default_t_max(x: &SpectralDecomposition, joined: &SpectralDecomposition) -> f64 {
    let integral = x.eigenvalues.iter().chain(&joined.eigenvalues).all(|&l| reconstruct_integer(l, 1e-8).is_some());
    if integral {
        4.0 * PI
    } else {
        DEFAULT_T_MAX_NONINTEGRAL
    }
}

struct SweepContext {
    kind: MatrixKind,
    params: JoinParams,
    base: EntryEvaluator,
    joined: EntryEvaluator,
}

impl SweepContext {
    fn sample(&self, t: f64) -> Result<BoundSample> {
        let uj = self.joined.eval(t);
        let ux = self.base.eval(t);
        let phase = match self.kind {
            MatrixKind::L => cis(t * self.params.n as f64),
            MatrixKind::A => Complex64::new(1.0, 0.0),
        };
        let diff = uj - phase * ux;
        let closed = phase * alpha(&self.params, self.kind, t);
        if (diff - closed).norm() > 1e-7 {
            return Err(Error::Inconsistency(format!(
                "join entry minus base entry is {diff} at t = {t}, closed form gives {closed}"
            )));
        }
        let (mj, mx) = (uj.norm(), ux.norm());
        Ok(BoundSample { t, mag_join: mj, mag_base: mx, f: mj - mx, pre_triangle: diff.norm() })
    }

    /// The `|F|` equality conditions at `tau`.
    fn equality_holds(&self, tau: f64, envelope: f64) -> bool {
        let ux = self.base.eval(tau);
        match self.kind {
            MatrixKind::L => ux.im.abs() <= TIGHT_TOL && (ux.re <= TIGHT_TOL || ux.re >= envelope - TIGHT_TOL),
            MatrixKind::A => {
                let rotated = ux * cis(-tau * self.params.k);
                rotated.im.abs() <= TIGHT_TOL && rotated.re >= envelope - TIGHT_TOL
            }
        }
    }
}

/// Samples `F(t)` on a uniform grid of `[0, t_max]` together with the points of
/// `T_M` and the odd multiples of `pi/g`, and checks the `2/m` envelope.
pub fn bound_sweep(
    x: &WeightedGraph,
    y: &WeightedGraph,
    u: usize,
    v: usize,
    kind: MatrixKind,
    t_max: Option<f64>,
    samples: usize,
) -> Result<BoundReport> {
    let params = JoinParams::for_graphs(x, y, kind)?;
    if samples < 2 {
        return Err(Error::Precondition("a sweep needs at least 2 samples".into()));
    }
    let m = x.order();
    if u >= m || v >= m {
        return Err(Error::Domain(format!("pair ({u},{v}) must lie in X (order {m})")));
    }
    let dx = decompose(x, kind)?;
    let dj = decompose(&join(x, y), kind)?;
    let t_max = t_max.unwrap_or_else(|| default_t_max(&dx, &dj));
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain(format!("t_max must be positive and finite, got {t_max}")));
    }
    let ctx = SweepContext { kind, params, base: EntryEvaluator::new(&dx, u, v), joined: EntryEvaluator::new(&dj, u, v) };
    let envelope = 2.0 / m as f64;
    let diagnosis = equality_from_params(&params, kind);

    let mut times: Vec<f64> = (0..samples).map(|i| t_max * i as f64 / (samples - 1) as f64).collect();
    let mut equality_times = Vec::new();
    if let Some(g) = lattice_gcd(&params, kind).filter(|&g| g > 0) {
        let step = PI / g as f64;
        let count = (t_max / step).floor() as usize;
        for j in 1..=count {
            let t = j as f64 * step;
            times.push(t);
            if j % 2 == 1 && diagnosis.possible == Some(true) {
                equality_times.push(t);
            }
        }
    }
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);

    let samples: Vec<BoundSample> = times.par_iter().map(|&t| ctx.sample(t)).collect::<Result<_>>()?;
    let mut max_abs_f = 0.0;
    let mut witness = None;
    let mut max_pre = 0.0f64;
    for s in &samples {
        if s.f.abs() > envelope + ENVELOPE_TOL || s.pre_triangle > envelope + ENVELOPE_TOL {
            return Err(Error::Inconsistency(format!(
                "|F({})| = {} or the pre-triangle value {} exceeds 2/m = {envelope}",
                s.t,
                s.f.abs(),
                s.pre_triangle
            )));
        }
        if s.f.abs() > max_abs_f {
            max_abs_f = s.f.abs();
            witness = Some(s.t);
        }
        max_pre = max_pre.max(s.pre_triangle);
    }
    let tight = max_abs_f >= envelope - TIGHT_TOL;
    let tight_predicted = equality_times.iter().any(|&t| ctx.equality_holds(t, envelope));
    if tight_predicted && !tight {
        return Err(Error::Inconsistency("the equality conditions hold but |F| stays below 2/m".into()));
    }
    if let Some(&t) = equality_times.first() {
        let s = ctx.sample(t)?;
        if (s.pre_triangle - envelope).abs() > ENVELOPE_TOL {
            return Err(Error::Inconsistency(format!(
                "equality predicted at t = {t} but the pre-triangle value is {}",
                s.pre_triangle
            )));
        }
    }
    Ok(BoundReport {
        pair: (u, v),
        kind,
        m,
        n: params.n,
        t_max,
        samples,
        max_abs_f,
        max_pre_triangle: max_pre,
        envelope,
        tight,
        witness_t: if tight { witness } else { None },
        equality_diagnosis: diagnosis,
        tight_predicted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MimicryEntry {
    pub m: usize,
    pub max_abs_f: f64,
    pub envelope: f64,
}

/// `max |F|` over `t_grid` for each `X = family(size)`; each entry stays under `2/m`.
pub fn mimicry_sweep<G>(
    family: G,
    sizes: &[usize],
    y: &WeightedGraph,
    u: usize,
    v: usize,
    kind: MatrixKind,
    t_grid: &[f64],
) -> Result<Vec<MimicryEntry>>
where
    G: Fn(usize) -> Result<WeightedGraph> + Sync,
{
    sizes
        .par_iter()
        .map(|&size| {
            let x = family(size)?;
            let params = JoinParams::for_graphs(&x, y, kind)?;
            let m = x.order();
            if u >= m || v >= m {
                return Err(Error::Precondition(format!("pair ({u},{v}) missing from the family member of order {m}")));
            }
            let ctx = SweepContext {
                kind,
                params,
                base: EntryEvaluator::new(&decompose(&x, kind)?, u, v),
                joined: EntryEvaluator::new(&decompose(&join(&x, y), kind)?, u, v),
            };
            let envelope = 2.0 / m as f64;
            let mut max_abs_f = 0.0f64;
            for &t in t_grid {
                max_abs_f = max_abs_f.max(ctx.sample(t)?.f.abs());
            }
            if max_abs_f > envelope + ENVELOPE_TOL {
                return Err(Error::Inconsistency(format!("max |F| = {max_abs_f} exceeds 2/m at m = {m}")));
            }
            Ok(MimicryEntry { m, max_abs_f, envelope })
        })
        .collect()
}
