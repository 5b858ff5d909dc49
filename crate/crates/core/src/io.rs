//! JSON graph files and analysis reports.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bounds::{bound_sweep, EqualityDiagnosis, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::graph::{empty_graph, WeightedGraph};
use crate::spectral::{decompose, JoinParams, MatrixKind, SpectralValue};
use crate::transfer::{
    join_period_ratio, join_pst, join_strong_cospectral, pst_certificate, pst_induced, pst_preserved, strong_cospectral,
    vertex_period, JoinPeriodRatio, PSTCertificate, PeriodCertificate, SupportPartition,
};

/// An edge or loop weight; integral weights are written as JSON integers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight(pub f64);

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let w = self.0;
        if w.fract() == 0.0 && w.abs() < 9.0e15 {
            s.serialize_i64(w as i64)
        } else {
            s.serialize_f64(w)
        }
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Weight)
    }
}

/// On-disk graph: `{"order": n, "simple": bool, "edges": [[u, v, w], ...], "loops": [[u, w], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub order: usize,
    pub simple: bool,
    pub edges: Vec<(usize, usize, Weight)>,
    #[serde(default)]
    pub loops: Vec<(usize, Weight)>,
}

impl GraphFile {
    pub fn from_graph(g: &WeightedGraph) -> Self {
        GraphFile {
            order: g.order(),
            simple: g.is_simple(),
            edges: g.edges().map(|(u, v, w)| (u, v, Weight(w))).collect(),
            loops: g.loops().map(|(u, w)| (u, Weight(w))).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<WeightedGraph> {
        if self.simple && !self.loops.is_empty() {
            return Err(Error::Graph("a graph marked simple has loops".into()));
        }
        let edges: Vec<_> = self.edges.iter().map(|&(u, v, w)| (u, v, w.0)).collect();
        let loops: Vec<_> = self.loops.iter().map(|&(u, w)| (u, w.0)).collect();
        WeightedGraph::from_parts(self.order, &edges, &loops)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn parse(text: &str) -> Result<WeightedGraph> {
        serde_json::from_str::<GraphFile>(text)?.to_graph()
    }
}

pub fn read_graph(path: &Path) -> Result<WeightedGraph> {
    GraphFile::parse(&fs::read_to_string(path)?)
}

pub fn write_graph(path: &Path, g: &WeightedGraph) -> Result<()> {
    fs::write(path, GraphFile::from_graph(g).to_json()? + "\n")?;
    Ok(())
}

/// Values of `n` for which a property holds in `X v O_n`, and the
/// congruence class they form, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinHint {
    /// `induced` (no PST in `X`) or `preserved` (PST in `X`).
    pub kind: String,
    pub partner: String,
    pub scanned_up_to: usize,
    pub hits: Vec<usize>,
    pub pattern: Option<String>,
}

pub const HINT_RANGE: usize = 32;

/// The smallest modulus `2^j <= 16` whose residue classes describe `hits` exactly over `1..=max`.
pub fn congruence_pattern(hits: &[usize], max: usize) -> Option<String> {
    if hits.is_empty() {
        return None;
    }
    if hits.len() == max {
        return Some("every n".into());
    }
    for modulus in [2usize, 4, 8, 16] {
        let residues: Vec<usize> = {
            let mut r: Vec<usize> = hits.iter().map(|&n| n % modulus).collect();
            r.sort_unstable();
            r.dedup();
            r
        };
        let generated: Vec<usize> = (1..=max).filter(|n| residues.contains(&(n % modulus))).collect();
        if generated == hits {
            let classes: Vec<String> = residues.iter().map(|r| r.to_string()).collect();
            return Some(format!("n ≡ {} (mod {modulus})", classes.join(" or ")));
        }
    }
    None
}

fn join_hint(x: &WeightedGraph, u: usize, v: usize, kind: MatrixKind, x_has_pst: bool) -> Option<JoinHint> {
    let mut hits = Vec::new();
    for n in 1..=HINT_RANGE {
        let y = empty_graph(n).ok()?;
        let hit = if x_has_pst {
            pst_preserved(x, &y, u, v, kind).ok()?.preserved
        } else {
            pst_induced(x, &y, u, v, kind).ok()?.induced
        };
        if hit {
            hits.push(n);
        }
    }
    Some(JoinHint {
        kind: if x_has_pst { "preserved" } else { "induced" }.into(),
        partner: "O_n".into(),
        scanned_up_to: HINT_RANGE,
        pattern: congruence_pattern(&hits, HINT_RANGE),
        hits,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub t_max: f64,
    pub samples: usize,
    pub max_abs_f: f64,
    pub envelope: f64,
    pub tight: bool,
    pub witness_t: Option<f64>,
    pub equality: EqualityDiagnosis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinAnalysis {
    pub right: String,
    pub params: JoinParams,
    pub partition: Option<SupportPartition>,
    pub pst: PSTCertificate,
    pub period_ratio: Option<JoinPeriodRatio>,
    pub period_ratio_note: Option<String>,
    pub bound: BoundSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: String,
    pub kind: MatrixKind,
    pub order: usize,
    pub pair: (usize, usize),
    pub support_u: Vec<SpectralValue>,
    pub support_v: Vec<SpectralValue>,
    pub partition: Option<SupportPartition>,
    pub pst: PSTCertificate,
    pub periods: Vec<PeriodCertificate>,
    pub hint: Option<JoinHint>,
    pub join: Option<JoinAnalysis>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Supports, strong cospectrality, PST and periods of a pair in `X`, and, with
/// a right operand `Y`, the same pair in `X v Y` with its period ratio and bound sweep.
pub fn analyze(
    x: &WeightedGraph,
    input: &str,
    kind: MatrixKind,
    u: usize,
    v: usize,
    right: Option<(&WeightedGraph, &str)>,
) -> Result<AnalysisReport> {
    let d = decompose(x, kind)?;
    if u >= x.order() || v >= x.order() {
        return Err(Error::Domain(format!("pair ({u},{v}) out of range for order {}", x.order())));
    }
    let partition = if u == v { None } else { strong_cospectral(&d, u, v)? };
    let pst = pst_certificate(&d, u, v)?;
    let mut periods = vec![vertex_period(&d, u)?];
    if v != u {
        periods.push(vertex_period(&d, v)?);
    }
    let hint = if partition.is_some() && right.is_none() { join_hint(x, u, v, kind, pst.pst) } else { None };
    let join = match right {
        Some((y, name)) => {
            let params = JoinParams::for_graphs(x, y, kind)?;
            let (ratio, note) = match join_period_ratio(x, y, u, kind) {
                Ok(r) => (Some(r), None),
                Err(e @ Error::Inconsistency(_)) => return Err(e),
                Err(e) => (None, Some(e.to_string())),
            };
            let sweep = bound_sweep(x, y, u, v, kind, None, DEFAULT_SAMPLES)?;
            Some(JoinAnalysis {
                right: name.into(),
                params,
                partition: if u == v { None } else { join_strong_cospectral(x, y, u, v, kind)? },
                pst: join_pst(x, y, u, v, kind)?,
                period_ratio: ratio,
                period_ratio_note: note,
                bound: BoundSummary {
                    t_max: sweep.t_max,
                    samples: sweep.samples.len(),
                    max_abs_f: sweep.max_abs_f,
                    envelope: sweep.envelope,
                    tight: sweep.tight,
                    witness_t: sweep.witness_t,
                    equality: sweep.equality_diagnosis,
                },
            })
        }
        None => None,
    };
    Ok(AnalysisReport {
        input: input.into(),
        kind,
        order: x.order(),
        pair: (u, v),
        support_u: d.support(u)?,
        support_v: d.support(v)?,
        partition,
        pst,
        periods,
        hint,
        join,
    })
}
