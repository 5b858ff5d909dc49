//! Closed-form Laplacian supports of vertices in iterated join graphs.

use serde::{Deserialize, Serialize};

use super::{approx_eq, decompose, normalize_set, values, MatrixKind, SpectralValue};
use crate::error::{Error, Result};
use crate::graph::{Connective, IteratedJoinSpec};

/// Offset sequences for a vertex in part `j` (1-based) of an iterated join with parts `m_1..m_p`.
///
/// All vectors are indexed by `h = 0..=p`.
/// * `alphas[h] = m_1 + ... + m_h`
/// * `betas[h] = m_{h+2} + m_{h+4} + ...` (terms up to `m_p`), so `betas[p] = 0`
/// * `gammas[h] = alphas[h] + betas[h] - alphas[j] - betas[j-1]` at the join steps
///   `h > j` when `u` enters the fold on the left of a join (`None` elsewhere)
/// * `deltas[h] = alphas[h] + betas[h] - alphas[j-1] - betas[j]` at join steps `h >= j`
///   when `u` enters on the right of a join
/// * `phis[h] = alphas[h+1] + betas[h] - betas[1]` at odd `h` for the odd-length
///   shape with `j = 1`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IteratedJoinSupportParams {
    pub part: usize,
    pub sizes: Vec<i64>,
    pub alphas: Vec<i64>,
    pub betas: Vec<i64>,
    pub gammas: Vec<Option<i64>>,
    pub deltas: Vec<Option<i64>>,
    pub phis: Vec<Option<i64>>,
}

impl IteratedJoinSupportParams {
    pub fn new(sizes: &[usize], part: usize) -> Result<Self> {
        let p = sizes.len();
        if part == 0 || part > p {
            return Err(Error::Domain(format!("part index {part} outside 1..={p}")));
        }
        let m = |h: usize| sizes[h - 1] as i64;
        let alphas: Vec<i64> = (0..=p).map(|h| (1..=h).map(m).sum()).collect();
        let betas: Vec<i64> = (0..=p).map(|h| (h + 2..=p).step_by(2).map(m).sum()).collect();
        let even_shape = p % 2 == 0;
        let j = part;
        let mut gammas = vec![None; p + 1];
        let mut deltas = vec![None; p + 1];
        let mut phis = vec![None; p + 1];
        let join_step = |h: usize| h >= 2 && ((h % 2 == 0) == even_shape);
        let enters_right = j >= 2 && join_step(j);
        for h in 1..=p {
            if !join_step(h) {
                continue;
            }
            if enters_right && h >= j {
                // m_j + m_{j+1} + m_{j+3} + ... + m_{h-1}
                let d = m(j) + (j + 1..h).step_by(2).map(m).sum::<i64>();
                deltas[h] = Some(d);
            }
            if !enters_right && h > j && (even_shape || j > 1) {
                // 0 for the first join after j, else m_{j+2} + m_{j+4} + ... + m_{h-1}
                let g = (j + 2..h).step_by(2).map(m).sum::<i64>();
                gammas[h] = Some(g);
            }
        }
        if !even_shape && j == 1 {
            for h in (1..p).step_by(2) {
                // m_1 + m_2 + m_4 + ... + m_{h+1}
                let f = m(1) + (2..=h + 1).step_by(2).map(m).sum::<i64>();
                phis[h] = Some(f);
            }
        }
        Ok(IteratedJoinSupportParams { part, sizes: sizes.iter().map(|&s| s as i64).collect(), alphas, betas, gammas, deltas, phis })
    }

    fn parts(&self) -> usize {
        self.sizes.len()
    }

    fn m(&self, h: usize) -> i64 {
        self.sizes[h - 1]
    }

    fn is_join_step(&self, h: usize) -> bool {
        h >= 2 && ((h % 2 == 0) == (self.parts() % 2 == 0))
    }

    /// First join step that involves the part.
    pub fn first_join(&self) -> usize {
        let j = self.part;
        if j >= 2 && self.is_join_step(j) {
            j
        } else {
            (j + 1..=self.parts()).find(|&h| self.is_join_step(h)).expect("alternating shapes end in a join")
        }
    }

    /// `m_h + beta_h` for every join step after the first one involving the part.
    ///
    /// Each such join has a disconnected left operand (it follows a union), so
    /// its `n`-type eigenvalue survives in the support of the vertex.
    pub fn late_join_terms(&self) -> Vec<i64> {
        let f = self.first_join();
        (f + 1..=self.parts())
            .filter(|&h| self.is_join_step(h))
            .map(|h| self.m(h) + self.betas[h])
            .collect()
    }

    /// The shift applied to the eigenvalues of the part, and the extra
    /// eigenvalue contributed when the part (or the left operand of its first
    /// join) is disconnected.
    pub fn part_shift(&self) -> i64 {
        let j = self.part;
        if j >= 2 && self.is_join_step(j) {
            self.alphas[j - 1] + self.betas[j]
        } else if self.parts() % 2 == 1 && j == 1 {
            self.betas[1]
        } else {
            self.betas[j - 1]
        }
    }

    /// The eigenvalues `alpha_h + beta_h` (or `alpha_{h+1} + beta_h`) created by the join steps.
    pub fn join_terms(&self) -> Vec<i64> {
        let (p, j) = (self.parts(), self.part);
        if p % 2 == 0 {
            (j..=p).filter(|h| h % 2 == 0).map(|h| self.alphas[h] + self.betas[h]).collect()
        } else if j == 1 {
            (1..=p.saturating_sub(2)).step_by(2).map(|h| self.alphas[h + 1] + self.betas[h]).collect()
        } else if j % 2 == 1 {
            (j..=p).filter(|h| h % 2 == 1).map(|h| self.alphas[h] + self.betas[h]).collect()
        } else {
            (j + 1..=p).filter(|h| h % 2 == 1).map(|h| self.alphas[h] + self.betas[h]).collect()
        }
    }

    /// Label of the closed-form case: `1a`/`1b` for an even number of parts, `2a`/`2b`/`2c` for odd.
    pub fn case_label(&self) -> &'static str {
        let (p, j) = (self.parts(), self.part);
        match (p % 2 == 0, j) {
            (true, j) if j % 2 == 1 => "1a",
            (true, _) => "1b",
            (false, 1) => "2a",
            (false, j) if j % 2 == 1 => "2b",
            (false, _) => "2c",
        }
    }

    /// Whether the `R` set carries the extra value [`Self::part_shift`] given
    /// the connectivity of the part.
    pub fn has_extra_root(&self, part_connected: bool) -> bool {
        match self.case_label() {
            "1a" => !(self.part == 1 && part_connected),
            "1b" | "2b" => !part_connected,
            _ => true,
        }
    }
}

/// Support of `u` (a vertex of part `part_index`, 1-based) in the Laplacian of the iterated join.
pub fn iterated_join_support(spec: &IteratedJoinSpec, u: usize, part_index: usize) -> Result<Vec<f64>> {
    Ok(values(&iterated_join_support_values(spec, u, part_index)?))
}

pub fn iterated_join_support_values(
    spec: &IteratedJoinSpec,
    u: usize,
    part_index: usize,
) -> Result<Vec<SpectralValue>> {
    if spec.part_of(u) != Some(part_index) {
        return Err(Error::Domain(format!("vertex {u} does not belong to part {part_index}")));
    }
    if spec.parts().iter().any(|p| !p.is_simple()) {
        return Err(Error::Precondition("Laplacian iterated joins assume every part is simple".into()));
    }
    debug_assert_eq!(spec.connective(spec.len()), Connective::Join);
    let params = IteratedJoinSupportParams::new(&spec.sizes(), part_index)?;
    let part = &spec.parts()[part_index - 1];
    let local = u - spec.offset(part_index);
    let dx = decompose(part, MatrixKind::L)?;
    let shift = params.part_shift();
    let mut out: Vec<SpectralValue> = dx
        .support(local)?
        .into_iter()
        .filter(|s| !approx_eq(s.value, 0.0))
        .map(|s| s.shift(shift))
        .collect();
    out.extend(params.join_terms().into_iter().map(SpectralValue::integer));
    out.push(SpectralValue::integer(0));
    if params.has_extra_root(part.is_connected()) {
        out.push(SpectralValue::integer(shift));
    }
    out.extend(params.late_join_terms().into_iter().map(SpectralValue::integer));
    Ok(normalize_set(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, empty_graph, IteratedJoinSpec};
    use crate::spectral::{eigenvalue_support, sets_equal};

    fn oracle(spec: &IteratedJoinSpec, u: usize) -> Vec<f64> {
        eigenvalue_support(&decompose(&spec.build(), MatrixKind::L).unwrap(), u).unwrap()
    }

    #[test]
    fn threshold_example_includes_late_join_term() {
        let spec = IteratedJoinSpec::threshold(&[2, 2, 1, 3]).unwrap();
        let s = iterated_join_support(&spec, 0, 1).unwrap();
        assert!(sets_equal(&s, &[0.0, 3.0, 5.0, 7.0, 8.0]));
        for u in 0..8 {
            let j = spec.part_of(u).unwrap();
            assert!(sets_equal(&iterated_join_support(&spec, u, j).unwrap(), &oracle(&spec, u)), "vertex {u}");
        }
    }

    #[test]
    fn two_part_spec_matches_single_join() {
        let spec = IteratedJoinSpec::threshold(&[2, 2]).unwrap();
        assert!(sets_equal(&iterated_join_support(&spec, 0, 1).unwrap(), &[0.0, 2.0, 4.0]));
    }

    #[test]
    fn odd_shape_matches_oracle() {
        let spec = IteratedJoinSpec::new(vec![complete(2).unwrap(), empty_graph(2).unwrap(), complete(1).unwrap()]).unwrap();
        for u in 0..5 {
            let j = spec.part_of(u).unwrap();
            assert!(sets_equal(&iterated_join_support(&spec, u, j).unwrap(), &oracle(&spec, u)), "vertex {u}");
        }
    }

    #[test]
    fn offset_identities() {
        for sizes in [vec![2, 3, 1, 4, 2, 5], vec![3, 1, 2, 2, 4]] {
            let p = sizes.len();
            for j in 1..=p {
                let q = IteratedJoinSupportParams::new(&sizes, j).unwrap();
                assert!(q.alphas.windows(2).all(|w| w[1] > w[0]));
                assert_eq!(q.betas[p], 0);
                for h in 0..=p {
                    if let Some(g) = q.gammas[h] {
                        assert_eq!(q.alphas[h] + q.betas[h], q.alphas[j] + g + q.betas[j - 1]);
                    }
                    if let Some(d) = q.deltas[h] {
                        assert_eq!(q.alphas[h] + q.betas[h], q.alphas[j - 1] + d + q.betas[j]);
                    }
                    if let Some(f) = q.phis[h] {
                        assert_eq!(q.alphas[h + 1] + q.betas[h], f + q.betas[1]);
                    }
                }
            }
        }
    }

    #[test]
    fn wrong_part_rejected() {
        let spec = IteratedJoinSpec::threshold(&[2, 2]).unwrap();
        assert!(iterated_join_support(&spec, 0, 2).is_err());
    }
}
