//! Weighted undirected graphs with optional loops, the standard families and
//! the join / union constructions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;

/// Tolerance for deciding that all row sums of the adjacency matrix agree.
pub const REGULARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    order: usize,
    edges: BTreeMap<(usize, usize), f64>,
    loops: BTreeMap<usize, f64>,
}

impl WeightedGraph {
    /// The empty graph on `order` vertices.
    pub fn empty(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Graph("graphs need at least one vertex".into()));
        }
        Ok(WeightedGraph { order, edges: BTreeMap::new(), loops: BTreeMap::new() })
    }

    /// Builds a graph from weighted edges `(u, v, w)` and loops `(u, w)`.
    pub fn from_parts(order: usize, edges: &[(usize, usize, f64)], loops: &[(usize, f64)]) -> Result<Self> {
        let mut g = Self::empty(order)?;
        for &(u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        for &(u, w) in loops {
            g.set_loop(u, w)?;
        }
        Ok(g)
    }

    fn check_vertex(&self, u: usize) -> Result<()> {
        if u >= self.order {
            return Err(Error::Graph(format!("vertex {u} out of range for order {}", self.order)));
        }
        Ok(())
    }

    /// Adds an edge of weight `w > 0`; duplicates are rejected.
    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::Graph(format!("edge ({u},{v}) is a loop; use set_loop")));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Graph(format!("edge ({u},{v}) has non-positive weight {w}")));
        }
        let key = (u.min(v), u.max(v));
        if self.edges.insert(key, w).is_some() {
            return Err(Error::Graph(format!("duplicate edge ({},{})", key.0, key.1)));
        }
        Ok(())
    }

    /// Sets the loop weight at `u`; a zero weight removes the loop.
    pub fn set_loop(&mut self, u: usize, w: f64) -> Result<()> {
        self.check_vertex(u)?;
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::Graph(format!("loop at {u} has negative weight {w}")));
        }
        if w == 0.0 {
            self.loops.remove(&u);
        } else {
            self.loops.insert(u, w);
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn loops(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.loops.iter().map(|(&u, &w)| (u, w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        if u == v {
            self.loops.get(&u).copied().unwrap_or(0.0)
        } else {
            self.edges.get(&(u.min(v), u.max(v))).copied().unwrap_or(0.0)
        }
    }

    pub fn is_simple(&self) -> bool {
        self.loops.is_empty()
    }

    /// `2*w(u,u) + sum of incident edge weights`.
    pub fn degree(&self, u: usize) -> f64 {
        let mut d = 2.0 * self.weight(u, u);
        for (&(a, b), &w) in &self.edges {
            if a == u || b == u {
                d += w;
            }
        }
        d
    }

    pub fn adjacency(&self) -> Mat {
        let mut a = Mat::zeros(self.order);
        for (&(u, v), &w) in &self.edges {
            a[(u, v)] = w;
            a[(v, u)] = w;
        }
        for (&u, &w) in &self.loops {
            a[(u, u)] = w;
        }
        a
    }

    /// `D - A` with the loop-free degree; defined for simple graphs.
    pub fn laplacian(&self) -> Mat {
        let mut l = Mat::zeros(self.order);
        for (&(u, v), &w) in &self.edges {
            l[(u, v)] -= w;
            l[(v, u)] -= w;
            l[(u, u)] += w;
            l[(v, v)] += w;
        }
        l
    }

    /// Constant row sum of the adjacency matrix (loops counted once), if any.
    pub fn is_regular(&self) -> Option<f64> {
        let a = self.adjacency();
        let sums: Vec<f64> = (0..self.order).map(|i| a.row(i).iter().sum()).collect();
        let k = sums[0];
        sums.iter().all(|s| (s - k).abs() <= REGULARITY_TOL).then_some(k)
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.order];
        for &(u, v) in self.edges.keys() {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Vertices reachable from `u` through edges of nonzero weight, sorted.
    pub fn component_of(&self, u: usize) -> Vec<usize> {
        let adj = self.neighbours();
        let mut seen = vec![false; self.order];
        let mut stack = vec![u];
        seen[u] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.order).filter(|&i| seen[i]).collect()
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.order];
        let mut out = Vec::new();
        for u in 0..self.order {
            if !assigned[u] {
                let c = self.component_of(u);
                for &x in &c {
                    assigned[x] = true;
                }
                out.push(c);
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.component_of(0).len() == self.order
    }

    /// True when `u` has no incident edges (loops allowed).
    pub fn is_isolated(&self, u: usize) -> bool {
        !self.edges.keys().any(|&(a, b)| a == u || b == u)
    }

    /// True when the graph has no edges between distinct vertices.
    pub fn is_edgeless(&self) -> bool {
        self.edges.is_empty()
    }

    /// True for `O_2(k)`: two isolated vertices carrying equal loop weight `k >= 0`.
    pub fn is_empty_pair(&self) -> bool {
        self.order == 2 && self.edges.is_empty() && self.weight(0, 0) == self.weight(1, 1)
    }

    /// True when every edge and loop weight is an integer.
    pub fn has_integer_weights(&self) -> bool {
        self.edges.values().chain(self.loops.values()).all(|w| w.fract() == 0.0)
    }
}

/// `X v Y`: the vertices of `X` keep their indices, those of `Y` shift by `|X|`,
/// and every cross pair is joined by an edge of weight one.
pub fn join(x: &WeightedGraph, y: &WeightedGraph) -> WeightedGraph {
    let mut g = disjoint_union(x, y);
    let m = x.order;
    for u in 0..m {
        for w in 0..y.order {
            g.edges.insert((u, m + w), 1.0);
        }
    }
    g
}

/// `X u Y` with the same index convention as [`join`].
pub fn disjoint_union(x: &WeightedGraph, y: &WeightedGraph) -> WeightedGraph {
    let m = x.order;
    let mut edges = x.edges.clone();
    edges.extend(y.edges.iter().map(|(&(u, v), &w)| ((u + m, v + m), w)));
    let mut loops = x.loops.clone();
    loops.extend(y.loops.iter().map(|(&u, &w)| (u + m, w)));
    WeightedGraph { order: m + y.order, edges, loops }
}

/// `X^r = X v X^(r-1)`, with `X^1 = X`.
pub fn self_join(x: &WeightedGraph, r: usize) -> Result<WeightedGraph> {
    if r < 1 {
        return Err(Error::Domain("self-join exponent must be at least 1".into()));
    }
    let mut g = x.clone();
    for _ in 1..r {
        g = join(x, &g);
    }
    Ok(g)
}

pub fn empty_graph(n: usize) -> Result<WeightedGraph> {
    WeightedGraph::empty(n)
}

/// `O_n(k)`: the empty graph with a loop of weight `k` at every vertex.
pub fn empty_with_loops(n: usize, k: f64) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::empty(n)?;
    for u in 0..n {
        g.set_loop(u, k)?;
    }
    Ok(g)
}

pub fn complete(n: usize) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::empty(n)?;
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v, 1.0)?;
        }
    }
    Ok(g)
}

pub fn path(n: usize) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::empty(n)?;
    for u in 1..n {
        g.add_edge(u - 1, u, 1.0)?;
    }
    Ok(g)
}

pub fn cycle(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::Graph(format!("cycles need at least 3 vertices, got {n}")));
    }
    let mut g = path(n)?;
    g.add_edge(0, n - 1, 1.0)?;
    Ok(g)
}

/// `CP(m)`: `K_m` minus the perfect matching `{2i, 2i+1}`.
///
/// With this labelling `self_join(O_2, r)` equals `CP(2r)` vertex for vertex.
pub fn cocktail_party(m: usize) -> Result<WeightedGraph> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::Graph(format!("cocktail party graphs need a positive even order, got {m}")));
    }
    let mut g = WeightedGraph::empty(m)?;
    for u in 0..m {
        for v in u + 1..m {
            if u / 2 != v / 2 {
                g.add_edge(u, v, 1.0)?;
            }
        }
    }
    Ok(g)
}

/// The hypercube `Q_p` on `2^p` vertices; vertices are adjacent when their labels differ in one bit.
pub fn hypercube(p: usize) -> Result<WeightedGraph> {
    if p > 16 {
        return Err(Error::Graph(format!("hypercube exponent {p} too large")));
    }
    let n = 1usize << p;
    let mut g = WeightedGraph::empty(n)?;
    for u in 0..n {
        for b in 0..p {
            let v = u ^ (1 << b);
            if u < v {
                g.add_edge(u, v, 1.0)?;
            }
        }
    }
    Ok(g)
}

/// `K_d \ e = O_2 v K_{d-2}`; the missing edge is `{0, 1}`.
pub fn complete_minus_edge(d: usize) -> Result<WeightedGraph> {
    if d < 3 {
        return Err(Error::Graph(format!("K_d minus an edge needs d >= 3, got {d}")));
    }
    Ok(join(&empty_graph(2)?, &complete(d - 2)?))
}

pub fn complete_bipartite(a: usize, b: usize) -> Result<WeightedGraph> {
    Ok(join(&empty_graph(a)?, &empty_graph(b)?))
}

/// Named graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Empty,
    EmptyLoops,
    Complete,
    Path,
    Cycle,
    CocktailParty,
    Hypercube,
    CompleteMinusEdge,
    CompleteBipartite,
}

impl Family {
    /// Accepts `O`, `Ok`/`O_loops`, `K`, `P`, `C`, `CP`, `Q`, `Kme`/`K_minus_e`, `Kb`/`K_bipartite`.
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "O" => Family::Empty,
            "Ok" | "O_loops" => Family::EmptyLoops,
            "K" => Family::Complete,
            "P" => Family::Path,
            "C" => Family::Cycle,
            "CP" => Family::CocktailParty,
            "Q" => Family::Hypercube,
            "Kme" | "K_minus_e" => Family::CompleteMinusEdge,
            "Kb" | "K_bipartite" => Family::CompleteBipartite,
            _ => return Err(Error::Parse(format!("unknown graph family '{name}'"))),
        })
    }

    pub fn arity(&self) -> usize {
        match self {
            Family::EmptyLoops | Family::CompleteBipartite => 2,
            _ => 1,
        }
    }

    pub fn build(&self, params: &[u64]) -> Result<WeightedGraph> {
        if params.len() != self.arity() {
            return Err(Error::Parse(format!("{self:?} takes {} size parameter(s)", self.arity())));
        }
        let p = |i: usize| params[i] as usize;
        match self {
            Family::Empty => empty_graph(p(0)),
            Family::EmptyLoops => empty_with_loops(p(0), params[1] as f64),
            Family::Complete => complete(p(0)),
            Family::Path => path(p(0)),
            Family::Cycle => cycle(p(0)),
            Family::CocktailParty => cocktail_party(p(0)),
            Family::Hypercube => hypercube(p(0)),
            Family::CompleteMinusEdge => complete_minus_edge(p(0)),
            Family::CompleteBipartite => complete_bipartite(p(0), p(1)),
        }
    }
}

/// Builds a named family member.
pub fn family(name: &str, params: &[u64]) -> Result<WeightedGraph> {
    Family::parse(name)?.build(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connective {
    Join,
    Union,
}

/// An alternating join/union fold `Γ(X_1, ..., X_p)`.
///
/// With an even number of parts the connective before part `h` (1-based) is
/// a join for even `h` and a union for odd `h`; with an odd number of parts
/// the roles swap. The last connective is always a join.
#[derive(Debug, Clone)]
pub struct IteratedJoinSpec {
    parts: Vec<WeightedGraph>,
}

impl IteratedJoinSpec {
    pub fn new(parts: Vec<WeightedGraph>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(Error::Domain("an iterated join needs at least two parts".into()));
        }
        Ok(IteratedJoinSpec { parts })
    }

    /// Validates explicit connectives (`connectives[i]` precedes part `i+1`).
    pub fn with_connectives(parts: Vec<WeightedGraph>, connectives: &[Connective]) -> Result<Self> {
        let spec = Self::new(parts)?;
        if connectives.len() != spec.parts.len() - 1 {
            return Err(Error::Domain("need exactly one connective between consecutive parts".into()));
        }
        for (i, c) in connectives.iter().enumerate() {
            if *c != spec.connective(i + 2) {
                return Err(Error::Domain(format!(
                    "connective before part {} must be {:?} to match an alternating shape ending in a join",
                    i + 2,
                    spec.connective(i + 2)
                )));
            }
        }
        Ok(spec)
    }

    /// Connected threshold graph: empty parts alternate with complete parts
    /// so that every join adds a complete graph.
    pub fn threshold(sizes: &[usize]) -> Result<Self> {
        let even = sizes.len() % 2 == 0;
        let parts = sizes
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let h = i + 1;
                if (h % 2 == 1) == even {
                    empty_graph(s)
                } else {
                    complete(s)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    pub fn parts(&self) -> &[WeightedGraph] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// True for the shape with an even number of parts (starting with a join).
    pub fn starts_with_join(&self) -> bool {
        self.parts.len() % 2 == 0
    }

    /// The connective placed before part `h` (1-based, `h >= 2`).
    pub fn connective(&self, h: usize) -> Connective {
        let even_h = h % 2 == 0;
        if even_h == self.starts_with_join() {
            Connective::Join
        } else {
            Connective::Union
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.order()).collect()
    }

    /// Index of the first vertex of part `j` (1-based).
    pub fn offset(&self, j: usize) -> usize {
        self.parts[..j - 1].iter().map(|p| p.order()).sum()
    }

    /// The part (1-based) containing global vertex `u`.
    pub fn part_of(&self, u: usize) -> Option<usize> {
        let mut acc = 0;
        for (i, p) in self.parts.iter().enumerate() {
            if u < acc + p.order() {
                return Some(i + 1);
            }
            acc += p.order();
        }
        None
    }

    pub fn build(&self) -> WeightedGraph {
        let mut g = self.parts[0].clone();
        for (i, p) in self.parts.iter().enumerate().skip(1) {
            g = match self.connective(i + 1) {
                Connective::Join => join(&g, p),
                Connective::Union => disjoint_union(&g, p),
            };
        }
        g
    }
}

pub fn iterated_join(spec: &IteratedJoinSpec) -> WeightedGraph {
    spec.build()
}

/// Parses graph expressions such as `"O2 v K2 u O1 v K3"`, `"CP 6"` or `"C4 ∪ O2"`.
///
/// Terms are a family name followed by its size parameters (either fused,
/// `K3`, or separated, `K 3`). Connectives are `∨`/`v`/`join` and
/// `∪`/`u`/`union`. Expressions fold left.
pub fn parse_expression(text: &str) -> Result<(Vec<WeightedGraph>, Vec<Connective>)> {
    let mut tokens: Vec<String> = Vec::new();
    for raw in text.split_whitespace() {
        let split = raw.find(|c: char| c.is_ascii_digit()).filter(|&i| i > 0);
        match split {
            Some(i) if raw[..i].chars().all(|c| c.is_ascii_alphabetic() || c == '_') => {
                tokens.push(raw[..i].to_string());
                tokens.push(raw[i..].to_string());
            }
            _ => tokens.push(raw.to_string()),
        }
    }
    let mut parts = Vec::new();
    let mut connectives = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !parts.is_empty() {
            let c = match tokens[i].as_str() {
                "∨" | "v" | "join" => Connective::Join,
                "∪" | "u" | "union" => Connective::Union,
                other => return Err(Error::Parse(format!("expected a connective, found '{other}'"))),
            };
            connectives.push(c);
            i += 1;
        }
        let name = tokens
            .get(i)
            .ok_or_else(|| Error::Parse("expression ends with a connective".into()))?;
        let fam = Family::parse(name)?;
        i += 1;
        let mut params = Vec::new();
        for _ in 0..fam.arity() {
            let tok = tokens
                .get(i)
                .ok_or_else(|| Error::Parse(format!("{name} needs {} size parameter(s)", fam.arity())))?;
            params.push(tok.parse::<u64>().map_err(|_| Error::Parse(format!("bad size '{tok}'")))?);
            i += 1;
        }
        parts.push(fam.build(&params)?);
    }
    if parts.is_empty() {
        return Err(Error::Parse("empty graph expression".into()));
    }
    Ok((parts, connectives))
}

/// Folds a parsed expression left to right.
pub fn build_expression(text: &str) -> Result<WeightedGraph> {
    let (parts, connectives) = parse_expression(text)?;
    let mut g = parts[0].clone();
    for (p, c) in parts.iter().skip(1).zip(&connectives) {
        g = match c {
            Connective::Join => join(&g, p),
            Connective::Union => disjoint_union(&g, p),
        };
    }
    Ok(g)
}
