//! Combinatorial data model: vertices, edges, cycles, factors, solutions,
//! the edge sets of the graphs being factorized, and the JSON interchange
//! format.
//!
//! Vertices are flat integer ids. When a graph is built from parts of size
//! four (a blow-up `G[4]`), vertex `(layer, part)` has flat id
//! `4 * part + layer`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("cycle has {0} vertices, at least 3 are required")]
    CycleTooShort(usize),
    #[error("vertex {0} occurs more than once in a cycle")]
    DuplicateVertex(VertexId),
    #[error("edge ({0}, {0}) is a loop")]
    Loop(VertexId),
}

/// A vertex of a graph whose vertex set is split into parts of four.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub layer: u8,
    pub part: usize,
}

impl Vertex {
    pub fn new(layer: u8, part: usize) -> Vertex {
        debug_assert!(layer < 4);
        Vertex { layer, part }
    }

    pub fn flat(self) -> VertexId {
        4 * self.part + self.layer as usize
    }

    pub fn from_flat(id: VertexId) -> Vertex {
        Vertex {
            layer: (id % 4) as u8,
            part: id / 4,
        }
    }
}

/// An undirected edge, stored with the smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge(VertexId, VertexId);

impl Edge {
    /// Panics on a loop; use [`Edge::try_new`] for untrusted input.
    pub fn new(a: VertexId, b: VertexId) -> Edge {
        Edge::try_new(a, b).expect("edge endpoints must differ")
    }

    pub fn try_new(a: VertexId, b: VertexId) -> Result<Edge, ModelError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge(a, b)),
            std::cmp::Ordering::Greater => Ok(Edge(b, a)),
            std::cmp::Ordering::Equal => Err(ModelError::Loop(a)),
        }
    }

    pub fn lo(self) -> VertexId {
        self.0
    }

    pub fn hi(self) -> VertexId {
        self.1
    }

    pub fn endpoints(self) -> [VertexId; 2] {
        [self.0, self.1]
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }
}

/// A cycle in canonical form: the minimum vertex first, and the second entry
/// smaller than the last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    vertices: Vec<VertexId>,
}

impl Cycle {
    pub fn new(raw: impl Into<Vec<VertexId>>) -> Result<Cycle, ModelError> {
        let raw: Vec<VertexId> = raw.into();
        if raw.len() < 3 {
            return Err(ModelError::CycleTooShort(raw.len()));
        }
        let mut sorted = raw.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(ModelError::DuplicateVertex(w[0]));
        }
        let n = raw.len();
        let start = (0..n).min_by_key(|&i| raw[i]).unwrap();
        let mut vertices: Vec<VertexId> = (0..n).map(|k| raw[(start + k) % n]).collect();
        if vertices[1] > vertices[n - 1] {
            vertices[1..].reverse();
        }
        Ok(Cycle { vertices })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Edge::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Applies a vertex relabeling and re-canonicalizes.
    pub fn map(&self, f: impl Fn(VertexId) -> VertexId) -> Result<Cycle, ModelError> {
        Cycle::new(self.vertices.iter().map(|&v| f(v)).collect::<Vec<_>>())
    }
}

/// A set of cycles intended to span `order` vertices with every vertex of
/// degree two. Construction only sorts the cycles; the verifier checks the
/// spanning and disjointness conditions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwoFactor {
    pub cycles: Vec<Cycle>,
    pub order: usize,
}

impl TwoFactor {
    pub fn new(mut cycles: Vec<Cycle>, order: usize) -> TwoFactor {
        cycles.sort();
        TwoFactor { cycles, order }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.cycles.iter().flat_map(Cycle::edges)
    }

    pub fn edge_count(&self) -> usize {
        self.cycles.iter().map(Cycle::len).sum()
    }

    /// The common cycle length, if all cycles have the same length.
    pub fn uniform_cycle_length(&self) -> Option<usize> {
        let first = self.cycles.first()?.len();
        self.cycles.iter().all(|c| c.len() == first).then_some(first)
    }
}

/// A set of edges intended to be a perfect matching.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct OneFactor {
    pub edges: Vec<Edge>,
}

impl OneFactor {
    pub fn new(mut edges: Vec<Edge>) -> OneFactor {
        edges.sort();
        OneFactor { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// A candidate (4, m)-HWP(v; r, s) solution: a 2-factorization of
/// `K_v - I` with `r` C4-factors and `s` Cm-factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub v: usize,
    pub m: usize,
    pub r: usize,
    pub s: usize,
    pub factors: Vec<TwoFactor>,
    pub one_factor: OneFactor,
}

impl Solution {
    pub fn edge_count(&self) -> usize {
        self.factors.iter().map(TwoFactor::edge_count).sum::<usize>() + self.one_factor.len()
    }
}

/// The graphs that appear as factorization targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeSetDescriptor {
    /// `K_v` on vertices `0..v`.
    CompleteGraph(usize),
    /// `C_m[4]`: vertex `(layer, i)` is `4i + layer`, adjacent to every
    /// vertex at positions `i +- 1`.
    CycleBlowup4(usize),
    /// `C_m[2]`: vertex `(layer, i)` is `2i + layer`.
    CycleBlowup2(usize),
    /// `(C_m[4] - I) + mK_4`, where `I` is the matching
    /// `{(0,i)(2,i+1)} u {(3,i)(1,i+1)}` removed by the switch block.
    SwitchGraph(usize),
    /// `K_{a:b}`: `b` parts of `a` consecutive ids each.
    EquipartiteGraph { a: usize, b: usize },
    /// `K_{4,4}` with sides `0..4` and `4..8`.
    CompleteBipartite44,
}

impl EdgeSetDescriptor {
    pub fn vertex_count(self) -> usize {
        match self {
            EdgeSetDescriptor::CompleteGraph(v) => v,
            EdgeSetDescriptor::CycleBlowup4(m) | EdgeSetDescriptor::SwitchGraph(m) => 4 * m,
            EdgeSetDescriptor::CycleBlowup2(m) => 2 * m,
            EdgeSetDescriptor::EquipartiteGraph { a, b } => a * b,
            EdgeSetDescriptor::CompleteBipartite44 => 8,
        }
    }

    /// Closed-form edge count.
    pub fn edge_count(self) -> usize {
        match self {
            EdgeSetDescriptor::CompleteGraph(v) => v * v.saturating_sub(1) / 2,
            EdgeSetDescriptor::CycleBlowup4(m) => 16 * m,
            EdgeSetDescriptor::CycleBlowup2(m) => 4 * m,
            EdgeSetDescriptor::SwitchGraph(m) => 20 * m,
            EdgeSetDescriptor::EquipartiteGraph { a, b } => a * a * b * b.saturating_sub(1) / 2,
            EdgeSetDescriptor::CompleteBipartite44 => 16,
        }
    }

    pub fn contains(self, e: Edge) -> bool {
        let (u, w) = (e.lo(), e.hi());
        if w >= self.vertex_count() {
            return false;
        }
        match self {
            EdgeSetDescriptor::CompleteGraph(_) => true,
            EdgeSetDescriptor::CycleBlowup4(m) => cyclically_adjacent(u / 4, w / 4, m),
            EdgeSetDescriptor::CycleBlowup2(m) => cyclically_adjacent(u / 2, w / 2, m),
            EdgeSetDescriptor::SwitchGraph(m) => {
                let (pu, pw) = (u / 4, w / 4);
                if pu == pw {
                    return true;
                }
                cyclically_adjacent(pu, pw, m) && !switch_matching_contains(m, e)
            }
            EdgeSetDescriptor::EquipartiteGraph { a, .. } => u / a != w / a,
            EdgeSetDescriptor::CompleteBipartite44 => (u < 4) != (w < 4),
        }
    }

    /// Materializes the edge set in sorted order.
    pub fn edges(self) -> Vec<Edge> {
        let n = self.vertex_count();
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..n {
            for w in u + 1..n {
                let e = Edge::new(u, w);
                if self.contains(e) {
                    out.push(e);
                }
            }
        }
        out
    }
}

fn cyclically_adjacent(i: usize, j: usize, m: usize) -> bool {
    i != j && ((i + 1) % m == j || (j + 1) % m == i)
}

/// Whether `e` is one of the `2m` edges `(0,i)(2,i+1)`, `(3,i)(1,i+1)`.
pub fn switch_matching_contains(m: usize, e: Edge) -> bool {
    let [a, b] = e.endpoints();
    let forward = |x: VertexId, y: VertexId| {
        let (vx, vy) = (Vertex::from_flat(x), Vertex::from_flat(y));
        (vx.part + 1) % m == vy.part
            && matches!((vx.layer, vy.layer), (0, 2) | (3, 1))
    };
    forward(a, b) || forward(b, a)
}

// ---------------------------------------------------------------------------
// Interchange format

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("FactorCountMismatch: document has {factors} factors but r + s = {declared}")]
    FactorCountMismatch { factors: usize, declared: usize },
    #[error("FactorCountMismatch: r + s = {declared} but (v - 2) / 2 = {expected}")]
    WrongFactorTotal { declared: usize, expected: usize },
    #[error("CycleLengthMismatch: factor {factor} declares length {declared} but has a cycle of length {found}")]
    CycleLengthMismatch { factor: usize, declared: usize, found: usize },
    #[error("CountMismatch: declared r = {r}, s = {s} but found {r_found} C4-factors and {s_found} Cm-factors")]
    CountMismatch { r: usize, s: usize, r_found: usize, s_found: usize },
    #[error("MissingField: {0}")]
    MissingField(&'static str),
    #[error("VertexOutOfRange: vertex {vertex} with v = {v}")]
    VertexOutOfRange { vertex: VertexId, v: usize },
    #[error("InvalidCycle: {0}")]
    InvalidCycle(ModelError),
}

/// One factor as it appears on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorDoc {
    pub cycle_length: usize,
    pub cycles: Vec<Vec<VertexId>>,
}

/// The on-disk document. Solutions carry every field; block outputs omit the
/// matching unless one was removed; outer ingredients may omit `r` and `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub v: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one_factor: Option<Vec<[VertexId; 2]>>,
    pub factors: Vec<FactorDoc>,
}

impl Document {
    pub fn from_factors(
        v: usize,
        m: usize,
        r: Option<usize>,
        s: Option<usize>,
        factors: &[TwoFactor],
        one_factor: Option<&OneFactor>,
    ) -> Document {
        let factors = factors
            .iter()
            .map(|f| {
                let mut cycles: Vec<Vec<VertexId>> =
                    f.cycles.iter().map(|c| c.vertices().to_vec()).collect();
                cycles.sort();
                FactorDoc {
                    cycle_length: f.uniform_cycle_length().unwrap_or(0),
                    cycles,
                }
            })
            .collect();
        let one_factor = one_factor.map(|of| {
            let mut edges: Vec<[VertexId; 2]> = of.edges.iter().map(|e| e.endpoints()).collect();
            edges.sort();
            edges
        });
        Document {
            v,
            m,
            r,
            s,
            one_factor,
            factors,
        }
    }

    /// Deterministic compact JSON followed by a newline.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(self).expect("document serialization cannot fail");
        out.push(b'\n');
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Document, CodecError> {
        serde_json::from_slice(bytes).map_err(|e| CodecError::Malformed(e.to_string()))
    }

    /// Parses the factor list, checking cycle shape, vertex range and the
    /// declared per-factor cycle length. No global edge accounting.
    pub fn two_factors(&self) -> Result<Vec<TwoFactor>, CodecError> {
        self.factors
            .iter()
            .enumerate()
            .map(|(i, fd)| {
                let cycles = fd
                    .cycles
                    .iter()
                    .map(|raw| {
                        if let Some(&bad) = raw.iter().find(|&&x| x >= self.v) {
                            return Err(CodecError::VertexOutOfRange { vertex: bad, v: self.v });
                        }
                        if raw.len() != fd.cycle_length {
                            return Err(CodecError::CycleLengthMismatch {
                                factor: i,
                                declared: fd.cycle_length,
                                found: raw.len(),
                            });
                        }
                        Cycle::new(raw.clone()).map_err(CodecError::InvalidCycle)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(TwoFactor::new(cycles, self.v))
            })
            .collect()
    }

    pub fn matching(&self) -> Result<Option<OneFactor>, CodecError> {
        let Some(raw) = &self.one_factor else {
            return Ok(None);
        };
        let edges = raw
            .iter()
            .map(|&[a, b]| {
                if let Some(bad) = [a, b].into_iter().find(|&x| x >= self.v) {
                    return Err(CodecError::VertexOutOfRange { vertex: bad, v: self.v });
                }
                Edge::try_new(a, b).map_err(CodecError::InvalidCycle)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(OneFactor::new(edges)))
    }

    /// Builds a [`Solution`] without checking its counting invariants. Used
    /// by the verifier front end, which reports violations itself.
    pub fn to_solution_unchecked(&self) -> Result<Solution, CodecError> {
        Ok(Solution {
            v: self.v,
            m: self.m,
            r: self.r.ok_or(CodecError::MissingField("r"))?,
            s: self.s.ok_or(CodecError::MissingField("s"))?,
            factors: self.two_factors()?,
            one_factor: self.matching()?.ok_or(CodecError::MissingField("one_factor"))?,
        })
    }
}

pub fn encode_solution(sol: &Solution) -> Vec<u8> {
    Document::from_factors(
        sol.v,
        sol.m,
        Some(sol.r),
        Some(sol.s),
        &sol.factors,
        Some(&sol.one_factor),
    )
    .to_bytes()
}

/// Strict decoding: counting invariants of a solution are enforced, edge
/// partition is left to the verifier.
pub fn decode_solution(bytes: &[u8]) -> Result<Solution, CodecError> {
    let doc = Document::from_bytes(bytes)?;
    let sol = doc.to_solution_unchecked()?;
    let declared = sol.r + sol.s;
    if sol.factors.len() != declared {
        return Err(CodecError::FactorCountMismatch {
            factors: sol.factors.len(),
            declared,
        });
    }
    let expected = sol.v.saturating_sub(1) / 2;
    if declared != expected {
        return Err(CodecError::WrongFactorTotal { declared, expected });
    }
    let r_found = sol
        .factors
        .iter()
        .filter(|f| f.uniform_cycle_length() == Some(4))
        .count();
    let s_found = sol
        .factors
        .iter()
        .filter(|f| f.uniform_cycle_length() == Some(sol.m))
        .count();
    if r_found != sol.r || s_found != sol.s {
        return Err(CodecError::CountMismatch {
            r: sol.r,
            s: sol.s,
            r_found,
            s_found,
        });
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_examples() {
        assert_eq!(Cycle::new(vec![2, 0, 1]).unwrap().vertices(), &[0, 1, 2]);
        assert_eq!(Cycle::new(vec![0, 3, 1, 2]).unwrap().vertices(), &[0, 2, 1, 3]);
        assert_eq!(Cycle::new(vec![5, 5, 1]), Err(ModelError::DuplicateVertex(5)));
        assert_eq!(Cycle::new(vec![1, 2]), Err(ModelError::CycleTooShort(2)));
    }

    #[test]
    fn cycle_edges() {
        let c = Cycle::new(vec![0, 1, 2]).unwrap();
        let mut e: Vec<Edge> = c.edges().collect();
        e.sort();
        assert_eq!(e, vec![Edge::new(0, 1), Edge::new(0, 2), Edge::new(1, 2)]);
    }

    #[test]
    fn edge_normalization() {
        assert_eq!(Edge::new(5, 2), Edge::new(2, 5));
        assert_eq!(Edge::new(5, 2).lo(), 2);
        assert_eq!(Edge::try_new(3, 3), Err(ModelError::Loop(3)));
    }

    #[test]
    fn vertex_round_trip() {
        for id in 0..1000 {
            assert_eq!(Vertex::from_flat(id).flat(), id);
        }
        assert_eq!(Vertex::new(2, 3).flat(), 14);
    }

    #[test]
    fn descriptor_counts_match_closed_forms() {
        for m in 3..=50 {
            for d in [
                EdgeSetDescriptor::CycleBlowup4(m),
                EdgeSetDescriptor::CycleBlowup2(m),
                EdgeSetDescriptor::SwitchGraph(m),
            ] {
                assert_eq!(d.edges().len(), d.edge_count(), "{d:?}");
            }
        }
        for a in 1..6 {
            for b in 1..6 {
                let d = EdgeSetDescriptor::EquipartiteGraph { a, b };
                assert_eq!(d.edges().len(), d.edge_count());
            }
        }
        assert_eq!(EdgeSetDescriptor::CompleteBipartite44.edges().len(), 16);
        assert_eq!(EdgeSetDescriptor::CompleteGraph(24).edges().len(), 276);
    }

    #[test]
    fn switch_graph_m5_by_enumeration() {
        // 14m block edges plus 6m clique edges.
        let d = EdgeSetDescriptor::SwitchGraph(5);
        let edges = d.edges();
        let inside = edges.iter().filter(|e| e.lo() / 4 == e.hi() / 4).count();
        assert_eq!(inside, 30);
        assert_eq!(edges.len() - inside, 70);
        assert_eq!(edges.len(), 100);
        assert_eq!(EdgeSetDescriptor::CycleBlowup4(3).edges().len(), 48);
    }

    #[test]
    fn decode_rejects_factor_count_mismatch() {
        let doc = Document {
            v: 12,
            m: 3,
            r: Some(1),
            s: Some(4),
            one_factor: Some(vec![]),
            factors: (0..4)
                .map(|_| FactorDoc {
                    cycle_length: 4,
                    cycles: vec![vec![0, 1, 2, 3]],
                })
                .collect(),
        };
        let err = decode_solution(&doc.to_bytes()).unwrap_err();
        assert!(matches!(err, CodecError::FactorCountMismatch { factors: 4, declared: 5 }));
        assert!(err.to_string().contains("FactorCountMismatch"));
    }

    #[test]
    fn decode_rejects_garbage() {
        assert!(matches!(decode_solution(b"{not json"), Err(CodecError::Malformed(_))));
    }
}
