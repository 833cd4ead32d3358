//! Exact backtracking for 2-factorization instances.
//!
//! Two engines share the same conventions: vertices are at most 128 and
//! adjacency is kept in `u128` masks, cycles are grown from the smallest
//! uncovered vertex, neighbours are tried in increasing order, and the first
//! solution found is returned. Both are deterministic.
//!
//! * [`solve`] builds the factors one after another, then checks that the
//!   residue is the requested leftover matching.
//! * [`solve_orbit`] looks for one or more base factors whose images under a
//!   group of vertex permutations partition the edges (a rotational search).
//!
//! Every `Found` result is checked with the verifier before it is returned.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{
    Cycle, Document, Edge, EdgeSetDescriptor, OneFactor, Solution, TwoFactor, VertexId,
};
use crate::verifier::{verify_decomposition, verify_solution};

pub const MAX_ORDER: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FactorSpec {
    pub cycle_length: usize,
    pub count: usize,
}

impl FactorSpec {
    pub fn new(cycle_length: usize, count: usize) -> FactorSpec {
        FactorSpec { cycle_length, count }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchInstance {
    pub ambient: EdgeSetDescriptor,
    pub factor_specs: Vec<FactorSpec>,
    pub leftover_matching: bool,
    /// Only try the first cycle the search finds for factor 0. Sound only
    /// when the caller knows every candidate first cycle is equivalent to it
    /// under an automorphism of the ambient graph.
    pub symmetry_breaking: bool,
    pub time_limit: Option<Duration>,
}

impl SearchInstance {
    pub fn new(
        ambient: EdgeSetDescriptor,
        factor_specs: Vec<FactorSpec>,
        leftover_matching: bool,
    ) -> SearchInstance {
        SearchInstance {
            ambient,
            factor_specs,
            leftover_matching,
            symmetry_breaking: false,
            time_limit: None,
        }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> SearchInstance {
        self.time_limit = Some(limit);
        self
    }

    fn lengths(&self) -> Vec<usize> {
        self.factor_specs
            .iter()
            .flat_map(|s| std::iter::repeat(s.cycle_length).take(s.count))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("edge budget mismatch: factors and matching need {needed} edges, ambient has {available}")]
    BudgetMismatch { needed: usize, available: usize },
    #[error("{0} vertices exceed the search limit of {MAX_ORDER}")]
    TooLarge(usize),
    #[error("cycle length {length} cannot tile {order} vertices")]
    BadCycleLength { length: usize, order: usize },
    #[error("a leftover matching needs an even number of vertices, got {0}")]
    OddMatching(usize),
    #[error("relabeling is not a permutation of the vertices")]
    NotAPermutation,
    #[error("invalid orbit plan: {0}")]
    BadOrbitPlan(String),
    #[error("internal error, search result failed verification: {0}")]
    Unverified(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchFound {
    pub factors: Vec<TwoFactor>,
    pub matching: Option<OneFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(SearchFound),
    Unsat,
    Timeout,
}

fn bit(v: usize) -> u128 {
    1u128 << v
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        bit(n) - 1
    }
}

fn above(x: usize) -> u128 {
    if x + 1 >= 128 {
        0
    } else {
        !(bit(x + 1) - 1)
    }
}

fn adjacency(n: usize, edges: &[Edge]) -> Vec<u128> {
    let mut adj = vec![0u128; n];
    for e in edges {
        adj[e.lo()] |= bit(e.hi());
        adj[e.hi()] |= bit(e.lo());
    }
    adj
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Running,
    Exhausted,
    Timeout,
}

struct Clock {
    deadline: Option<Instant>,
    ticks: u64,
    tick_limit: u64,
}

impl Clock {
    fn new(limit: Option<Duration>) -> Clock {
        Clock {
            deadline: limit.map(|d| Instant::now() + d),
            ticks: 0,
            tick_limit: u64::MAX,
        }
    }

    fn expired(&mut self) -> bool {
        self.ticks += 1;
        if self.ticks >= self.tick_limit {
            return true;
        }
        if self.ticks % 1024 != 0 {
            return false;
        }
        matches!(self.deadline, Some(d) if Instant::now() >= d)
    }
}

struct Engine {
    n: usize,
    full: u128,
    avail: Vec<u128>,
    lengths: Vec<usize>,
    // factor f must have a larger first neighbour of vertex 0 than f - 1
    ordered: Vec<bool>,
    first_neighbour: Vec<usize>,
    cycles: Vec<Vec<Vec<usize>>>,
    first_cycle_only: bool,
    leftover: bool,
    clock: Clock,
    status: Status,
}

impl Engine {
    fn remove(&mut self, a: usize, b: usize) {
        self.avail[a] &= !bit(b);
        self.avail[b] &= !bit(a);
    }

    fn restore(&mut self, a: usize, b: usize) {
        self.avail[a] |= bit(b);
        self.avail[b] |= bit(a);
    }

    fn factor(&mut self, f: usize) -> bool {
        if f == self.lengths.len() {
            let want = u32::from(self.leftover);
            return self.avail.iter().all(|m| m.count_ones() == want);
        }
        self.cycle(f, 0)
    }

    fn cycle(&mut self, f: usize, covered: u128) -> bool {
        if covered == self.full {
            return self.factor(f + 1);
        }
        let open = !covered & self.full;
        let mut rest = open;
        while rest != 0 {
            let w = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (self.avail[w] & open).count_ones() < 2 {
                return false;
            }
        }
        let u = open.trailing_zeros() as usize;
        let mut path = Vec::with_capacity(self.lengths[f]);
        path.push(u);
        self.extend(f, covered | bit(u), &mut path)
    }

    fn extend(&mut self, f: usize, covered: u128, path: &mut Vec<usize>) -> bool {
        if self.clock.expired() {
            self.status = Status::Timeout;
        }
        if self.status != Status::Running {
            return false;
        }
        let len = self.lengths[f];
        let u = path[0];
        let last = *path.last().unwrap();
        if path.len() == len {
            if self.avail[last] & bit(u) == 0 || path[1] > last {
                return false;
            }
            self.remove(last, u);
            let first = f == 0 && self.cycles[0].is_empty();
            self.cycles[f].push(path.clone());
            if self.cycle(f, covered) {
                return true;
            }
            self.cycles[f].pop();
            self.restore(last, u);
            if first && self.first_cycle_only && self.status == Status::Running {
                self.status = Status::Exhausted;
            }
            return false;
        }
        let mut cand = self.avail[last] & !covered & self.full;
        let opening = path.len() == 1 && self.cycles[f].is_empty();
        if opening && self.ordered[f] {
            cand &= above(self.first_neighbour[f - 1]);
        }
        if path.len() == len - 1 {
            cand &= self.avail[u] & above(path[1]);
        }
        while cand != 0 {
            if self.status != Status::Running {
                return false;
            }
            let w = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if opening {
                self.first_neighbour[f] = w;
            }
            self.remove(last, w);
            path.push(w);
            if self.extend(f, covered | bit(w), path) {
                return true;
            }
            path.pop();
            self.restore(last, w);
        }
        false
    }
}

fn check_instance(inst: &SearchInstance) -> Result<(), SearchError> {
    let n = inst.ambient.vertex_count();
    if n > MAX_ORDER {
        return Err(SearchError::TooLarge(n));
    }
    for s in &inst.factor_specs {
        if s.count > 0 && (s.cycle_length < 3 || n % s.cycle_length != 0) {
            return Err(SearchError::BadCycleLength {
                length: s.cycle_length,
                order: n,
            });
        }
    }
    if inst.leftover_matching && n % 2 == 1 {
        return Err(SearchError::OddMatching(n));
    }
    let needed: usize = inst.factor_specs.iter().map(|s| s.count * n).sum::<usize>()
        + if inst.leftover_matching { n / 2 } else { 0 };
    let available = inst.ambient.edge_count();
    if needed != available {
        return Err(SearchError::BudgetMismatch { needed, available });
    }
    Ok(())
}

fn to_factor(n: usize, cycles: &[Vec<usize>]) -> TwoFactor {
    TwoFactor::new(
        cycles
            .iter()
            .map(|c| Cycle::new(c.clone()).expect("search cycles are simple"))
            .collect(),
        n,
    )
}

/// Plain factor-by-factor search.
pub fn solve(inst: &SearchInstance) -> Result<SearchOutcome, SearchError> {
    check_instance(inst)?;
    solve_edges(inst, inst.ambient.edges())
}

/// Same as [`solve`] on the ambient graph relabeled by `perm` (vertex `x`
/// becomes `perm[x]`). Outcomes must not depend on the labeling.
pub fn solve_relabeled(inst: &SearchInstance, perm: &[VertexId]) -> Result<SearchOutcome, SearchError> {
    check_instance(inst)?;
    let n = inst.ambient.vertex_count();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
        return Err(SearchError::NotAPermutation);
    }
    let mut edges: Vec<Edge> = inst.ambient.edges().into_iter().map(|e| image(perm, e)).collect();
    edges.sort();
    solve_edges(inst, edges)
}

fn solve_edges(inst: &SearchInstance, ambient: Vec<Edge>) -> Result<SearchOutcome, SearchError> {
    if inst.time_limit == Some(Duration::ZERO) {
        return Ok(SearchOutcome::Timeout);
    }
    let n = inst.ambient.vertex_count();
    let lengths = inst.lengths();
    let ordered = (0..lengths.len())
        .map(|f| f > 0 && lengths[f] == lengths[f - 1])
        .collect();
    let mut eng = Engine {
        n,
        full: full_mask(n),
        avail: adjacency(n, &ambient),
        lengths: lengths.clone(),
        ordered,
        first_neighbour: vec![0; lengths.len()],
        cycles: vec![Vec::new(); lengths.len()],
        first_cycle_only: inst.symmetry_breaking,
        leftover: inst.leftover_matching,
        clock: Clock::new(inst.time_limit),
        status: Status::Running,
    };
    if n == 0 || !eng.factor(0) {
        return Ok(match eng.status {
            Status::Timeout => SearchOutcome::Timeout,
            _ => SearchOutcome::Unsat,
        });
    }
    let factors: Vec<TwoFactor> = eng.cycles.iter().map(|c| to_factor(eng.n, c)).collect();
    let matching = inst.leftover_matching.then(|| {
        let mut edges = Vec::new();
        for (a, &mask) in eng.avail.iter().enumerate() {
            let b = mask.trailing_zeros() as usize;
            if a < b {
                edges.push(Edge::new(a, b));
            }
        }
        OneFactor::new(edges)
    });
    let rep = verify_decomposition(&ambient, n, &factors, &lengths, matching.as_ref());
    if !rep.ok {
        return Err(SearchError::Unverified(rep.to_text()));
    }
    Ok(SearchOutcome::Found(SearchFound { factors, matching }))
}

/// A rotational search plan. For each base `j` find a 2-factor `F_j` with
/// all cycles of length `cycle_length`, fixed by the subgroup `H_j`
/// generated by `stabilizers[j]`; the `|G|/|H_j|` images of every `F_j`
/// under the group `G` generated by `group`, together with `matching`,
/// partition the ambient edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPlan {
    pub group: Vec<Vec<VertexId>>,
    pub stabilizers: Vec<Vec<Vec<VertexId>>>,
    pub cycle_length: usize,
    /// Must be a union of `G`-orbits of edges.
    pub matching: Option<OneFactor>,
}

impl OrbitPlan {
    /// `G = <sigma>` and a single base with `H = <sigma^k>`.
    pub fn cyclic(
        sigma: Vec<VertexId>,
        k: usize,
        cycle_length: usize,
        matching: Option<OneFactor>,
    ) -> OrbitPlan {
        let tau = compose_power(&sigma, k);
        OrbitPlan {
            group: vec![sigma],
            stabilizers: vec![vec![tau]],
            cycle_length,
            matching,
        }
    }
}

const MAX_GROUP: usize = 4096;

fn compose_power(perm: &[usize], p: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..perm.len()).collect();
    for _ in 0..p {
        out = out.iter().map(|&x| perm[x]).collect();
    }
    out
}

/// All elements of the group generated by `gens`, identity first, in
/// breadth-first order.
fn closure(n: usize, gens: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen = std::collections::HashSet::new();
    seen.insert(id.clone());
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let next: Vec<usize> = out[i].iter().map(|&x| g[x]).collect();
            if seen.insert(next.clone()) {
                if out.len() == MAX_GROUP {
                    return None;
                }
                out.push(next);
            }
        }
        i += 1;
    }
    Some(out)
}

fn image(perm: &[usize], e: Edge) -> Edge {
    Edge::new(perm[e.lo()], perm[e.hi()])
}

/// Per-base data: the elements of `H_j` and, for every edge, the size of
/// its `H_j`-orbit when its `G`-orbit may be used by this base (0 if not).
struct Base {
    stab: Vec<Vec<usize>>,
    stab_orbit_size: Vec<Vec<usize>>,
}

struct OrbitEngine {
    n: usize,
    len: usize,
    adj: Vec<u128>,
    orbit: Vec<Vec<i32>>,
    used: Vec<bool>,
    bases: Vec<Base>,
    current: usize,
    /// Closed cycles as (base, path).
    cycles: Vec<(usize, Vec<usize>)>,
    clock: Clock,
    status: Status,
}

impl OrbitEngine {
    fn fill(&mut self, covered: u128) -> bool {
        if covered == full_mask(self.n) {
            if self.current + 1 == self.bases.len() {
                return true;
            }
            self.current += 1;
            if self.fill(0) {
                return true;
            }
            self.current -= 1;
            return false;
        }
        let u = (!covered & full_mask(self.n)).trailing_zeros() as usize;
        let mut path = vec![u];
        self.extend(covered | bit(u), &mut path)
    }

    fn edge_ok(&self, a: usize, b: usize, path: &[usize]) -> bool {
        let o = self.orbit[a][b];
        let base = &self.bases[self.current];
        if o < 0 || self.used[o as usize] || base.stab_orbit_size[a][b] == 0 {
            return false;
        }
        // a repeated orbit along the path is only possible for H-images
        path.windows(2).all(|w| {
            self.orbit[w[0]][w[1]] != o
                || base
                    .stab
                    .iter()
                    .any(|t| Edge::new(t[w[0]], t[w[1]]) == Edge::new(a, b))
        })
    }

    fn extend(&mut self, covered: u128, path: &mut Vec<usize>) -> bool {
        if self.clock.expired() {
            self.status = Status::Timeout;
        }
        if self.status != Status::Running {
            return false;
        }
        let u = path[0];
        let last = *path.last().unwrap();
        if path.len() == self.len {
            if self.adj[last] & bit(u) == 0 || path[1] > last || !self.edge_ok(last, u, path) {
                return false;
            }
            return match self.close(covered, path) {
                Some((new_cov, marked)) => {
                    self.cycles.push((self.current, path.clone()));
                    if self.fill(new_cov) {
                        return true;
                    }
                    self.cycles.pop();
                    for o in marked {
                        self.used[o] = false;
                    }
                    false
                }
                None => false,
            };
        }
        let mut cand = self.adj[last] & !covered & full_mask(self.n);
        if path.len() == self.len - 1 {
            cand &= self.adj[u] & above(path[1]);
        }
        while cand != 0 {
            if self.status != Status::Running {
                return false;
            }
            let w = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if !self.edge_ok(last, w, path) {
                continue;
            }
            path.push(w);
            if self.extend(covered | bit(w), path) {
                return true;
            }
            path.pop();
        }
        false
    }

    // Adds the H-orbit of the closed cycle; returns new coverage and the
    // orbits it consumed, or None if the images clash.
    fn close(&mut self, covered: u128, path: &[usize]) -> Option<(u128, Vec<usize>)> {
        let base = &self.bases[self.current];
        let cycle = Cycle::new(path.to_vec()).ok()?;
        let mut images: Vec<Cycle> = Vec::new();
        for t in &base.stab {
            let c = cycle.map(|x| t[x]).ok()?;
            if !images.contains(&c) {
                images.push(c);
            }
        }
        let mut seen = 0u128;
        for c in &images {
            for &x in c.vertices() {
                if seen & bit(x) != 0 {
                    return None;
                }
                seen |= bit(x);
            }
        }
        // path vertices are already in `covered`; other images must be fresh
        let path_mask = path.iter().fold(0u128, |m, &x| m | bit(x));
        if (seen & !path_mask) & covered != 0 {
            return None;
        }
        let mut per_orbit: BTreeMap<usize, Vec<Edge>> = BTreeMap::new();
        for c in &images {
            for e in c.edges() {
                let o = self.orbit[e.lo()][e.hi()];
                if o < 0 || self.used[o as usize] {
                    return None;
                }
                per_orbit.entry(o as usize).or_default().push(e);
            }
        }
        for edges in per_orbit.values() {
            let e = edges[0];
            if edges.len() != base.stab_orbit_size[e.lo()][e.hi()] {
                return None;
            }
        }
        let marked: Vec<usize> = per_orbit.keys().copied().collect();
        for &o in &marked {
            self.used[o] = true;
        }
        Some((covered | seen, marked))
    }
}

/// Rotational search for `plan` inside `ambient`.
pub fn solve_orbit(
    ambient: EdgeSetDescriptor,
    plan: &OrbitPlan,
    time_limit: Option<Duration>,
) -> Result<SearchOutcome, SearchError> {
    solve_orbit_bounded(ambient, plan, time_limit, None)
}

/// As [`solve_orbit`], but also gives up (with `Timeout`) after `steps`
/// search nodes. A step bound makes the outcome machine-independent.
pub fn solve_orbit_bounded(
    ambient: EdgeSetDescriptor,
    plan: &OrbitPlan,
    time_limit: Option<Duration>,
    steps: Option<u64>,
) -> Result<SearchOutcome, SearchError> {
    let n = ambient.vertex_count();
    if n > MAX_ORDER {
        return Err(SearchError::TooLarge(n));
    }
    let bad = |s: &str| Err(SearchError::BadOrbitPlan(s.to_string()));
    if plan.stabilizers.is_empty() {
        return bad("no base factor");
    }
    let ident: Vec<usize> = (0..n).collect();
    for g in plan.group.iter().chain(plan.stabilizers.iter().flatten()) {
        let mut sorted = g.clone();
        sorted.sort_unstable();
        if sorted != ident {
            return bad("generator is not a permutation of the vertices");
        }
    }
    let edges = ambient.edges();
    if plan
        .group
        .iter()
        .any(|g| edges.iter().any(|&e| !ambient.contains(image(g, e))))
    {
        return bad("generator is not an automorphism of the ambient graph");
    }
    let Some(group) = closure(n, &plan.group) else {
        return bad("group too large");
    };
    let members: std::collections::HashSet<&Vec<usize>> = group.iter().collect();
    let mut stabs = Vec::with_capacity(plan.stabilizers.len());
    for gens in &plan.stabilizers {
        let Some(stab) = closure(n, gens) else {
            return bad("stabilizer too large");
        };
        if stab.iter().any(|h| !members.contains(h)) {
            return bad("stabilizer is not a subgroup of the group");
        }
        stabs.push(stab);
    }
    let ks: Vec<usize> = stabs.iter().map(|h| group.len() / h.len()).collect();
    if plan.cycle_length < 3 || n % plan.cycle_length != 0 {
        return Err(SearchError::BadCycleLength {
            length: plan.cycle_length,
            order: n,
        });
    }
    let matching_edges: Vec<Edge> = plan.matching.as_ref().map(|m| m.edges.clone()).unwrap_or_default();
    if matching_edges.iter().any(|&e| {
        !ambient.contains(e) || plan.group.iter().any(|g| !matching_edges.contains(&image(g, e)))
    }) {
        return bad("matching is not a union of group orbits inside the ambient graph");
    }
    let needed = ks.iter().sum::<usize>() * n + matching_edges.len();
    if needed != edges.len() {
        return Err(SearchError::BudgetMismatch {
            needed,
            available: edges.len(),
        });
    }
    if time_limit == Some(Duration::ZERO) {
        return Ok(SearchOutcome::Timeout);
    }

    let orbit_of = |elems: &[Vec<usize>], e: Edge| {
        let mut o: Vec<Edge> = elems.iter().map(|g| image(g, e)).collect();
        o.sort();
        o.dedup();
        o
    };
    let mut orbit = vec![vec![-1i32; n]; n];
    let mut bases: Vec<Base> = stabs
        .into_iter()
        .map(|stab| Base {
            stab,
            stab_orbit_size: vec![vec![0usize; n]; n],
        })
        .collect();
    let mut orbit_count = 0;
    let mut adj = vec![0u128; n];
    for &e in &edges {
        if orbit[e.lo()][e.hi()] != -1 || matching_edges.contains(&e) {
            continue;
        }
        let full = orbit_of(&group, e);
        // base j may use this orbit only if the stabilizer of e in G lies in H_j
        let mut usable = false;
        for (j, base) in bases.iter_mut().enumerate() {
            let h_size = orbit_of(&base.stab, e).len();
            if full.len() == ks[j] * h_size {
                usable = true;
                for &x in &full {
                    base.stab_orbit_size[x.lo()][x.hi()] = h_size;
                    base.stab_orbit_size[x.hi()][x.lo()] = h_size;
                }
            }
        }
        let id = if usable { orbit_count } else { -2 };
        for &x in &full {
            orbit[x.lo()][x.hi()] = id;
            orbit[x.hi()][x.lo()] = id;
            if usable {
                adj[x.lo()] |= bit(x.hi());
                adj[x.hi()] |= bit(x.lo());
            }
        }
        if usable {
            orbit_count += 1;
        }
    }
    let mut eng = OrbitEngine {
        n,
        len: plan.cycle_length,
        adj,
        orbit,
        used: vec![false; orbit_count as usize],
        bases,
        current: 0,
        cycles: Vec::new(),
        clock: Clock {
            tick_limit: steps.unwrap_or(u64::MAX),
            ..Clock::new(time_limit)
        },
        status: Status::Running,
    };
    if !eng.fill(0) {
        return Ok(match eng.status {
            Status::Timeout => SearchOutcome::Timeout,
            _ => SearchOutcome::Unsat,
        });
    }
    let mut factors: Vec<TwoFactor> = Vec::with_capacity(ks.iter().sum());
    for (j, base) in eng.bases.iter().enumerate() {
        let mut base_cycles: Vec<Cycle> = Vec::new();
        for (_, p) in eng.cycles.iter().filter(|(b, _)| *b == j) {
            let c = Cycle::new(p.clone()).expect("simple");
            for h in &base.stab {
                let img = c.map(|x| h[x]).expect("simple");
                if !base_cycles.contains(&img) {
                    base_cycles.push(img);
                }
            }
        }
        let mut images: Vec<TwoFactor> = Vec::with_capacity(ks[j]);
        for g in &group {
            let f = TwoFactor::new(base_cycles.iter().map(|c| c.map(|x| g[x]).expect("simple")).collect(), n);
            if !images.contains(&f) {
                images.push(f);
            }
        }
        if images.len() != ks[j] {
            return Err(SearchError::Unverified(format!("base {j} has {} images, expected {}", images.len(), ks[j])));
        }
        factors.extend(images);
    }
    let lengths = vec![plan.cycle_length; factors.len()];
    let rep = verify_decomposition(&edges, n, &factors, &lengths, plan.matching.as_ref());
    if !rep.ok {
        return Err(SearchError::Unverified(rep.to_text()));
    }
    Ok(SearchOutcome::Found(SearchFound {
        factors,
        matching: plan.matching.clone(),
    }))
}

// ---------------------------------------------------------------------------
// Derived ingredients with an in-process memo and an optional disk cache.

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngredientError {
    #[error("no such object exists: {0}")]
    Nonexistent(String),
    #[error("search timed out")]
    Timeout,
    #[error(transparent)]
    Search(#[from] SearchError),
}

fn memo() -> &'static Mutex<HashMap<String, Vec<u8>>> {
    static MEMO: OnceLock<Mutex<HashMap<String, Vec<u8>>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Hex sha256 of an instance key; names cache files.
pub fn instance_hash(key: &str) -> String {
    hex::encode(Sha256::digest(key.as_bytes()))
}

fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{}.json", instance_hash(key)))
}

/// Looks `key` up in memory, then on disk; otherwise runs `compute`, checks
/// the document with `valid`, and stores it. Cached bytes that fail `valid`
/// are ignored and recomputed.
fn cached(
    key: &str,
    cache_dir: Option<&Path>,
    valid: impl Fn(&Document) -> bool,
    compute: impl FnOnce() -> Result<Document, IngredientError>,
) -> Result<Document, IngredientError> {
    let usable = |bytes: &[u8]| Document::from_bytes(bytes).ok().filter(|d| valid(d));
    if let Some(doc) = memo().lock().unwrap().get(key).and_then(|b| usable(b)) {
        return Ok(doc);
    }
    if let Some(dir) = cache_dir {
        if let Some(doc) = fs::read(cache_path(dir, key)).ok().and_then(|b| usable(&b)) {
            memo().lock().unwrap().insert(key.to_string(), doc.to_bytes());
            return Ok(doc);
        }
    }
    let doc = compute()?;
    if !valid(&doc) {
        return Err(SearchError::Unverified(format!("ingredient {key}")).into());
    }
    let bytes = doc.to_bytes();
    if let Some(dir) = cache_dir {
        // a failed cache write only costs a recomputation later
        if fs::create_dir_all(dir).is_ok() {
            let _ = fs::write(cache_path(dir, key), &bytes);
        }
    }
    memo().lock().unwrap().insert(key.to_string(), bytes);
    Ok(doc)
}

fn outcome_to_found(outcome: SearchOutcome, what: &str) -> Result<SearchFound, IngredientError> {
    match outcome {
        SearchOutcome::Found(f) => Ok(f),
        SearchOutcome::Unsat => Err(IngredientError::Nonexistent(what.to_string())),
        SearchOutcome::Timeout => Err(IngredientError::Timeout),
    }
}

/// K_12 minus a perfect matching split into one C4-factor and four
/// C3-factors.
pub fn hwp12_ingredient(
    time_limit: Option<Duration>,
    cache_dir: Option<&Path>,
) -> Result<Solution, IngredientError> {
    let valid = |d: &Document| {
        d.to_solution_unchecked()
            .map(|s| s.v == 12 && s.m == 3 && s.r == 1 && s.s == 4 && verify_solution(&s).ok)
            .unwrap_or(false)
    };
    let doc = cached("hwp:v=12:m=3:r=1:s=4", cache_dir, valid, || {
        let inst = SearchInstance {
            ambient: EdgeSetDescriptor::CompleteGraph(12),
            factor_specs: vec![FactorSpec::new(4, 1), FactorSpec::new(3, 4)],
            leftover_matching: true,
            symmetry_breaking: false,
            time_limit,
        };
        let found = outcome_to_found(solve(&inst)?, "(4,3)-HWP(12;1,4)")?;
        Ok(Document::from_factors(
            12,
            3,
            Some(1),
            Some(4),
            &found.factors,
            found.matching.as_ref(),
        ))
    })?;
    Ok(doc
        .to_solution_unchecked()
        .expect("validated document converts"))
}

/// Whether a C_l-factorization of K_{a:b} is ruled out: degree or order
/// divisibility fails, or (a, b, l) is one of the known exceptions.
pub fn equipartite_excluded(a: usize, b: usize, l: usize) -> Option<String> {
    if b < 2 || a == 0 {
        return Some(format!("K_{{{a}:{b}}} has no edges to factor"));
    }
    if l < 3 {
        return Some(format!("cycle length {l} is below 3"));
    }
    if (a * (b - 1)) % 2 == 1 {
        return Some(format!("K_{{{a}:{b}}} has odd degree {}", a * (b - 1)));
    }
    if (a * b) % l != 0 {
        return Some(format!("{l} does not divide {}", a * b));
    }
    if l % 2 == 1 && b == 2 {
        return Some(format!("K_{{{a}:2}} is bipartite, no odd cycles"));
    }
    if [(2, 3, 3), (6, 3, 3), (2, 6, 3), (6, 2, 6)].contains(&(a, b, l)) {
        return Some(format!("(a, b, l) = ({a}, {b}, {l}) is a known exception"));
    }
    None
}

/// C_m-factorization of K_{a:b} by plain search (memoized, optionally cached
/// on disk).
pub fn equipartite_cm_search(
    a: usize,
    b: usize,
    m: usize,
    time_limit: Option<Duration>,
    cache_dir: Option<&Path>,
) -> Result<Vec<TwoFactor>, IngredientError> {
    if let Some(why) = equipartite_excluded(a, b, m) {
        return Err(IngredientError::Nonexistent(why));
    }
    let target = EdgeSetDescriptor::EquipartiteGraph { a, b };
    let count = a * (b - 1) / 2;
    let valid = |d: &Document| {
        d.v == a * b
            && d.two_factors()
                .map(|fs| {
                    let lengths = vec![m; fs.len()];
                    fs.len() == count
                        && verify_decomposition(&target.edges(), a * b, &fs, &lengths, None).ok
                })
                .unwrap_or(false)
    };
    let key = format!("equipartite:a={a}:b={b}:m={m}");
    let doc = cached(&key, cache_dir, valid, || {
        let deadline = time_limit.map(|d| Instant::now() + d);
        let remaining = || deadline.map(|d| d.saturating_duration_since(Instant::now()));
        let mut found = None;
        if b >= 3 {
            let plan = equipartite_orbit_plan(a, b, m);
            match solve_orbit(target, &plan, remaining())? {
                SearchOutcome::Found(f) => found = Some(f),
                SearchOutcome::Timeout => return Err(IngredientError::Timeout),
                SearchOutcome::Unsat => {}
            }
        }
        let found = match found {
            Some(f) => f,
            None => {
                let inst = SearchInstance {
                    ambient: target,
                    factor_specs: vec![FactorSpec::new(m, count)],
                    leftover_matching: false,
                    symmetry_breaking: false,
                    time_limit: remaining(),
                };
                outcome_to_found(solve(&inst)?, &key)?
            }
        };
        Ok(Document::from_factors(a * b, m, None, Some(count), &found.factors, None))
    })?;
    Ok(doc.two_factors().expect("validated document converts"))
}

/// Rotational plan for K_{a:b} (vertex `a*p + l` is layer l of part p):
/// parts `Z_{b-1}` plus a fixed part, the group generated by the part shift
/// and the layer shift, and the base factor fixed by the layer shift `a/2`.
pub fn equipartite_orbit_plan(a: usize, b: usize, m: usize) -> OrbitPlan {
    let q = b - 1;
    let vid = |p: usize, l: usize| a * p + l;
    let part_shift: Vec<usize> = (0..a * b)
        .map(|x| {
            let (p, l) = (x / a, x % a);
            if p == q {
                x
            } else {
                vid((p + 1) % q, l)
            }
        })
        .collect();
    let layer_shift = |step: usize| -> Vec<usize> {
        (0..a * b).map(|x| vid(x / a, (x % a + step) % a)).collect()
    };
    OrbitPlan {
        group: vec![part_shift, layer_shift(1)],
        stabilizers: vec![vec![layer_shift(a / 2)]],
        cycle_length: m,
        matching: None,
    }
}

/// C_m-factorization of K_n (with a leftover matching when n is even),
/// memoized under `key`, produced by `compute`.
pub fn memoized_outer(
    n: usize,
    m: usize,
    cache_dir: Option<&Path>,
    compute: impl FnOnce() -> Result<SearchFound, IngredientError>,
) -> Result<SearchFound, IngredientError> {
    let target = EdgeSetDescriptor::CompleteGraph(n);
    let count = (n - 1) / 2;
    let valid = |d: &Document| {
        d.v == n
            && match (d.two_factors(), d.matching()) {
                (Ok(fs), Ok(mm)) => {
                    fs.len() == count
                        && (mm.is_some() == (n % 2 == 0))
                        && verify_decomposition(&target.edges(), n, &fs, &vec![m; count], mm.as_ref()).ok
                }
                _ => false,
            }
    };
    let key = format!("outer:n={n}:m={m}");
    let doc = cached(&key, cache_dir, valid, || {
        let found = compute()?;
        Ok(Document::from_factors(n, m, None, Some(count), &found.factors, found.matching.as_ref()))
    })?;
    Ok(SearchFound {
        factors: doc.two_factors().expect("validated"),
        matching: doc.matching().expect("validated"),
    })
}
