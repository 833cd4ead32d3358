//! Independent certification of factorizations.
//!
//! Nothing here reuses construction code. Ambient edge sets are enumerated
//! locally, cycle lengths are recomputed from the edges of each factor, and
//! the edge accounting is a single merge of two sorted lists, which finds
//! missing, duplicated and foreign edges in one pass.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::blocks::{BlockFactorization, BlockKind};
use crate::model::{Edge, OneFactor, Solution, TwoFactor, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ViolationCode {
    NotSpanning,
    NotTwoRegular,
    NonUniformCycleLength,
    EdgeMissing,
    EdgeDuplicated,
    EdgeForeign,
    MatchingInvalid,
    CountMismatch,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub r_found: usize,
    pub s_found: usize,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        let mut c: Vec<_> = self.violations.iter().map(|v| v.code).collect();
        c.dedup();
        c
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "ok: {}\nr_found: {}\ns_found: {}\n",
            self.ok, self.r_found, self.s_found
        );
        for v in &self.violations {
            out.push_str(&format!("{}: {}\n", v.code, v.detail));
        }
        out
    }
}

const MAX_DETAILS_PER_CODE: usize = 16;

#[derive(Default)]
struct Collector {
    violations: Vec<Violation>,
    per_code: BTreeMap<ViolationCode, usize>,
}

impl Collector {
    fn push(&mut self, code: ViolationCode, detail: impl Into<String>) {
        let n = self.per_code.entry(code).or_insert(0);
        *n += 1;
        if *n <= MAX_DETAILS_PER_CODE {
            self.violations.push(Violation {
                code,
                detail: detail.into(),
            });
        }
    }

    fn finish(mut self, r_found: usize, s_found: usize) -> VerificationReport {
        self.violations.sort();
        VerificationReport {
            ok: self.violations.is_empty(),
            r_found,
            s_found,
            violations: self.violations,
        }
    }
}

// ---------------------------------------------------------------------------
// Ambient edge sets, enumerated independently of the model module.

fn complete_edges(n: usize) -> Vec<Edge> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for w in u + 1..n {
            out.push(Edge::new(u, w));
        }
    }
    out
}

/// `C_m[4]` with vertex `4i + layer`.
fn cycle_blowup4_edges(m: usize) -> Vec<Edge> {
    let mut out = Vec::with_capacity(16 * m);
    for i in 0..m {
        let j = (i + 1) % m;
        for a in 0..4 {
            for b in 0..4 {
                out.push(Edge::new(4 * i + a, 4 * j + b));
            }
        }
    }
    out.sort();
    out
}

fn parts_k4_edges(parts: usize) -> Vec<Edge> {
    let mut out = Vec::with_capacity(6 * parts);
    for p in 0..parts {
        for a in 0..4 {
            for b in a + 1..4 {
                out.push(Edge::new(4 * p + a, 4 * p + b));
            }
        }
    }
    out
}

fn equipartite_edges(a: usize, b: usize) -> Vec<Edge> {
    let n = a * b;
    let mut out = Vec::new();
    for u in 0..n {
        for w in u + 1..n {
            if u / a != w / a {
                out.push(Edge::new(u, w));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Factor-level checks

/// Recomputed structure of a single factor: the sorted component sizes of
/// its edge graph, when it is 2-regular and spanning.
fn check_factor(index: usize, f: &TwoFactor, order: usize, c: &mut Collector) -> Option<Vec<usize>> {
    let mut degree = vec![0usize; order];
    let mut adjacency: Vec<Vec<VertexId>> = vec![Vec::new(); order];
    let mut bad = false;
    for e in f.edges() {
        if e.hi() >= order {
            c.push(
                ViolationCode::EdgeForeign,
                format!("factor {index}: edge {:?} leaves the vertex set 0..{order}", e.endpoints()),
            );
            bad = true;
            continue;
        }
        for x in e.endpoints() {
            degree[x] += 1;
        }
        adjacency[e.lo()].push(e.hi());
        adjacency[e.hi()].push(e.lo());
    }
    for (x, &d) in degree.iter().enumerate() {
        if d == 0 {
            c.push(ViolationCode::NotSpanning, format!("factor {index}: vertex {x} is not covered"));
            bad = true;
        } else if d != 2 {
            c.push(ViolationCode::NotTwoRegular, format!("factor {index}: vertex {x} has degree {d}"));
            bad = true;
        }
    }
    if bad {
        return None;
    }
    // 2-regular and spanning: walk the components.
    let mut seen = vec![false; order];
    let mut sizes = Vec::new();
    for start in 0..order {
        if seen[start] {
            continue;
        }
        let mut size = 0;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            size += 1;
            for &y in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable();
    Some(sizes)
}

fn uniform(sizes: &[usize]) -> Option<usize> {
    let first = *sizes.first()?;
    sizes.iter().all(|&s| s == first).then_some(first)
}

/// Spanning, 2-regular, vertex-disjoint cycles.
pub fn verify_two_factor(f: &TwoFactor, order: usize) -> VerificationReport {
    let mut c = Collector::default();
    check_factor(0, f, order, &mut c);
    c.finish(0, 0)
}

fn check_matching(m: &OneFactor, order: usize, c: &mut Collector) {
    let mut hits = vec![0usize; order];
    for e in &m.edges {
        if e.hi() >= order {
            c.push(ViolationCode::MatchingInvalid, format!("edge {:?} out of range", e.endpoints()));
            continue;
        }
        hits[e.lo()] += 1;
        hits[e.hi()] += 1;
    }
    for (x, &h) in hits.iter().enumerate() {
        if h != 1 {
            c.push(ViolationCode::MatchingInvalid, format!("vertex {x} is covered {h} times"));
        }
    }
}

/// Sorted-merge comparison of the expected edge list with the multiset of
/// supplied edges.
fn account_edges(mut expected: Vec<Edge>, mut actual: Vec<Edge>, c: &mut Collector) {
    expected.sort_unstable();
    actual.sort_unstable();
    let (mut i, mut j) = (0, 0);
    while i < expected.len() || j < actual.len() {
        match (expected.get(i), actual.get(j)) {
            (Some(&e), Some(&a)) if e == a => {
                i += 1;
                j += 1;
                while actual.get(j) == Some(&a) {
                    c.push(ViolationCode::EdgeDuplicated, format!("edge {:?}", a.endpoints()));
                    j += 1;
                }
            }
            (Some(&e), Some(&a)) if e < a => {
                c.push(ViolationCode::EdgeMissing, format!("edge {:?}", e.endpoints()));
                i += 1;
            }
            (Some(_), Some(&a)) | (None, Some(&a)) => {
                c.push(ViolationCode::EdgeForeign, format!("edge {:?}", a.endpoints()));
                j += 1;
                while actual.get(j) == Some(&a) {
                    j += 1;
                }
            }
            (Some(&e), None) => {
                c.push(ViolationCode::EdgeMissing, format!("edge {:?}", e.endpoints()));
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
}

fn all_edges<'a>(factors: impl IntoIterator<Item = &'a TwoFactor>, matching: Option<&OneFactor>) -> Vec<Edge> {
    let mut out: Vec<Edge> = factors.into_iter().flat_map(|f| f.edges()).collect();
    if let Some(m) = matching {
        out.extend(m.edges.iter().copied());
    }
    out
}

/// Full certificate check of a (4, m)-HWP(v; r, s) solution.
pub fn verify_solution(sol: &Solution) -> VerificationReport {
    let mut c = Collector::default();
    let v = sol.v;
    let expected_total = v.saturating_sub(1) / 2;
    if sol.r + sol.s != expected_total {
        c.push(
            ViolationCode::CountMismatch,
            format!("r + s = {} but floor((v - 1) / 2) = {expected_total}", sol.r + sol.s),
        );
    }
    if sol.factors.len() != sol.r + sol.s {
        c.push(
            ViolationCode::CountMismatch,
            format!("{} factors but r + s = {}", sol.factors.len(), sol.r + sol.s),
        );
    }
    let (mut r_found, mut s_found) = (0, 0);
    for (i, f) in sol.factors.iter().enumerate() {
        let Some(sizes) = check_factor(i, f, v, &mut c) else {
            continue;
        };
        match uniform(&sizes) {
            Some(4) => r_found += 1,
            Some(len) if len == sol.m => s_found += 1,
            Some(len) => c.push(
                ViolationCode::NonUniformCycleLength,
                format!("factor {i}: cycle length {len} is neither 4 nor {}", sol.m),
            ),
            None => c.push(
                ViolationCode::NonUniformCycleLength,
                format!("factor {i}: cycle lengths {sizes:?}"),
            ),
        }
    }
    if r_found != sol.r || s_found != sol.s {
        c.push(
            ViolationCode::CountMismatch,
            format!("declared r = {}, s = {}; found {r_found}, {s_found}", sol.r, sol.s),
        );
    }
    if v % 2 == 0 {
        check_matching(&sol.one_factor, v, &mut c);
    } else if !sol.one_factor.is_empty() {
        c.push(ViolationCode::MatchingInvalid, "odd order admits no 1-factor".to_string());
    }
    account_edges(
        complete_edges(v),
        all_edges(&sol.factors, Some(&sol.one_factor)),
        &mut c,
    );
    c.finish(r_found, s_found)
}

fn expected_lengths(kind: BlockKind, m: usize) -> Vec<usize> {
    match kind {
        BlockKind::C4Pure => vec![4; 4],
        BlockKind::CmPure => vec![m; 4],
        BlockKind::Mixed => vec![4, 4, m, m],
        BlockKind::Switch => vec![4, 4, m, m, m],
    }
}

/// Checks one block factorization against `C_m[4]`, or against
/// `C_m[4] + mK_4` together with the removed matching for the switch kind.
pub fn verify_block(bf: &BlockFactorization) -> VerificationReport {
    let mut c = Collector::default();
    let m = bf.m;
    let order = 4 * m;
    let lengths = expected_lengths(bf.kind, m);
    if bf.sub_factors.len() != lengths.len() {
        c.push(
            ViolationCode::CountMismatch,
            format!("{:?} expects {} sub-factors, found {}", bf.kind, lengths.len(), bf.sub_factors.len()),
        );
    }
    let (mut r_found, mut s_found) = (0, 0);
    for (i, sf) in bf.sub_factors.iter().enumerate() {
        let Some(sizes) = check_factor(i, &sf.factor, order, &mut c) else {
            continue;
        };
        match uniform(&sizes) {
            Some(len) if len == sf.cycle_length => {
                if len == 4 {
                    r_found += 1;
                } else {
                    s_found += 1;
                }
            }
            _ => c.push(
                ViolationCode::NonUniformCycleLength,
                format!("sub-factor {i}: annotated {} but cycle lengths {sizes:?}", sf.cycle_length),
            ),
        }
        if lengths.get(i) != Some(&sf.cycle_length) {
            c.push(
                ViolationCode::CountMismatch,
                format!("sub-factor {i}: annotation {} out of the {:?} order", sf.cycle_length, bf.kind),
            );
        }
    }
    let mut expected = cycle_blowup4_edges(m);
    let matching = match (bf.kind, &bf.removed_matching) {
        (BlockKind::Switch, Some(rm)) => {
            check_matching(rm, order, &mut c);
            for e in &rm.edges {
                let (pu, pw) = (e.lo() / 4, e.hi() / 4);
                if pu == pw || !((pu + 1) % m == pw || (pw + 1) % m == pu) {
                    c.push(
                        ViolationCode::MatchingInvalid,
                        format!("removed edge {:?} is not an edge of C_m[4]", e.endpoints()),
                    );
                }
            }
            expected.extend(parts_k4_edges(m));
            Some(rm)
        }
        (BlockKind::Switch, None) => {
            c.push(ViolationCode::MatchingInvalid, "switch block without removed matching".to_string());
            expected.extend(parts_k4_edges(m));
            None
        }
        (_, Some(_)) => {
            c.push(ViolationCode::MatchingInvalid, "only switch blocks remove a matching".to_string());
            None
        }
        (_, None) => None,
    };
    account_edges(
        expected,
        all_edges(bf.sub_factors.iter().map(|sf| &sf.factor), matching),
        &mut c,
    );
    c.finish(r_found, s_found)
}

/// The target of an outer factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OuterTarget {
    Complete(usize),
    Equipartite { a: usize, b: usize },
}

impl OuterTarget {
    pub fn order(self) -> usize {
        match self {
            OuterTarget::Complete(n) => n,
            OuterTarget::Equipartite { a, b } => a * b,
        }
    }
}

/// Checks that `factors` (each a C_m-factor) together with the optional
/// leftover matching partition the target's edges exactly.
pub fn verify_outer(
    target: OuterTarget,
    m: usize,
    factors: &[TwoFactor],
    leftover: Option<&OneFactor>,
) -> VerificationReport {
    let mut c = Collector::default();
    let order = target.order();
    let mut s_found = 0;
    for (i, f) in factors.iter().enumerate() {
        if let Some(sizes) = check_factor(i, f, order, &mut c) {
            if uniform(&sizes) == Some(m) {
                s_found += 1;
            } else {
                c.push(
                    ViolationCode::NonUniformCycleLength,
                    format!("factor {i}: cycle lengths {sizes:?}, expected {m}"),
                );
            }
        }
    }
    if let Some(l) = leftover {
        check_matching(l, order, &mut c);
    }
    let expected = match target {
        OuterTarget::Complete(n) => complete_edges(n),
        OuterTarget::Equipartite { a, b } => equipartite_edges(a, b),
    };
    account_edges(expected, all_edges(factors, leftover), &mut c);
    c.finish(0, s_found)
}

/// Generic partition check against an explicit edge list, with optional
/// per-factor cycle lengths.
pub fn verify_decomposition(
    ambient: &[Edge],
    order: usize,
    factors: &[TwoFactor],
    lengths: &[usize],
    matching: Option<&OneFactor>,
) -> VerificationReport {
    let mut c = Collector::default();
    if lengths.len() != factors.len() {
        c.push(
            ViolationCode::CountMismatch,
            format!("{} factors for {} length annotations", factors.len(), lengths.len()),
        );
    }
    for (i, f) in factors.iter().enumerate() {
        if let Some(sizes) = check_factor(i, f, order, &mut c) {
            if let Some(&want) = lengths.get(i) {
                if uniform(&sizes) != Some(want) {
                    c.push(
                        ViolationCode::NonUniformCycleLength,
                        format!("factor {i}: cycle lengths {sizes:?}, expected {want}"),
                    );
                }
            }
        }
    }
    if let Some(mm) = matching {
        check_matching(mm, order, &mut c);
    }
    account_edges(ambient.to_vec(), all_edges(factors, matching), &mut c);
    c.finish(0, 0)
}
