//! Factorizations of the outer graphs consumed by the composer.
//!
//! Outer vertices are parts; part `p` of the final graph owns flat ids
//! `4p..4p+4`. The fixed constructions are the Walecki Hamilton
//! decomposition, its variant for `K_{2q} - I`, the two C4-factors of a
//! `K_{4,4}` and the split of a `K_4` into a 4-cycle and a matching.
//! Cm-factorizations of `K_n` and `K_{a:b}` come from a chain of providers.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::algebra::modulo;
use crate::model::{Cycle, Document, Edge, EdgeSetDescriptor, OneFactor, TwoFactor, VertexId};
use crate::search::{
    self, equipartite_excluded, FactorSpec, IngredientError, OrbitPlan, SearchFound,
    SearchInstance, SearchOutcome,
};
use crate::verifier::{verify_outer, OuterTarget};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OuterError {
    #[error("the Walecki construction needs odd n >= 3, got {0}")]
    EvenOrSmall(usize),
    #[error("a K_{{4,4}} needs two distinct parts, got {0} twice")]
    SamePart(usize),
    #[error("{m} does not divide {n}")]
    NotDivisible { n: usize, m: usize },
    #[error("no provider could supply {capability}: {reason}")]
    Unavailable {
        capability: Capability,
        reason: UnavailableReason,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnavailableReason {
    Nonexistent(String),
    Timeout,
    OutOfScope(String),
}

impl fmt::Display for UnavailableReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnavailableReason::Nonexistent(why) => write!(f, "does not exist ({why})"),
            UnavailableReason::Timeout => f.write_str("search timed out"),
            UnavailableReason::OutOfScope(why) => write!(f, "out of scope ({why})"),
        }
    }
}

fn walecki_cycles(n: usize) -> Vec<Vec<VertexId>> {
    let q = n - 1;
    let inf = n - 1;
    (0..(n - 1) / 2)
        .map(|j| {
            let mut c = Vec::with_capacity(n);
            c.push(j);
            for i in 1..=(q / 2) {
                c.push(modulo((j + i) as i64, q));
                if c.len() < q {
                    c.push(modulo(j as i64 - i as i64, q));
                }
            }
            c.push(inf);
            c
        })
        .collect()
}

/// Hamilton decomposition of K_n for odd n: the zigzag path
/// `j, j+1, j-1, j+2, ...` over Z_{n-1}, closed through `n - 1`.
pub fn walecki(n: usize) -> Result<Vec<TwoFactor>, OuterError> {
    if n < 3 || n % 2 == 0 {
        return Err(OuterError::EvenOrSmall(n));
    }
    Ok(walecki_cycles(n)
        .into_iter()
        .map(|c| TwoFactor::new(vec![Cycle::new(c).expect("zigzag is simple")], n))
        .collect())
}

/// Hamilton cycles decomposing K_n (n odd) or K_n - I (n even); for even n
/// the matching I is returned too. Even n reuses Walecki on K_{n-1} and
/// threads the extra vertex through each cycle's diameter edge.
pub fn hamilton_decomposition(n: usize) -> (Vec<TwoFactor>, Option<OneFactor>) {
    match n {
        0 | 1 => (Vec::new(), None),
        2 => (Vec::new(), Some(OneFactor::new(vec![Edge::new(0, 1)]))),
        _ if n % 2 == 1 => (walecki(n).expect("odd n >= 3"), None),
        _ => {
            let q = n - 2; // Z_q plus two extra vertices
            let (inf, extra) = (n - 2, n - 1);
            let half = q / 2;
            let mut matching = vec![Edge::new(inf, extra)];
            let factors = walecki_cycles(n - 1)
                .into_iter()
                .map(|mut c| {
                    // path positions half-1 and half hold difference q/2
                    let (a, b) = (c[half - 1], c[half]);
                    debug_assert_eq!(modulo(b as i64 - a as i64, q) % half, 0);
                    matching.push(Edge::new(a, b));
                    c.insert(half, extra);
                    TwoFactor::new(vec![Cycle::new(c).expect("simple")], n)
                })
                .collect();
            (factors, Some(OneFactor::new(matching)))
        }
    }
}

/// The two C4-factors of the K_{4,4} between parts `a` and `b`.
pub fn k44_pair(a: usize, b: usize) -> Result<[Vec<Cycle>; 2], OuterError> {
    if a == b {
        return Err(OuterError::SamePart(a));
    }
    let x = |l: usize| 4 * a + l;
    let y = |l: usize| 4 * b + l;
    let c = |v: [usize; 4]| Cycle::new(v.to_vec()).expect("simple");
    Ok([
        vec![c([x(0), y(0), x(1), y(1)]), c([x(2), y(2), x(3), y(3)])],
        vec![c([x(0), y(2), x(1), y(3)]), c([x(2), y(0), x(3), y(1)])],
    ])
}

/// The K_4 on part `p` as the 4-cycle (0,1,3,2) plus the matching {03, 12}.
pub fn k4_minus_matching(p: usize) -> (Cycle, [Edge; 2]) {
    let v = |l: usize| 4 * p + l;
    (
        Cycle::new(vec![v(0), v(1), v(3), v(2)]).expect("simple"),
        [Edge::new(v(0), v(3)), Edge::new(v(1), v(2))],
    )
}

// ---------------------------------------------------------------------------
// Providers

/// What an outer ingredient must be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Capability {
    pub target: OuterTarget,
    pub cycle_length: usize,
    pub needs_leftover_matching: bool,
}

impl Capability {
    /// C_m-factorization of K_n, with a leftover matching when n is even.
    pub fn complete(n: usize, m: usize) -> Capability {
        Capability {
            target: OuterTarget::Complete(n),
            cycle_length: m,
            needs_leftover_matching: n % 2 == 0,
        }
    }

    /// C_m-factorization of K_{a:b}.
    pub fn equipartite(a: usize, b: usize, m: usize) -> Capability {
        Capability {
            target: OuterTarget::Equipartite { a, b },
            cycle_length: m,
            needs_leftover_matching: false,
        }
    }

    pub fn order(&self) -> usize {
        self.target.order()
    }

    pub fn factor_count(&self) -> usize {
        match self.target {
            OuterTarget::Complete(n) => (n - 1) / 2,
            OuterTarget::Equipartite { a, b } => a * (b - 1) / 2,
        }
    }

    /// Known not to exist.
    pub fn nonexistent(&self) -> Option<String> {
        match self.target {
            OuterTarget::Complete(n) => {
                if self.cycle_length == 3 && (n == 6 || n == 12) {
                    Some(format!("K_{n} has no C3-factorization with a leftover matching"))
                } else if n % self.cycle_length != 0 {
                    Some(format!("{} does not divide {n}", self.cycle_length))
                } else {
                    None
                }
            }
            OuterTarget::Equipartite { a, b } => equipartite_excluded(a, b, self.cycle_length),
        }
    }
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.target {
            OuterTarget::Complete(n) if self.needs_leftover_matching => {
                write!(f, "C{}-factorization of K_{n} - I", self.cycle_length)
            }
            OuterTarget::Complete(n) => write!(f, "C{}-factorization of K_{n}", self.cycle_length),
            OuterTarget::Equipartite { a, b } => {
                write!(f, "C{}-factorization of K_{{{a}:{b}}}", self.cycle_length)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderSource {
    Builtin,
    ImportFile,
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterFactorization {
    pub factors: Vec<TwoFactor>,
    pub leftover: Option<OneFactor>,
    pub source: ProviderSource,
}

fn check(cap: &Capability, factors: &[TwoFactor], leftover: Option<&OneFactor>) -> bool {
    factors.len() == cap.factor_count()
        && leftover.is_some() == cap.needs_leftover_matching
        && verify_outer(cap.target, cap.cycle_length, factors, leftover).ok
}

pub trait OuterProvider {
    fn source(&self) -> ProviderSource;

    /// Whether `provide` is expected to succeed for `cap`. Used by the
    /// planner to decide which routes are constructive.
    fn covers(&self, cap: &Capability) -> bool;

    /// A verified factorization, or the reason there is none.
    fn provide(&self, cap: &Capability) -> Result<OuterFactorization, UnavailableReason>;
}

/// Walecki for `K_m` with m-cycles.
#[derive(Debug, Default, Clone)]
pub struct Builtin;

impl OuterProvider for Builtin {
    fn source(&self) -> ProviderSource {
        ProviderSource::Builtin
    }

    fn covers(&self, cap: &Capability) -> bool {
        matches!(cap.target, OuterTarget::Complete(n) if n == cap.cycle_length && n % 2 == 1 && n >= 3)
    }

    fn provide(&self, cap: &Capability) -> Result<OuterFactorization, UnavailableReason> {
        if !self.covers(cap) {
            return Err(UnavailableReason::OutOfScope("no built-in construction".into()));
        }
        let n = cap.order();
        let factors = walecki(n).expect("covered");
        debug_assert!(check(cap, &factors, None));
        Ok(OuterFactorization {
            factors,
            leftover: None,
            source: ProviderSource::Builtin,
        })
    }
}

/// Factorizations read from Solution-format files.
#[derive(Debug, Default, Clone)]
pub struct ImportFile {
    docs: Vec<Document>,
}

impl ImportFile {
    pub fn new(docs: Vec<Document>) -> ImportFile {
        ImportFile { docs }
    }

    pub fn load(paths: &[PathBuf]) -> Result<ImportFile, String> {
        let mut docs = Vec::new();
        for p in paths {
            let bytes = std::fs::read(p).map_err(|e| format!("{}: {e}", p.display()))?;
            let doc = Document::from_bytes(&bytes).map_err(|e| format!("{}: {e}", p.display()))?;
            docs.push(doc);
        }
        Ok(ImportFile { docs })
    }

    fn find(&self, cap: &Capability) -> Option<(Vec<TwoFactor>, Option<OneFactor>)> {
        self.docs.iter().find_map(|d| {
            if d.v != cap.order() || d.m != cap.cycle_length {
                return None;
            }
            let factors = d.two_factors().ok()?;
            let leftover = d.matching().ok()?;
            check(cap, &factors, leftover.as_ref()).then_some((factors, leftover))
        })
    }
}

impl OuterProvider for ImportFile {
    fn source(&self) -> ProviderSource {
        ProviderSource::ImportFile
    }

    fn covers(&self, cap: &Capability) -> bool {
        self.find(cap).is_some()
    }

    fn provide(&self, cap: &Capability) -> Result<OuterFactorization, UnavailableReason> {
        let (factors, leftover) = self
            .find(cap)
            .ok_or_else(|| UnavailableReason::OutOfScope("no matching import".into()))?;
        Ok(OuterFactorization {
            factors,
            leftover,
            source: ProviderSource::ImportFile,
        })
    }
}

/// Capabilities the search provider reliably delivers within its default
/// time limit. Established by running the search; re-checked by tests.
pub const COMPLETE_ENVELOPE: &[(usize, usize)] = &[
    (9, 3),
    (15, 3),
    (15, 5),
    (21, 3),
    (21, 7),
    (25, 5),
    (27, 3),
    (27, 9),
    (33, 3),
    (33, 11),
    (35, 5),
    (35, 7),
    (39, 3),
    (39, 13),
    (45, 5),
    (45, 9),
    (45, 15),
    (49, 7),
    (51, 3),
    (51, 17),
    (55, 5),
    (57, 3),
    (57, 19),
    (63, 7),
    (63, 9),
    (65, 5),
    (69, 23),
    (77, 7),
    (77, 11),
    (10, 5),
    (14, 7),
    (18, 9),
    (20, 5),
    (22, 11),
    (24, 3),
    (26, 13),
    (28, 7),
    (30, 3),
    (30, 5),
    (30, 15),
];

pub const EQUIPARTITE_ENVELOPE: &[(usize, usize, usize)] = &[(4, 3, 3), (4, 10, 5), (4, 14, 7)];

pub const DEFAULT_SEARCH_LIMIT: Duration = Duration::from_secs(30);

/// Bounded exact search, rotational strategies first.
#[derive(Debug, Clone)]
pub struct SearchProvider {
    pub time_limit: Duration,
    pub cache_dir: Option<PathBuf>,
}

impl Default for SearchProvider {
    fn default() -> SearchProvider {
        SearchProvider {
            time_limit: DEFAULT_SEARCH_LIMIT,
            cache_dir: None,
        }
    }
}

impl SearchProvider {
    pub fn in_envelope(cap: &Capability) -> bool {
        match cap.target {
            OuterTarget::Complete(n) => COMPLETE_ENVELOPE.contains(&(n, cap.cycle_length)),
            OuterTarget::Equipartite { a, b } => {
                EQUIPARTITE_ENVELOPE.contains(&(a, b, cap.cycle_length))
            }
        }
    }

    /// Runs the strategies for `cap` regardless of the envelope.
    pub fn run(&self, cap: &Capability) -> Result<OuterFactorization, UnavailableReason> {
        if let Some(why) = cap.nonexistent() {
            return Err(UnavailableReason::Nonexistent(why));
        }
        let found = match cap.target {
            OuterTarget::Complete(n) => {
                let m = cap.cycle_length;
                search::memoized_outer(n, m, self.cache_dir.as_deref(), || {
                    complete_strategies(n, m, self.time_limit)
                })
            }
            OuterTarget::Equipartite { a, b } => search::equipartite_cm_search(
                a,
                b,
                cap.cycle_length,
                Some(self.time_limit),
                self.cache_dir.as_deref(),
            )
            .map(|factors| SearchFound {
                factors,
                matching: None,
            }),
        };
        let found = found.map_err(|e| match e {
            IngredientError::Nonexistent(why) => UnavailableReason::Nonexistent(why),
            IngredientError::Timeout => UnavailableReason::Timeout,
            IngredientError::Search(err) => UnavailableReason::OutOfScope(err.to_string()),
        })?;
        if !check(cap, &found.factors, found.matching.as_ref()) {
            return Err(UnavailableReason::OutOfScope("search result failed verification".into()));
        }
        Ok(OuterFactorization {
            factors: found.factors,
            leftover: found.matching,
            source: ProviderSource::Search,
        })
    }
}

impl OuterProvider for SearchProvider {
    fn source(&self) -> ProviderSource {
        ProviderSource::Search
    }

    fn covers(&self, cap: &Capability) -> bool {
        SearchProvider::in_envelope(cap)
    }

    fn provide(&self, cap: &Capability) -> Result<OuterFactorization, UnavailableReason> {
        self.run(cap)
    }
}

/// Invariant-factor decompositions `d1 | d2 | ...` of abelian groups of
/// order `n`, the cyclic group first.
fn abelian_types(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, min: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 1 {
            out.push(acc.clone());
            return;
        }
        for d in min..=rest {
            if rest % d == 0 && acc.last().map_or(true, |&l| d % l == 0) {
                acc.push(d);
                rec(rest / d, d, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    if n > 1 {
        rec(n, 2, &mut Vec::new(), &mut out);
    }
    // rec lists multi-factor types first only when d1 is small; put cyclic first
    out.sort_by_key(|t| t.len());
    out.into_iter()
        .filter(|t| t.windows(2).all(|w| w[1] % w[0] == 0))
        .collect()
}

/// The regular action of `Z_{d1} x ... x Z_{dr}` on its own elements
/// (mixed radix ids), extended by `fixed` fixed points.
struct AbelianAction {
    dims: Vec<usize>,
    size: usize,
}

impl AbelianAction {
    fn new(dims: Vec<usize>) -> AbelianAction {
        let size = dims.iter().product();
        AbelianAction { dims, size }
    }

    fn digits(&self, mut x: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|&d| {
                let r = x % d;
                x /= d;
                r
            })
            .collect()
    }

    fn id(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).rev().fold(0, |acc, (&g, &d)| acc * d + g)
    }

    fn add(&self, x: usize, g: &[usize]) -> usize {
        let dx = self.digits(x);
        let sum: Vec<usize> = dx.iter().zip(g).zip(&self.dims).map(|((a, b), d)| (a + b) % d).collect();
        self.id(&sum)
    }

    fn translation(&self, g: &[usize], fixed: usize) -> Vec<usize> {
        (0..self.size)
            .map(|x| self.add(x, g))
            .chain(self.size..self.size + fixed)
            .collect()
    }

    fn generators(&self, fixed: usize) -> Vec<Vec<usize>> {
        (0..self.dims.len())
            .map(|i| {
                let mut g = vec![0; self.dims.len()];
                g[i] = 1;
                self.translation(&g, fixed)
            })
            .collect()
    }

    /// Elements of order 2, as digit vectors.
    fn involutions(&self) -> Vec<Vec<usize>> {
        (1..self.size)
            .map(|x| self.digits(x))
            .filter(|g| g.iter().zip(&self.dims).all(|(&a, &d)| (2 * a) % d == 0))
            .collect()
    }
}

/// Rotational plans for K_n, tried in order before a plain search.
pub fn complete_orbit_plans(n: usize, m: usize) -> Vec<OrbitPlan> {
    let mut plans = Vec::new();
    if n < 4 {
        return plans;
    }
    if n % 2 == 1 {
        // Z_{2h} + inf with sigma = +1 and H = <+h>, or sigma = +2 for odd h
        let q = n - 1;
        let h = q / 2;
        let shift = |step: usize| -> Vec<usize> { (0..q).map(|x| (x + step) % q).chain([q]).collect() };
        plans.push(OrbitPlan::cyclic(shift(1), h, m, None));
        if h % 2 == 1 {
            plans.push(OrbitPlan::cyclic(shift(2), h, m, None));
        }
        // other abelian groups of order 2h acting regularly, H of order 2
        for dims in abelian_types(q).into_iter().skip(1) {
            let act = AbelianAction::new(dims);
            for t in act.involutions() {
                plans.push(OrbitPlan {
                    group: act.generators(1),
                    stabilizers: vec![vec![act.translation(&t, 1)]],
                    cycle_length: m,
                    matching: None,
                });
            }
        }
    } else {
        // Z_{2h} + inf1 + inf2, sigma = +2 fixing both
        let q = n - 2;
        let h = q / 2;
        let sigma: Vec<usize> = (0..q).map(|x| (x + 2) % q).chain([q, q + 1]).collect();
        let infs = Edge::new(q, q + 1);
        let mut matchings = vec![(0..h).map(|x| Edge::new(x, x + h)).collect::<Vec<_>>()];
        for d in (1..h).step_by(2) {
            matchings.push((0..q).step_by(2).map(|x| Edge::new(x, (x + d) % q)).collect());
        }
        for mut mm in matchings {
            mm.push(infs);
            plans.push(OrbitPlan::cyclic(sigma.clone(), h, m, Some(OneFactor::new(mm))));
        }
        // abelian groups of order 2h acting regularly, H of order 2, and the
        // matching made of the cosets of an involution
        for dims in abelian_types(q) {
            let act = AbelianAction::new(dims);
            let invs = act.involutions();
            for c in &invs {
                let mut mm: Vec<Edge> = (0..q)
                    .filter_map(|x| {
                        let y = act.add(x, c);
                        (x < y).then(|| Edge::new(x, y))
                    })
                    .collect();
                mm.push(infs);
                for t in &invs {
                    plans.push(OrbitPlan {
                        group: act.generators(2),
                        stabilizers: vec![vec![act.translation(t, 2)]],
                        cycle_length: m,
                        matching: Some(OneFactor::new(mm.clone())),
                    });
                }
            }
        }
    }
    plans.extend(cyclic_multi_base_plans(n, m));
    plans
}

const MAX_MULTI_BASE_PLANS: usize = 24;

// Z_n acting regularly; factor budget split over bases with H_j = <+d_j>,
// each contributing d_j images. Even n reserves the difference n/2.
fn cyclic_multi_base_plans(n: usize, m: usize) -> Vec<OrbitPlan> {
    let budget = (n - 1) / 2;
    let divisors: Vec<usize> = (1..n).rev().filter(|d| n % d == 0 && *d <= budget).collect();
    let mut parts = Vec::new();
    let mut splits = Vec::new();
    fn go(rest: usize, from: usize, divs: &[usize], parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if out.len() == MAX_MULTI_BASE_PLANS {
            return;
        }
        if rest == 0 {
            if parts.len() > 1 {
                out.push(parts.clone());
            }
            return;
        }
        for (i, &d) in divs.iter().enumerate().skip(from) {
            if d <= rest {
                parts.push(d);
                go(rest - d, i, divs, parts, out);
                parts.pop();
            }
        }
    }
    go(budget, 0, &divisors, &mut parts, &mut splits);
    let shift = |step: usize| -> Vec<usize> { (0..n).map(|x| (x + step) % n).collect() };
    let matching = (n % 2 == 0).then(|| OneFactor::new((0..n / 2).map(|x| Edge::new(x, x + n / 2)).collect()));
    splits
        .into_iter()
        .map(|ds| OrbitPlan {
            group: vec![shift(1)],
            stabilizers: ds.iter().map(|&d| vec![shift(d)]).collect(),
            cycle_length: m,
            matching: matching.clone(),
        })
        .collect()
}

const SINGLE_BASE_STEPS: u64 = 4_000_000;
const MULTI_BASE_STEPS: u64 = 250_000;

fn complete_strategies(n: usize, m: usize, limit: Duration) -> Result<SearchFound, IngredientError> {
    let ambient = EdgeSetDescriptor::CompleteGraph(n);
    let deadline = Instant::now() + limit;
    let remaining = || deadline.saturating_duration_since(Instant::now());
    // Single-base plans first, each under a step cap, then the multi-base
    // ones under a smaller cap, then the capped single-base plans again
    // against the clock alone. Step caps rather than time slices keep the
    // chosen plan independent of the machine.
    let (single, multi): (Vec<_>, Vec<_>) = complete_orbit_plans(n, m)
        .into_iter()
        .partition(|p| p.stabilizers.len() == 1);
    let mut capped = Vec::new();
    for (plan, steps) in single
        .iter()
        .map(|p| (p, Some(SINGLE_BASE_STEPS)))
        .chain(multi.iter().map(|p| (p, Some(MULTI_BASE_STEPS))))
    {
        match search::solve_orbit_bounded(ambient, plan, Some(remaining()), steps)? {
            SearchOutcome::Found(f) => return Ok(f),
            SearchOutcome::Timeout if remaining().is_zero() => return Err(IngredientError::Timeout),
            SearchOutcome::Timeout => capped.push(plan),
            SearchOutcome::Unsat => {}
        }
    }
    for plan in capped.into_iter().filter(|p| p.stabilizers.len() == 1) {
        match search::solve_orbit(ambient, plan, Some(remaining()))? {
            SearchOutcome::Found(f) => return Ok(f),
            SearchOutcome::Timeout => return Err(IngredientError::Timeout),
            SearchOutcome::Unsat => {}
        }
    }
    let inst = SearchInstance {
        ambient,
        factor_specs: vec![FactorSpec::new(m, (n - 1) / 2)],
        leftover_matching: n % 2 == 0,
        symmetry_breaking: false,
        time_limit: Some(remaining()),
    };
    match search::solve(&inst)? {
        SearchOutcome::Found(f) => Ok(f),
        // plain search is exhaustive on its own
        SearchOutcome::Unsat => {
            Err(IngredientError::Nonexistent(format!("exhaustive search of K_{n} with C{m}")))
        }
        SearchOutcome::Timeout => Err(IngredientError::Timeout),
    }
}

/// Providers consulted in order: Builtin, then imports, then search.
pub struct ProviderChain {
    providers: Vec<Box<dyn OuterProvider>>,
}

impl Default for ProviderChain {
    fn default() -> ProviderChain {
        ProviderChain::new(ImportFile::default(), SearchProvider::default())
    }
}

impl ProviderChain {
    pub fn new(imports: ImportFile, search: SearchProvider) -> ProviderChain {
        ProviderChain {
            providers: vec![Box::new(Builtin), Box::new(imports), Box::new(search)],
        }
    }

    pub fn with_cache(cache_dir: Option<&Path>) -> ProviderChain {
        ProviderChain::new(
            ImportFile::default(),
            SearchProvider {
                cache_dir: cache_dir.map(Path::to_path_buf),
                ..SearchProvider::default()
            },
        )
    }

    pub fn covers(&self, cap: &Capability) -> bool {
        cap.nonexistent().is_none() && self.providers.iter().any(|p| p.covers(cap))
    }

    /// First provider that covers `cap` and delivers; the last failure
    /// reason otherwise.
    pub fn provide(&self, cap: &Capability) -> Result<OuterFactorization, OuterError> {
        let unavailable = |reason| OuterError::Unavailable {
            capability: *cap,
            reason,
        };
        if let Some(why) = cap.nonexistent() {
            return Err(unavailable(UnavailableReason::Nonexistent(why)));
        }
        let mut reason = UnavailableReason::OutOfScope("no provider covers it".into());
        for p in &self.providers {
            if !p.covers(cap) && p.source() != ProviderSource::Search {
                continue;
            }
            match p.provide(cap) {
                Ok(f) => return Ok(f),
                Err(r) => reason = r,
            }
        }
        Err(unavailable(reason))
    }
}

/// Cm-factorization of K_n: `(n-1)/2` factors, plus a leftover perfect
/// matching for even n.
pub fn outer_cm_factorization(
    n: usize,
    m: usize,
    chain: &ProviderChain,
) -> Result<OuterFactorization, OuterError> {
    if m == 0 || n % m != 0 {
        return Err(OuterError::NotDivisible { n, m });
    }
    chain.provide(&Capability::complete(n, m))
}
