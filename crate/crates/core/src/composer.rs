//! Planning and assembly of full solutions.
//!
//! For `v = 4mt` write `n = mt`. Then `K_v - I` is the blow-up `K_n[4]`
//! together with one `K_4` per part, and an outer Cm-factorization of `K_n`
//! turns into `C_m[4]`-factors of `K_n[4]`, each of which is factored by one
//! of the block constructions. The planner picks a route and the numbers
//! `r1` (C4Pure blocks), `x` (Mixed blocks) and `s1` (CmPure blocks); the
//! builder assembles the solution and verifies it before returning.

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::blocks::{self, BlockError, BlockFactorization, BlockKind};
use crate::model::{Cycle, Edge, OneFactor, Solution, TwoFactor, VertexId};
use crate::outer::{
    hamilton_decomposition, k44_pair, k4_minus_matching, Capability, OuterError,
    OuterFactorization, ProviderChain,
};
use crate::search::{self, IngredientError};
use crate::tables::{K24_FACTORS, K24_MATCHING};
use crate::verifier::verify_solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Request {
    pub v: usize,
    pub m: usize,
    pub r: usize,
    pub s: usize,
}

impl Request {
    pub fn new(v: usize, m: usize, r: usize, s: usize) -> Request {
        Request { v, m, r, s }
    }
}

impl fmt::Display for Request {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(4,{})-HWP({}; {}, {})", self.m, self.v, self.r, self.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    OddROddT,
    OddREvenT,
    R1EvenTLiu,
    EvenRSwitch,
    R2EvenTLiu,
    K24Table,
    K48Compose,
    AllC4,
    External,
    Infeasible,
    Unsupported,
}

impl Route {
    pub fn is_constructive(self) -> bool {
        !matches!(self, Route::External | Route::Infeasible | Route::Unsupported)
    }

    pub fn name(self) -> &'static str {
        match self {
            Route::OddROddT => "OddR_OddT",
            Route::OddREvenT => "OddR_EvenT",
            Route::R1EvenTLiu => "R1_EvenT_Liu",
            Route::EvenRSwitch => "EvenR_Switch",
            Route::R2EvenTLiu => "R2_EvenT_Liu",
            Route::K24Table => "K24Table",
            Route::K48Compose => "K48Compose",
            Route::AllC4 => "AllC4",
            Route::External => "External",
            Route::Infeasible => "Infeasible",
            Route::Unsupported => "UnsupportedException",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub request: Request,
    pub t: usize,
    pub route: Route,
    pub r1: usize,
    pub s1: usize,
    pub x: usize,
    pub ingredients: Vec<Capability>,
    /// The construction route an External plan would take if its missing
    /// ingredient were supplied.
    pub blocked_route: Option<Route>,
    pub note: Option<String>,
}

impl Plan {
    fn status(request: Request, t: usize, route: Route, note: impl Into<String>) -> Plan {
        Plan {
            request,
            t,
            route,
            r1: 0,
            s1: 0,
            x: 0,
            ingredients: Vec::new(),
            blocked_route: None,
            note: Some(note.into()),
        }
    }

    /// One-line report: route, recipe and notes.
    pub fn report(&self) -> String {
        let mut out = format!(
            "{} route={} t={} r1={} s1={} x={}",
            self.request, self.route, self.t, self.r1, self.s1, self.x
        );
        if !self.ingredients.is_empty() {
            let list: Vec<String> = self.ingredients.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!(" ingredients=[{}]", list.join("; ")));
        }
        if let Some(b) = self.blocked_route {
            out.push_str(&format!(" blocked_route={b}"));
        }
        if let Some(n) = &self.note {
            out.push_str(&format!(" note=\"{n}\""));
        }
        out
    }
}

/// Necessary conditions: `r > 0` needs `4 | v`, `s > 0` needs `m | v`, and
/// `r + s = floor((v-1)/2)`. Returns `t = v/(4m)` (0 when undefined).
pub fn check_necessary(req: &Request) -> Result<usize, String> {
    let Request { v, m, r, s } = *req;
    if m == 0 {
        return Err("m must be positive".into());
    }
    if r > 0 && v % 4 != 0 {
        return Err(format!("4 ∤ v (v = {v}) although r > 0"));
    }
    if s > 0 && v % m != 0 {
        return Err(format!("m ∤ v ({m} ∤ {v}) although s > 0"));
    }
    let want = v.saturating_sub(1) / 2;
    if r + s != want {
        return Err(format!("r + s = {} but floor((v-1)/2) = {want}", r + s));
    }
    Ok(if v % (4 * m) == 0 { v / (4 * m) } else { 0 })
}

/// Solves `r = 4 r1 + 2x + cr`, `s = 4 s1 + 2x + cs`, `r1 + s1 + x = budget`
/// for the smallest `x` in 0..=3.
fn recipe(r: usize, s: usize, cr: usize, cs: usize, budget: usize) -> Option<(usize, usize, usize)> {
    (0..=3).find_map(|x| {
        let r_rest = r.checked_sub(cr + 2 * x)?;
        let s_rest = s.checked_sub(cs + 2 * x)?;
        if r_rest % 4 != 0 || s_rest % 4 != 0 {
            return None;
        }
        let (r1, s1) = (r_rest / 4, s_rest / 4);
        (r1 + s1 + x == budget).then_some((r1, s1, x))
    })
}

/// The recipe constants `(cr, cs, budget)` of a block route.
fn route_constants(route: Route, n: usize, t: usize) -> Option<(usize, usize, usize)> {
    let odd = t % 2 == 1;
    match route {
        Route::OddROddT => Some((1, 0, (n - 1) / 2)),
        Route::OddREvenT => Some((3, 0, (n - 2) / 2)),
        Route::EvenRSwitch if odd => Some((2, 3, (n - 3) / 2)),
        Route::EvenRSwitch => Some((4, 3, (n - 4) / 2)),
        Route::K48Compose => Some((8, 3, 3)),
        _ => None,
    }
}

pub fn plan(req: &Request) -> Plan {
    plan_with(req, &ProviderChain::default())
}

/// Plans `req`; routes whose outer ingredient `chain` cannot supply become
/// External with `blocked_route` set.
pub fn plan_with(req: &Request, chain: &ProviderChain) -> Plan {
    let req = *req;
    let t = match check_necessary(&req) {
        Ok(t) => t,
        Err(why) => return Plan::status(req, 0, Route::Infeasible, why),
    };
    let Request { v, m, r, s } = req;
    if m < 3 || m % 2 == 0 {
        return Plan::status(req, t, Route::Unsupported, "only odd m >= 3 is handled");
    }
    if s == 0 {
        let note = if v <= 2 { "trivial instance" } else { "Hamilton decomposition of K_{v/4}, C4 blocks" };
        return Plan::status(req, t, Route::AllC4, note);
    }
    if r == 0 {
        return Plan::status(req, t, Route::External, "all factors are Cm: an Oberwolfach instance");
    }
    if v == 24 && m == 3 {
        return match r {
            4 => Plan::status(req, t, Route::K24Table, "explicit table"),
            2 | 6 => Plan::status(req, t, Route::Unsupported, "open case for v = 24"),
            _ => Plan::status(req, t, Route::External, "v = 24 cases other than r = 4 are cited results"),
        };
    }
    if v == 48 && m == 3 {
        if r % 2 == 0 && (8..=20).contains(&r) {
            let (r1, s1, x) = recipe(r, s, 8, 3, 3).expect("recipe solvable for even r in 8..=20");
            return Plan {
                request: req,
                t,
                route: Route::K48Compose,
                r1,
                s1,
                x,
                ingredients: Vec::new(),
                blocked_route: None,
                note: Some("needs the searched (4,3)-HWP(12;1,4)".into()),
            };
        }
        if r == 6 {
            return Plan::status(req, t, Route::Unsupported, "open case for v = 48");
        }
        return Plan::status(req, t, Route::External, "v = 48 cases outside r in 8..=20 are cited results");
    }
    let n = m * t;
    let route = if r % 2 == 1 {
        if r >= 3 || t % 2 == 1 {
            if t % 2 == 1 {
                Route::OddROddT
            } else {
                Route::OddREvenT
            }
        } else {
            Route::R1EvenTLiu
        }
    } else if r >= 4 || t % 2 == 1 {
        Route::EvenRSwitch
    } else if t == 2 {
        return Plan::status(req, t, Route::Unsupported, "open case r = 2, v = 8m");
    } else {
        Route::R2EvenTLiu
    };
    let mut p = Plan::status(req, t, route, "");
    p.note = None;
    match route {
        Route::R1EvenTLiu => p.ingredients.push(Capability::equipartite(4, n, m)),
        Route::R2EvenTLiu => p.ingredients.push(Capability::equipartite(4 * m, t, m)),
        _ => {
            let (cr, cs, budget) = route_constants(route, n, t).expect("block route");
            let Some((r1, s1, x)) = recipe(r, s, cr, cs, budget) else {
                return Plan::status(
                    req,
                    t,
                    Route::External,
                    format!(
                        "{route} recipe r = 4r1+2x+{cr}, s = 4s1+2x+{cs}, r1+s1+x = {budget} has no nonnegative solution"
                    ),
                );
            };
            p.r1 = r1;
            p.s1 = s1;
            p.x = x;
            p.ingredients.push(Capability::complete(n, m));
        }
    }
    if let Some(missing) = p.ingredients.iter().find(|c| !chain.covers(c)) {
        let why = match missing.nonexistent() {
            Some(reason) => format!("{missing} does not exist: {reason}"),
            None => format!("{missing} is a cited result outside the search envelope"),
        };
        p.blocked_route = Some(route);
        p.route = Route::External;
        p.note = Some(why);
    }
    p
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("external: {0}")]
    External(String),
    #[error("ingredient unavailable: {0}")]
    IngredientUnavailable(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<OuterError> for BuildError {
    fn from(e: OuterError) -> BuildError {
        BuildError::IngredientUnavailable(e.to_string())
    }
}

impl From<IngredientError> for BuildError {
    fn from(e: IngredientError) -> BuildError {
        BuildError::IngredientUnavailable(e.to_string())
    }
}

impl From<BlockError> for BuildError {
    fn from(e: BlockError) -> BuildError {
        BuildError::Internal(e.to_string())
    }
}

/// Build-time configuration.
pub struct Builder {
    pub chain: ProviderChain,
    pub cache_dir: Option<PathBuf>,
    pub time_limit: Option<std::time::Duration>,
}

impl Default for Builder {
    fn default() -> Builder {
        Builder {
            chain: ProviderChain::default(),
            cache_dir: None,
            time_limit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowupError {
    #[error("copies mix block kinds")]
    MixedKinds,
    #[error("outer factor is not {0}-uniform")]
    NotUniform(usize),
    #[error("{copies} block copies for {cycles} outer cycles")]
    CopyCount { copies: usize, cycles: usize },
}

/// Places one block on every cycle of `outer`: local vertex
/// `(layer, position j)` of the block on cycle `(p_0, ..., p_{m-1})` goes to
/// `(layer, part p_j)`. Sub-factor `g` of every copy joins global factor `g`.
pub fn blowup_outer_factor(
    outer: &TwoFactor,
    copies: &[BlockFactorization],
    v: usize,
) -> Result<(Vec<TwoFactor>, Option<OneFactor>), BlowupError> {
    let Some(first) = copies.first() else {
        return Err(BlowupError::CopyCount {
            copies: 0,
            cycles: outer.cycles.len(),
        });
    };
    if copies.iter().any(|c| c.kind != first.kind) {
        return Err(BlowupError::MixedKinds);
    }
    if copies.len() != outer.cycles.len() {
        return Err(BlowupError::CopyCount {
            copies: copies.len(),
            cycles: outer.cycles.len(),
        });
    }
    let m = first.m;
    if outer.cycles.iter().any(|c| c.len() != m) || copies.iter().any(|c| c.m != m) {
        return Err(BlowupError::NotUniform(m));
    }
    let g = first.sub_factors.len();
    let mut globals: Vec<Vec<Cycle>> = vec![Vec::new(); g];
    let mut matching: Vec<Edge> = Vec::new();
    for (cycle, block) in outer.cycles.iter().zip(copies) {
        let parts = cycle.vertices();
        let place = |x: VertexId| 4 * parts[x / 4] + x % 4;
        for (i, sf) in block.sub_factors.iter().enumerate() {
            for c in &sf.factor.cycles {
                globals[i].push(c.map(place).expect("placement is injective"));
            }
        }
        if let Some(rm) = &block.removed_matching {
            matching.extend(rm.edges.iter().map(|e| Edge::new(place(e.lo()), place(e.hi()))));
        }
    }
    let factors = globals.into_iter().map(|cs| TwoFactor::new(cs, v)).collect();
    let matching = first.removed_matching.is_some().then(|| OneFactor::new(matching));
    Ok((factors, matching))
}

fn sort_c4_first(mut factors: Vec<TwoFactor>) -> Vec<TwoFactor> {
    factors.sort_by_key(|f| f.uniform_cycle_length() != Some(4));
    factors
}

fn finish(req: &Request, factors: Vec<TwoFactor>, matching: Vec<Edge>) -> Result<Solution, BuildError> {
    let sol = Solution {
        v: req.v,
        m: req.m,
        r: req.r,
        s: req.s,
        factors: sort_c4_first(factors),
        one_factor: OneFactor::new(matching),
    };
    let rep = verify_solution(&sol);
    if !rep.ok || rep.r_found != req.r || rep.s_found != req.s {
        return Err(BuildError::Internal(format!(
            "assembled solution for {req} failed verification: {}",
            rep.to_text()
        )));
    }
    Ok(sol)
}

/// Block kinds for the outer factors in order: C4Pure, Mixed, CmPure, with
/// the switch block last when present.
fn kind_sequence(r1: usize, x: usize, s1: usize, switch: bool) -> Vec<BlockKind> {
    let mut kinds = Vec::with_capacity(r1 + x + s1 + 1);
    kinds.extend(std::iter::repeat(BlockKind::C4Pure).take(r1));
    kinds.extend(std::iter::repeat(BlockKind::Mixed).take(x));
    kinds.extend(std::iter::repeat(BlockKind::CmPure).take(s1));
    if switch {
        kinds.push(BlockKind::Switch);
    }
    kinds
}

/// Assembles `K_{4n} - I` from an outer factorization of `K_n` with
/// m-cycles, the given kind per outer factor, and an optional leftover
/// matching of `K_n` (turned into K_{4,4} pairs).
fn assemble_blocks(
    v: usize,
    m: usize,
    outer: &[TwoFactor],
    kinds: &[BlockKind],
    leftover: Option<&OneFactor>,
) -> Result<(Vec<TwoFactor>, Vec<Edge>), BuildError> {
    if outer.len() != kinds.len() {
        return Err(BuildError::Internal(format!(
            "{} outer factors for {} block kinds",
            outer.len(),
            kinds.len()
        )));
    }
    let n = v / 4;
    let mut factors = Vec::new();
    let mut matching = Vec::new();
    let mut have_switch = false;
    let mut sorted: Vec<&TwoFactor> = outer.iter().collect();
    sorted.sort_by(|a, b| a.cycles.cmp(&b.cycles));
    for (f, &kind) in sorted.into_iter().zip(kinds) {
        let blk = blocks::block(m, kind)?;
        let copies = vec![blk; f.cycles.len()];
        let (gs, mm) = blowup_outer_factor(f, &copies, v).map_err(|e| BuildError::Internal(e.to_string()))?;
        factors.extend(gs);
        if let Some(mm) = mm {
            have_switch = true;
            matching.extend(mm.edges);
        }
    }
    if let Some(l) = leftover {
        let mut pair: [Vec<Cycle>; 2] = [Vec::new(), Vec::new()];
        for e in &l.edges {
            let [a, b] = k44_pair(e.lo(), e.hi())?;
            pair[0].extend(a);
            pair[1].extend(b);
        }
        let [a, b] = pair;
        factors.push(TwoFactor::new(a, v));
        factors.push(TwoFactor::new(b, v));
    }
    if !have_switch {
        let mut cycles = Vec::with_capacity(n);
        for p in 0..n {
            let (c, mm) = k4_minus_matching(p);
            cycles.push(c);
            matching.extend(mm);
        }
        factors.push(TwoFactor::new(cycles, v));
    }
    Ok((factors, matching))
}

impl Builder {
    pub fn with_chain(chain: ProviderChain) -> Builder {
        Builder {
            chain,
            ..Builder::default()
        }
    }

    pub fn plan(&self, req: &Request) -> Plan {
        plan_with(req, &self.chain)
    }

    /// Builds and verifies a solution for `req`.
    pub fn build(&self, req: &Request) -> Result<Solution, BuildError> {
        let p = self.plan(req);
        self.build_plan(&p)
    }

    pub fn build_plan(&self, p: &Plan) -> Result<Solution, BuildError> {
        let req = p.request;
        let note = || p.note.clone().unwrap_or_default();
        match p.route {
            Route::Infeasible => Err(BuildError::Infeasible(note())),
            Route::Unsupported => Err(BuildError::Unsupported(note())),
            Route::External => Err(BuildError::External(note())),
            Route::AllC4 => self.all_c4(&req),
            Route::K24Table => k24_table(&req),
            Route::K48Compose => self.k48(p),
            Route::R1EvenTLiu => self.r1_liu(p),
            Route::R2EvenTLiu => self.r2_liu(p),
            Route::OddROddT | Route::OddREvenT | Route::EvenRSwitch => self.block_route(p),
        }
    }

    fn outer(&self, cap: &Capability) -> Result<OuterFactorization, BuildError> {
        Ok(self.chain.provide(cap)?)
    }

    fn all_c4(&self, req: &Request) -> Result<Solution, BuildError> {
        let v = req.v;
        if v <= 2 {
            let mm = if v == 2 { vec![Edge::new(0, 1)] } else { Vec::new() };
            return finish(req, Vec::new(), mm);
        }
        let k = v / 4;
        let (hs, leftover) = hamilton_decomposition(k);
        if k < 3 {
            // K_4 - I is one 4-cycle; K_8 - I is a K_{4,4} plus two K_4s
            let (factors, matching) = assemble_blocks(v, 3, &[], &[], leftover.as_ref())?;
            return finish(req, factors, matching);
        }
        let kinds = vec![BlockKind::C4Pure; hs.len()];
        let (factors, matching) = assemble_blocks(v, k, &hs, &kinds, leftover.as_ref())?;
        finish(req, factors, matching)
    }

    fn block_route(&self, p: &Plan) -> Result<Solution, BuildError> {
        let req = p.request;
        let cap = p.ingredients[0];
        let outer = self.outer(&cap)?;
        let kinds = kind_sequence(p.r1, p.x, p.s1, p.route == Route::EvenRSwitch);
        let (factors, matching) =
            assemble_blocks(req.v, req.m, &outer.factors, &kinds, outer.leftover.as_ref())?;
        finish(&req, factors, matching)
    }

    fn k48(&self, p: &Plan) -> Result<Solution, BuildError> {
        let req = p.request;
        let v = 48;
        let hwp = search::hwp12_ingredient(self.time_limit, self.cache_dir.as_deref())?;
        let mut c4_outer: Vec<&TwoFactor> = Vec::new();
        let mut c3_outer: Vec<TwoFactor> = Vec::new();
        for f in &hwp.factors {
            match f.uniform_cycle_length() {
                Some(4) => c4_outer.push(f),
                _ => c3_outer.push(f.clone()),
            }
        }
        if c4_outer.len() != 1 || c3_outer.len() != 4 {
            return Err(BuildError::Internal("unexpected ingredient shape".into()));
        }
        let kinds = kind_sequence(p.r1, p.x, p.s1, true);
        let (mut factors, matching) =
            assemble_blocks(v, 3, &c3_outer, &kinds, Some(&hwp.one_factor))?;
        let c4 = blocks::c4_block(4)?;
        let copies = vec![c4; c4_outer[0].cycles.len()];
        let (gs, _) = blowup_outer_factor(c4_outer[0], &copies, v)
            .map_err(|e| BuildError::Internal(e.to_string()))?;
        factors.extend(gs);
        finish(&req, factors, matching)
    }

    fn r1_liu(&self, p: &Plan) -> Result<Solution, BuildError> {
        let req = p.request;
        let outer = self.outer(&p.ingredients[0])?;
        let mut factors = outer.factors;
        let mut cycles = Vec::new();
        let mut matching = Vec::new();
        for part in 0..req.v / 4 {
            let (c, mm) = k4_minus_matching(part);
            cycles.push(c);
            matching.extend(mm);
        }
        factors.push(TwoFactor::new(cycles, req.v));
        finish(&req, factors, matching)
    }

    fn r2_liu(&self, p: &Plan) -> Result<Solution, BuildError> {
        let req = p.request;
        let (m, t) = (req.m, p.t);
        let block_v = 4 * m;
        let inner = self.build(&Request::new(block_v, m, 2, 2 * m - 3))?;
        let equi = self.outer(&p.ingredients[0])?;
        let mut globals: Vec<Vec<Cycle>> = vec![Vec::new(); inner.factors.len()];
        let mut matching = Vec::new();
        for copy in 0..t {
            let shift = |x: VertexId| x + copy * block_v;
            for (i, f) in inner.factors.iter().enumerate() {
                globals[i].extend(f.cycles.iter().map(|c| c.map(shift).expect("shift")));
            }
            matching.extend(inner.one_factor.edges.iter().map(|e| Edge::new(shift(e.lo()), shift(e.hi()))));
        }
        let mut factors: Vec<TwoFactor> = globals.into_iter().map(|cs| TwoFactor::new(cs, req.v)).collect();
        factors.extend(equi.factors);
        finish(&req, factors, matching)
    }
}

fn k24_table(req: &Request) -> Result<Solution, BuildError> {
    let factors = K24_FACTORS
        .iter()
        .map(|f| {
            TwoFactor::new(
                f.iter().map(|c| Cycle::new(c.to_vec()).expect("table cycles are simple")).collect(),
                24,
            )
        })
        .collect();
    let matching = K24_MATCHING.iter().map(|&[a, b]| Edge::new(a, b)).collect();
    finish(req, factors, matching)
}

/// The explicit v = 24 solution with four C4-factors.
pub fn k24_solution() -> Solution {
    k24_table(&Request::new(24, 3, 4, 7)).expect("table verifies")
}

/// Builds with the default provider chain.
pub fn build(req: &Request) -> Result<Solution, BuildError> {
    Builder::default().build(req)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(v: usize, m: usize, r: usize, s: usize) -> Request {
        Request::new(v, m, r, s)
    }

    #[test]
    fn necessary_examples() {
        assert_eq!(check_necessary(&req(28, 7, 5, 8)), Ok(1));
        assert!(check_necessary(&req(26, 13, 1, 11)).unwrap_err().contains("4 ∤ v"));
        assert!(check_necessary(&req(28, 7, 5, 7)).unwrap_err().contains("r + s"));
        assert!(check_necessary(&req(16, 3, 1, 6)).unwrap_err().contains("m ∤ v"));
    }

    #[test]
    fn plan_examples() {
        let p = plan(&req(12, 3, 3, 2));
        assert_eq!((p.route, p.r1, p.s1, p.x), (Route::OddROddT, 0, 0, 1));
        assert_eq!(plan(&req(24, 3, 6, 5)).route, Route::Unsupported);
        assert_eq!(plan(&req(24, 3, 2, 9)).route, Route::Unsupported);
        assert_eq!(plan(&req(12, 3, 4, 1)).route, Route::External);
        assert_eq!(plan(&req(24, 3, 4, 7)).route, Route::K24Table);
        assert_eq!(plan(&req(20, 5, 9, 0)).route, Route::AllC4);
        assert_eq!(plan(&req(12, 3, 0, 5)).route, Route::External);
        assert_eq!(plan(&req(40, 5, 2, 17)).route, Route::Unsupported);
    }

    #[test]
    fn recipe_identities_hold() {
        for m in (3..=15).step_by(2) {
            for t in 1..=4 {
                let v = 4 * m * t;
                for r in 1..(v - 2) / 2 {
                    let p = plan(&req(v, m, r, (v - 2) / 2 - r));
                    let n = m * t;
                    if let Some((cr, cs, budget)) = route_constants(p.route, n, t) {
                        assert_eq!(r, 4 * p.r1 + 2 * p.x + cr);
                        assert_eq!(p.request.s, 4 * p.s1 + 2 * p.x + cs);
                        assert_eq!(p.r1 + p.s1 + p.x, budget);
                    }
                }
            }
        }
    }

    #[test]
    fn builds_spec_examples() {
        let sol = build(&req(12, 3, 2, 3)).unwrap();
        assert_eq!(sol.factors.len(), 5);
        let sol = build(&req(20, 5, 9, 0)).unwrap();
        assert_eq!(sol.factors.len(), 9);
        let sol = build(&req(28, 7, 5, 8)).unwrap();
        assert!(verify_solution(&sol).ok);
    }

    #[test]
    fn k24_contents() {
        let sol = k24_solution();
        assert!(sol.factors[0].cycles.contains(&Cycle::new(vec![0, 1, 10, 9]).unwrap()));
        assert!(sol.one_factor.edges.contains(&Edge::new(0, 22)));
    }

    #[test]
    fn blowup_counts() {
        let m = 5;
        let outer = crate::outer::walecki(15).unwrap();
        let chain = ProviderChain::default();
        let f = crate::outer::outer_cm_factorization(15, 5, &chain).unwrap();
        let copies = vec![blocks::mixed_block(m).unwrap(); 3];
        let (gs, mm) = blowup_outer_factor(&f.factors[0], &copies, 60).unwrap();
        let counts: Vec<usize> = gs.iter().map(|g| g.cycles.len()).collect();
        assert_eq!(counts, vec![3 * m, 3 * m, 12, 12]);
        assert!(mm.is_none());
        assert_eq!(
            blowup_outer_factor(&outer[0], &copies, 60),
            Err(BlowupError::CopyCount { copies: 3, cycles: 1 })
        );
    }

    #[test]
    fn small_all_c4() {
        for v in [4, 8, 12, 16, 20, 24] {
            let r = (v - 2) / 2;
            let sol = build(&req(v, 3, r, 0)).unwrap();
            assert_eq!(sol.factors.len(), r);
        }
    }
}
