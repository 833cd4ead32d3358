//! Explicit 2-factorizations of a single `C_m[4]` block.
//!
//! A block has vertices `(layer, i)` with `layer` in 0..4 and position `i` in
//! `Z_m`, stored as flat id `4i + layer`. Depending on the construction the
//! layer is read as an element of `Z_4` or of GF(4) (2-bit encoding).
//!
//! * [`c4_block`]: four C4-factors, expanded from a 1-factorization of
//!   `C_m[2]` that is driven by a closed walk on the 2-subsets of {0,1,2,3}.
//! * [`cm_block`]: four Cm-factors over GF(4) x Z_m.
//! * [`mixed_block`]: two C4-factors and two Cm-factors over Z_4 x Z_m.
//! * [`switch_block`]: for odd m, a {C4^2, Cm^3}-factorization of
//!   `(C_m[4] - I) + mK_4` for a fixed matching `I`.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::algebra::{modulo, Gf4};
use crate::model::{Cycle, Document, Edge, EdgeSetDescriptor, OneFactor, TwoFactor, VertexId};
use crate::search::{self, FactorSpec, SearchInstance, SearchOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("m = {0} is too small, blocks need m >= 3")]
    TooSmall(usize),
    #[error("the switch block is only defined for odd m, got m = {0}")]
    EvenSwitch(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKind {
    C4Pure,
    CmPure,
    Mixed,
    Switch,
}

impl BlockKind {
    pub fn sub_factor_count(self) -> usize {
        match self {
            BlockKind::Switch => 5,
            _ => 4,
        }
    }

    /// (number of C4 sub-factors, number of Cm sub-factors)
    pub fn split(self) -> (usize, usize) {
        match self {
            BlockKind::C4Pure => (4, 0),
            BlockKind::CmPure => (0, 4),
            BlockKind::Mixed => (2, 2),
            BlockKind::Switch => (2, 3),
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockKind::C4Pure => "c4",
            BlockKind::CmPure => "cm",
            BlockKind::Mixed => "mixed",
            BlockKind::Switch => "switch",
        })
    }
}

impl FromStr for BlockKind {
    type Err = String;

    fn from_str(s: &str) -> Result<BlockKind, String> {
        match s {
            "c4" => Ok(BlockKind::C4Pure),
            "cm" => Ok(BlockKind::CmPure),
            "mixed" => Ok(BlockKind::Mixed),
            "switch" => Ok(BlockKind::Switch),
            other => Err(format!("unknown block kind `{other}` (expected c4, cm, mixed or switch)")),
        }
    }
}

/// A 2-factor of a block together with its (claimed) uniform cycle length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubFactor {
    pub cycle_length: usize,
    pub factor: TwoFactor,
}

/// An ordered factorization of one block; C4 sub-factors come first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockFactorization {
    pub m: usize,
    pub kind: BlockKind,
    pub sub_factors: Vec<SubFactor>,
    /// Present exactly for [`BlockKind::Switch`].
    pub removed_matching: Option<OneFactor>,
}

impl BlockFactorization {
    pub fn to_document(&self) -> Document {
        let (r, s) = self.kind.split();
        let factors: Vec<TwoFactor> = self.sub_factors.iter().map(|sf| sf.factor.clone()).collect();
        Document::from_factors(
            4 * self.m,
            self.m,
            Some(r),
            Some(s),
            &factors,
            self.removed_matching.as_ref(),
        )
    }
}

fn check_m(m: usize) -> Result<(), BlockError> {
    if m < 3 {
        Err(BlockError::TooSmall(m))
    } else {
        Ok(())
    }
}

/// Flat id of `(layer, position)` with the position reduced mod m.
fn vid(m: usize, layer: usize, pos: i64) -> VertexId {
    4 * modulo(pos, m) + layer % 4
}

fn cycle_of(m: usize, pts: &[(usize, i64)]) -> Cycle {
    Cycle::new(pts.iter().map(|&(l, p)| vid(m, l, p)).collect::<Vec<_>>())
        .expect("block constructions produce simple cycles")
}

fn sub_factor(cycle_length: usize, cycles: Vec<Cycle>, m: usize) -> SubFactor {
    SubFactor {
        cycle_length,
        factor: TwoFactor::new(cycles, 4 * m),
    }
}

/// A closed walk of length m on 2-subsets of {0,1,2,3} in which cyclically
/// consecutive subsets share exactly one element.
pub fn johnson_walk(m: usize) -> Result<Vec<[u8; 2]>, BlockError> {
    check_m(m)?;
    let mut walk = Vec::with_capacity(m);
    let rest = if m % 2 == 1 {
        walk.extend([[0, 1], [0, 2], [0, 3]]);
        m - 3
    } else {
        m
    };
    for k in 0..rest {
        walk.push(if k % 2 == 0 { [0, 1] } else { [0, 2] });
    }
    Ok(walk)
}

/// For each of the four factors of `C_m[2]`, its edge in every block as
/// `(layer at i, i, layer at i + 1)`.
fn cm2_factor_edges(m: usize) -> Result<Vec<Vec<(usize, usize, usize)>>, BlockError> {
    let walk = johnson_walk(m)?;
    let layer = |f: u8, i: usize| usize::from(!walk[i % m].contains(&f));
    Ok((0..4u8)
        .map(|f| {
            (0..m)
                .map(|i| (layer(f, i), i, 1 - layer(f, i + 1)))
                .collect()
        })
        .collect())
}

/// Four perfect matchings partitioning `C_m[2]`, vertex `(a, i)` = `2i + a`.
pub fn one_factorization_cm2(m: usize) -> Result<Vec<OneFactor>, BlockError> {
    Ok(cm2_factor_edges(m)?
        .into_iter()
        .map(|edges| {
            OneFactor::new(
                edges
                    .into_iter()
                    .map(|(a, i, b)| Edge::new(2 * i + a, 2 * ((i + 1) % m) + b))
                    .collect(),
            )
        })
        .collect())
}

/// C4-factorization of `C_m[4]`: every matching edge `(a,i)(b,i+1)` of
/// `C_m[2]` becomes the 4-cycle on layers `{2a, 2a+1}` x `{2b, 2b+1}`.
pub fn c4_block(m: usize) -> Result<BlockFactorization, BlockError> {
    let sub_factors = cm2_factor_edges(m)?
        .into_iter()
        .map(|edges| {
            let cycles = edges
                .into_iter()
                .map(|(a, i, b)| {
                    let (i, j) = (i as i64, i as i64 + 1);
                    cycle_of(m, &[(2 * a, i), (2 * b, j), (2 * a + 1, i), (2 * b + 1, j)])
                })
                .collect();
            sub_factor(4, cycles, m)
        })
        .collect();
    Ok(BlockFactorization {
        m,
        kind: BlockKind::C4Pure,
        sub_factors,
        removed_matching: None,
    })
}

/// Cm-factorization of `C_m[4]` over GF(4) x Z_m.
pub fn cm_block(m: usize) -> Result<BlockFactorization, BlockError> {
    cm_block_with(m, true)
}

/// The GF(4) construction without the `m = 1 (mod 3)` correction of the last
/// base vertex. Only useful to demonstrate that the correction is needed.
pub fn cm_block_unadjusted(m: usize) -> Result<BlockFactorization, BlockError> {
    cm_block_with(m, false)
}

/// Layers of the GF(4) base cycle: `x^i` at position i, with position m-1
/// moved to `x` when m = 1 (mod 3).
pub fn cm_base_layers(m: usize, adjust: bool) -> Vec<Gf4> {
    (0..m)
        .map(|i| {
            if adjust && m % 3 == 1 && i == m - 1 {
                Gf4::X
            } else {
                Gf4::pow_x(i)
            }
        })
        .collect()
}

fn cm_block_with(m: usize, adjust: bool) -> Result<BlockFactorization, BlockError> {
    check_m(m)?;
    let base = cm_base_layers(m, adjust);
    let sub_factors = [Gf4::ZERO, Gf4::ONE, Gf4::X, Gf4::X2]
        .into_iter()
        .map(|shift| {
            let cycles = [Gf4::ONE, Gf4::X, Gf4::X2, Gf4::ZERO]
                .into_iter()
                .map(|scale| {
                    let pts: Vec<(usize, i64)> = base
                        .iter()
                        .enumerate()
                        .map(|(i, &g)| ((scale * g + shift).bits() as usize, i as i64))
                        .collect();
                    cycle_of(m, &pts)
                })
                .collect();
            sub_factor(m, cycles, m)
        })
        .collect();
    Ok(BlockFactorization {
        m,
        kind: BlockKind::CmPure,
        sub_factors,
        removed_matching: None,
    })
}

/// The four Z_4-translates `C + (a, 0)` of a cycle given by its layers.
fn translates(m: usize, layers: &[usize]) -> Vec<Cycle> {
    (0..4)
        .map(|a| {
            let pts: Vec<(usize, i64)> = layers
                .iter()
                .enumerate()
                .map(|(i, &l)| ((l + a) % 4, i as i64))
                .collect();
            cycle_of(m, &pts)
        })
        .collect()
}

/// {C4^2, Cm^2}-factorization of `C_m[4]` over Z_4 x Z_m.
pub fn mixed_block(m: usize) -> Result<BlockFactorization, BlockError> {
    check_m(m)?;
    let mut c_layers: Vec<usize> = (0..m).map(|i| (2 * i) % 4).collect();
    if m % 2 == 1 {
        c_layers[m - 1] = 1;
    }
    let c_prime_layers = vec![0; m];

    // C* = ((0,1),(1,0),(2,1),(3,0)) translated along the positions.
    let c_star = |shift_layer: usize, i: i64| {
        let s = shift_layer;
        cycle_of(m, &[(s, i + 1), (1 + s, i), (2 + s, i + 1), (3 + s, i)])
    };
    let c_star_prime = |shift_layer: usize| {
        let s = shift_layer;
        let last = m as i64 - 1;
        cycle_of(m, &[(s, 0), (2 + s, last), (1 + s, last - 1), (3 + s, last)])
    };
    let f2 = |shift_layer: usize| -> Vec<Cycle> {
        if m % 2 == 0 {
            (0..m as i64).map(|i| c_star(shift_layer, i)).collect()
        } else {
            let mut cycles: Vec<Cycle> = (0..m as i64 - 2).map(|i| c_star(shift_layer, i)).collect();
            cycles.push(c_star_prime(shift_layer));
            cycles.push(c_star_prime(shift_layer + 2));
            cycles
        }
    };
    let sub_factors = vec![
        sub_factor(4, f2(0), m),
        sub_factor(4, f2(1), m),
        sub_factor(m, translates(m, &c_layers), m),
        sub_factor(m, translates(m, &c_prime_layers), m),
    ];
    Ok(BlockFactorization {
        m,
        kind: BlockKind::Mixed,
        sub_factors,
        removed_matching: None,
    })
}

/// The matching removed by [`switch_block`]: `(0,i)(2,i+1)` and
/// `(3,i)(1,i+1)` for every position i.
pub fn switch_matching(m: usize) -> OneFactor {
    let mut edges = Vec::with_capacity(2 * m);
    for i in 0..m as i64 {
        edges.push(Edge::new(vid(m, 0, i), vid(m, 2, i + 1)));
        edges.push(Edge::new(vid(m, 3, i), vid(m, 1, i + 1)));
    }
    OneFactor::new(edges)
}

/// {C4^2, Cm^3}-factorization of `(C_m[4] - I) + mK_4` for odd m, where
/// each K_4 sits on the four layers of one position.
pub fn switch_block(m: usize) -> Result<BlockFactorization, BlockError> {
    check_m(m)?;
    if m % 2 == 0 {
        return Err(BlockError::EvenSwitch(m));
    }
    let sq = |i: usize| (i * i) % 4;
    let mut u: Vec<usize> = vec![0; m];
    let mut v: Vec<usize> = (0..m).map(sq).collect();
    let mut y: Vec<usize> = (0..m).map(|i| (4 - sq(i)) % 4).collect();
    u[m - 1] = 3;
    v[m - 1] = 1;
    y[m - 1] = 0;

    let f4: Vec<Cycle> = (0..m as i64)
        .map(|i| cycle_of(m, &[(1, i), (2, i), (0, i + 1), (3, i + 1)]))
        .collect();
    let f5: Vec<Cycle> = (0..m as i64)
        .map(|i| cycle_of(m, &[(0, i), (1, i), (3, i), (2, i)]))
        .collect();
    let sub_factors = vec![
        sub_factor(4, f4, m),
        sub_factor(4, f5, m),
        sub_factor(m, translates(m, &u), m),
        sub_factor(m, translates(m, &v), m),
        sub_factor(m, translates(m, &y), m),
    ];
    Ok(BlockFactorization {
        m,
        kind: BlockKind::Switch,
        sub_factors,
        removed_matching: Some(switch_matching(m)),
    })
}

/// Builds the block of the requested kind.
pub fn block(m: usize, kind: BlockKind) -> Result<BlockFactorization, BlockError> {
    match kind {
        BlockKind::C4Pure => c4_block(m),
        BlockKind::CmPure => cm_block(m),
        BlockKind::Mixed => mixed_block(m),
        BlockKind::Switch => switch_block(m),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lemma7Outcome {
    Nonexistent,
    /// Three Cm-factors followed by one C4-factor of `C_m[4]`.
    FoundCounterexample(Vec<TwoFactor>),
    Timeout,
}

/// Exhaustive search for a {C4^1, Cm^3}-factorization of `C_m[4]`, odd m.
///
/// The first Cm-factor is pinned to contain the least cycle through vertex
/// (0,0). Layer permutations at each position are automorphisms of
/// `C_m[4]`, and every m-cycle of `C_m[4]` (m odd) meets each position once,
/// so every m-cycle through (0,0) is equivalent to that one.
pub fn lemma7_check(m: usize, time_limit: Duration) -> Result<Lemma7Outcome, BlockError> {
    check_m(m)?;
    if m % 2 == 0 {
        return Err(BlockError::EvenSwitch(m));
    }
    let mut inst = SearchInstance::new(
        EdgeSetDescriptor::CycleBlowup4(m),
        vec![FactorSpec::new(m, 3), FactorSpec::new(4, 1)],
        false,
    );
    inst.symmetry_breaking = true;
    inst.time_limit = Some(time_limit);
    let outcome = search::solve(&inst).expect("C_m[4] instance is well formed");
    Ok(match outcome {
        SearchOutcome::Found(found) => Lemma7Outcome::FoundCounterexample(found.factors),
        SearchOutcome::Unsat => Lemma7Outcome::Nonexistent,
        SearchOutcome::Timeout => Lemma7Outcome::Timeout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::verify_block;

    fn steps_ok(walk: &[[u8; 2]]) -> bool {
        let m = walk.len();
        (0..m).all(|i| {
            let (a, b) = (walk[i], walk[(i + 1) % m]);
            let shared = a.iter().filter(|x| b.contains(x)).count();
            shared == 1
        })
    }

    #[test]
    fn johnson_walk_examples() {
        assert_eq!(johnson_walk(3).unwrap(), vec![[0, 1], [0, 2], [0, 3]]);
        assert_eq!(johnson_walk(4).unwrap(), vec![[0, 1], [0, 2], [0, 1], [0, 2]]);
        let w5 = johnson_walk(5).unwrap();
        assert_eq!(w5, vec![[0, 1], [0, 2], [0, 3], [0, 1], [0, 2]]);
        for m in 3..40 {
            assert!(steps_ok(&johnson_walk(m).unwrap()), "m = {m}");
        }
        assert_eq!(johnson_walk(2), Err(BlockError::TooSmall(2)));
    }

    #[test]
    fn cm2_factor_zero_for_m3() {
        let f = one_factorization_cm2(3).unwrap();
        // (0,0)(1,1), (0,1)(1,2), (0,2)(1,0) with (a, i) = 2i + a.
        let want = OneFactor::new(vec![Edge::new(0, 3), Edge::new(2, 5), Edge::new(4, 1)]);
        assert_eq!(f[0], want);
    }

    #[test]
    fn cm2_factorization_partitions() {
        for m in 3..30 {
            let fs = one_factorization_cm2(m).unwrap();
            let mut all: Vec<Edge> = fs.iter().flat_map(|f| f.edges.iter().copied()).collect();
            all.sort();
            assert_eq!(all, EdgeSetDescriptor::CycleBlowup2(m).edges(), "m = {m}");
            for f in &fs {
                assert_eq!(f.len(), m);
                let mut hit = vec![0; 2 * m];
                for e in &f.edges {
                    hit[e.lo()] += 1;
                    hit[e.hi()] += 1;
                }
                assert!(hit.iter().all(|&h| h == 1));
            }
        }
    }

    #[test]
    fn every_cm2_block_contributes_one_edge_per_factor() {
        for m in 3..20 {
            for f in one_factorization_cm2(m).unwrap() {
                let mut per_block = vec![0; m];
                for e in &f.edges {
                    let (i, j) = (e.lo() / 2, e.hi() / 2);
                    let block = if (i + 1) % m == j { i } else { j };
                    per_block[block] += 1;
                }
                assert!(per_block.iter().all(|&c| c == 1));
            }
        }
    }

    #[test]
    fn blocks_verify_small() {
        for m in 3..12 {
            for kind in [BlockKind::C4Pure, BlockKind::CmPure, BlockKind::Mixed] {
                let bf = block(m, kind).unwrap();
                let rep = verify_block(&bf);
                assert!(rep.ok, "{kind:?} m={m}: {:?}", rep.violations);
            }
            if m % 2 == 1 {
                let rep = verify_block(&switch_block(m).unwrap());
                assert!(rep.ok, "switch m={m}: {:?}", rep.violations);
            }
        }
    }

    #[test]
    fn c4_block_counts() {
        for m in [3, 4, 7] {
            let bf = c4_block(m).unwrap();
            assert_eq!(bf.sub_factors.len(), 4);
            for sf in &bf.sub_factors {
                assert_eq!(sf.factor.cycles.len(), m);
                assert!(sf.factor.cycles.iter().all(|c| c.len() == 4));
            }
            let total: usize = bf.sub_factors.iter().map(|sf| sf.factor.edge_count()).sum();
            assert_eq!(total, 16 * m);
        }
    }

    #[test]
    fn cm_block_base_cycle() {
        // m = 3: base cycle ((1,0),(x,1),(x2,2)) = flat ids (1, 6, 11).
        let layers = cm_base_layers(3, true);
        let ids: Vec<usize> = layers.iter().enumerate().map(|(i, g)| 4 * i + g.bits() as usize).collect();
        assert_eq!(ids, vec![1, 6, 11]);
        let bf = cm_block(3).unwrap();
        let target = Cycle::new(vec![1, 6, 11]).unwrap();
        assert!(bf.sub_factors[0].factor.cycles.contains(&target));
        // m = 7 = 1 (mod 3): last base vertex is (x, 6), not (x^6, 6) = (1, 6).
        let layers = cm_base_layers(7, true);
        assert_eq!(layers[6], Gf4::X);
        assert_eq!(cm_base_layers(7, false)[6], Gf4::ONE);
    }

    #[test]
    fn cm_block_has_layer_zero_cycle() {
        for m in 3..10 {
            let bf = cm_block(m).unwrap();
            let zero = Cycle::new((0..m).map(|i| 4 * i).collect::<Vec<_>>()).unwrap();
            assert!(bf.sub_factors[0].factor.cycles.contains(&zero));
        }
    }

    #[test]
    fn unadjusted_cm_block_fails_for_m7() {
        let rep = verify_block(&cm_block_unadjusted(7).unwrap());
        assert!(!rep.ok);
    }

    #[test]
    fn mixed_block_difference_classes_m4() {
        let m = 4;
        let bf = mixed_block(m).unwrap();
        let diff = |e: Edge| {
            let (a, b) = (e.lo(), e.hi());
            let (la, pa, lb, pb) = (a % 4, a / 4, b % 4, b / 4);
            // orient from position i to i + 1
            let (from, to) = if (pa + 1) % m == pb { (la, lb) } else { (lb, la) };
            (to + 4 - from) % 4
        };
        let classes: Vec<Vec<usize>> = bf
            .sub_factors
            .iter()
            .map(|sf| {
                let mut d: Vec<usize> = sf.factor.edges().map(diff).collect();
                d.sort();
                d.dedup();
                d
            })
            .collect();
        assert_eq!(classes[0], vec![1, 3]);
        assert_eq!(classes[1], vec![1, 3]);
        assert_eq!(classes[2], vec![2]);
        assert_eq!(classes[3], vec![0]);
        let total: usize = bf.sub_factors.iter().map(|sf| sf.factor.edge_count()).sum();
        assert_eq!(total, 64);
    }

    #[test]
    fn switch_block_shape() {
        let bf = switch_block(3).unwrap();
        let lens: Vec<usize> = bf.sub_factors.iter().map(|s| s.cycle_length).collect();
        assert_eq!(lens, vec![4, 4, 3, 3, 3]);
        assert_eq!(bf.removed_matching.as_ref().unwrap().len(), 6);
        for m in (3..16).step_by(2) {
            let bf = switch_block(m).unwrap();
            // F5 lives inside the parts: edges 01, 13, 32, 20 of each K4.
            for c in &bf.sub_factors[1].factor.cycles {
                let p = c.vertices()[0] / 4;
                assert!(c.vertices().iter().all(|&x| x / 4 == p));
                assert_eq!(c.vertices().iter().map(|x| x % 4).collect::<Vec<_>>(), vec![0, 1, 3, 2]);
            }
            let rm = bf.removed_matching.as_ref().unwrap();
            for e in &rm.edges {
                assert!(crate::model::switch_matching_contains(m, *e));
                for sf in &bf.sub_factors {
                    assert!(sf.factor.edges().all(|x| x != *e));
                }
            }
        }
        assert_eq!(switch_block(4), Err(BlockError::EvenSwitch(4)));
    }

    #[test]
    fn no_mixed_c3_zero_time_limit_times_out() {
        assert_eq!(lemma7_check(3, Duration::ZERO).unwrap(), Lemma7Outcome::Timeout);
    }

    #[test]
    fn no_mixed_c3_nonexistent() {
        assert_eq!(
            lemma7_check(3, Duration::from_secs(60)).unwrap(),
            Lemma7Outcome::Nonexistent
        );
    }
}
