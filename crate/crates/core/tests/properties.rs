use std::time::Duration;

use hwp::blocks::{self, BlockKind};
use hwp::composer::{build, plan, Request, Route};
use hwp::model::{decode_solution, encode_solution, Cycle, EdgeSetDescriptor};
use hwp::search::{solve, solve_relabeled, FactorSpec, SearchInstance, SearchOutcome};
use hwp::verifier::{verify_block, verify_solution};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn distinct_vertices() -> impl Strategy<Value = Vec<usize>> {
    (3usize..12).prop_flat_map(|len| subsequence((0..40).collect::<Vec<_>>(), len).prop_shuffle())
}

proptest! {
    #[test]
    fn canonical_form_ignores_rotation_and_direction(raw in distinct_vertices(), rot in 0usize..12, rev: bool) {
        let base = Cycle::new(raw.clone()).unwrap();
        let mut moved = raw.clone();
        let k = rot % moved.len();
        moved.rotate_left(k);
        if rev {
            moved.reverse();
        }
        let other = Cycle::new(moved).unwrap();
        prop_assert_eq!(&base, &other);
        let v = base.vertices();
        prop_assert_eq!(v[0], *raw.iter().min().unwrap());
        prop_assert!(v[1] < v[v.len() - 1]);
        let mut a: Vec<_> = base.edges().collect();
        let mut b: Vec<_> = Cycle::new(raw).unwrap().edges().collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn duplicate_vertices_are_rejected(raw in distinct_vertices(), i in 0usize..12, j in 0usize..12) {
        let mut raw = raw;
        let (i, j) = (i % raw.len(), j % raw.len());
        prop_assume!(i != j);
        raw[j] = raw[i];
        prop_assert!(Cycle::new(raw).is_err());
    }
}

fn small_requests() -> impl Strategy<Value = Request> {
    (prop::sample::select(vec![3usize, 5, 7]), 1usize..=2).prop_flat_map(|(m, t)| {
        let v = 4 * m * t;
        let total = (v - 2) / 2;
        (0..=total).prop_map(move |r| Request::new(v, m, r, total - r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructive_plans_round_trip(rq in small_requests()) {
        let p = plan(&rq);
        prop_assume!(p.route.is_constructive());
        let sol = build(&rq).unwrap();
        let rep = verify_solution(&sol);
        prop_assert!(rep.ok);
        prop_assert_eq!((rep.r_found, rep.s_found), (rq.r, rq.s));
        let bytes = encode_solution(&sol);
        let back = decode_solution(&bytes).unwrap();
        prop_assert_eq!(encode_solution(&back), bytes.clone());
        prop_assert_eq!(encode_solution(&build(&rq).unwrap()), bytes);
    }

    #[test]
    fn non_constructive_plans_explain_themselves(rq in small_requests()) {
        let p = plan(&rq);
        if !p.route.is_constructive() {
            prop_assert!(matches!(p.route, Route::External | Route::Unsupported));
            prop_assert!(p.note.as_deref().is_some_and(|n| !n.is_empty()));
            prop_assert!(build(&rq).is_err());
        }
    }

    #[test]
    fn blocks_partition_their_ambient_graph(m in 3usize..=50, kind in prop::sample::select(vec![BlockKind::C4Pure, BlockKind::CmPure, BlockKind::Mixed, BlockKind::Switch])) {
        prop_assume!(kind != BlockKind::Switch || m % 2 == 1);
        let bf = blocks::block(m, kind).unwrap();
        let rep = verify_block(&bf);
        prop_assert!(rep.ok, "{}", rep.to_text());
        let lengths: Vec<usize> = bf.sub_factors.iter().map(|s| s.cycle_length).collect();
        let expected: Vec<usize> = match kind {
            BlockKind::C4Pure => vec![4; 4],
            BlockKind::CmPure => vec![m; 4],
            BlockKind::Mixed => vec![4, 4, m, m],
            BlockKind::Switch => vec![4, 4, m, m, m],
        };
        prop_assert_eq!(lengths, expected);
    }
}

fn no_split_instance() -> SearchInstance {
    SearchInstance::new(
        EdgeSetDescriptor::CycleBlowup4(3),
        vec![FactorSpec::new(3, 3), FactorSpec::new(4, 1)],
        false,
    )
    .with_time_limit(Duration::from_secs(60))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn three_plus_one_split_unsat_survives_relabeling(perm in Just((0..12).collect::<Vec<usize>>()).prop_shuffle()) {
        prop_assert_eq!(solve_relabeled(&no_split_instance(), &perm).unwrap(), SearchOutcome::Unsat);
    }

    #[test]
    fn kts9_found_under_relabeling(perm in Just((0..9).collect::<Vec<usize>>()).prop_shuffle()) {
        let inst = SearchInstance::new(EdgeSetDescriptor::CompleteGraph(9), vec![FactorSpec::new(3, 4)], false);
        prop_assert!(matches!(solve_relabeled(&inst, &perm).unwrap(), SearchOutcome::Found(_)));
    }
}

#[test]
fn three_plus_one_split_plain_search_agrees() {
    assert_eq!(solve(&no_split_instance()).unwrap(), SearchOutcome::Unsat);
}
