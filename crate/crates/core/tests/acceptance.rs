//! Acceptance suite. Every criterion is one test and prints one
//! `criterion N: PASS|FAIL` line straight to stdout (bypassing capture).
//! All checks are exact.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hwp::algebra::Gf4;
use hwp::blocks::{self, BlockKind, Lemma7Outcome};
use hwp::composer::{build, check_necessary, k24_solution, plan, Builder, Request, Route};
use hwp::model::{encode_solution, Cycle, Document, Edge, Solution};
use hwp::outer::{Capability, ProviderSource};
use hwp::verifier::{verify_block, verify_solution};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

fn report(criterion: &str, ok: bool, detail: &str) {
    let line = format!(
        "criterion {criterion}: {} {detail}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(ok, "criterion {criterion}: {detail}");
}

fn req(v: usize, m: usize, r: usize, s: usize) -> Request {
    Request::new(v, m, r, s)
}

/// Builds `req` and checks the verifier's counts against the request.
fn builds_and_verifies(request: &Request) -> Result<Solution, String> {
    let sol = build(request).map_err(|e| format!("{request}: {e}"))?;
    let rep = verify_solution(&sol);
    if !rep.ok || rep.r_found != request.r || rep.s_found != request.s {
        return Err(format!("{request}: {}", rep.to_text()));
    }
    let v = request.v;
    let edges: usize = sol.factors.iter().map(|f| f.edge_count()).sum::<usize>() + sol.one_factor.len();
    if edges != v * (v - 1) / 2 || sol.one_factor.len() != v / 2 {
        return Err(format!("{request}: edge conservation fails"));
    }
    Ok(sol)
}

#[test]
fn criterion_01_block_sweep() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for m in 3..=30 {
        for kind in [BlockKind::C4Pure, BlockKind::CmPure, BlockKind::Mixed] {
            let ok = blocks::block(m, kind).map(|b| verify_block(&b).ok).unwrap_or(false);
            if !ok {
                failures.push(format!("{kind}({m})"));
            }
        }
    }
    for m in (3..=29).step_by(2) {
        let ok = blocks::switch_block(m).map(|b| verify_block(&b).ok).unwrap_or(false);
        if !ok {
            failures.push(format!("switch({m})"));
        }
    }
    let elapsed = start.elapsed();
    report(
        "1",
        failures.is_empty() && elapsed < Duration::from_secs(10),
        &format!("block sweep m=3..30, switch odd m=3..29, {:.2}s, failures {failures:?}", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_02_cm_adjustment() {
    let adjusted: Vec<bool> = [4, 7, 10, 13]
        .iter()
        .map(|&m| verify_block(&blocks::cm_block(m).unwrap()).ok)
        .collect();
    let unadjusted_m7 = verify_block(&blocks::cm_block_unadjusted(7).unwrap()).ok;
    report(
        "2",
        adjusted.iter().all(|&b| b) && !unadjusted_m7,
        &format!("adjusted m=4,7,10,13 verify {adjusted:?}; unadjusted m=7 verifies: {unadjusted_m7}"),
    );
}

/// Multiplies the GF(4) layer of every vertex by x (layer encoding 0, 1, x, x^2 -> 0..3).
fn times_x(id: usize) -> usize {
    let g = Gf4::from_bits((id % 4) as u8).unwrap();
    4 * (id / 4) + (Gf4::X * g).bits() as usize
}

#[test]
fn criterion_03_cm_automorphism() {
    let mut failures = Vec::new();
    for m in 3..=20 {
        let bf = blocks::cm_block(m).unwrap();
        let cycle_set = |i: usize| -> BTreeSet<Cycle> { bf.sub_factors[i].factor.cycles.iter().cloned().collect() };
        let image = |i: usize| -> BTreeSet<Cycle> {
            bf.sub_factors[i].factor.cycles.iter().map(|c| c.map(times_x).unwrap()).collect()
        };
        if image(0) != cycle_set(0) {
            failures.push(format!("m={m}: F not fixed"));
        }
        let others: BTreeSet<BTreeSet<Cycle>> = (1..4).map(cycle_set).collect();
        let images: BTreeSet<BTreeSet<Cycle>> = (1..4).map(image).collect();
        if others != images {
            failures.push(format!("m={m}: translates not permuted"));
        }
    }
    report("3", failures.is_empty(), &format!("x-multiplication on m=3..20, failures {failures:?}"));
}

#[test]
fn criterion_04_no_mixed_split_m3() {
    let start = Instant::now();
    let out = blocks::lemma7_check(3, Duration::from_secs(60)).unwrap();
    let elapsed = start.elapsed();
    report(
        "4 (m=3)",
        out == Lemma7Outcome::Nonexistent && elapsed < Duration::from_secs(60),
        &format!("lemma7_check(3) = {out:?} in {:.3}s", elapsed.as_secs_f64()),
    );
}

/// Slow: the exhaustive m = 5 search takes tens of seconds.
#[test]
fn criterion_04_no_mixed_split_m5() {
    let start = Instant::now();
    let out = blocks::lemma7_check(5, Duration::from_secs(15 * 60)).unwrap();
    let elapsed = start.elapsed();
    let label = match &out {
        Lemma7Outcome::Nonexistent => "Nonexistent",
        Lemma7Outcome::FoundCounterexample(_) => "FoundCounterexample",
        Lemma7Outcome::Timeout => "Timeout",
    };
    report(
        "4 (m=5)",
        out == Lemma7Outcome::Nonexistent,
        &format!("lemma7_check(5) = {label} in {:.1}s", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_05_t1_sweep() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut built = 0;
    for m in (3..=15).step_by(2) {
        let v = 4 * m;
        let total = (v - 2) / 2;
        let mut constructive = BTreeSet::new();
        for r in 0..=total {
            let rq = req(v, m, r, total - r);
            if plan(&rq).route.is_constructive() {
                constructive.insert(r);
                match builds_and_verifies(&rq) {
                    Ok(_) => built += 1,
                    Err(e) => failures.push(e),
                }
            }
        }
        let mut required: BTreeSet<usize> = (1..=2 * m - 1).step_by(2).collect();
        required.insert(2);
        required.insert(total); // s = 0
        let missing: Vec<_> = required.difference(&constructive).collect();
        if !missing.is_empty() {
            failures.push(format!("m={m}: not constructive for r in {missing:?}"));
        }
    }
    let elapsed = start.elapsed();
    report(
        "5",
        failures.is_empty() && elapsed < Duration::from_secs(60),
        &format!("{built} builds for v=4m, m=3..15 odd, {:.2}s, failures {failures:?}", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_06_t3_composition() {
    let start = Instant::now();
    let builder = Builder::default();
    let kts9 = builder.chain.provide(&Capability::complete(9, 3));
    let searched = matches!(&kts9, Ok(f) if f.source == ProviderSource::Search);
    let mut failures = Vec::new();
    let mut odd_built = Vec::new();
    let mut even_built = Vec::new();
    for r in 0..=17 {
        let rq = req(36, 3, r, 17 - r);
        let p = plan(&rq);
        if r % 2 == 1 && !p.route.is_constructive() {
            failures.push(format!("r={r}: {}", p.report()));
            continue;
        }
        if r > 0 && p.route.is_constructive() {
            if r % 2 == 0 {
                if p.route != Route::AllC4 && !p.ingredients.contains(&Capability::complete(9, 3)) {
                    failures.push(format!("r={r}: plan does not use the K_9 ingredient"));
                }
                even_built.push(r);
            } else {
                odd_built.push(r);
            }
            if let Err(e) = builds_and_verifies(&rq) {
                failures.push(e);
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        "6",
        searched && failures.is_empty() && elapsed < Duration::from_secs(60),
        &format!(
            "v=36 m=3: K_9 C3-factorization by search: {searched}; odd r {odd_built:?}; even r {even_built:?}; {:.2}s; failures {failures:?}",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_07_k24_table() {
    let sol = k24_solution();
    let rep = verify_solution(&sol);
    let listed = [
        (0, 22),
        (1, 23),
        (2, 11),
        (3, 12),
        (4, 13),
        (5, 14),
        (6, 20),
        (7, 21),
        (8, 17),
        (9, 18),
        (10, 19),
        (15, 16),
    ];
    let expected: BTreeSet<Edge> = listed.iter().map(|&(a, b)| Edge::new(a, b)).collect();
    let found: BTreeSet<Edge> = sol.one_factor.edges.iter().copied().collect();
    report(
        "7",
        rep.ok && rep.r_found == 4 && rep.s_found == 7 && found == expected && sol.one_factor.len() == 12,
        &format!("K24 table ok={} r_found={} s_found={} matching exact: {}", rep.ok, rep.r_found, rep.s_found, found == expected),
    );
}

fn hwp_binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hwp"))
}

#[test]
fn criterion_08_k48() {
    let cache = tempfile::tempdir().unwrap();
    let out_path = cache.path().join("hwp12.json");
    let run_ingredient = || {
        let start = Instant::now();
        let status = hwp_binary()
            .args(["ingredient", "--type", "hwp12", "--cache"])
            .arg(cache.path())
            .arg("--out")
            .arg(&out_path)
            .status()
            .unwrap();
        (status.success(), start.elapsed(), std::fs::read(&out_path).unwrap_or_default())
    };
    let (first_ok, first_time, first_bytes) = run_ingredient();
    let cache_file = cache
        .path()
        .join(format!("{}.json", hwp::search::instance_hash("hwp:v=12:m=3:r=1:s=4")));
    let cached = cache_file.exists();
    let (second_ok, _, second_bytes) = run_ingredient();

    let mut failures = Vec::new();
    for r in (8..=20).step_by(2) {
        let rq = req(48, 3, r, 23 - r);
        let p = plan(&rq);
        if p.route != Route::K48Compose {
            failures.push(format!("r={r}: {}", p.report()));
            continue;
        }
        if let Err(e) = builds_and_verifies(&rq) {
            failures.push(e);
        }
    }
    report(
        "8",
        first_ok
            && first_time < Duration::from_secs(120)
            && cached
            && second_ok
            && first_bytes == second_bytes
            && failures.is_empty(),
        &format!(
            "ingredient search {:.2}s, cached: {cached}, reread identical: {}; K48 even r=8..20 failures {failures:?}",
            first_time.as_secs_f64(),
            first_bytes == second_bytes
        ),
    );
}

#[test]
fn criterion_09_truth_table() {
    let mut unsupported = BTreeSet::new();
    let mut failures = Vec::new();
    let mut statuses: BTreeMap<&'static str, usize> = BTreeMap::new();
    for v in (4..=120).step_by(4) {
        for m in (3..=v).step_by(2) {
            if v % m != 0 {
                continue;
            }
            let total = (v - 2) / 2;
            for r in 0..=total {
                let rq = req(v, m, r, total - r);
                if check_necessary(&rq).is_err() {
                    failures.push(format!("{rq}: necessary conditions should hold"));
                    continue;
                }
                let p = plan(&rq);
                *statuses.entry(p.route.name()).or_default() += 1;
                match p.route {
                    Route::Unsupported => {
                        unsupported.insert((v, m, r));
                    }
                    Route::Infeasible => failures.push(format!("{rq}: wrongly infeasible")),
                    route if route.is_constructive() => {
                        if let Err(e) = builds_and_verifies(&rq) {
                            failures.push(e);
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    let mut expected = BTreeSet::new();
    for m in (3..=15).step_by(2) {
        expected.insert((8 * m, m, 2));
    }
    expected.insert((24, 3, 6));
    expected.insert((48, 3, 6));
    let corner = plan(&req(12, 3, 4, 1)).route;
    report(
        "9",
        failures.is_empty() && unsupported == expected && corner == Route::External,
        &format!(
            "statuses {statuses:?}; unsupported set matches: {}; (12;4,1) is {corner}; failures {failures:?}",
            unsupported == expected
        ),
    );
}

/// One random edit of a solution document. Returns `None` when the drawn
/// edit happens to be a no-op on the edge multiset, so the caller redraws.
fn mutate(doc: &Document, rng: &mut StdRng) -> Option<Document> {
    let mut d = doc.clone();
    let f = rng.random_range(0..d.factors.len());
    let c = rng.random_range(0..d.factors[f].cycles.len());
    match rng.random_range(0..4) {
        0 => {
            // delete an edge: from the matching, or by shortcutting a cycle vertex
            if rng.random_bool(0.5) {
                let matching = d.one_factor.as_mut()?;
                let i = rng.random_range(0..matching.len());
                matching.remove(i);
            } else {
                let cycle = &mut d.factors[f].cycles[c];
                let i = rng.random_range(0..cycle.len());
                cycle.remove(i);
            }
        }
        1 => {
            // duplicate an edge already used by a factor into the matching
            let cycle = &d.factors[f].cycles[c];
            let (a, b) = (cycle[0], cycle[1]);
            d.one_factor.as_mut()?.push([a.min(b), a.max(b)]);
        }
        2 => {
            let cycle = &mut d.factors[f].cycles[c];
            let i = rng.random_range(0..cycle.len());
            let j = rng.random_range(0..cycle.len());
            let before = Cycle::new(cycle.clone()).ok()?;
            cycle.swap(i, j);
            if Cycle::new(cycle.clone()).ok()? == before {
                return None;
            }
        }
        _ => {
            d.factors[f].cycles.remove(c);
        }
    }
    Some(d)
}

fn rejected(doc: &Document) -> bool {
    match doc.to_solution_unchecked() {
        Ok(sol) => !verify_solution(&sol).ok,
        Err(_) => true,
    }
}

#[test]
fn criterion_10_mutation_suite() {
    let sol = build(&req(28, 7, 5, 8)).unwrap();
    let doc = Document::from_bytes(&encode_solution(&sol)).unwrap();
    let baseline_ok = !rejected(&doc);
    let mut rng = StdRng::seed_from_u64(0x4c57_0028);
    let mut tried = 0;
    let mut accepted = Vec::new();
    while tried < 100 {
        let Some(m) = mutate(&doc, &mut rng) else { continue };
        tried += 1;
        if !rejected(&m) {
            accepted.push(tried);
        }
    }
    report(
        "10",
        baseline_ok && accepted.is_empty(),
        &format!("baseline verifies: {baseline_ok}; {tried} mutations, accepted: {accepted:?}"),
    );
}

/// Every artifact the suite produces, keyed by name.
fn artifacts() -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for m in (3..=9).step_by(2) {
        for kind in [BlockKind::C4Pure, BlockKind::CmPure, BlockKind::Mixed, BlockKind::Switch] {
            let doc = blocks::block(m, kind).unwrap().to_document();
            out.insert(format!("block-{kind}-{m}"), doc.to_bytes());
        }
    }
    let mut requests = vec![req(28, 7, 5, 8), req(12, 3, 2, 3), req(20, 5, 9, 0), req(24, 3, 4, 7), req(48, 3, 8, 15)];
    requests.extend((1..=17).map(|r| req(36, 3, r, 17 - r)));
    for rq in requests {
        let p = plan(&rq);
        out.insert(format!("plan-{}-{}-{}-{}", rq.v, rq.m, rq.r, rq.s), p.report().into_bytes());
        if p.route.is_constructive() {
            let sol = build(&rq).unwrap();
            out.insert(format!("solution-{}-{}-{}-{}", rq.v, rq.m, rq.r, rq.s), encode_solution(&sol));
        }
    }
    out
}

fn cli_bytes(args: &[&str]) -> Vec<u8> {
    let out = hwp_binary().args(args).arg("--out").arg("-").output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn criterion_11_determinism() {
    let first = artifacts();
    let second = artifacts();
    let in_process = first == second;

    // fresh processes have empty memo tables, so they recompute everything
    let cli_cases: [(&str, Vec<&str>); 5] = [
        ("solution-28-7-5-8", vec!["build", "--v", "28", "--m", "7", "--r", "5", "--s", "8"]),
        ("solution-36-3-5-12", vec!["build", "--v", "36", "--m", "3", "--r", "5", "--s", "12"]),
        ("solution-48-3-8-15", vec!["build", "--v", "48", "--m", "3", "--r", "8", "--s", "15"]),
        ("block-mixed-5", vec!["block", "--m", "5", "--kind", "mixed"]),
        ("block-switch-7", vec!["block", "--m", "7", "--kind", "switch"]),
    ];
    let mut mismatched = Vec::new();
    for (name, args) in &cli_cases {
        let a = cli_bytes(args);
        let b = cli_bytes(args);
        if a != b || first.get(*name) != Some(&a) {
            mismatched.push(*name);
        }
    }
    let kts_a = cli_bytes(&["ingredient", "--type", "kts9"]);
    let kts_b = cli_bytes(&["ingredient", "--type", "kts9"]);
    if kts_a != kts_b {
        mismatched.push("ingredient-kts9");
    }

    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-artifacts");
    std::fs::create_dir_all(&dir).unwrap();
    let mut manifest = String::new();
    for (name, bytes) in &first {
        std::fs::write(dir.join(name), bytes).unwrap();
        manifest.push_str(&format!("{}  {name}\n", hwp::search::instance_hash(&String::from_utf8_lossy(bytes))));
    }
    std::fs::write(dir.join("MANIFEST"), manifest).unwrap();

    report(
        "11",
        in_process && mismatched.is_empty(),
        &format!(
            "{} artifacts identical across runs: {in_process}; fresh-process mismatches {mismatched:?}; written to {}",
            first.len(),
            dir.display()
        ),
    );
}
