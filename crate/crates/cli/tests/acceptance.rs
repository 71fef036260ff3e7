//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines.

use papart::graph::{check_degree_conditions, random_dense_instance, Graph, Params};
use papart::{compound, io, oracle, papartition, repair, tiling, wreath};
use std::process::Command;
use std::time::Instant;

fn criterion(id: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {id} ({name}): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

/// Deterministic generator for raw graph sampling (splitmix64).
struct TestRng(u64);

impl TestRng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn chance(&mut self, p: f64) -> bool {
        (self.next_u64() as f64 / u64::MAX as f64) < p
    }
}

fn sweep_instances() -> Vec<(usize, Params, u64)> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    for &m in &[20usize, 30, 40, 50, 60] {
        for &ell in &[2usize, 3] {
            for &alpha in &[0.05f64, 0.1] {
                for _ in 0..10 {
                    out.push((m, Params::new(ell, alpha).unwrap(), seed));
                    seed += 1;
                }
            }
        }
    }
    out
}

#[test]
fn criterion_1_tiling_validity_sweep() {
    let started = Instant::now();
    let cases = sweep_instances();
    assert_eq!(cases.len(), 200);
    let mut verified = 0usize;
    let mut detail = String::new();
    for (m, params, seed) in &cases {
        let inst = random_dense_instance(*m, params, 0, *seed).unwrap();
        let report = check_degree_conditions(&inst, params);
        let guaranteed = report.blue_ok
            && *m as f64 > 2.0 * (params.ell as f64 - 1.0) / params.alpha;
        match tiling::almost_ell_decomposition(inst.blue(), params) {
            Ok(d) => {
                let ok_count = d.classes().len() == m / params.ell;
                let ok_verify = oracle::verify_decomposition(inst.blue(), params.ell, &d).pass();
                if ok_count && ok_verify {
                    verified += 1;
                } else {
                    detail = format!(
                        "m={m}, ell={}, alpha={}, seed={seed}: count ok={ok_count}, verify ok={ok_verify}",
                        params.ell, params.alpha
                    );
                }
            }
            Err(e) => {
                detail = format!(
                    "m={m}, ell={}, alpha={}, seed={seed}: {e} (guaranteed={guaranteed})",
                    params.ell, params.alpha
                );
                if guaranteed {
                    criterion(1, "tiling validity sweep", false, &detail);
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let ok = verified == 200 && elapsed.as_secs() < 60;
    criterion(
        1,
        "tiling validity sweep",
        ok,
        &format!("verified {verified}/200 in {elapsed:?}; last issue: {detail}"),
    );
}

#[test]
fn criterion_2_repair_pipeline() {
    let started = Instant::now();
    let params = Params::new(2, 0.2).unwrap();
    let opts = repair::DriverOptions {
        check_each_step: true,
    };
    let mut passed = 0usize;
    let mut detail = String::new();
    for seed in 0..100u64 {
        let inst = random_dense_instance(60, &params, 1, seed).unwrap();
        let report = check_degree_conditions(&inst, &params);
        if !report.red_ok {
            detail = format!("seed {seed}: generated red degree {} too high", report.max_red_degree);
            continue;
        }
        match repair::bag_free_decomposition_with(&inst, &params, opts) {
            Ok((d, _trace)) => {
                if oracle::verify_bag_free(&inst, &d).pass()
                    && oracle::verify_decomposition(inst.blue(), 2, &d).pass()
                {
                    passed += 1;
                } else {
                    detail = format!("seed {seed}: verifier rejected the driver output");
                }
            }
            Err(e) => detail = format!("seed {seed}: {e}"),
        }
    }
    let elapsed = started.elapsed();
    let ok = passed == 100 && elapsed.as_secs() < 120;
    criterion(
        2,
        "repair pipeline with per-step differential",
        ok,
        &format!("passed {passed}/100 in {elapsed:?}; {detail}"),
    );
}

#[test]
fn criterion_3_compound_partner_bound() {
    let mut violations = 0usize;
    let mut detail = String::new();
    for (m, params, seed) in &sweep_instances() {
        let inst = random_dense_instance(*m, params, 0, *seed).unwrap();
        let Ok(d) = tiling::almost_ell_decomposition(inst.blue(), params) else {
            continue;
        };
        let bound = compound::compound_partners_lower_bound(*m, params);
        for c in d.classes() {
            let partners = compound::compound_partners(inst.blue(), &d, c)
                .unwrap()
                .len();
            if (partners as f64) < bound - 1e-9 {
                violations += 1;
                detail = format!(
                    "m={m}, ell={}, alpha={}, seed={seed}: class {c} has {partners} partners, bound {bound}",
                    params.ell, params.alpha
                );
            }
        }
    }
    criterion(
        3,
        "compound partner lower bound",
        violations == 0,
        &format!("{violations} violations; {detail}"),
    );
}

#[test]
fn criterion_4_papartition_small_counts() {
    let started = Instant::now();

    let fam4 = papartition::construct_papartitions(4, 2, 2, None).unwrap();
    let mut pairs_used: std::collections::BTreeSet<Vec<usize>> = Default::default();
    for p in &fam4 {
        for b in p.blocks() {
            pairs_used.insert(b.clone());
        }
    }
    let ok4 = fam4.len() == 3
        && pairs_used.len() == 6
        && oracle::verify_papartition_family(4, 2, 2, &fam4).pass();

    let fam6 = papartition::construct_papartitions(6, 2, 2, None).unwrap();
    let mut pairs6: std::collections::BTreeSet<Vec<usize>> = Default::default();
    for p in &fam6 {
        for b in p.blocks() {
            pairs6.insert(b.clone());
        }
    }
    let ok6 = fam6.len() == 7
        && pairs6.len() == 14
        && oracle::verify_papartition_family(6, 2, 2, &fam6).pass();

    let elapsed = started.elapsed();
    let ok = ok4 && ok6 && elapsed.as_secs() < 10;
    criterion(
        4,
        "exact small papartition counts",
        ok,
        &format!(
            "n=4: {} papartitions on {} pairs; n=6: {} papartitions on {} pairs; {elapsed:?}",
            fam4.len(),
            pairs_used.len(),
            fam6.len(),
            pairs6.len()
        ),
    );
}

#[test]
fn criterion_5_meta_graph_degrees() {
    let mut ok = true;
    let mut detail = String::new();
    for &n in &[6usize, 7, 8] {
        for &k in &[2usize, 3] {
            let inst = papartition::build_meta_instance(n, k).unwrap();
            let universe = papartition::SubsetUniverse::new(n, k).unwrap();
            let subsets = universe.all_subsets();
            let expected_blue = papartition::binomial(n - k, k) as usize;
            for v in 0..inst.m() {
                if inst.blue().degree(v) != expected_blue {
                    ok = false;
                    detail = format!(
                        "n={n}, k={k}: blue degree {} at vertex {v}, expected {expected_blue}",
                        inst.blue().degree(v)
                    );
                }
                let brute_red = subsets
                    .iter()
                    .enumerate()
                    .filter(|(w, s)| {
                        *w != v
                            && 2 * s.iter().filter(|x| subsets[v].contains(x)).count() > k
                    })
                    .count();
                if inst.red().degree(v) != brute_red {
                    ok = false;
                    detail = format!(
                        "n={n}, k={k}: red degree {} at vertex {v}, brute force {brute_red}",
                        inst.red().degree(v)
                    );
                }
            }
            if k == 2 && inst.red().edge_count() != 0 {
                ok = false;
                detail = format!("n={n}, k=2: red graph not empty");
            }
        }
    }
    criterion(5, "meta-graph degrees", ok, &detail);
}

#[test]
fn criterion_6_oracle_agreement() {
    let params = Params::new(2, 0.2).unwrap();
    let mut rng = TestRng(0x5eed);
    let mut checked = 0usize;
    let mut constructed = 0usize;
    let mut ok = true;
    let mut detail = String::new();
    let probabilities = [0.1f64, 0.3, 0.5, 0.7, 0.9];
    'outer: for round in 0..150usize {
        for m in 1..=7usize {
            for &p in &probabilities {
                let mut edges = Vec::new();
                for u in 0..m {
                    for v in (u + 1)..m {
                        if rng.chance(p) {
                            edges.push((u, v));
                        }
                    }
                }
                let g = Graph::from_edges(m, &edges);
                checked += 1;
                if let Ok(d) = tiling::almost_ell_decomposition(&g, &params) {
                    constructed += 1;
                    if !oracle::verify_decomposition(&g, 2, &d).pass() {
                        ok = false;
                        detail = format!("round {round}, m={m}, p={p}: verifier rejected");
                        break 'outer;
                    }
                    if oracle::exhaustive_tiling(&g, 2).unwrap().is_none() {
                        ok = false;
                        detail = format!(
                            "round {round}, m={m}, p={p}: exhaustive search found nothing"
                        );
                        break 'outer;
                    }
                }
            }
        }
    }
    let ok = ok && checked >= 5000;
    criterion(
        6,
        "oracle agreement sweep",
        ok,
        &format!("{checked} graphs sampled, {constructed} constructions; {detail}"),
    );
}

#[test]
fn criterion_7_wreath_explorer() {
    let started = Instant::now();
    let w = |order: &[usize], start, k| wreath::Wreath::new(order.to_vec(), start, k).unwrap();
    let exp1 = wreath::wreath_expand(&w(&[1, 2, 3, 4], 0, 2)).unwrap();
    let exp2 = wreath::wreath_expand(&w(&[1, 2, 3, 4, 5], 0, 2)).unwrap();
    let exp3 = wreath::wreath_expand(&w(&[1, 2, 3, 4, 5, 6], 0, 4)).unwrap();
    let expansions_ok = exp1 == vec![vec![1, 2], vec![3, 4]]
        && exp2
            == vec![
                vec![1, 2],
                vec![3, 4],
                vec![1, 5],
                vec![2, 3],
                vec![4, 5],
            ]
        && exp3 == vec![vec![1, 2, 3, 4], vec![1, 2, 5, 6], vec![3, 4, 5, 6]];

    let mut searches_ok = true;
    let mut detail = String::new();
    for &(n, k) in &[(3usize, 3usize), (4, 2), (5, 2)] {
        match wreath::wreath_decomposition_search(n, k, 1_000_000) {
            Ok(Some(ws)) => {
                if !wreath::verify_wreath_decomposition(n, k, &ws).pass() {
                    searches_ok = false;
                    detail = format!("n={n}, k={k}: found decomposition fails verification");
                }
            }
            other => {
                searches_ok = false;
                detail = format!("n={n}, k={k}: search returned {other:?}");
            }
        }
    }
    let elapsed = started.elapsed();
    let ok = expansions_ok && searches_ok && elapsed.as_secs() < 30;
    criterion(
        7,
        "wreath explorer",
        ok,
        &format!("expansions ok={expansions_ok}; {detail}; {elapsed:?}"),
    );
}

fn run_cli(args: &[&str]) -> (String, String, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_papart"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code(),
    )
}

#[test]
fn criterion_8_determinism_and_roundtrips() {
    let mut ok = true;
    let mut detail = String::new();

    // byte-identical re-runs of every generating subcommand
    let reruns: &[&[&str]] = &[
        &["gen", "--m", "40", "--ell", "2", "--alpha", "0.1", "--red-max", "1", "--seed", "7"],
        &["gen", "--m", "30", "--ell", "3", "--alpha", "0.05", "--seed", "3", "--format", "json"],
        &["papartitions", "--n", "6", "--k", "2", "--ell", "2"],
        &["wreath", "--n", "4", "--k", "2"],
    ];
    for args in reruns {
        let first = run_cli(args);
        let second = run_cli(args);
        if first != second {
            ok = false;
            detail = format!("re-run of {args:?} differed");
        }
        if first.2 != Some(0) {
            ok = false;
            detail = format!("{args:?} exited with {:?}: {}", first.2, first.1);
        }
    }

    // parse∘print identity on every format, text and JSON
    for seed in [1u64, 2, 3] {
        let params = Params::new(2, 0.2).unwrap();
        let inst = random_dense_instance(24, &params, 1, seed).unwrap();
        let text = io::print_instance(&inst, &params);
        let (back, back_p) = io::parse_instance(&text).unwrap();
        if back != inst || back_p != params {
            ok = false;
            detail = format!("instance text round-trip failed at seed {seed}");
        }
        let json = io::print_instance_json(&inst, &params);
        let (back, _) = io::parse_instance_json(&json).unwrap();
        if back != inst {
            ok = false;
            detail = format!("instance json round-trip failed at seed {seed}");
        }

        let (d, _) = repair::bag_free_decomposition(&inst, &params).unwrap();
        if io::parse_decomposition(&io::print_decomposition(&d)).unwrap() != d
            || io::parse_decomposition_json(&io::print_decomposition_json(&d)).unwrap() != d
        {
            ok = false;
            detail = format!("decomposition round-trip failed at seed {seed}");
        }
    }

    let fam = papartition::construct_papartitions(6, 2, 2, None).unwrap();
    if io::parse_papartitions(&io::print_papartitions(&fam)).unwrap() != fam
        || io::parse_papartitions_json(&io::print_papartitions_json(&fam)).unwrap() != fam
    {
        ok = false;
        detail = "papartition round-trip failed".into();
    }

    let ws = wreath::wreath_decomposition_search(5, 2, 100_000)
        .unwrap()
        .unwrap();
    if io::parse_wreaths(&io::print_wreaths(5, 2, &ws)).unwrap() != (5, 2, ws.clone())
        || io::parse_wreaths_json(&io::print_wreaths_json(5, 2, &ws)).unwrap() != (5, 2, ws)
    {
        ok = false;
        detail = "wreath round-trip failed".into();
    }

    criterion(8, "determinism and round-trips", ok, &detail);
}
