//! Independent ground truth: brute-force verifiers for every artifact the
//! constructive modules produce, and exhaustive backtracking constructors
//! for small instances used as fallbacks and in differential tests.
//!
//! Nothing here calls into the constructive code paths it checks; the
//! verifiers re-derive every property from the raw definitions.

use crate::graph::{Graph, TwoColoredInstance};
use crate::papartition::{binomial, Papartition};
use crate::tiling::{Class, Decomposition};
use thiserror::Error;

/// Outcome of a verification: a list of violations (empty means pass)
/// plus informational notes that do not affect the verdict.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    fn violation(&mut self, msg: String) {
        self.violations.push(msg);
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        write!(f, "{}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has {m} vertices, above the exhaustive-search cap {cap}")]
    CapExceeded { m: usize, cap: usize },
}

/// Checks that `d` is a valid almost-ℓ-decomposition of `g`: ⌊m/ℓ⌋
/// classes of ℓ distinct in-range vertices, pairwise disjoint, each a
/// clique in `g`, and a leftover holding exactly the unused vertices.
pub fn verify_decomposition(g: &Graph, ell: usize, d: &Decomposition) -> Report {
    let mut report = Report::default();
    let m = g.m();
    let expected = m / ell;
    if d.classes().len() != expected {
        report.violation(format!(
            "expected {expected} classes for m={m}, ell={ell}, found {}",
            d.classes().len()
        ));
    }
    let mut holder: Vec<Option<usize>> = vec![None; m];
    for (i, class) in d.classes().iter().enumerate() {
        if class.len() != ell {
            report.violation(format!("class {class} has size {}, expected {ell}", class.len()));
        }
        for &v in class.vertices() {
            if v >= m {
                report.violation(format!("class {class} contains out-of-range vertex {v}"));
                continue;
            }
            match holder[v] {
                Some(j) => report.violation(format!(
                    "vertex {v} appears in class {} and class {class}",
                    d.classes()[j]
                )),
                None => holder[v] = Some(i),
            }
        }
        let ids = class.vertices();
        for x in 0..ids.len() {
            for y in (x + 1)..ids.len() {
                if ids[x] < m && ids[y] < m && !g.has_edge(ids[x], ids[y]) {
                    report.violation(format!(
                        "class {class} is not a clique: missing edge ({}, {})",
                        ids[x], ids[y]
                    ));
                }
            }
        }
    }
    let mut expected_leftover: Vec<usize> =
        (0..m).filter(|&v| holder[v].is_none()).collect();
    expected_leftover.sort_unstable();
    if d.leftover() != expected_leftover.as_slice() {
        report.violation(format!(
            "leftover {:?} does not match the unclassed vertices {:?}",
            d.leftover(),
            expected_leftover
        ));
    }
    if d.leftover().len() != m % ell && d.classes().len() == expected {
        report.violation(format!(
            "leftover has {} vertices, expected {}",
            d.leftover().len(),
            m % ell
        ));
    }
    report
}

/// Exhaustive bag scan, re-derived from the definition: for every pair of
/// vertex-disjoint red edges, checks whether both cross between the same
/// two classes. Independent of the incremental check in the repair
/// driver.
pub fn verify_bag_free(inst: &TwoColoredInstance, d: &Decomposition) -> Report {
    let mut report = Report::default();
    let m = inst.m();
    let mut class_of: Vec<Option<usize>> = vec![None; m];
    for (i, class) in d.classes().iter().enumerate() {
        for &v in class.vertices() {
            if v < m {
                class_of[v] = Some(i);
            }
        }
    }
    let red_edges = inst.red().edges();
    for (i, &(a, b)) in red_edges.iter().enumerate() {
        for &(c, e) in &red_edges[i + 1..] {
            if a == c || a == e || b == c || b == e {
                continue;
            }
            let (Some(ca), Some(cb), Some(cc), Some(ce)) =
                (class_of[a], class_of[b], class_of[c], class_of[e])
            else {
                continue;
            };
            if ca == cb || cc == ce {
                continue;
            }
            let same_pair = (ca == cc && cb == ce) || (ca == ce && cb == cc);
            if same_pair {
                report.violation(format!(
                    "bag: classes {} / {} with red edges ({a}, {b}) and ({c}, {e})",
                    d.classes()[ca.min(cb)],
                    d.classes()[ca.max(cb)]
                ));
            }
        }
    }
    report
}

/// Checks a papartition family: block shape, disjointness inside every
/// papartition, no k-subset repeated across the family, no two members
/// too close, and the family size against ⌊C(n,k)/ℓ⌋. Reaching the
/// maximum is reported as a note, not a requirement.
pub fn verify_papartition_family(
    n: usize,
    k: usize,
    ell: usize,
    fam: &[Papartition],
) -> Report {
    let mut report = Report::default();
    let mut seen: std::collections::BTreeMap<Vec<usize>, usize> = Default::default();
    for (idx, pap) in fam.iter().enumerate() {
        if pap.blocks().len() != ell {
            report.violation(format!(
                "papartition {idx} has {} blocks, expected {ell}",
                pap.blocks().len()
            ));
        }
        let mut used: Vec<bool> = vec![false; n + 1];
        for block in pap.blocks() {
            if block.len() != k {
                report.violation(format!(
                    "papartition {idx} has a block of size {}, expected {k}",
                    block.len()
                ));
            }
            for &x in block {
                if x < 1 || x > n {
                    report.violation(format!(
                        "papartition {idx} contains element {x} outside 1..={n}"
                    ));
                } else if used[x] {
                    report.violation(format!(
                        "papartition {idx} repeats element {x} across blocks"
                    ));
                } else {
                    used[x] = true;
                }
            }
            if let Some(&first) = seen.get(block) {
                report.violation(format!(
                    "block {block:?} appears in papartitions {first} and {idx}"
                ));
            } else {
                seen.insert(block.clone(), idx);
            }
        }
    }
    for i in 0..fam.len() {
        for j in (i + 1)..fam.len() {
            if family_pair_too_close(&fam[i], &fam[j], k) {
                report.violation(format!("papartitions {i} and {j} are too close"));
            }
        }
    }
    let max = (binomial(n, k) / ell as u64) as usize;
    if fam.len() > max {
        report.violation(format!(
            "family has {} papartitions, above the maximum {max}",
            fam.len()
        ));
    } else if fam.len() == max {
        report.note(format!("family reaches the maximum size {max}"));
    } else {
        report.note(format!("family has {} papartitions of a possible {max}", fam.len()));
    }
    report
}

/// Independent too-close check: builds the closeness relation between the
/// blocks of the two papartitions, then looks for two disjoint related
/// pairs (a 2-matching in the relation).
fn family_pair_too_close(p: &Papartition, q: &Papartition, k: usize) -> bool {
    let pb = p.blocks();
    let qb = q.blocks();
    let mut close = vec![vec![false; qb.len()]; pb.len()];
    for (i, a) in pb.iter().enumerate() {
        for (j, b) in qb.iter().enumerate() {
            let inter = a
                .iter()
                .filter(|x| b.binary_search(x).is_ok())
                .count();
            close[i][j] = 2 * inter > k;
        }
    }
    for i1 in 0..pb.len() {
        for j1 in 0..qb.len() {
            if !close[i1][j1] {
                continue;
            }
            for (i2, row) in close.iter().enumerate() {
                if i2 == i1 {
                    continue;
                }
                for (j2, &related) in row.iter().enumerate() {
                    if j2 != j1 && related {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Default instance-size cap for the exhaustive constructors; tighter
/// for larger classes since the branching factor grows with ℓ.
pub fn default_cap(ell: usize) -> usize {
    match ell {
        0..=2 => 24,
        3 => 18,
        _ => 12,
    }
}

/// Exhaustive search for a valid almost-ℓ-decomposition by backtracking
/// over vertices in ascending order; finds one or proves none exists.
pub fn exhaustive_tiling(g: &Graph, ell: usize) -> Result<Option<Decomposition>, OracleError> {
    exhaustive_tiling_capped(g, ell, default_cap(ell))
}

pub fn exhaustive_tiling_capped(
    g: &Graph,
    ell: usize,
    cap: usize,
) -> Result<Option<Decomposition>, OracleError> {
    exhaustive_search(g, None, ell, cap)
}

/// Exhaustive search for an almost-ℓ-decomposition of the blue graph
/// that spans no alternating bag with the instance's red edges. Prunes
/// partial states as soon as two (possibly incomplete) classes already
/// carry two vertex-disjoint red cross edges, since no completion can
/// remove them. Never settles for fewer than ⌊m/ℓ⌋ classes.
pub fn exhaustive_bag_free_tiling(
    inst: &TwoColoredInstance,
    ell: usize,
) -> Result<Option<Decomposition>, OracleError> {
    exhaustive_bag_free_tiling_capped(inst, ell, default_cap(ell))
}

pub fn exhaustive_bag_free_tiling_capped(
    inst: &TwoColoredInstance,
    ell: usize,
    cap: usize,
) -> Result<Option<Decomposition>, OracleError> {
    exhaustive_search(inst.blue(), Some(inst.red()), ell, cap)
}

struct SearchState<'a> {
    graph: &'a Graph,
    red: Option<&'a Graph>,
    ell: usize,
    target: usize,
    leftover_budget: usize,
    classes: Vec<Vec<usize>>,
    leftover: Vec<usize>,
}

fn exhaustive_search(
    g: &Graph,
    red: Option<&Graph>,
    ell: usize,
    cap: usize,
) -> Result<Option<Decomposition>, OracleError> {
    let m = g.m();
    if m > cap {
        return Err(OracleError::CapExceeded { m, cap });
    }
    assert!(ell >= 1, "class size must be positive");
    let mut state = SearchState {
        graph: g,
        red,
        ell,
        target: m / ell,
        leftover_budget: m % ell,
        classes: Vec::new(),
        leftover: Vec::new(),
    };
    if backtrack(&mut state, 0, m) {
        let classes = state
            .classes
            .iter()
            .map(|c| Class::new(c.clone()).unwrap())
            .collect();
        Ok(Some(Decomposition::new(classes, state.leftover.clone())))
    } else {
        Ok(None)
    }
}

fn backtrack(state: &mut SearchState<'_>, v: usize, m: usize) -> bool {
    if v == m {
        return state.classes.len() == state.target
            && state.classes.iter().all(|c| c.len() == state.ell);
    }
    // every remaining vertex must fit an open slot or the leftover
    let open_slots: usize = state.classes.iter().map(|c| state.ell - c.len()).sum::<usize>()
        + (state.target - state.classes.len()) * state.ell;
    let leftover_room = state.leftover_budget - state.leftover.len();
    let remaining = m - v;
    if remaining < open_slots || remaining > open_slots + leftover_room {
        return false;
    }

    for i in 0..state.classes.len() {
        if state.classes[i].len() == state.ell {
            continue;
        }
        let fits = state.classes[i]
            .iter()
            .all(|&u| state.graph.has_edge(u, v));
        if !fits {
            continue;
        }
        state.classes[i].push(v);
        if !creates_partial_bag(state, i) && backtrack(state, v + 1, m) {
            return true;
        }
        state.classes[i].pop();
    }
    if state.classes.len() < state.target {
        state.classes.push(vec![v]);
        let i = state.classes.len() - 1;
        if !creates_partial_bag(state, i) && backtrack(state, v + 1, m) {
            return true;
        }
        state.classes.pop();
    }
    if state.leftover.len() < state.leftover_budget {
        state.leftover.push(v);
        if backtrack(state, v + 1, m) {
            return true;
        }
        state.leftover.pop();
    }
    false
}

/// True iff the class at `idx` now forms two vertex-disjoint red cross
/// edges with some other (possibly partial) class.
fn creates_partial_bag(state: &SearchState<'_>, idx: usize) -> bool {
    let Some(red) = state.red else {
        return false;
    };
    let this = &state.classes[idx];
    for (j, other) in state.classes.iter().enumerate() {
        if j == idx {
            continue;
        }
        let mut cross: Vec<(usize, usize)> = Vec::new();
        for &u in this {
            for &w in other {
                if red.has_edge(u, w) {
                    cross.push((u, w));
                }
            }
        }
        for (x, &(a, b)) in cross.iter().enumerate() {
            for &(c, d) in &cross[x + 1..] {
                if a != c && a != d && b != c && b != d {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Params;
    use crate::tiling::almost_ell_decomposition;

    fn class(v: &[usize]) -> Class {
        Class::new(v.to_vec()).unwrap()
    }

    #[test]
    fn accepts_block_tiling_of_k6() {
        let d = Decomposition::new(
            vec![class(&[0, 1]), class(&[2, 3]), class(&[4, 5])],
            vec![],
        );
        assert!(verify_decomposition(&Graph::complete(6), 2, &d).pass());
    }

    #[test]
    fn rejects_overlapping_classes() {
        let d = Decomposition::new(
            vec![class(&[0, 1]), class(&[1, 2]), class(&[4, 5])],
            vec![3],
        );
        let report = verify_decomposition(&Graph::complete(6), 2, &d);
        assert!(!report.pass());
        assert!(report.violations.iter().any(|v| v.contains("vertex 1")));
    }

    #[test]
    fn rejects_non_clique_class() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let d = Decomposition::new(vec![class(&[0, 2])], vec![1]);
        let report = verify_decomposition(&path, 2, &d);
        assert!(!report.pass());
        assert!(report.violations.iter().any(|v| v.contains("not a clique")));
    }

    #[test]
    fn bag_scan_finds_hand_built_bag() {
        let mut blue = Graph::complete(4);
        blue.remove_edge(0, 2);
        blue.remove_edge(1, 3);
        let red = Graph::from_edges(4, &[(0, 2), (1, 3)]);
        let inst = TwoColoredInstance::new(blue, red).unwrap();
        let d = Decomposition::new(vec![class(&[0, 1]), class(&[2, 3])], vec![]);
        let report = verify_bag_free(&inst, &d);
        assert!(!report.pass());
        assert!(report.violations[0].contains("bag"));
    }

    #[test]
    fn bag_scan_passes_on_shared_vertex_or_inner_edges() {
        let mut blue = Graph::complete(4);
        blue.remove_edge(0, 2);
        blue.remove_edge(0, 3);
        let red = Graph::from_edges(4, &[(0, 2), (0, 3)]);
        let inst = TwoColoredInstance::new(blue, red).unwrap();
        let d = Decomposition::new(vec![class(&[0, 1]), class(&[2, 3])], vec![]);
        assert!(verify_bag_free(&inst, &d).pass());
    }

    #[test]
    fn exhaustive_finds_matching_in_four_cycle() {
        // K4 minus a perfect matching is a 4-cycle
        let mut g = Graph::complete(4);
        g.remove_edge(0, 2);
        g.remove_edge(1, 3);
        let d = exhaustive_tiling(&g, 2).unwrap().unwrap();
        assert!(verify_decomposition(&g, 2, &d).pass());
    }

    #[test]
    fn exhaustive_proves_star_has_no_tiling() {
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(exhaustive_tiling(&star, 2).unwrap(), None);
    }

    #[test]
    fn exhaustive_respects_cap() {
        let g = Graph::complete(30);
        assert_eq!(
            exhaustive_tiling(&g, 2),
            Err(OracleError::CapExceeded { m: 30, cap: 24 })
        );
    }

    #[test]
    fn bag_free_search_agrees_with_plain_search_when_red_empty() {
        let mut g = Graph::complete(6);
        g.remove_edge(0, 1);
        g.remove_edge(2, 4);
        let inst = TwoColoredInstance::new(g.clone(), Graph::empty(6)).unwrap();
        let plain = exhaustive_tiling(&g, 2).unwrap();
        let bag_free = exhaustive_bag_free_tiling(&inst, 2).unwrap();
        assert_eq!(plain, bag_free);
    }

    #[test]
    fn bag_free_search_returns_none_rather_than_fewer_classes() {
        // blue is exactly one perfect matching pairing; the only full
        // decomposition carries a bag, so the search must return none
        let blue = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        let red = Graph::from_edges(4, &[(0, 2), (1, 3)]);
        let inst = TwoColoredInstance::new(blue, red).unwrap();
        assert_eq!(exhaustive_bag_free_tiling(&inst, 2).unwrap(), None);
    }

    #[test]
    fn exhaustive_agrees_with_constructive_on_small_graphs() {
        // every graph on up to 5 vertices, raw enumeration
        let p = Params::new(2, 0.2).unwrap();
        for m in 2..=5usize {
            let pairs: Vec<(usize, usize)> = (0..m)
                .flat_map(|u| ((u + 1)..m).map(move |v| (u, v)))
                .collect();
            for mask in 0..(1u32 << pairs.len()) {
                let edges: Vec<(usize, usize)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let g = Graph::from_edges(m, &edges);
                if let Ok(d) = almost_ell_decomposition(&g, &p) {
                    assert!(verify_decomposition(&g, 2, &d).pass());
                    assert!(exhaustive_tiling(&g, 2).unwrap().is_some());
                }
            }
        }
    }

    #[test]
    fn family_verifier_rejects_repeats_and_close_pairs() {
        let pap = |blocks: &[&[usize]]| {
            Papartition::new(blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
        };
        // repeated block across two papartitions
        let fam = vec![pap(&[&[1, 2], &[3, 4]]), pap(&[&[1, 2], &[5, 6]])];
        let report = verify_papartition_family(6, 2, 2, &fam);
        assert!(!report.pass());
        assert!(report.violations.iter().any(|v| v.contains("appears in")));

        // the definitional too-close pair at k=3
        let fam = vec![
            pap(&[&[1, 2, 3], &[4, 5, 6]]),
            pap(&[&[1, 2, 7], &[4, 5, 8]]),
        ];
        let report = verify_papartition_family(8, 3, 2, &fam);
        assert!(!report.pass());
        assert!(report.violations.iter().any(|v| v.contains("too close")));
    }
}
