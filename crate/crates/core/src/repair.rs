//! Bag detection, the single-vertex exchange repair, and the driver that
//! inserts red edges one by one while keeping the decomposition free of
//! alternating bags.
//!
//! An alternating bag is two vertex-disjoint blue K_ℓ copies plus two
//! vertex-disjoint red edges, both crossing between the copies. The
//! driver starts from a plain almost-ℓ-decomposition of the blue graph,
//! then commits the instance's red edges in lexicographic order; when a
//! commit would create a bag, one endpoint is exchanged with a vertex of
//! a compound partner class so the new edge becomes harmless.

use crate::compound::compound_partners;
use crate::graph::{Graph, Params, TwoColoredInstance};
use crate::tiling::{self, Class, Decomposition, TilingError};
use thiserror::Error;

/// Witness for an alternating bag: two disjoint classes and two
/// vertex-disjoint red edges crossing between them. Edges are stored with
/// endpoints ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bag {
    pub class_p: Class,
    pub class_q: Class,
    pub red_edge1: (usize, usize),
    pub red_edge2: (usize, usize),
}

impl std::fmt::Display for Bag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "classes {} / {} with red edges {:?} and {:?}",
            self.class_p, self.class_q, self.red_edge1, self.red_edge2
        )
    }
}

/// One committed red-edge insertion in the driver's trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertionRecord {
    pub red_edge: (usize, usize),
    pub outcome: InsertionOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InsertionOutcome {
    /// The edge created no bag; committed as-is.
    Committed,
    /// A vertex exchange was needed first.
    Swapped(SwapRecord),
}

/// A single exchange: `moved_out` left `from_class` for `partner_class`,
/// whose `moved_in` vertex took its place. `symmetric` marks repairs
/// that moved the second endpoint of the new edge after the first
/// endpoint had no valid exchange; `rejected` counts candidate
/// (partner, vertex) pairs that were filtered out before acceptance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapRecord {
    pub from_class: Vec<usize>,
    pub moved_out: usize,
    pub partner_class: Vec<usize>,
    pub moved_in: usize,
    pub rejected: usize,
    pub symmetric: bool,
}

/// Chronological, replayable record of every insertion the driver made.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepairTrace {
    pub steps: Vec<InsertionRecord>,
}

impl RepairTrace {
    /// One line per insertion: `ADD R u v | ok` or
    /// `ADD R u v | swap A=<ids> a=<id> C=<ids> c=<id> | rejected=<count>`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            let (u, v) = step.red_edge;
            match &step.outcome {
                InsertionOutcome::Committed => {
                    out.push_str(&format!("ADD R {u} {v} | ok\n"));
                }
                InsertionOutcome::Swapped(s) => {
                    out.push_str(&format!(
                        "ADD R {u} {v} | swap A={} a={} C={} c={} | rejected={}\n",
                        join_ids(&s.from_class),
                        s.moved_out,
                        join_ids(&s.partner_class),
                        s.moved_in,
                        s.rejected
                    ));
                }
            }
        }
        out
    }
}

fn join_ids(ids: &[usize]) -> String {
    ids.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepairError {
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("no valid exchange avoids a bag for red edge {edge:?}")]
    NoValidSwap { edge: (usize, usize) },
    #[error("red edge {edge:?} is already colored in the instance")]
    EdgeAlreadyColored { edge: (usize, usize) },
    #[error(
        "incremental bag check disagreed with the exhaustive scan at red edge {edge:?} \
         (incremental: {incremental}, exhaustive: {exhaustive})"
    )]
    IncrementalMismatch {
        edge: (usize, usize),
        incremental: bool,
        exhaustive: bool,
    },
}

/// Red adjacency plus at most one extra edge not yet committed.
#[derive(Clone, Copy)]
struct RedView<'a> {
    red: &'a Graph,
    extra: Option<(usize, usize)>,
}

impl RedView<'_> {
    fn has(&self, u: usize, v: usize) -> bool {
        if self.red.has_edge(u, v) {
            return true;
        }
        match self.extra {
            Some((a, b)) => (u == a && v == b) || (u == b && v == a),
            None => false,
        }
    }
}

fn cross_red_edges(view: RedView<'_>, p: &Class, q: &Class) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &u in p.vertices() {
        for &v in q.vertices() {
            if view.has(u, v) {
                out.push(if u < v { (u, v) } else { (v, u) });
            }
        }
    }
    out.sort_unstable();
    out
}

fn bag_between(view: RedView<'_>, p: &Class, q: &Class) -> Option<Bag> {
    let edges = cross_red_edges(view, p, q);
    for (i, &e1) in edges.iter().enumerate() {
        for &e2 in &edges[i + 1..] {
            let disjoint = e1.0 != e2.0 && e1.0 != e2.1 && e1.1 != e2.0 && e1.1 != e2.1;
            if disjoint {
                return Some(Bag {
                    class_p: p.clone(),
                    class_q: q.clone(),
                    red_edge1: e1,
                    red_edge2: e2,
                });
            }
        }
    }
    None
}

/// Exhaustive scan over all class pairs; returns the first bag in
/// lexicographic class-pair order (classes are kept sorted), or `None`.
fn first_bag(view: RedView<'_>, classes: &[Class]) -> Option<Bag> {
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            if let Some(bag) = bag_between(view, &classes[i], &classes[j]) {
                return Some(bag);
            }
        }
    }
    None
}

/// Incremental scan: only class pairs with at least one side in `focus`.
fn bag_involving(view: RedView<'_>, classes: &[Class], focus: &[usize]) -> Option<Bag> {
    for i in 0..classes.len() {
        for j in (i + 1)..classes.len() {
            if !(focus.contains(&i) || focus.contains(&j)) {
                continue;
            }
            if let Some(bag) = bag_between(view, &classes[i], &classes[j]) {
                return Some(bag);
            }
        }
    }
    None
}

/// Exhaustive search for an alternating bag spanned by two classes of
/// `d` and two red edges of the instance. Returns the lexicographically
/// first bag by class pair then edge pair, or `None`.
pub fn find_alternating_bag(inst: &TwoColoredInstance, d: &Decomposition) -> Option<Bag> {
    let view = RedView {
        red: inst.red(),
        extra: None,
    };
    first_bag(view, d.classes())
}

fn normalize(e: (usize, usize)) -> (usize, usize) {
    if e.0 < e.1 {
        e
    } else {
        (e.1, e.0)
    }
}

/// Attempts to make one red edge harmless against the current
/// decomposition. Returns the (possibly unchanged) decomposition and the
/// insertion record. The red graph passed in holds only the edges
/// committed so far; `new_red` is not yet part of it.
fn insert_one(
    blue: &Graph,
    red_so_far: &Graph,
    d: &Decomposition,
    new_red: (usize, usize),
) -> Result<(Decomposition, InsertionRecord), RepairError> {
    let e = normalize(new_red);
    let (a, b) = e;
    let view = RedView {
        red: red_so_far,
        extra: Some(e),
    };

    let slot_a = d.class_index_of(a);
    let slot_b = d.class_index_of(b);

    // An endpoint in the leftover, or both endpoints in one class, cannot
    // produce a bag: bags need cross edges between two classes.
    let trivially_safe = slot_a.is_none() || slot_b.is_none() || slot_a == slot_b;
    if trivially_safe
        || bag_involving(view, d.classes(), &[slot_a.unwrap(), slot_b.unwrap()]).is_none()
    {
        return Ok((
            d.clone(),
            InsertionRecord {
                red_edge: e,
                outcome: InsertionOutcome::Committed,
            },
        ));
    }

    let mut rejected = 0usize;
    let attempts = [(a, slot_a.unwrap(), false), (b, slot_b.unwrap(), true)];
    for &(moved, home_idx, symmetric) in &attempts {
        let home = &d.classes()[home_idx];
        let partners =
            compound_partners(blue, d, home).expect("home class comes from the decomposition");
        for partner in &partners {
            for &c in partner.vertices() {
                let new_home = home.with_swapped(moved, c);
                let new_partner = partner.with_swapped(c, moved);
                debug_assert!(tiling::is_clique(blue, new_home.vertices()));
                debug_assert!(tiling::is_clique(blue, new_partner.vertices()));
                let mut classes: Vec<Class> = d
                    .classes()
                    .iter()
                    .filter(|cl| *cl != home && *cl != partner)
                    .cloned()
                    .collect();
                classes.push(new_home.clone());
                classes.push(new_partner.clone());
                let candidate = Decomposition::new(classes, d.leftover().to_vec());

                // check pairs touching the two modified classes plus the
                // classes now holding the new edge's endpoints
                let mut focus: Vec<usize> = Vec::new();
                for (i, cl) in candidate.classes().iter().enumerate() {
                    if cl == &new_home
                        || cl == &new_partner
                        || cl.contains(a)
                        || cl.contains(b)
                    {
                        focus.push(i);
                    }
                }
                if bag_involving(view, candidate.classes(), &focus).is_none() {
                    let record = InsertionRecord {
                        red_edge: e,
                        outcome: InsertionOutcome::Swapped(SwapRecord {
                            from_class: home.vertices().to_vec(),
                            moved_out: moved,
                            partner_class: partner.vertices().to_vec(),
                            moved_in: c,
                            rejected,
                            symmetric,
                        }),
                    };
                    return Ok((candidate, record));
                }
                rejected += 1;
            }
        }
    }
    Err(RepairError::NoValidSwap { edge: e })
}

/// Single-insertion exchange repair, exposed for direct use: given a
/// decomposition that is bag-free for `inst` and an uncolored pair
/// `new_red`, returns a decomposition that stays bag-free even with
/// `new_red` added to the red graph, together with a one-step trace.
/// When the edge creates no bag the decomposition comes back unchanged
/// and the trace is empty.
pub fn exchange_repair(
    inst: &TwoColoredInstance,
    d: &Decomposition,
    new_red: (usize, usize),
    p: &Params,
) -> Result<(Decomposition, RepairTrace), RepairError> {
    let e = normalize(new_red);
    if inst.blue().has_edge(e.0, e.1) || inst.red().has_edge(e.0, e.1) {
        return Err(RepairError::EdgeAlreadyColored { edge: e });
    }
    debug_assert!(d.classes().iter().all(|c| c.len() == p.ell));
    let (out, record) = insert_one(inst.blue(), inst.red(), d, e)?;
    let trace = match record.outcome {
        InsertionOutcome::Committed => RepairTrace::default(),
        InsertionOutcome::Swapped(_) => RepairTrace {
            steps: vec![record],
        },
    };
    Ok((out, trace))
}

/// Driver options. `check_each_step` re-runs the exhaustive bag scan
/// around every insertion and fails loudly if it ever disagrees with the
/// incremental check the driver uses.
#[derive(Clone, Copy, Debug, Default)]
pub struct DriverOptions {
    pub check_each_step: bool,
}

/// Computes an almost-ℓ-decomposition of the blue graph that spans no
/// alternating bag with the instance's red edges: tiles the blue graph
/// with the red edges ignored, then inserts red edges one by one in
/// lexicographic order, exchanging a vertex out of an endpoint class
/// whenever an insertion would otherwise create a bag.
pub fn bag_free_decomposition(
    inst: &TwoColoredInstance,
    p: &Params,
) -> Result<(Decomposition, RepairTrace), RepairError> {
    bag_free_decomposition_with(inst, p, DriverOptions::default())
}

pub fn bag_free_decomposition_with(
    inst: &TwoColoredInstance,
    p: &Params,
    opts: DriverOptions,
) -> Result<(Decomposition, RepairTrace), RepairError> {
    let mut d = tiling::almost_ell_decomposition(inst.blue(), p)?;
    let mut red_so_far = Graph::empty(inst.m());
    let mut trace = RepairTrace::default();

    for e in inst.red().edges() {
        let (d2, record) = insert_one(inst.blue(), &red_so_far, &d, e)?;

        if opts.check_each_step {
            // the incremental pre-check decided whether a swap was needed;
            // the exhaustive scan over the pre-insertion state must agree
            let pre_view = RedView {
                red: &red_so_far,
                extra: Some(e),
            };
            let exhaustive_pre = first_bag(pre_view, d.classes()).is_some();
            let incremental_pre = matches!(record.outcome, InsertionOutcome::Swapped(_));
            if exhaustive_pre != incremental_pre {
                return Err(RepairError::IncrementalMismatch {
                    edge: e,
                    incremental: incremental_pre,
                    exhaustive: exhaustive_pre,
                });
            }
            // the accepted post-state was declared bag-free incrementally
            let post_view = RedView {
                red: &red_so_far,
                extra: Some(e),
            };
            if let Some(bag) = first_bag(post_view, d2.classes()) {
                return Err(RepairError::IncrementalMismatch {
                    edge: bag.red_edge1,
                    incremental: false,
                    exhaustive: true,
                });
            }
        }

        if let InsertionOutcome::Swapped(s) = &record.outcome {
            debug_assert_eq!(d2.classes().len(), d.classes().len());
            debug_assert!(d2.classes().iter().all(|c| c.len() == p.ell));
            debug_assert_eq!(d2.leftover(), d.leftover());
            debug_assert!(s.from_class.contains(&s.moved_out));
            debug_assert!(
                {
                    let mut seen = vec![false; inst.m()];
                    d2.classes()
                        .iter()
                        .flat_map(|c| c.vertices())
                        .chain(d2.leftover())
                        .all(|&v| !std::mem::replace(&mut seen[v], true))
                },
                "swap broke class disjointness"
            );
        }
        red_so_far.add_edge(e.0, e.1);
        d = d2;
        trace.steps.push(record);
    }

    debug_assert!(find_alternating_bag(inst, &d).is_none());
    Ok((d, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_dense_instance;

    fn class(v: &[usize]) -> Class {
        Class::new(v.to_vec()).unwrap()
    }

    fn two_class_instance(red_edges: &[(usize, usize)]) -> (TwoColoredInstance, Decomposition) {
        // blue K4 minus the red pairs so colors stay disjoint
        let mut blue = Graph::complete(4);
        let mut red = Graph::empty(4);
        for &(u, v) in red_edges {
            blue.remove_edge(u, v);
            red.add_edge(u, v);
        }
        let inst = TwoColoredInstance::new(blue, red).unwrap();
        let d = Decomposition::new(vec![class(&[0, 1]), class(&[2, 3])], vec![]);
        (inst, d)
    }

    #[test]
    fn bag_found_on_disjoint_cross_edges() {
        let (inst, d) = two_class_instance(&[(0, 2), (1, 3)]);
        let bag = find_alternating_bag(&inst, &d).unwrap();
        assert_eq!(bag.red_edge1, (0, 2));
        assert_eq!(bag.red_edge2, (1, 3));
    }

    #[test]
    fn no_bag_when_edges_share_a_vertex() {
        let (inst, d) = two_class_instance(&[(0, 2), (0, 3)]);
        assert_eq!(find_alternating_bag(&inst, &d), None);
    }

    #[test]
    fn no_bag_from_inner_red_edge() {
        let (inst, d) = two_class_instance(&[(0, 1), (2, 3)]);
        assert_eq!(find_alternating_bag(&inst, &d), None);
    }

    #[test]
    fn exchange_is_identity_when_no_bag_would_arise() {
        // an empty red graph means one new edge can never complete a bag
        let mut blue = Graph::complete(6);
        blue.remove_edge(0, 2);
        let inst = TwoColoredInstance::new(blue, Graph::empty(6)).unwrap();
        let p = Params::new(2, 0.2).unwrap();
        let d = tiling::almost_ell_decomposition(inst.blue(), &p).unwrap();
        let (out, trace) = exchange_repair(&inst, &d, (0, 2), &p).unwrap();
        assert_eq!(out, d);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn exchange_fails_without_compound_partner() {
        // two classes, one red cross edge already present, no blue cross
        // edges at all: adding the second disjoint cross edge has no repair
        let blue = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        let red = Graph::from_edges(4, &[(0, 2)]);
        let inst = TwoColoredInstance::new(blue, red).unwrap();
        let d = Decomposition::new(vec![class(&[0, 1]), class(&[2, 3])], vec![]);
        let p = Params::new(2, 0.2).unwrap();
        assert_eq!(find_alternating_bag(&inst, &d), None);
        let err = exchange_repair(&inst, &d, (1, 3), &p).unwrap_err();
        assert_eq!(err, RepairError::NoValidSwap { edge: (1, 3) });
    }

    #[test]
    fn exchange_moves_endpoint_to_compound_partner() {
        // blue K6 minus {(0,2), (1,3)}; red (0,2); inserting (1,3) would
        // complete a bag between {0,1} and {2,3}, and {4,5} is the only
        // compound partner of {0,1}
        let mut blue = Graph::complete(6);
        blue.remove_edge(0, 2);
        blue.remove_edge(1, 3);
        let red = Graph::from_edges(6, &[(0, 2)]);
        let inst = TwoColoredInstance::new(blue, red).unwrap();
        let d = Decomposition::new(
            vec![class(&[0, 1]), class(&[2, 3]), class(&[4, 5])],
            vec![],
        );
        let p = Params::new(2, 0.2).unwrap();
        let (out, trace) = exchange_repair(&inst, &d, (1, 3), &p).unwrap();
        assert_eq!(
            out,
            Decomposition::new(
                vec![class(&[0, 4]), class(&[1, 5]), class(&[2, 3])],
                vec![],
            )
        );
        assert_eq!(trace.steps.len(), 1);
        let InsertionOutcome::Swapped(s) = &trace.steps[0].outcome else {
            panic!("expected a swap");
        };
        assert_eq!((s.moved_out, s.moved_in), (1, 4));
        assert_eq!(s.from_class, vec![0, 1]);
        assert_eq!(s.partner_class, vec![4, 5]);
        assert!(!s.symmetric);
        // post-state tolerates the new edge
        let mut red_after = inst.red().clone();
        red_after.add_edge(1, 3);
        let inst_after = TwoColoredInstance::new(inst.blue().clone(), red_after).unwrap();
        assert_eq!(find_alternating_bag(&inst_after, &out), None);
    }

    #[test]
    fn exchange_retries_from_second_endpoint() {
        // the first endpoint's class has no compound partner (cross blue
        // edges to every other class are broken), the second one's does
        let mut blue = Graph::complete(8);
        for &(u, v) in &[(0, 2), (1, 3), (0, 4), (0, 6)] {
            blue.remove_edge(u, v);
        }
        let red = Graph::from_edges(8, &[(0, 2)]);
        let inst = TwoColoredInstance::new(blue, red).unwrap();
        let d = Decomposition::new(
            vec![class(&[0, 1]), class(&[2, 3]), class(&[4, 5]), class(&[6, 7])],
            vec![],
        );
        let p = Params::new(2, 0.2).unwrap();
        let (out, trace) = exchange_repair(&inst, &d, (1, 3), &p).unwrap();
        let InsertionOutcome::Swapped(s) = &trace.steps[0].outcome else {
            panic!("expected a swap");
        };
        assert!(s.symmetric);
        assert_eq!(s.from_class, vec![2, 3]);
        assert_eq!((s.moved_out, s.moved_in), (3, 4));
        let mut red_after = inst.red().clone();
        red_after.add_edge(1, 3);
        let inst_after = TwoColoredInstance::new(inst.blue().clone(), red_after).unwrap();
        assert_eq!(find_alternating_bag(&inst_after, &out), None);
    }

    #[test]
    fn exchange_rejects_colored_edges() {
        let (inst, d) = two_class_instance(&[(0, 2)]);
        let p = Params::new(2, 0.2).unwrap();
        assert_eq!(
            exchange_repair(&inst, &d, (0, 2), &p),
            Err(RepairError::EdgeAlreadyColored { edge: (0, 2) })
        );
        assert_eq!(
            exchange_repair(&inst, &d, (0, 1), &p),
            Err(RepairError::EdgeAlreadyColored { edge: (0, 1) })
        );
    }

    #[test]
    fn driver_on_empty_red_equals_plain_tiling() {
        let p = Params::new(2, 0.2).unwrap();
        let inst = random_dense_instance(20, &p, 0, 3).unwrap();
        let (d, trace) = bag_free_decomposition(&inst, &p).unwrap();
        let plain = tiling::almost_ell_decomposition(inst.blue(), &p).unwrap();
        assert_eq!(d, plain);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn driver_produces_bag_free_output() {
        let p = Params::new(2, 0.2).unwrap();
        let inst = random_dense_instance(60, &p, 1, 9).unwrap();
        assert!(inst.red().edge_count() > 0, "instance should carry red edges");
        let opts = DriverOptions {
            check_each_step: true,
        };
        let (d, trace) = bag_free_decomposition_with(&inst, &p, opts).unwrap();
        assert_eq!(d.classes().len(), 30);
        assert_eq!(find_alternating_bag(&inst, &d), None);
        assert_eq!(trace.steps.len(), inst.red().edge_count());
        let report = crate::oracle::verify_bag_free(&inst, &d);
        assert!(report.pass(), "{report}");
    }

    #[test]
    fn driver_is_deterministic() {
        let p = Params::new(2, 0.2).unwrap();
        let inst = random_dense_instance(40, &p, 1, 77).unwrap();
        let a = bag_free_decomposition(&inst, &p).unwrap();
        let b = bag_free_decomposition(&inst, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn driver_surfaces_tiling_failure() {
        let p = Params::new(2, 0.2).unwrap();
        let inst = TwoColoredInstance::new(Graph::empty(6), Graph::empty(6)).unwrap();
        let err = bag_free_decomposition(&inst, &p).unwrap_err();
        assert!(matches!(err, RepairError::Tiling(_)));
    }

    #[test]
    fn swap_records_render_as_trace_lines() {
        let trace = RepairTrace {
            steps: vec![
                InsertionRecord {
                    red_edge: (0, 5),
                    outcome: InsertionOutcome::Committed,
                },
                InsertionRecord {
                    red_edge: (1, 6),
                    outcome: InsertionOutcome::Swapped(SwapRecord {
                        from_class: vec![0, 1],
                        moved_out: 1,
                        partner_class: vec![8, 9],
                        moved_in: 8,
                        rejected: 3,
                        symmetric: false,
                    }),
                },
            ],
        };
        assert_eq!(
            trace.render(),
            "ADD R 0 5 | ok\nADD R 1 6 | swap A=0,1 a=1 C=8,9 c=8 | rejected=3\n"
        );
    }
}
