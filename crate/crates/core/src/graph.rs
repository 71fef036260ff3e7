//! Dense undirected graphs, two-colored (blue/red) instances, degree
//! statistics and the minimum/maximum degree conditions, plus a seeded
//! random instance generator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;
use thiserror::Error;

/// Slack used when an integer degree is compared against a threshold
/// computed in floating point. Decimal parameters such as `alpha = 0.1`
/// are not exactly representable, so `m * (3/4 + 0.1)` can land a few
/// ulps above the intended value; the slack restores the exact
/// comparison.
pub const DEGREE_EPS: f64 = 1e-9;

/// Undirected simple graph on vertex ids `0..m` with dense adjacency
/// (one bitset row per vertex). Symmetric and irreflexive by
/// construction: every mutation touches both directions and self-loops
/// are rejected.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    m: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Graph {
    /// Graph on `m` vertices with no edges.
    pub fn empty(m: usize) -> Self {
        let words = m.div_ceil(64).max(1);
        Graph {
            m,
            words,
            bits: vec![0u64; m * words],
        }
    }

    /// Complete graph on `m` vertices.
    pub fn complete(m: usize) -> Self {
        let mut g = Graph::empty(m);
        for u in 0..m {
            for w in 0..g.words {
                g.bits[u * g.words + w] = !0u64;
            }
            // clear the diagonal bit and bits beyond m
            g.clear_bit(u, u);
            for v in m..g.words * 64 {
                g.clear_bit_raw(u, v);
            }
        }
        g
    }

    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::empty(m);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    fn clear_bit(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] &= !(1u64 << (v % 64));
    }

    #[inline]
    fn clear_bit_raw(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] &= !(1u64 << (v % 64));
    }

    #[inline]
    fn set_bit(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        debug_assert!(u < self.m && v < self.m);
        if u == v {
            return false;
        }
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Adds the undirected edge `{u, v}`. Panics on self-loops or
    /// out-of-range ids; existing edges are left as-is.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loop {u}");
        assert!(u < self.m && v < self.m, "vertex out of range");
        self.set_bit(u, v);
        self.set_bit(v, u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.m && v < self.m);
        self.clear_bit(u, v);
        self.clear_bit(v, u);
    }

    pub fn degree(&self, v: usize) -> usize {
        let row = &self.bits[v * self.words..(v + 1) * self.words];
        row.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Minimum degree over all vertices; 0 for the edgeless graph.
    pub fn min_degree(&self) -> usize {
        (0..self.m).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Maximum degree over all vertices; 0 for the edgeless graph.
    pub fn max_degree(&self) -> usize {
        (0..self.m).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        let total: usize = (0..self.m).map(|v| self.degree(v)).sum();
        total / 2
    }

    /// All edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.m {
            for v in (u + 1)..self.m {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// All non-adjacent pairs `(u, v)` with `u < v` in lexicographic order.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.m {
            for v in (u + 1)..self.m {
                if !self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::complete(self.m);
        for (u, v) in self.edges() {
            g.remove_edge(u, v);
        }
        g
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(m={}, edges={})", self.m, self.edge_count())
    }
}

/// A blue graph and a red graph on the same vertex set with disjoint
/// edge sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoColoredInstance {
    blue: Graph,
    red: Graph,
}

impl TwoColoredInstance {
    pub fn new(blue: Graph, red: Graph) -> Result<Self, InstanceError> {
        if blue.m() != red.m() {
            return Err(InstanceError::SizeMismatch {
                blue: blue.m(),
                red: red.m(),
            });
        }
        for (u, v) in red.edges() {
            if blue.has_edge(u, v) {
                return Err(InstanceError::OverlappingEdge { u, v });
            }
        }
        Ok(TwoColoredInstance { blue, red })
    }

    pub fn m(&self) -> usize {
        self.blue.m()
    }

    pub fn blue(&self) -> &Graph {
        &self.blue
    }

    pub fn red(&self) -> &Graph {
        &self.red
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("blue graph has {blue} vertices but red graph has {red}")]
    SizeMismatch { blue: usize, red: usize },
    #[error("pair {{{u}, {v}}} is both a blue and a red edge")]
    OverlappingEdge { u: usize, v: usize },
}

/// Class size and density margin for the tiling and repair pipeline,
/// with optional subset-family parameters carried along when an
/// instance was derived from k-subsets of `[n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub ell: usize,
    pub alpha: f64,
    pub k: Option<usize>,
    pub n: Option<usize>,
}

impl Params {
    /// Requires `ell >= 2` and `0 < alpha < 1/ell^2`.
    pub fn new(ell: usize, alpha: f64) -> Result<Self, ParamsError> {
        if ell < 2 {
            return Err(ParamsError::EllTooSmall { ell });
        }
        let limit = 1.0 / (ell * ell) as f64;
        if !(alpha > 0.0 && alpha < limit) {
            return Err(ParamsError::AlphaOutOfRange { alpha, limit });
        }
        Ok(Params {
            ell,
            alpha,
            k: None,
            n: None,
        })
    }

    /// Minimum blue degree required of an m-vertex instance:
    /// `m ((ell^2 - 1)/ell^2 + alpha)`.
    pub fn blue_degree_threshold(&self, m: usize) -> f64 {
        let l2 = (self.ell * self.ell) as f64;
        m as f64 * ((l2 - 1.0) / l2 + self.alpha)
    }

    /// Maximum red degree tolerated: `sqrt((m alpha - ell)/3)`, or
    /// `None` when the radicand is negative (condition unsatisfiable at
    /// this `m`).
    pub fn red_degree_threshold(&self, m: usize) -> Option<f64> {
        let radicand = m as f64 * self.alpha - self.ell as f64;
        (radicand >= 0.0).then(|| (radicand / 3.0).sqrt())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("class size must be at least 2, got {ell}")]
    EllTooSmall { ell: usize },
    #[error("alpha must lie in (0, {limit}), got {alpha}")]
    AlphaOutOfRange { alpha: f64, limit: f64 },
}

/// Observed degree statistics of an instance against the two degree
/// conditions. `red_threshold` is `None` when the red condition is
/// unsatisfiable at this instance size (negative radicand), in which
/// case `red_ok` is false.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub min_blue_degree: usize,
    pub max_red_degree: usize,
    pub blue_threshold: f64,
    pub red_threshold: Option<f64>,
    pub blue_ok: bool,
    pub red_ok: bool,
}

impl ConditionReport {
    pub fn both_ok(&self) -> bool {
        self.blue_ok && self.red_ok
    }
}

/// Evaluates the blue minimum-degree and red maximum-degree conditions
/// for an instance. Report-only; never fails.
pub fn check_degree_conditions(inst: &TwoColoredInstance, p: &Params) -> ConditionReport {
    let m = inst.m();
    let min_blue_degree = inst.blue().min_degree();
    let max_red_degree = inst.red().max_degree();
    let blue_threshold = p.blue_degree_threshold(m);
    let red_threshold = p.red_degree_threshold(m);
    ConditionReport {
        min_blue_degree,
        max_red_degree,
        blue_threshold,
        red_threshold,
        blue_ok: min_blue_degree as f64 >= blue_threshold - DEGREE_EPS,
        red_ok: red_threshold
            .map(|t| max_red_degree as f64 <= t + DEGREE_EPS)
            .unwrap_or(false),
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("cannot generate instance: m={m} is smaller than the class size {ell}")]
    InstanceInfeasible { m: usize, ell: usize },
}

/// Generates a seeded random two-colored instance: the blue graph is the
/// complement of a random graph whose maximum degree is capped so that
/// every blue degree clears the minimum-degree threshold whenever the
/// complete graph itself does; the red graph is a random graph with
/// maximum degree at most `target_red_max_degree`, drawn on non-blue
/// pairs first. When non-blue pairs run short, a blue edge may be
/// recolored red only if the blue minimum-degree condition survives the
/// removal; otherwise that red candidate is skipped.
///
/// Deterministic for a fixed seed.
pub fn random_dense_instance(
    m: usize,
    p: &Params,
    target_red_max_degree: usize,
    seed: u64,
) -> Result<TwoColoredInstance, GenerateError> {
    if m < p.ell {
        return Err(GenerateError::InstanceInfeasible { m, ell: p.ell });
    }
    let mut rng = Pcg64Mcg::seed_from_u64(seed);
    let blue_threshold = p.blue_degree_threshold(m);

    // Largest non-blue degree cap that keeps m-1-cap at or above the
    // threshold; 0 (blue = K_m) when even the complete graph falls short.
    let l2 = (p.ell * p.ell) as f64;
    let mut cap = (m as f64 * (1.0 / l2 - p.alpha)).floor().max(0.0) as usize;
    cap = cap.min(m - 1);
    while cap > 0 && ((m - 1 - cap) as f64) < blue_threshold - DEGREE_EPS {
        cap -= 1;
    }
    if ((m - 1 - cap) as f64) < blue_threshold - DEGREE_EPS {
        cap = 0;
    }

    let mut all_pairs: Vec<(usize, usize)> = Vec::with_capacity(m * (m - 1) / 2);
    for u in 0..m {
        for v in (u + 1)..m {
            all_pairs.push((u, v));
        }
    }
    all_pairs.shuffle(&mut rng);

    let mut non_blue = Graph::empty(m);
    let mut nb_deg = vec![0usize; m];
    if cap > 0 {
        for &(u, v) in &all_pairs {
            if nb_deg[u] < cap && nb_deg[v] < cap && rng.random_bool(0.5) {
                non_blue.add_edge(u, v);
                nb_deg[u] += 1;
                nb_deg[v] += 1;
            }
        }
    }
    let mut blue = non_blue.complement();

    let mut red = Graph::empty(m);
    let mut red_deg = vec![0usize; m];
    if target_red_max_degree > 0 {
        let mut candidates = non_blue.edges();
        candidates.shuffle(&mut rng);
        for (u, v) in candidates {
            if red_deg[u] < target_red_max_degree && red_deg[v] < target_red_max_degree {
                red.add_edge(u, v);
                red_deg[u] += 1;
                red_deg[v] += 1;
            }
        }
        if red_deg.iter().any(|&d| d < target_red_max_degree) {
            let mut blue_pairs = blue.edges();
            blue_pairs.shuffle(&mut rng);
            for (u, v) in blue_pairs {
                if red_deg[u] < target_red_max_degree
                    && red_deg[v] < target_red_max_degree
                    && ((blue.degree(u) - 1) as f64) >= blue_threshold - DEGREE_EPS
                    && ((blue.degree(v) - 1) as f64) >= blue_threshold - DEGREE_EPS
                    && (blue.min_degree() as f64) >= blue_threshold - DEGREE_EPS
                {
                    blue.remove_edge(u, v);
                    red.add_edge(u, v);
                    red_deg[u] += 1;
                    red_deg[v] += 1;
                }
            }
        }
    }

    Ok(TwoColoredInstance { blue, red })
}
