//! Wreaths: walk a cyclic permutation of `[n]` in consecutive length-k
//! intervals, starting at a chosen position, until the walk closes after
//! lcm(n,k)/k intervals (wrapping around lcm(n,k)/n times). The module
//! expands wreaths, verifies claimed decompositions of all k-subsets
//! into disjoint wreaths, and searches small cases by exact cover over
//! canonicalized expansions. The search records outcomes; it asserts
//! nothing beyond the instances it has actually checked.

use crate::oracle::Report;
use crate::papartition::SubsetUniverse;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WreathError {
    #[error("order must be a cyclic permutation of 1..=n with start < n")]
    InvalidWreath,
    #[error("interval of length {k} degenerates on {n} elements")]
    DegenerateInterval { n: usize, k: usize },
    #[error("search budget exhausted after {steps} steps")]
    BudgetExceeded { steps: u64 },
    #[error(transparent)]
    Universe(#[from] crate::papartition::PapartitionError),
}

/// A cyclic order of `[n]`, a start position into it, and the interval
/// length k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wreath {
    order: Vec<usize>,
    start: usize,
    k: usize,
}

impl Wreath {
    pub fn new(order: Vec<usize>, start: usize, k: usize) -> Result<Self, WreathError> {
        let n = order.len();
        if n == 0 || start >= n || k == 0 {
            return Err(WreathError::InvalidWreath);
        }
        let mut seen = vec![false; n + 1];
        for &x in &order {
            if x < 1 || x > n || seen[x] {
                return Err(WreathError::InvalidWreath);
            }
            seen[x] = true;
        }
        Ok(Wreath { order, start, k })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Expands a wreath into its lcm(n,k)/k consecutive intervals, each
/// reported as a sorted k-subset. The first interval begins at `start`;
/// each next interval begins immediately after the previous one ends,
/// wrapping around the cyclic order.
pub fn wreath_expand(w: &Wreath) -> Result<Vec<Vec<usize>>, WreathError> {
    let n = w.n();
    let k = w.k;
    if k > n {
        return Err(WreathError::DegenerateInterval { n, k });
    }
    let count = lcm(n, k) / k;
    let mut out = Vec::with_capacity(count);
    let mut pos = w.start;
    for _ in 0..count {
        let mut interval: Vec<usize> = (0..k).map(|j| w.order[(pos + j) % n]).collect();
        interval.sort_unstable();
        if interval.windows(2).any(|p| p[0] == p[1]) {
            return Err(WreathError::DegenerateInterval { n, k });
        }
        out.push(interval);
        pos = (pos + k) % n;
    }
    Ok(out)
}

/// Checks that the expansions of the given wreaths cover every k-subset
/// of `[n]` exactly once. A subset repeated inside a single wreath's own
/// expansion is reported as a violation as well, never silently merged.
pub fn verify_wreath_decomposition(n: usize, k: usize, wreaths: &[Wreath]) -> Report {
    let mut report = Report::default();
    let universe = match SubsetUniverse::new(n, k) {
        Ok(u) => u,
        Err(e) => {
            let mut r = Report::default();
            r.violations.push(e.to_string());
            return r;
        }
    };
    let mut count = vec![0usize; universe.size() as usize];
    for (idx, w) in wreaths.iter().enumerate() {
        if w.n() != n || w.k() != k {
            report
                .violations
                .push(format!("wreath {idx} is over n={}, k={}, expected n={n}, k={k}", w.n(), w.k()));
            continue;
        }
        let expansion = match wreath_expand(w) {
            Ok(e) => e,
            Err(e) => {
                report.violations.push(format!("wreath {idx}: {e}"));
                continue;
            }
        };
        let mut own: std::collections::BTreeSet<Vec<usize>> = Default::default();
        for subset in expansion {
            if !own.insert(subset.clone()) {
                report.violations.push(format!(
                    "wreath {idx} repeats subset {subset:?} inside its own expansion"
                ));
            }
            let r = universe.rank(&subset).expect("expansion stays in range");
            count[r] += 1;
        }
    }
    for (r, &c) in count.iter().enumerate() {
        let subset = universe.unrank(r).unwrap();
        if c == 0 {
            report
                .violations
                .push(format!("subset {subset:?} is covered by no wreath"));
        } else if c > 1 {
            report
                .violations
                .push(format!("subset {subset:?} is covered {c} times"));
        }
    }
    report
}

/// Searches for a decomposition of all k-subsets of `[n]` into disjoint
/// wreaths by exact cover over canonicalized wreath expansions (wreaths
/// with equal expansion sets are deduplicated; rotating the order with a
/// matching start shift never yields a new candidate). Returns a found
/// decomposition, `None` when the exhausted search proves there is none,
/// or `BudgetExceeded` — a distinct outcome — when the step budget runs
/// out first.
pub fn wreath_decomposition_search(
    n: usize,
    k: usize,
    budget: u64,
) -> Result<Option<Vec<Wreath>>, WreathError> {
    wreath_decomposition_search_counted(n, k, budget).map(|(found, _)| found)
}

/// Like [`wreath_decomposition_search`], additionally reporting the
/// number of steps spent (for results ledgers).
pub fn wreath_decomposition_search_counted(
    n: usize,
    k: usize,
    budget: u64,
) -> Result<(Option<Vec<Wreath>>, u64), WreathError> {
    let universe = SubsetUniverse::new(n, k)?;
    let subsets = universe.size();
    if subsets > budget {
        return Err(WreathError::BudgetExceeded { steps: 0 });
    }
    let mut steps: u64 = 0;

    // enumerate candidates: orders fixed to begin with 1 (rotations are
    // redundant), starts only up to gcd(n,k) (the walk visits positions
    // start + i*k mod n, so higher starts repeat expansions)
    let mut rows: BTreeMap<Vec<usize>, Wreath> = BTreeMap::new();
    let mut rest: Vec<usize> = (2..=n).collect();
    let mut prefix: Vec<usize> = vec![1];
    enumerate_orders(
        &mut prefix,
        &mut rest,
        &mut |order| {
            for start in 0..gcd(n, k).max(1) {
                steps += 1;
                if steps > budget {
                    return Err(WreathError::BudgetExceeded { steps });
                }
                let w = Wreath::new(order.to_vec(), start, k).expect("orders are permutations");
                let expansion = wreath_expand(&w)?;
                let mut key: Vec<usize> = expansion
                    .iter()
                    .map(|s| universe.rank(s).expect("expansion in range"))
                    .collect();
                key.sort_unstable();
                if key.windows(2).any(|p| p[0] == p[1]) {
                    continue; // degenerate candidate, unusable for a partition
                }
                rows.entry(key).or_insert(w);
            }
            Ok(())
        },
    )?;

    let rows: Vec<(Vec<usize>, Wreath)> = rows.into_iter().collect();
    // candidate rows covering each subset rank
    let mut covered_by: Vec<Vec<usize>> = vec![Vec::new(); subsets as usize];
    for (i, (key, _)) in rows.iter().enumerate() {
        for &r in key {
            covered_by[r].push(i);
        }
    }

    let mut covered = vec![false; subsets as usize];
    let mut chosen: Vec<usize> = Vec::new();
    let found = cover_backtrack(&rows, &covered_by, &mut covered, &mut chosen, &mut steps, budget)?;
    if found {
        Ok((
            Some(chosen.iter().map(|&i| rows[i].1.clone()).collect()),
            steps,
        ))
    } else {
        Ok((None, steps))
    }
}

fn enumerate_orders(
    prefix: &mut Vec<usize>,
    rest: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]) -> Result<(), WreathError>,
) -> Result<(), WreathError> {
    if rest.is_empty() {
        return visit(prefix);
    }
    for i in 0..rest.len() {
        let x = rest.remove(i);
        prefix.push(x);
        enumerate_orders(prefix, rest, visit)?;
        prefix.pop();
        rest.insert(i, x);
    }
    Ok(())
}

fn cover_backtrack(
    rows: &[(Vec<usize>, Wreath)],
    covered_by: &[Vec<usize>],
    covered: &mut Vec<bool>,
    chosen: &mut Vec<usize>,
    steps: &mut u64,
    budget: u64,
) -> Result<bool, WreathError> {
    let Some(next) = covered.iter().position(|&c| !c) else {
        return Ok(true);
    };
    for &row in &covered_by[next] {
        *steps += 1;
        if *steps > budget {
            return Err(WreathError::BudgetExceeded { steps: *steps });
        }
        let key = &rows[row].0;
        if key.iter().any(|&r| covered[r]) {
            continue;
        }
        for &r in key {
            covered[r] = true;
        }
        chosen.push(row);
        if cover_backtrack(rows, covered_by, covered, chosen, steps, budget)? {
            return Ok(true);
        }
        chosen.pop();
        for &r in key {
            covered[r] = false;
        }
    }
    Ok(false)
}
