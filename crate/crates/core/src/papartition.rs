//! Families of (k,ℓ)-papartitions of `[n]`: a papartition is ℓ pairwise
//! disjoint k-element subsets. The construction works on a two-colored
//! meta-instance whose vertices are all k-subsets of `[n]` — blue joins
//! disjoint subsets, red joins subsets overlapping in more than k/2
//! elements — so blue K_ℓ copies decode to papartitions, and two
//! papartitions are too close exactly when their classes span an
//! alternating bag.

use crate::graph::{Graph, Params, TwoColoredInstance};
use crate::oracle;
use crate::repair;
use crate::tiling::Decomposition;
use thiserror::Error;

/// Exact binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

#[derive(Debug, Error, PartialEq)]
pub enum PapartitionError {
    #[error("invalid subset universe: need 1 <= k <= n, got n={n}, k={k}")]
    InvalidUniverse { n: usize, k: usize },
    #[error("subset or rank out of range for the universe")]
    OutOfRange,
    #[error("meta-instance would have {size} vertices, above the cap {cap}")]
    SizeOverflow { size: u64, cap: usize },
    #[error("a papartition needs ell*k <= n, got ell={ell}, k={k}, n={n}")]
    InfeasibleBlocks { n: usize, k: usize, ell: usize },
    #[error("blocks must be disjoint k-sets of equal size")]
    MalformedBlocks,
    #[error(transparent)]
    Params(#[from] crate::graph::ParamsError),
    #[error("construction failed for n={n}, k={k}, ell={ell}: {reason}")]
    ConstructionFailed {
        n: usize,
        k: usize,
        ell: usize,
        reason: String,
    },
}

/// The k-subsets of `[n] = {1..n}` identified with ranks
/// `0..C(n,k)` in colexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetUniverse {
    n: usize,
    k: usize,
    size: u64,
}

impl SubsetUniverse {
    pub fn new(n: usize, k: usize) -> Result<Self, PapartitionError> {
        if k < 1 || k > n {
            return Err(PapartitionError::InvalidUniverse { n, k });
        }
        Ok(SubsetUniverse {
            n,
            k,
            size: binomial(n, k),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    /// Colexicographic rank of a sorted k-subset `{a1 < … < ak}`:
    /// the sum of `C(a_i − 1, i)`.
    pub fn rank(&self, subset: &[usize]) -> Result<usize, PapartitionError> {
        if subset.len() != self.k {
            return Err(PapartitionError::OutOfRange);
        }
        let mut rank: u64 = 0;
        let mut prev = 0usize;
        for (i, &a) in subset.iter().enumerate() {
            if a <= prev || a > self.n {
                return Err(PapartitionError::OutOfRange);
            }
            rank += binomial(a - 1, i + 1);
            prev = a;
        }
        Ok(rank as usize)
    }

    /// Inverse of [`SubsetUniverse::rank`].
    pub fn unrank(&self, rank: usize) -> Result<Vec<usize>, PapartitionError> {
        if (rank as u64) >= self.size {
            return Err(PapartitionError::OutOfRange);
        }
        let mut remaining = rank as u64;
        let mut subset = vec![0usize; self.k];
        for i in (1..=self.k).rev() {
            // largest x with C(x, i) <= remaining; element is x + 1
            let mut x = i - 1;
            while binomial(x + 1, i) <= remaining {
                x += 1;
            }
            remaining -= binomial(x, i);
            subset[i - 1] = x + 1;
        }
        Ok(subset)
    }

    /// All subsets in rank order.
    pub fn all_subsets(&self) -> Vec<Vec<usize>> {
        (0..self.size as usize)
            .map(|r| self.unrank(r).unwrap())
            .collect()
    }
}

/// ℓ pairwise disjoint k-subsets of `[n]`, each block sorted, blocks
/// ordered by their minimum element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Papartition {
    blocks: Vec<Vec<usize>>,
}

impl Papartition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self, PapartitionError> {
        if blocks.is_empty() {
            return Err(PapartitionError::MalformedBlocks);
        }
        let k = blocks[0].len();
        let mut seen = std::collections::BTreeSet::new();
        for block in &mut blocks {
            if block.len() != k || block.is_empty() {
                return Err(PapartitionError::MalformedBlocks);
            }
            block.sort_unstable();
            for &x in block.iter() {
                if !seen.insert(x) {
                    return Err(PapartitionError::MalformedBlocks);
                }
            }
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Papartition { blocks })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// True iff the two papartitions contain distinct members `A1, B1` in
/// the first and distinct members `A2, B2` in the second with
/// `|A1 ∩ A2| > k/2` and `|B1 ∩ B2| > k/2` (both strict).
pub fn too_close(p: &Papartition, q: &Papartition, k: usize) -> bool {
    let overlap_exceeds_half = |a: &[usize], b: &[usize]| -> bool {
        let inter = a.iter().filter(|x| b.contains(x)).count();
        2 * inter > k
    };
    let pb = p.blocks();
    let qb = q.blocks();
    for i1 in 0..pb.len() {
        for j1 in 0..qb.len() {
            if !overlap_exceeds_half(&pb[i1], &qb[j1]) {
                continue;
            }
            for (i2, a2) in pb.iter().enumerate() {
                if i2 == i1 {
                    continue;
                }
                for (j2, b2) in qb.iter().enumerate() {
                    if j2 != j1 && overlap_exceeds_half(a2, b2) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Default cap on the number of meta-instance vertices.
pub const DEFAULT_META_CAP: usize = 100_000;

/// Builds the two-colored meta-instance on all k-subsets of `[n]`:
/// blue joins disjoint subsets, red joins subsets whose intersection is
/// strictly larger than k/2. A pair can never be both, so the colors are
/// disjoint by construction.
pub fn build_meta_instance(n: usize, k: usize) -> Result<TwoColoredInstance, PapartitionError> {
    build_meta_instance_capped(n, k, DEFAULT_META_CAP)
}

pub fn build_meta_instance_capped(
    n: usize,
    k: usize,
    cap: usize,
) -> Result<TwoColoredInstance, PapartitionError> {
    let universe = SubsetUniverse::new(n, k)?;
    if universe.size() > cap as u64 {
        return Err(PapartitionError::SizeOverflow {
            size: universe.size(),
            cap,
        });
    }
    let m = universe.size() as usize;
    let subsets = universe.all_subsets();
    let mut blue = Graph::empty(m);
    let mut red = Graph::empty(m);
    for u in 0..m {
        for v in (u + 1)..m {
            let inter = subsets[u]
                .iter()
                .filter(|x| subsets[v].binary_search(x).is_ok())
                .count();
            if inter == 0 {
                blue.add_edge(u, v);
            } else if 2 * inter > k {
                red.add_edge(u, v);
            }
        }
    }
    Ok(TwoColoredInstance::new(blue, red).expect("disjoint by construction"))
}

/// Decodes the classes of a meta-decomposition into papartitions,
/// ordered by the rank of each papartition's lexicographically smallest
/// block.
fn decode_decomposition(
    universe: &SubsetUniverse,
    d: &Decomposition,
) -> Result<Vec<Papartition>, PapartitionError> {
    let mut out: Vec<(usize, Papartition)> = Vec::with_capacity(d.classes().len());
    for class in d.classes() {
        let blocks: Result<Vec<Vec<usize>>, _> = class
            .vertices()
            .iter()
            .map(|&r| universe.unrank(r))
            .collect();
        let pap = Papartition::new(blocks?)?;
        let key = universe.rank(&pap.blocks()[0])?;
        out.push((key, pap));
    }
    out.sort_by_key(|(key, _)| *key);
    Ok(out.into_iter().map(|(_, pap)| pap).collect())
}

/// Constructs ⌊C(n,k)/ℓ⌋ papartitions such that no k-subset appears in
/// two of them and no two are too close. Runs the bag-free repair
/// pipeline on the meta-instance with `alpha` defaulting to `1/(2ℓ²)`;
/// if the pipeline fails (expected at small n, where the degree
/// conditions cannot hold) falls back to the exhaustive bag-free search.
pub fn construct_papartitions(
    n: usize,
    k: usize,
    ell: usize,
    alpha: Option<f64>,
) -> Result<Vec<Papartition>, PapartitionError> {
    let universe = SubsetUniverse::new(n, k)?;
    if ell == 0 || k * ell > n {
        return Err(PapartitionError::InfeasibleBlocks { n, k, ell });
    }
    let inst = build_meta_instance(n, k)?;
    let alpha = alpha.unwrap_or(1.0 / (2 * ell * ell) as f64);
    let mut params = Params::new(ell, alpha)?;
    params.k = Some(k);
    params.n = Some(n);

    let decomposition = match repair::bag_free_decomposition(&inst, &params) {
        Ok((d, _trace)) => Some(d),
        Err(repair::RepairError::Tiling(_)) | Err(repair::RepairError::NoValidSwap { .. }) => None,
        Err(other) => {
            return Err(PapartitionError::ConstructionFailed {
                n,
                k,
                ell,
                reason: other.to_string(),
            })
        }
    };
    let decomposition = match decomposition {
        Some(d) => d,
        None => match oracle::exhaustive_bag_free_tiling(&inst, ell) {
            Ok(Some(d)) => d,
            Ok(None) => {
                return Err(PapartitionError::ConstructionFailed {
                    n,
                    k,
                    ell,
                    reason: "pipeline failed and the exhaustive search found no bag-free tiling"
                        .into(),
                })
            }
            Err(e) => {
                return Err(PapartitionError::ConstructionFailed {
                    n,
                    k,
                    ell,
                    reason: e.to_string(),
                })
            }
        },
    };
    decode_decomposition(&universe, &decomposition)
}
