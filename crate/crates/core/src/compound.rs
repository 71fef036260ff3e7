//! Compound pairs: two classes whose union spans a complete graph on 2ℓ
//! vertices, and the lower bound on how many partners every class has in
//! a decomposition meeting the blue degree condition.

use crate::graph::{Graph, Params};
use crate::tiling::{all_cross_edges, Class, Decomposition};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompoundError {
    #[error("class {0:?} is not part of the decomposition")]
    ClassNotInDecomposition(Vec<usize>),
}

/// All classes `D != C` in the decomposition such that every cross pair
/// between `C` and `D` is an edge of `g` (so `C ∪ D` spans K_{2ℓ} when
/// both are cliques), sorted by lowest member id.
pub fn compound_partners(
    g: &Graph,
    d: &Decomposition,
    c: &Class,
) -> Result<Vec<Class>, CompoundError> {
    if !d.classes().contains(c) {
        return Err(CompoundError::ClassNotInDecomposition(
            c.vertices().to_vec(),
        ));
    }
    let mut out: Vec<Class> = d
        .classes()
        .iter()
        .filter(|other| *other != c && all_cross_edges(g, c, other))
        .cloned()
        .collect();
    out.sort_by_key(Class::min_vertex);
    Ok(out)
}

/// Guaranteed minimum number of compound partners per class when the
/// blue degree condition holds: `m·ℓ·α − ℓ(ℓ−1)`. Returned unclamped;
/// a nonpositive value means the guarantee is vacuous.
pub fn compound_partners_lower_bound(m: usize, p: &Params) -> f64 {
    let ell = p.ell as f64;
    m as f64 * ell * p.alpha - ell * (ell - 1.0)
}
