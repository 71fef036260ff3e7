//! Almost-ℓ-decompositions by delete-and-repair: start from the complete
//! graph, which is tiled trivially by consecutive id blocks, delete the
//! target graph's non-edges one at a time, and whenever a deletion lands
//! inside a class, pair that class with a fully joined partner class and
//! retile their union into two fresh cliques.

use crate::graph::{Graph, Params};
use thiserror::Error;

/// The vertex set of one K_ℓ copy in a decomposition: sorted, distinct,
/// non-empty vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Class {
    vertices: Vec<usize>,
}

impl Class {
    pub fn new(mut vertices: Vec<usize>) -> Result<Self, ClassError> {
        if vertices.is_empty() {
            return Err(ClassError::Empty);
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ClassError::DuplicateVertex);
        }
        Ok(Class { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn min_vertex(&self) -> usize {
        self.vertices[0]
    }

    /// New class with `out` replaced by `inn`.
    pub fn with_swapped(&self, out: usize, inn: usize) -> Class {
        let vertices = self
            .vertices
            .iter()
            .map(|&v| if v == out { inn } else { v })
            .collect();
        Class::new(vertices).expect("swap produced a duplicate vertex")
    }
}

impl std::fmt::Display for Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ids: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", ids.join(","))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassError {
    #[error("a class must contain at least one vertex")]
    Empty,
    #[error("class contains a duplicate vertex")]
    DuplicateVertex,
}

/// Pairwise vertex-disjoint classes plus the leftover vertices in no
/// class. Classes are kept sorted lexicographically and the leftover
/// ascending, so equal decompositions compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    classes: Vec<Class>,
    leftover: Vec<usize>,
}

impl Decomposition {
    pub fn new(mut classes: Vec<Class>, mut leftover: Vec<usize>) -> Self {
        classes.sort();
        leftover.sort_unstable();
        Decomposition { classes, leftover }
    }

    pub fn classes(&self) -> &[Class] {
        &self.classes
    }

    pub fn leftover(&self) -> &[usize] {
        &self.leftover
    }

    /// Index of the class containing `v`, if any. O(total vertices).
    pub fn class_index_of(&self, v: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(v))
    }

    /// Total number of vertices covered, classes plus leftover.
    pub fn vertex_count(&self) -> usize {
        self.classes.iter().map(Class::len).sum::<usize>() + self.leftover.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TilingError {
    #[error("no partner class is fully joined to the broken class")]
    NoPartner,
    #[error("repair failed while deleting non-edge {edge:?} inside class {class:?}")]
    RepairFailed {
        edge: (usize, usize),
        class: Vec<usize>,
    },
    #[error("retile precondition violated: the class union is not complete minus the deleted edge")]
    PreconditionViolated,
}

/// True iff every pair inside `s` is an edge of `g`; singletons and the
/// empty set count as cliques.
pub fn is_clique(g: &Graph, s: &[usize]) -> bool {
    for (i, &u) in s.iter().enumerate() {
        for &v in &s[i + 1..] {
            if !g.has_edge(u, v) {
                return false;
            }
        }
    }
    true
}

/// True iff all |a|·|b| cross pairs between the two classes are edges.
pub fn all_cross_edges(g: &Graph, a: &Class, b: &Class) -> bool {
    a.vertices()
        .iter()
        .all(|&u| b.vertices().iter().all(|&v| g.has_edge(u, v)))
}

fn partner_index(classes: &[Class], virtual_g: &Graph, a_idx: usize) -> Option<usize> {
    (0..classes.len())
        .find(|&i| i != a_idx && all_cross_edges(virtual_g, &classes[a_idx], &classes[i]))
}

/// First class `B != A` in list order such that every cross pair between
/// `A` and `B` is an edge of `virtual_g`.
pub fn find_bipartite_partner(
    classes: &[Class],
    virtual_g: &Graph,
    a: &Class,
) -> Result<Class, TilingError> {
    let a_idx = classes
        .iter()
        .position(|c| c == a)
        .ok_or(TilingError::NoPartner)?;
    partner_index(classes, virtual_g, a_idx)
        .map(|i| classes[i].clone())
        .ok_or(TilingError::NoPartner)
}

/// Splits `A ∪ B` into two fresh classes separating the endpoints of the
/// deleted edge `e = {a, b} ⊆ A`. The first new class is `{a}` plus the
/// ℓ−1 smallest remaining ids; the second takes the rest, including `b`.
/// Requires `A ∪ B` to span a complete graph minus exactly `e`.
pub fn retile_pair(
    a: &Class,
    b: &Class,
    e: (usize, usize),
    virtual_g_after_delete: &Graph,
) -> Result<(Class, Class), TilingError> {
    let (ea, eb) = if e.0 < e.1 { e } else { (e.1, e.0) };
    if !a.contains(ea) || !a.contains(eb) {
        return Err(TilingError::PreconditionViolated);
    }
    let mut union: Vec<usize> = a.vertices().to_vec();
    union.extend_from_slice(b.vertices());
    union.sort_unstable();
    if union.windows(2).any(|w| w[0] == w[1]) {
        return Err(TilingError::PreconditionViolated);
    }
    for (i, &u) in union.iter().enumerate() {
        for &v in &union[i + 1..] {
            let expected = (u, v) != (ea, eb);
            if virtual_g_after_delete.has_edge(u, v) != expected {
                return Err(TilingError::PreconditionViolated);
            }
        }
    }
    let ell = a.len();
    let mut remaining: Vec<usize> = union
        .iter()
        .copied()
        .filter(|&v| v != ea && v != eb)
        .collect();
    let mut first = vec![ea];
    first.extend(remaining.drain(..ell - 1));
    let mut second = vec![eb];
    second.extend(remaining);
    Ok((
        Class::new(first).expect("retile produced duplicates"),
        Class::new(second).expect("retile produced duplicates"),
    ))
}

/// Computes an almost-ℓ-decomposition of `g`: ⌊m/ℓ⌋ vertex-disjoint
/// cliques of size ℓ plus m mod ℓ leftover vertices.
///
/// The construction tiles the complete graph by consecutive blocks, then
/// deletes the non-edges of `g` in lexicographic order from a mutable
/// "virtual" copy; a deletion inside a class triggers a partner search
/// and a retile of the pair. The guarantee holds when the minimum degree
/// clears the blue threshold and m > 2(ℓ−1)/α, but the construction is
/// attempted regardless; `RepairFailed` reports the first unrepairable
/// deletion.
pub fn almost_ell_decomposition(g: &Graph, p: &Params) -> Result<Decomposition, TilingError> {
    let m = g.m();
    let ell = p.ell;
    let count = m / ell;
    let mut classes: Vec<Class> = (0..count)
        .map(|i| Class::new((i * ell..(i + 1) * ell).collect()).unwrap())
        .collect();
    let leftover: Vec<usize> = (count * ell..m).collect();

    // slot[v] = index of the class currently holding v
    let mut slot: Vec<Option<usize>> = vec![None; m];
    for (i, c) in classes.iter().enumerate() {
        for &v in c.vertices() {
            slot[v] = Some(i);
        }
    }

    let mut virt = Graph::complete(m);
    for (a, b) in g.non_edges() {
        virt.remove_edge(a, b);
        let (sa, sb) = (slot[a], slot[b]);
        if sa.is_none() || sa != sb {
            continue;
        }
        let broken = sa.unwrap();
        let partner = partner_index(&classes, &virt, broken).ok_or_else(|| {
            TilingError::RepairFailed {
                edge: (a, b),
                class: classes[broken].vertices().to_vec(),
            }
        })?;
        let (c1, c2) = retile_pair(&classes[broken], &classes[partner], (a, b), &virt)?;
        for &v in c1.vertices() {
            slot[v] = Some(broken);
        }
        for &v in c2.vertices() {
            slot[v] = Some(partner);
        }
        classes[broken] = c1;
        classes[partner] = c2;
        debug_assert!(classes.iter().all(|c| is_clique(&virt, c.vertices())));
        debug_assert!(
            (0..m).all(|v| slot[v].is_none_or(|i| classes[i].contains(v))),
            "slot map out of sync after retile"
        );
    }

    assert!(
        classes.iter().all(|c| is_clique(g, c.vertices())),
        "delete-and-repair finished with a non-clique class"
    );
    Ok(Decomposition::new(classes, leftover))
}
