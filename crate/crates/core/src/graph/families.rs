//! Standard graph families.

use super::InteractionGraph;

pub fn complete(m: usize) -> InteractionGraph {
    let edges = (1..=m).flat_map(|i| (i + 1..=m).map(move |j| (i, j)));
    InteractionGraph::new(m, edges).expect("complete graph is simple")
}

pub fn edgeless(m: usize) -> InteractionGraph {
    InteractionGraph::new(m, []).expect("edgeless graph is simple")
}

/// Path `1 - 2 - ... - n`.
pub fn path(n: usize) -> InteractionGraph {
    InteractionGraph::new(n, (1..n).map(|i| (i, i + 1))).expect("path is simple")
}

/// Cycle `1 - 2 - ... - m - 1`; requires `m >= 3`.
pub fn cycle(m: usize) -> InteractionGraph {
    assert!(m >= 3, "a cycle needs at least three vertices");
    InteractionGraph::new(m, (1..=m).map(|i| (i, i % m + 1))).expect("cycle is simple")
}

/// Star on `m` vertices with the given center.
pub fn star(m: usize, center: usize) -> InteractionGraph {
    InteractionGraph::new(m, (1..=m).filter(|&v| v != center).map(|v| (center, v)))
        .expect("star is simple")
}

/// Fan `F_{k,n}`: edgeless part on `1..=k` joined with a path on `k+1..=k+n`.
pub fn fan(k: usize, n: usize) -> InteractionGraph {
    assert!(k >= 1 && n >= 1, "fan parameters must be positive");
    edgeless(k).join(&path(n))
}

/// Cocktail party graph on `m` (even) vertices; the missing pairs are `{2t-1, 2t}`.
pub fn cocktail_party(m: usize) -> InteractionGraph {
    assert!(m.is_multiple_of(2), "cocktail party graph needs an even vertex count");
    let edges = (1..=m)
        .flat_map(|i| (i + 1..=m).map(move |j| (i, j)))
        .filter(|&(i, j)| !(i % 2 == 1 && j == i + 1));
    InteractionGraph::new(m, edges).expect("cocktail party graph is simple")
}
