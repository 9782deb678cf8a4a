//! Planar rooted trees with a given number of leaves.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a tree needs at least 2 leaves, got {0}")]
    TooFewLeaves(usize),
    #[error("vertex arity must be at least 2, got {0}")]
    BadArity(usize),
}

/// A planar rooted tree whose internal vertices have at least two children.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum PlanarTree {
    Leaf,
    Node(Vec<PlanarTree>),
}

impl PlanarTree {
    pub fn leaves(&self) -> usize {
        match self {
            PlanarTree::Leaf => 1,
            PlanarTree::Node(children) => children.iter().map(PlanarTree::leaves).sum(),
        }
    }

    pub fn is_binary(&self) -> bool {
        match self {
            PlanarTree::Leaf => true,
            PlanarTree::Node(children) => children.len() == 2 && children.iter().all(PlanarTree::is_binary),
        }
    }

    pub fn internal_vertices(&self) -> usize {
        match self {
            PlanarTree::Leaf => 0,
            PlanarTree::Node(children) => 1 + children.iter().map(PlanarTree::internal_vertices).sum::<usize>(),
        }
    }
}

impl fmt::Display for PlanarTree {
    /// Bracket notation with `x` for leaves, e.g. `((x x) x)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanarTree::Leaf => write!(f, "x"),
            PlanarTree::Node(children) => {
                write!(f, "(")?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for PlanarTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All planar trees with `n` leaves and vertex arity at most `max_arity`
/// (`None` for unbounded), in a deterministic order: arity ascending, then
/// child sizes lexicographically, then children left to right.
pub fn enumerate_trees(n: usize, max_arity: Option<usize>) -> Result<Vec<PlanarTree>, TreeError> {
    if n < 2 {
        return Err(TreeError::TooFewLeaves(n));
    }
    if let Some(a) = max_arity {
        if a < 2 {
            return Err(TreeError::BadArity(a));
        }
    }
    let mut memo: Vec<Vec<PlanarTree>> = vec![Vec::new(), vec![PlanarTree::Leaf]];
    for m in 2..=n {
        let mut out = Vec::new();
        let top = max_arity.unwrap_or(m).min(m);
        for arity in 2..=top {
            for sizes in compositions(m, arity) {
                let mut partial: Vec<Vec<PlanarTree>> = vec![Vec::new()];
                for &s in &sizes {
                    let mut next = Vec::new();
                    for prefix in &partial {
                        for t in &memo[s] {
                            let mut p = prefix.clone();
                            p.push(t.clone());
                            next.push(p);
                        }
                    }
                    partial = next;
                }
                out.extend(partial.into_iter().map(PlanarTree::Node));
            }
        }
        memo.push(out);
    }
    Ok(memo.swap_remove(n))
}

/// Compositions of `n` into `k` positive parts, lexicographic.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 1..=n - (k - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
