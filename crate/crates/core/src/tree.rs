//! Game trees: finite prefix-closed sets of sequences over ℕ.
//!
//! Trees are stored concretely. A cut leaves child indices that no longer
//! start at 0, and the cut option names a concrete vertex, so two trees with
//! the same shape are not interchangeable here.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::Bound;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::{nat_add, omega_pow, Ordinal, Term};

/// A vertex: the sequence of child indices from the root.
pub type NodePath = Vec<u64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("node {0:?} is present but its parent is not")]
    NotPrefixClosed(NodePath),
    #[error("height {height} exceeds the bound {h}")]
    TooTall { height: usize, h: usize },
    #[error("ordinal {a} is outside [1, w^{h}]")]
    OutOfRange { a: Ordinal, h: usize },
    #[error("tree is not a comb")]
    NotAComb,
    #[error("{0:?} is not a proper prefix of the leftmost leaf")]
    NotProperPrefix(NodePath),
    #[error("right sibling {0:?} is missing")]
    MissingRightSibling(NodePath),
}

/// Lexicographic order with the convention that a sequence is padded by −1
/// beyond its length, so a proper prefix precedes its extensions.
pub fn lex_cmp(a: &[u64], b: &[u64]) -> Ordering {
    // slice ordering already places a proper prefix first
    a.cmp(b)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTree", into = "RawTree")]
pub struct GameTree {
    nodes: BTreeSet<NodePath>,
    h: usize,
}

#[derive(Serialize, Deserialize)]
struct RawTree {
    nodes: Vec<NodePath>,
    h: usize,
}

impl TryFrom<RawTree> for GameTree {
    type Error = TreeError;

    fn try_from(raw: RawTree) -> Result<Self, Self::Error> {
        GameTree::from_nodes(raw.nodes, raw.h)
    }
}

impl From<GameTree> for RawTree {
    fn from(t: GameTree) -> Self {
        RawTree {
            nodes: t.nodes.into_iter().collect(),
            h: t.h,
        }
    }
}

fn is_prefix(p: &[u64], q: &[u64]) -> bool {
    p.len() <= q.len() && q[..p.len()] == *p
}

impl GameTree {
    /// The root-only tree `{∅}`.
    pub fn root(h: usize) -> Self {
        GameTree {
            nodes: BTreeSet::from([Vec::new()]),
            h,
        }
    }

    pub fn from_nodes<I>(nodes: I, h: usize) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = NodePath>,
    {
        let nodes: BTreeSet<NodePath> = nodes.into_iter().collect();
        if nodes.is_empty() {
            return Err(TreeError::Empty);
        }
        for n in &nodes {
            if let Some((_, parent)) = n.split_last() {
                if !nodes.contains(parent) {
                    return Err(TreeError::NotPrefixClosed(n.clone()));
                }
            }
        }
        let t = GameTree { nodes, h };
        if t.height() > h {
            return Err(TreeError::TooTall {
                height: t.height(),
                h,
            });
        }
        Ok(t)
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodePath> {
        self.nodes.iter()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, p: &[u64]) -> bool {
        self.nodes.contains(p)
    }

    pub fn height(&self) -> usize {
        self.nodes.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn successor(&self, p: &[u64]) -> Option<&NodePath> {
        self.nodes
            .range::<[u64], _>((Bound::Excluded(p), Bound::Unbounded))
            .next()
    }

    pub fn is_leaf(&self, p: &[u64]) -> bool {
        self.contains(p) && self.successor(p).map_or(true, |s| !is_prefix(p, s))
    }

    pub fn leaves(&self) -> impl Iterator<Item = &NodePath> {
        self.nodes.iter().filter(|p| self.is_leaf(p))
    }

    /// Children of `p` in increasing index order.
    pub fn children<'a>(&'a self, p: &'a [u64]) -> impl Iterator<Item = &'a NodePath> + 'a {
        self.nodes
            .range::<[u64], _>((Bound::Excluded(p), Bound::Unbounded))
            .take_while(move |q| is_prefix(p, q))
            .filter(move |q| q.len() == p.len() + 1)
    }

    /// `c(T)`, the lex-minimal leaf.
    pub fn leftmost_leaf(&self) -> NodePath {
        let mut cur: NodePath = Vec::new();
        // the lex-successor of a node is its least child whenever it has one
        while let Some(next) = self.successor(&cur) {
            if next.len() == cur.len() + 1 && is_prefix(&cur, next) {
                cur = next.clone();
            } else {
                break;
            }
        }
        cur
    }

    /// `T ∪ {c(T)*i | i ∈ [0,b]}`, or `None` if that would exceed height `h`.
    pub fn expand(&self, b: u64) -> Option<GameTree> {
        let c = self.leftmost_leaf();
        if c.len() + 1 > self.h {
            return None;
        }
        let mut nodes = self.nodes.clone();
        for i in 0..=b {
            let mut child = c.clone();
            child.push(i);
            nodes.insert(child);
        }
        Some(GameTree { nodes, h: self.h })
    }

    /// Removes the subtree at `b*k` where `c(T) = b*k*σ`, provided `b*(k+1) ∈ T`.
    pub fn cut(&self, b: &[u64]) -> Result<GameTree, TreeError> {
        let c = self.leftmost_leaf();
        if b.len() >= c.len() || !is_prefix(b, &c) {
            return Err(TreeError::NotProperPrefix(b.to_vec()));
        }
        let k = c[b.len()];
        let mut sibling = b.to_vec();
        sibling.push(k + 1);
        if !self.contains(&sibling) {
            return Err(TreeError::MissingRightSibling(sibling));
        }
        let mut doomed = b.to_vec();
        doomed.push(k);
        let nodes = self
            .nodes
            .iter()
            .filter(|p| !is_prefix(&doomed, p))
            .cloned()
            .collect();
        Ok(GameTree { nodes, h: self.h })
    }

    /// Internal nodes are exactly the proper prefixes of `c(T)`.
    pub fn satisfies_reachable_invariant(&self) -> bool {
        let c = self.leftmost_leaf();
        let internal: BTreeSet<&NodePath> =
            self.nodes.iter().filter(|p| !self.is_leaf(p)).collect();
        internal.len() == c.len() && internal.iter().all(|p| p.len() < c.len() && is_prefix(p, &c))
    }

    /// Comb shape: root-only, or leftmost leaf at height `h` with all internal
    /// vertices on the leftmost path. The canonical combs of ordinals with
    /// `c_0 = 0` have a leftmost leaf without a sibling, so no sibling is required.
    pub fn is_comb(&self) -> bool {
        if self.nodes.len() == 1 {
            return true;
        }
        self.leftmost_leaf().len() == self.h && self.satisfies_reachable_invariant()
    }

    /// Renumbers every child list to `0, 1, 2, ...` preserving order.
    pub fn relabel(&self) -> GameTree {
        let mut out = BTreeSet::from([Vec::new()]);
        let mut stack = vec![(Vec::<u64>::new(), Vec::<u64>::new())];
        while let Some((old, new)) = stack.pop() {
            for (i, child) in self.children(&old).enumerate() {
                let mut renamed = new.clone();
                renamed.push(i as u64);
                out.insert(renamed.clone());
                stack.push((child.clone(), renamed));
            }
        }
        GameTree {
            nodes: out,
            h: self.h,
        }
    }

    fn weighted_leaf_sum<'a, I>(&self, leaves: I) -> Ordinal
    where
        I: Iterator<Item = &'a NodePath>,
    {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for leaf in leaves {
            *counts.entry(self.h - leaf.len()).or_default() += 1;
        }
        counts
            .into_iter()
            .rev()
            .fold(Ordinal::zero(), |acc, (e, n)| {
                nat_add(&acc, &Ordinal::monomial(Ordinal::from(e as u64), BigUint::from(n)))
            })
    }

    /// Natural sum of `ω^(h − height(v))` over every leaf `v`.
    pub fn clock_value(&self) -> Ordinal {
        self.weighted_leaf_sum(self.leaves())
    }

    /// The comb identification: the same sum with the leaf `c(T)` left out.
    pub fn comb_value(&self) -> Result<Ordinal, TreeError> {
        if !self.is_comb() {
            return Err(TreeError::NotAComb);
        }
        if self.nodes.len() == 1 {
            return Ok(omega_pow(&Ordinal::from(self.h as u64)));
        }
        let c = self.leftmost_leaf();
        Ok(self.weighted_leaf_sum(self.leaves().filter(|v| **v != c)))
    }
}

/// The canonical comb `T(a)` for `1 ≤ a ≤ ω^h`.
pub fn comb_of_ordinal(a: &Ordinal, h: usize) -> Result<GameTree, TreeError> {
    let top = omega_pow(&Ordinal::from(h as u64));
    let out_of_range = || TreeError::OutOfRange { a: a.clone(), h };
    if a.is_zero() || *a > top {
        return Err(out_of_range());
    }
    if *a == top {
        return Ok(GameTree::root(h));
    }
    // a < ω^h, so every exponent is a natural below h
    let mut coeffs = vec![0u64; h];
    for Term {
        exponent,
        coefficient,
    } in a.terms()
    {
        let e = exponent.to_u64().ok_or_else(out_of_range)? as usize;
        coeffs[e] = coefficient.to_u64().ok_or_else(out_of_range)?;
    }
    let mut nodes = BTreeSet::from([Vec::new()]);
    for g in 1..=h {
        for d in 0..=coeffs[h - g] {
            let mut p = vec![0u64; g - 1];
            p.push(d);
            nodes.insert(p);
        }
    }
    Ok(GameTree { nodes, h })
}

pub fn comb_value(t: &GameTree) -> Result<Ordinal, TreeError> {
    t.comb_value()
}

pub fn clock_value(t: &GameTree) -> Ordinal {
    t.clock_value()
}

pub fn leftmost_leaf(t: &GameTree) -> NodePath {
    t.leftmost_leaf()
}
