//! Unbalanced cutting of an ordered universe into consecutive pieces.

use std::collections::HashSet;

use crate::budget::{binomial, Budget};
use crate::error::Result;

/// One cut: the reordered universe and the stage boundaries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cut {
    /// `order[r]` is the original element placed at rank `r`.
    pub order: Vec<usize>,
    /// `f[i]` is the rank (in `order`) of the last element of piece `i+1`.
    pub f: Vec<usize>,
}

impl Cut {
    /// `rank[e]`: the new rank of original element `e`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (r, &e) in self.order.iter().enumerate() {
            rank[e] = r;
        }
        rank
    }
}

/// Upper bound on the number of cut tuples over `n` elements.
pub fn cut_count_estimate(n: usize, pieces: usize) -> u128 {
    binomial(n + 1, 2).saturating_pow(pieces as u32)
}

/// Enumerates every way of cutting `pieces` non-empty pieces off `0..n`:
/// piece `i` consists of the elements not taken by earlier pieces lying
/// between a chosen left and right end. Calls `visit` once per distinct
/// resulting cut and stops at the first `true`.
pub fn for_each_cut(
    n: usize,
    pieces: usize,
    budget: &mut Budget,
    mut visit: impl FnMut(&Cut, &mut Budget) -> Result<bool>,
) -> Result<bool> {
    budget.require(cut_count_estimate(n, pieces))?;
    let mut seen = HashSet::new();
    let mut taken = vec![false; n];
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(pieces);
    rec(n, pieces, &mut taken, &mut blocks, &mut seen, budget, &mut visit)
}

fn rec(
    n: usize,
    pieces: usize,
    taken: &mut [bool],
    blocks: &mut Vec<Vec<usize>>,
    seen: &mut HashSet<Vec<Vec<usize>>>,
    budget: &mut Budget,
    visit: &mut impl FnMut(&Cut, &mut Budget) -> Result<bool>,
) -> Result<bool> {
    if blocks.len() == pieces {
        if !seen.insert(blocks.clone()) {
            return Ok(false);
        }
        budget.spend(1)?;
        let mut order = Vec::with_capacity(n);
        let mut f = Vec::with_capacity(pieces);
        for b in blocks.iter() {
            order.extend_from_slice(b);
            f.push(order.len() - 1);
        }
        order.extend((0..n).filter(|&e| !taken[e]));
        return visit(&Cut { order, f }, budget);
    }
    let rest: Vec<usize> = (0..n).filter(|&e| !taken[e]).collect();
    for a in 0..rest.len() {
        for b in a..rest.len() {
            let block = rest[a..=b].to_vec();
            for &e in &block {
                taken[e] = true;
            }
            blocks.push(block);
            let hit = rec(n, pieces, taken, blocks, seen, budget, visit)?;
            let block = blocks.pop().expect("pushed above");
            for e in block {
                taken[e] = false;
            }
            if hit {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
