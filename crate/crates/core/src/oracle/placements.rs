//! Distinct labeled copies of a small template inside `K_n`.
//!
//! A uniform random injection of the template's vertices hits every distinct
//! copy with the same multiplicity (the template's automorphism count), so
//! the copy list is a uniform probability space on its own.

use std::collections::BTreeSet;

use num_integer::binomial;

use crate::error::{Error, Result};
use crate::model::GraphTemplate;

/// Templates up to this size are relabeled by full permutation search.
pub const MAX_TEMPLATE_VERTICES: usize = 9;
pub const MAX_N: usize = 64;

/// One copy: its vertex set as a bitmask over `0..n` and its edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    pub members: u64,
    pub edges: Vec<(u8, u8)>,
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Distinct edge sets obtained by relabeling the template onto `0..x`.
fn distinct_labelings(template: &GraphTemplate) -> Vec<Vec<(u8, u8)>> {
    let x = template.vertices;
    let mut perm: Vec<usize> = (0..x).collect();
    let mut out = BTreeSet::new();
    loop {
        let mut edges: Vec<(u8, u8)> = template
            .edges
            .iter()
            .map(|&[a, b]| {
                let (u, v) = (perm[a as usize - 1] as u8, perm[b as usize - 1] as u8);
                (u.min(v), u.max(v))
            })
            .collect();
        edges.sort_unstable();
        out.insert(edges);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out.into_iter().collect()
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Number of distinct copies of `template` in `K_n`.
pub fn placement_count(template: &GraphTemplate, n: usize) -> Result<u128> {
    check_sizes(template, n)?;
    Ok(binomial(n as u128, template.vertices as u128) * distinct_labelings(template).len() as u128)
}

fn check_sizes(template: &GraphTemplate, n: usize) -> Result<()> {
    if template.vertices > MAX_TEMPLATE_VERTICES {
        return Err(Error::precondition(format!(
            "template with {} vertices is too large to enumerate",
            template.vertices
        )));
    }
    if n > MAX_N || template.vertices > n {
        return Err(Error::precondition(format!(
            "cannot place a {}-vertex template in K_{n}",
            template.vertices
        )));
    }
    Ok(())
}

/// Every distinct copy of `template` in `K_n`.
pub fn placements(template: &GraphTemplate, n: usize) -> Result<Vec<Placement>> {
    check_sizes(template, n)?;
    let labelings = distinct_labelings(template);
    let mut out = Vec::new();
    combinations(n, template.vertices, |subset| {
        let members = subset.iter().fold(0u64, |m, &v| m | (1 << v));
        for lab in &labelings {
            let mut edges: Vec<(u8, u8)> = lab
                .iter()
                .map(|&(a, b)| (subset[a as usize] as u8, subset[b as usize] as u8))
                .collect();
            edges.sort_unstable();
            out.push(Placement {
                members,
                edges: edges.clone(),
            });
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_counts() {
        assert_eq!(placement_count(&GraphTemplate::k2(), 4).unwrap(), 6);
        assert_eq!(placement_count(&GraphTemplate::cherry(), 5).unwrap(), 30);
        assert_eq!(placement_count(&GraphTemplate::clique(3), 5).unwrap(), 10);
        let c4 = GraphTemplate {
            vertices: 4,
            edges: vec![[1, 2], [2, 3], [3, 4], [4, 1]],
        };
        // 4!/8 = 3 labeled 4-cycles per 4-set
        assert_eq!(placement_count(&c4, 6).unwrap(), 45);
        assert_eq!(placements(&c4, 6).unwrap().len(), 45);
    }

    #[test]
    fn placements_are_distinct() {
        let all = placements(&GraphTemplate::cherry(), 6).unwrap();
        let set: BTreeSet<_> = all.iter().map(|p| p.edges.clone()).collect();
        assert_eq!(set.len(), all.len());
        assert_eq!(all.len(), 3 * 20);
    }
}
