//! Transfer as a sum over planar rooted trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use super::{Method, Setup, Transferred};
use crate::ainf::{suspension_exponent, table_apply, words_landing_in, AInfinityStructure};
use crate::complex::Contraction;
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::words::{Coderivation, Table, Word};

/// Default cap on the number of trees enumerated for a single arity.
pub const DEFAULT_TREE_BUDGET: u128 = 200_000;

/// A planar rooted tree; internal vertices have at least two children.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf,
    Node(Vec<Tree>),
}

impl Tree {
    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Node(ch) => ch.iter().map(Tree::leaves).sum(),
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf => f.write_str("|"),
            Tree::Node(ch) => {
                f.write_str("(")?;
                for c in ch {
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Number of trees with `n` leaves whose vertex arities lie in `arities`.
pub fn count_trees(n: usize, arities: &BTreeSet<usize>) -> u128 {
    // forests[k][m]: ordered forests of k trees with m leaves in total
    let mut trees = vec![0u128; n + 1];
    if n >= 1 {
        trees[1] = 1;
    }
    for m in 2..=n {
        let mut total = 0u128;
        for &j in arities.iter().filter(|&&j| j >= 2 && j <= m) {
            total = total.saturating_add(forests(j, m, &trees));
        }
        trees[m] = total;
    }
    if n >= 2 {
        trees[n]
    } else {
        0
    }
}

fn forests(k: usize, m: usize, trees: &[u128]) -> u128 {
    let mut row = vec![0u128; m + 1];
    row[0] = 1;
    for _ in 0..k {
        let mut next = vec![0u128; m + 1];
        for (used, &ways) in row.iter().enumerate() {
            if ways == 0 {
                continue;
            }
            for add in 1..=m - used {
                if add < trees.len() && trees[add] > 0 {
                    next[used + add] = next[used + add].saturating_add(ways.saturating_mul(trees[add]));
                }
            }
        }
        row = next;
    }
    row[m]
}

/// All trees with `n ≥ 2` leaves and internal arities in `arities`, in
/// lexicographic order of the leaf splittings.
pub fn enumerate_trees(n: usize, arities: &BTreeSet<usize>, budget: u128) -> Result<Vec<Tree>> {
    let count = count_trees(n, arities);
    if count > budget {
        return Err(Error::Resource(format!("{count} trees with {n} leaves exceed the budget of {budget}")));
    }
    let mut memo: BTreeMap<usize, Vec<Tree>> = BTreeMap::new();
    memo.insert(1, vec![Tree::Leaf]);
    for m in 2..=n {
        let mut out = Vec::new();
        for &j in arities.iter().filter(|&&j| j >= 2 && j <= m) {
            for split in splits(m, j) {
                let mut acc: Vec<Vec<Tree>> = vec![vec![]];
                for &part in &split {
                    let options = &memo[&part];
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            options.iter().map(move |t| {
                                let mut p = prefix.clone();
                                p.push(t.clone());
                                p
                            })
                        })
                        .collect();
                }
                out.extend(acc.into_iter().map(Tree::Node));
            }
        }
        memo.insert(m, out);
    }
    Ok(if n >= 2 { memo.remove(&n).unwrap_or_default() } else { vec![] })
}

/// Ordered splittings of `m` into `j` positive parts.
fn splits(m: usize, j: usize) -> Vec<Vec<usize>> {
    crate::ainf::compositions(m).into_iter().filter(|c| c.len() == j).collect()
}

struct Evaluator<'s, 'a> {
    setup: &'s Setup<'a>,
    bar: Coderivation,
}

impl Evaluator<'_, '_> {
    /// `b_j` applied to the values of the children.
    fn vertex(&self, children: &[Tree], w: &[u32]) -> Lin<usize> {
        let Some(table) = self.bar.component(children.len()) else {
            return Lin::zero();
        };
        let one = self.setup.big.field().one();
        let mut inputs: Lin<Word> = Lin::single(Word::new(), one);
        let mut pos = 0;
        for child in children {
            let k = child.leaves();
            let value = self.subtree(child, &w[pos..pos + k]);
            pos += k;
            if value.is_zero() {
                return Lin::zero();
            }
            let mut next = Lin::zero();
            for (u, c) in &inputs {
                for (&l, x) in &value {
                    let mut v = u.clone();
                    v.push(l as u32);
                    next.add_term(v, c * x);
                }
            }
            inputs = next;
        }
        let mut out = Lin::zero();
        for (u, c) in &inputs {
            out.add_scaled(&table_apply(table, u), c);
        }
        out
    }

    /// Value of a non-root subtree: `∇` at leaves, `−h_s b_j` at vertices.
    fn subtree(&self, t: &Tree, w: &[u32]) -> Lin<usize> {
        match t {
            Tree::Leaf => self.setup.nabla(w[0]),
            Tree::Node(ch) => {
                let v = self.vertex(ch, w);
                v.map_linear(|&l| self.setup.h_s(l as u32)).neg()
            }
        }
    }
}

/// Sums the tree formulas for `bₙ` and `fₙ`.
pub fn transfer_trees(input: &AInfinityStructure, c: &Contraction, max: usize, budget: u128) -> Result<Transferred> {
    let s = Setup::new(input, c, max)?;
    let mut bar = input.to_bar();
    bar.components.remove(&1);
    let arities: BTreeSet<usize> = bar.components.keys().copied().collect();
    for n in 2..=max {
        let count = count_trees(n, &arities);
        if count > budget {
            return Err(Error::Resource(format!("{count} trees with {n} leaves exceed the budget of {budget}")));
        }
    }
    let ev = Evaluator { setup: &s, bar };
    let small_degs: BTreeSet<i64> = s.ssmall.degrees().iter().copied().collect();
    let big_degs: BTreeSet<i64> = s.sbig.degrees().iter().copied().collect();
    let mut ops = BTreeMap::new();
    let mut comps = BTreeMap::new();
    comps.insert(
        1,
        (0..s.small.len())
            .map(|i| (Word::from_slice(&[i as u32]), s.nabla(i as u32)))
            .filter(|(_, v)| !v.is_zero())
            .collect::<Table>(),
    );
    for n in 2..=max {
        let trees = enumerate_trees(n, &arities, budget)?;
        let words = words_landing_in(&s.ssmall, n, -1, &small_degs);
        let table: Table = words
            .par_iter()
            .map(|w| {
                let mut acc = Lin::zero();
                for t in &trees {
                    if let Tree::Node(ch) = t {
                        acc.add_assign(&s.c.pi.apply(&ev.vertex(ch, w)));
                    }
                }
                (w.clone(), acc)
            })
            .filter(|(_, v)| !v.is_zero())
            .collect();
        ops.insert(n, table);
        let words = words_landing_in(&s.ssmall, n, 0, &big_degs);
        let table: Table = words
            .par_iter()
            .map(|w| {
                let mut acc = Lin::zero();
                for t in &trees {
                    acc.add_assign(&ev.subtree(t, w));
                }
                let negate = suspension_exponent(w, &s.small).rem_euclid(2) == 1;
                (w.clone(), acc.signed(negate))
            })
            .filter(|(_, v)| !v.is_zero())
            .collect();
        comps.insert(n, table);
    }
    let structure = s.from_bar(ops)?;
    let morphism = s.morphism(&structure, comps)?;
    Ok(Transferred { method: Method::Trees, structure, morphism: Some(morphism) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_trees_are_catalan() {
        let two: BTreeSet<usize> = [2].into();
        let counts: Vec<u128> = (2..=7).map(|n| count_trees(n, &two)).collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42, 132]);
        assert_eq!(enumerate_trees(5, &two, 1000).unwrap().len(), 14);
    }

    #[test]
    fn all_arities_give_little_schroeder_numbers() {
        let all: BTreeSet<usize> = (2..=6).collect();
        let counts: Vec<u128> = (2..=6).map(|n| count_trees(n, &all)).collect();
        assert_eq!(counts, vec![1, 3, 11, 45, 197]);
        let trees = enumerate_trees(4, &all, 1000).unwrap();
        assert_eq!(trees.len(), 11);
        assert!(trees.iter().all(|t| t.leaves() == 4));
    }

    #[test]
    fn budget_is_enforced() {
        let two: BTreeSet<usize> = [2].into();
        assert!(matches!(enumerate_trees(10, &two, 100), Err(Error::Resource(_))));
    }
}
