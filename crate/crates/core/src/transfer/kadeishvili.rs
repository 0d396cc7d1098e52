//! Kadeishvili's inductive construction on a contraction onto homology.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{Method, Setup, Transferred};
use crate::ainf::{table_apply, word_name, words_landing_in, AInfinityStructure};
use crate::complex::Contraction;
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::words::{degree_of, Table, Word};

/// Sign exponent of `f_s ⋅ f_{n−s}` in `Ψₙ`; `prefix` is `|a₁| + … + |a_s|`.
pub fn epsilon1(n: usize, s: usize, prefix: i64) -> i64 {
    s as i64 + (n as i64 - s as i64 + 1) * prefix
}

/// Sign exponent of `f_{n−j+1}(…, m_j, …)` in `Ψₙ`; `prefix` is
/// `|a₁| + … + |a_k|`.
pub fn epsilon2(n: usize, k: usize, j: usize, prefix: i64) -> i64 {
    k as i64 + j as i64 * (n as i64 - k as i64 - j as i64 + prefix)
}

fn odd(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

/// Builds `mₙ` and `fₙ` inductively with `mₙ = −πΨₙ` and `fₙ = hΨₙ`.
/// The small side must have zero differential.
pub fn transfer_kadeishvili(input: &AInfinityStructure, c: &Contraction, max: usize) -> Result<Transferred> {
    let s = Setup::new(input, c, max)?;
    let alg = s.strict()?;
    if !c.small.d().is_zero() {
        return Err(Error::Structure("the Kadeishvili method needs a contraction onto homology".into()));
    }
    let m = &s.small;
    let a_degs: BTreeSet<i64> = s.big.degrees().iter().copied().collect();
    let mut ops: BTreeMap<usize, Table> = BTreeMap::new();
    let mut comps: BTreeMap<usize, Table> = BTreeMap::new();
    comps.insert(
        1,
        (0..m.len())
            .map(|i| (Word::from_slice(&[i as u32]), s.nabla(i as u32)))
            .filter(|(_, v)| !v.is_zero())
            .collect(),
    );
    for n in 2..=max {
        let words = words_landing_in(m, n, n as i64 - 2, &a_degs);
        let rows: Vec<(Word, Lin<usize>)> = words
            .par_iter()
            .map(|w| {
                let f = |k: usize, u: &[u32]| comps.get(&k).map(|t| table_apply(t, u)).unwrap_or_default();
                let mut psi = Lin::zero();
                for sp in 1..n {
                    let left = f(sp, &w[..sp]);
                    if left.is_zero() {
                        continue;
                    }
                    let right = f(n - sp, &w[sp..]);
                    let negate = odd(epsilon1(n, sp, degree_of(&w[..sp], m)));
                    psi.add_assign(&alg.mul(&left, &right).signed(negate));
                }
                for j in 2..n {
                    let Some(mj) = ops.get(&j) else { continue };
                    for k in 0..=n - j {
                        let inner = table_apply(mj, &w[k..k + j]);
                        let negate = odd(epsilon2(n, k, j, degree_of(&w[..k], m)));
                        for (&l, coeff) in &inner {
                            let mut v = Word::from_slice(&w[..k]);
                            v.push(l as u32);
                            v.extend_from_slice(&w[k + j..]);
                            psi.add_scaled(&f(n - j + 1, &v), &coeff.clone().signed(negate));
                        }
                    }
                }
                (w.clone(), psi)
            })
            .collect();
        let mut mn = Table::new();
        let mut fn_ = Table::new();
        for (w, psi) in rows {
            if !c.big.d().apply(&psi).is_zero() {
                return Err(Error::SignConsistency(format!(
                    "Ψ{n} is not a cycle on {}",
                    word_name(&w, m)
                )));
            }
            let mv = c.pi.apply(&psi).neg();
            let fv = c.h.apply(&psi);
            if !mv.is_zero() {
                mn.insert(w.clone(), mv);
            }
            if !fv.is_zero() {
                fn_.insert(w, fv);
            }
        }
        ops.insert(n, mn);
        comps.insert(n, fn_);
    }
    let structure = AInfinityStructure::new(m.clone(), ops, max)?;
    let morphism = s.morphism(&structure, comps)?;
    Ok(Transferred { method: Method::Kadeishvili, structure, morphism: Some(morphism) })
}
