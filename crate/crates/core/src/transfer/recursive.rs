//! Transfer by recursively building the universal twisting cochain.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{Method, Setup, Transferred};
use crate::ainf::{
    suspension_exponent, word_name, words_landing_in, AInfinityStructure, DgAlgebra, IdentityReport,
};
use crate::complex::Contraction;
use crate::error::Result;
use crate::lin::Lin;
use crate::words::{degree_of, Table, Word};

/// A degree −1 map from the bar construction of `M` to `A`, by word length.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TwistingCochain {
    pub components: BTreeMap<usize, Table>,
}

impl TwistingCochain {
    pub fn apply(&self, w: &[u32]) -> Lin<usize> {
        self.components
            .get(&w.len())
            .and_then(|t| t.get(w))
            .cloned()
            .unwrap_or_default()
    }
}

/// `(α ∪ β)(w) = Σ (−1)^{deg u} μ(α(u), β(v))` over splittings `w = uv`,
/// for `β` of odd degree, with `deg u` measured in suspended letters.
pub fn cup(
    alg: &DgAlgebra,
    letters: &crate::basis::GradedBasis,
    alpha: &dyn Fn(&[u32]) -> Lin<usize>,
    beta: &dyn Fn(&[u32]) -> Lin<usize>,
    w: &[u32],
) -> Lin<usize> {
    let mut out = Lin::zero();
    for i in 1..w.len() {
        let a = alpha(&w[..i]);
        if a.is_zero() {
            continue;
        }
        let b = beta(&w[i..]);
        if b.is_zero() {
            continue;
        }
        let negate = degree_of(&w[..i], letters).rem_euclid(2) == 1;
        out.add_assign(&alg.mul(&a, &b).signed(negate));
    }
    out
}

/// Transfers a strict algebra, returning the result and the twisting
/// cochain `τ` built along the way.
pub fn transfer_recursive(
    input: &AInfinityStructure,
    c: &Contraction,
    max: usize,
) -> Result<(Transferred, TwistingCochain)> {
    let s = Setup::new(input, c, max)?;
    let alg = s.strict()?;
    let a_degs: BTreeSet<i64> = s.big.degrees().iter().copied().collect();
    let mut tau = TwistingCochain::default();
    let first: Table = (0..s.small.len())
        .map(|i| (Word::from_slice(&[i as u32]), s.nabla(i as u32)))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    tau.components.insert(1, first);
    let mut bar = BTreeMap::new();
    for j in 2..=max {
        let words = words_landing_in(&s.ssmall, j, -2, &a_degs);
        let rows: Vec<(Word, Lin<usize>, Lin<usize>)> = words
            .par_iter()
            .map(|w| {
                let t = |u: &[u32]| tau.apply(u);
                let sj = cup(&alg, &s.ssmall, &t, &t, w);
                (w.clone(), s.c.h.apply(&sj), s.c.pi.apply(&sj))
            })
            .collect();
        let mut tj = Table::new();
        let mut bj = Table::new();
        for (w, t, b) in rows {
            if !t.is_zero() {
                tj.insert(w.clone(), t);
            }
            if !b.is_zero() {
                bj.insert(w, b);
            }
        }
        tau.components.insert(j, tj);
        bar.insert(j, bj);
    }
    let structure = s.from_bar(bar)?;
    let comps = tau
        .components
        .iter()
        .map(|(&n, t)| {
            let signed: Table = t
                .iter()
                .map(|(w, v)| {
                    let negate = suspension_exponent(w, &s.small).rem_euclid(2) == 1;
                    (w.clone(), v.clone().signed(negate))
                })
                .collect();
            (n, signed)
        })
        .collect();
    let morphism = s.morphism(&structure, comps)?;
    Ok((Transferred { method: Method::Recursive, structure, morphism: Some(morphism) }, tau))
}

/// Checks `dτ + τ d_B = τ ∪ τ` on bar words of length `≤ max`, where `d_B`
/// is the bar differential of the transferred structure.
pub fn check_twisting_cochain(
    alg: &DgAlgebra,
    small: &AInfinityStructure,
    tau: &TwistingCochain,
    max: usize,
) -> IdentityReport {
    let letters = small.bar_letters();
    let b = small.to_bar();
    let mut report = IdentityReport { name: "twisting cochain".into(), ..Default::default() };
    let a_degs: BTreeSet<i64> = alg.carrier.degrees().iter().copied().collect();
    for n in 1..=max {
        let words = words_landing_in(&letters, n, -2, &a_degs);
        let ok: Vec<bool> = words
            .par_iter()
            .map(|w| {
                let t = |u: &[u32]| tau.apply(u);
                let mut lhs = alg.d.apply(&tau.apply(w));
                for (v, c) in &b.apply_word(w, &letters) {
                    lhs.add_scaled(&tau.apply(v), c);
                }
                lhs == cup(alg, &letters, &t, &t, w)
            })
            .collect();
        for (w, ok) in words.iter().zip(ok) {
            report.record(n, degree_of(w, &letters), ok, || format!("word {}", word_name(w, &letters)));
        }
    }
    report
}
