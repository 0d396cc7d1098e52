//! Transfer by the perturbation lemma on the bar construction.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{Method, Setup, Transferred, WordKey};
use crate::ainf::{suspension_exponent, words_landing_in, word_name, AInfinityStructure};
use crate::complex::Contraction;
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::perturb::{LazyContraction, LazyPerturbation, PerturbReport, Perturber};
use crate::words::{tensor_homotopy, tensor_power, Coderivation, Table, Word};

fn big(x: Lin<Word>) -> Lin<WordKey> {
    x.map_keys(|w| WordKey::Big(w.clone()))
}

fn small(x: Lin<Word>) -> Lin<WordKey> {
    x.map_keys(|w| WordKey::Small(w.clone()))
}

/// The tensor-trick contraction of the bar constructions, perturbed by the
/// higher operations of the input.
pub struct BarPerturbation<'a> {
    setup: Setup<'a>,
    linear: Coderivation,
    higher: Coderivation,
    small_linear: Coderivation,
}

impl<'a> BarPerturbation<'a> {
    pub fn new(input: &'a AInfinityStructure, c: &'a Contraction, max: usize) -> Result<Self> {
        let setup = Setup::new(input, c, max)?;
        let b = input.to_bar();
        let mut linear = Coderivation::zero(-1);
        let mut higher = Coderivation::zero(-1);
        for (&n, t) in &b.components {
            if n == 1 {
                linear.components.insert(1, t.clone());
            } else {
                higher.components.insert(n, t.clone());
            }
        }
        let mut small_linear = Coderivation::zero(-1);
        let m1: Table = setup.small_m1().into_iter().map(|(w, img)| (w, img.neg())).collect();
        if !m1.is_empty() {
            small_linear.components.insert(1, m1);
        }
        Ok(BarPerturbation { setup, linear, higher, small_linear })
    }

    pub fn max(&self) -> usize {
        self.setup.max
    }

    /// Runs `f` with a perturber over bar words of length at most the
    /// maximal arity.
    pub fn with<R>(&self, f: impl FnOnce(&Perturber<'_, WordKey>) -> Result<R>) -> Result<R> {
        let s = &self.setup;
        let d_big = |k: &WordKey| match k {
            WordKey::Big(w) => big(self.linear.apply_word(w, &s.sbig)),
            WordKey::Small(_) => Lin::zero(),
        };
        let d_small = |k: &WordKey| match k {
            WordKey::Small(w) => small(self.small_linear.apply_word(w, &s.ssmall)),
            WordKey::Big(_) => Lin::zero(),
        };
        let pi = |k: &WordKey| match k {
            WordKey::Big(w) => small(tensor_power(w, &|l| s.pi(l))),
            WordKey::Small(_) => Lin::zero(),
        };
        let nabla = |k: &WordKey| match k {
            WordKey::Small(w) => big(tensor_power(w, &|l| s.nabla(l))),
            WordKey::Big(_) => Lin::zero(),
        };
        let h = |k: &WordKey| match k {
            WordKey::Big(w) => big(tensor_homotopy(w, &s.sbig, &|l| s.h_s(l), &|l| s.e(l))),
            WordKey::Small(_) => Lin::zero(),
        };
        let delta = |k: &WordKey| match k {
            WordKey::Big(w) => big(self.higher.apply_word(w, &s.sbig)),
            WordKey::Small(_) => Lin::zero(),
        };
        let level = |k: &WordKey| k.len();
        let p = Perturber::new(
            s.big.field(),
            LazyContraction { d_big: &d_big, d_small: &d_small, pi: &pi, nabla: &nabla, h: &h },
            LazyPerturbation { delta: &delta, drop: 1, level: &level, cap: s.max },
        )?;
        f(&p)
    }

    /// Checks every axiom of the perturbed contraction on all words of
    /// length at most `len`.
    pub fn verify(&self, len: usize) -> Result<PerturbReport> {
        let s = &self.setup;
        let all = |n: usize, side: fn(Word) -> WordKey| -> Vec<WordKey> {
            (1..=len).flat_map(|l| crate::words::words_of_length(n, l)).map(side).collect()
        };
        let big_keys = all(s.big.len(), WordKey::Big);
        let small_keys = all(s.small.len(), WordKey::Small);
        let name = |k: &WordKey| match k {
            WordKey::Big(w) => format!("B{}", word_name(w, &s.sbig)),
            WordKey::Small(w) => format!("B{}", word_name(w, &s.ssmall)),
        };
        self.with(|p| p.verify_on(&big_keys, &small_keys, &name))
    }

    /// Largest word length whose full word spaces on both sides stay within
    /// `budget` words in total.
    pub fn verify_length(&self, budget: usize) -> usize {
        let (a, m) = (self.setup.big.len(), self.setup.small.len());
        let mut total = 0usize;
        let mut len = 0;
        while len < self.setup.max {
            let next = a.saturating_pow(len as u32 + 1).saturating_add(m.saturating_pow(len as u32 + 1));
            if total.saturating_add(next) > budget {
                break;
            }
            total += next;
            len += 1;
        }
        len
    }

    /// Transferred operations and morphism components.
    pub fn transfer(&self) -> Result<Transferred> {
        let s = &self.setup;
        let small_degs: std::collections::BTreeSet<i64> = s.ssmall.degrees().iter().copied().collect();
        let big_degs: std::collections::BTreeSet<i64> = s.sbig.degrees().iter().copied().collect();
        self.with(|p| {
            let mut ops = BTreeMap::new();
            let mut comps = BTreeMap::new();
            for n in 1..=s.max {
                if n >= 2 {
                    let words = words_landing_in(&s.ssmall, n, -1, &small_degs);
                    let table: Table = words
                        .par_iter()
                        .map(|w| {
                            let img = p.transferred(&Lin::single(WordKey::Small(w.clone()), s.big.field().one()))?;
                            Ok((w.clone(), letters_of(&img, |k| matches!(k, WordKey::Small(_)))))
                        })
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .filter(|(_, v)| !v.is_zero())
                        .collect();
                    ops.insert(n, table);
                }
                let words = words_landing_in(&s.ssmall, n, 0, &big_degs);
                let table: Table = words
                    .par_iter()
                    .map(|w| {
                        let img = p.nabla(&Lin::single(WordKey::Small(w.clone()), s.big.field().one()))?;
                        let negate = suspension_exponent(w, &s.small).rem_euclid(2) == 1;
                        Ok((w.clone(), letters_of(&img, |k| matches!(k, WordKey::Big(_))).signed(negate)))
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .collect();
                comps.insert(n, table);
            }
            let structure = s.from_bar(ops)?;
            let morphism = s.morphism(&structure, comps)?;
            Ok(Transferred { method: Method::Hpt, structure, morphism: Some(morphism) })
        })
    }
}

/// Length-one part of a bar element, as a combination of letters.
fn letters_of(x: &Lin<WordKey>, side: impl Fn(&WordKey) -> bool) -> Lin<usize> {
    x.iter()
        .filter_map(|(k, c)| match k {
            WordKey::Big(w) | WordKey::Small(w) if w.len() == 1 && side(k) => Some((w[0] as usize, c.clone())),
            _ => None,
        })
        .collect()
}

/// Transfers along `c` by perturbing the tensor-trick contraction of the bar
/// constructions.
pub fn transfer_hpt(input: &AInfinityStructure, c: &Contraction, max: usize) -> Result<Transferred> {
    BarPerturbation::new(input, c, max)?.transfer().map_err(|e| match e {
        Error::Divergence(m) => Error::Divergence(format!("bar perturbation: {m}")),
        other => other,
    })
}
