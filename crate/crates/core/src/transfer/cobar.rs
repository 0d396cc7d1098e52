//! Transfer of coalgebra structures through the cobar construction.

use std::sync::Arc;

use rayon::prelude::*;

use super::WordKey;
use crate::ainf::{word_name, IdentityReport};
use crate::basis::GradedBasis;
use crate::coalgebra::{AInfinityCoalgebra, CoTable, DgCoalgebra};
use crate::complex::Contraction;
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::map::GradedMap;
use crate::perturb::{LazyContraction, LazyPerturbation, PerturbReport, Perturber};
use crate::words::{concat, tensor_homotopy, tensor_power, Derivation, Word};

/// How the cobar construction is made finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CobarMode {
    /// Requires a connectivity regime in which no completion is needed.
    #[default]
    Connected,
    /// Works modulo words longer than the maximal arity, whatever the degrees.
    Truncated,
}

/// Result of a coalgebra transfer.
#[derive(Clone, Debug)]
pub struct CoTransferred {
    pub structure: AInfinityCoalgebra,
    /// The twisting cochain `τ: C → Ω_𝒟 M`, as words over `s⁻¹M`.
    pub tau: CoTable,
}

fn big(x: Lin<Word>) -> Lin<WordKey> {
    x.map_keys(|w| WordKey::Big(w.clone()))
}

fn small(x: Lin<Word>) -> Lin<WordKey> {
    x.map_keys(|w| WordKey::Small(w.clone()))
}

fn words_of(x: &Lin<WordKey>) -> Lin<Word> {
    x.iter()
        .map(|(k, c)| match k {
            WordKey::Big(w) | WordKey::Small(w) => (w.clone(), c.clone()),
        })
        .collect()
}

/// The tensor-trick contraction of the truncated cobar constructions,
/// perturbed by the diagonal and higher cooperations of the input.
pub struct CobarPerturbation<'a> {
    c: &'a Contraction,
    max: usize,
    big_letters: GradedBasis,
    small_letters: GradedBasis,
    linear: Derivation,
    higher: Derivation,
    small_linear: Derivation,
    e: GradedMap,
}

impl<'a> CobarPerturbation<'a> {
    pub fn new(input: &AInfinityCoalgebra, c: &'a Contraction, max: usize, mode: CobarMode) -> Result<Self> {
        if c.big.basis() != &input.carrier {
            return Err(Error::BasisMismatch { left: c.big.basis().describe(), right: input.carrier.describe() });
        }
        if &input.differential() != c.big.d() {
            return Err(Error::Structure("contraction differential differs from Δ1".into()));
        }
        if max < 1 {
            return Err(Error::Structure("maximal arity must be at least 1".into()));
        }
        if let Some((&n, _)) = input.ops.range(max + 1..).next() {
            return Err(Error::Truncation { arity: n, max });
        }
        if mode == CobarMode::Connected && !input.is_connected() {
            return Err(Error::Connectivity(
                "coalgebra is neither simply connected nor concentrated in non-positive degrees; request truncation".into(),
            ));
        }
        let full = input.to_cobar(max);
        let split = |keep: &dyn Fn(usize) -> bool| Derivation {
            degree: -1,
            generators: full
                .generators
                .iter()
                .map(|g| {
                    let mut g = g.clone();
                    g.retain(|w| keep(w.len()));
                    g
                })
                .collect(),
            max_len: max,
        };
        let small_d = c.small.d();
        let small_linear = Derivation {
            degree: -1,
            generators: (0..c.small.dim())
                .map(|m| small_d.column(m).map_keys(|&y| Word::from_slice(&[y as u32])).neg())
                .collect(),
            max_len: max,
        };
        Ok(CobarPerturbation {
            c,
            max,
            big_letters: input.cobar_letters(),
            small_letters: c.small.basis().shifted(-1),
            linear: split(&|n| n == 1),
            higher: split(&|n| n >= 2),
            small_linear,
            e: c.nabla.compose(&c.pi)?,
        })
    }

    pub fn with<R>(&self, f: impl FnOnce(&Perturber<'_, WordKey>) -> Result<R>) -> Result<R> {
        let c = self.c;
        let d_big = |k: &WordKey| match k {
            WordKey::Big(w) => big(self.linear.apply_word(w, &self.big_letters)),
            WordKey::Small(_) => Lin::zero(),
        };
        let d_small = |k: &WordKey| match k {
            WordKey::Small(w) => small(self.small_linear.apply_word(w, &self.small_letters)),
            WordKey::Big(_) => Lin::zero(),
        };
        let pi = |k: &WordKey| match k {
            WordKey::Big(w) => small(tensor_power(w, &|l| c.pi.column(l as usize).clone())),
            WordKey::Small(_) => Lin::zero(),
        };
        let nabla = |k: &WordKey| match k {
            WordKey::Small(w) => big(tensor_power(w, &|l| c.nabla.column(l as usize).clone())),
            WordKey::Big(_) => Lin::zero(),
        };
        let h = |k: &WordKey| match k {
            WordKey::Big(w) => big(tensor_homotopy(
                w,
                &self.big_letters,
                &|l| c.h.column(l as usize).neg(),
                &|l| self.e.column(l as usize).clone(),
            )),
            WordKey::Small(_) => Lin::zero(),
        };
        let delta = |k: &WordKey| match k {
            WordKey::Big(w) => big(self.higher.apply_word(w, &self.big_letters)),
            WordKey::Small(_) => Lin::zero(),
        };
        let max = self.max;
        let level = move |k: &WordKey| max.saturating_sub(k.len());
        let p = Perturber::new(
            c.field(),
            LazyContraction { d_big: &d_big, d_small: &d_small, pi: &pi, nabla: &nabla, h: &h },
            LazyPerturbation { delta: &delta, drop: 1, level: &level, cap: max.saturating_sub(1) },
        )?;
        f(&p)
    }

    /// Checks every axiom of the perturbed contraction on all words of
    /// length at most `len`.
    pub fn verify(&self, len: usize) -> Result<PerturbReport> {
        let all = |n: usize, side: fn(Word) -> WordKey| -> Vec<WordKey> {
            (1..=len).flat_map(|l| crate::words::words_of_length(n, l)).map(side).collect()
        };
        let big_keys = all(self.big_letters.len(), WordKey::Big);
        let small_keys = all(self.small_letters.len(), WordKey::Small);
        let name = |k: &WordKey| match k {
            WordKey::Big(w) => format!("Ω{}", word_name(w, &self.big_letters)),
            WordKey::Small(w) => format!("Ω{}", word_name(w, &self.small_letters)),
        };
        self.with(|p| p.verify_on(&big_keys, &small_keys, &name))
    }

    /// Largest word length whose word spaces stay within `budget` words.
    pub fn verify_length(&self, budget: usize) -> usize {
        let (a, m) = (self.big_letters.len(), self.small_letters.len());
        let mut total = 0usize;
        let mut len = 0;
        while len < self.max {
            let next = a.saturating_pow(len as u32 + 1).saturating_add(m.saturating_pow(len as u32 + 1));
            if total.saturating_add(next) > budget {
                break;
            }
            total += next;
            len += 1;
        }
        len
    }

    pub fn transfer(&self) -> Result<CoTransferred> {
        let one = self.c.field().one();
        let (gens, tau) = self.with(|p| {
            let gens: Vec<Lin<Word>> = (0..self.small_letters.len())
                .into_par_iter()
                .map(|m| {
                    let img = p.transferred(&Lin::single(WordKey::Small(Word::from_slice(&[m as u32])), one.clone()))?;
                    Ok(words_of(&img))
                })
                .collect::<Result<_>>()?;
            let tau: CoTable = (0..self.big_letters.len())
                .into_par_iter()
                .map(|x| Ok(words_of(&p.pi(&Lin::single(WordKey::Big(Word::from_slice(&[x as u32])), one.clone()))?)))
                .collect::<Result<_>>()?;
            Ok((gens, tau))
        })?;
        let mut d = self.small_linear.clone();
        for (g, extra) in d.generators.iter_mut().zip(gens) {
            g.add_assign(&extra);
        }
        let structure = AInfinityCoalgebra::from_cobar(self.c.small.basis().clone(), &d, self.max)?;
        Ok(CoTransferred { structure, tau })
    }
}

/// Transfers an A∞-coalgebra along `c` with the perturbation lemma on the
/// cobar constructions.
pub fn transfer_coalgebra(input: &AInfinityCoalgebra, c: &Contraction, max: usize, mode: CobarMode) -> Result<CoTransferred> {
    CobarPerturbation::new(input, c, max, mode)?.transfer()
}

/// `(α ∪ β)(x) = Σ (−1)^{|y|} Δ(x)_{yz} α(y) β(z)`, dropping words longer
/// than `max`.
fn cup(coalg: &DgCoalgebra, alpha: &[Lin<Word>], beta: &[Lin<Word>], x: &Lin<usize>, max: usize) -> Lin<Word> {
    let mut out = Lin::zero();
    for (&xi, cx) in x {
        for (yz, c) in &coalg.delta[xi] {
            let (y, z) = (yz[0] as usize, yz[1] as usize);
            let negate = coalg.carrier.degree(y).rem_euclid(2) == 1;
            let coeff = (cx * c).signed(negate);
            for (u, cu) in &alpha[y] {
                for (v, cv) in &beta[z] {
                    if u.len() + v.len() <= max {
                        out.add_term(concat(&[u, v]), &(&coeff * cu) * cv);
                    }
                }
            }
        }
    }
    out
}

/// Recursive construction for a strict coalgebra: `τ¹ = π`,
/// `τʲ = Σ (τˡ ∪ τ^{j−l}) h` and `𝒟ʲ = Σ (τˡ ∪ τ^{j+1−l}) ∇`.
pub fn transfer_coalgebra_recursive(
    input: &DgCoalgebra,
    c: &Contraction,
    max: usize,
    mode: CobarMode,
) -> Result<CoTransferred> {
    let ainf = input.to_ainf(max.max(2));
    CobarPerturbation::new(&ainf, c, max, mode)?;
    let nc = input.carrier.len();
    let nm = c.small.dim();
    // layers[j][x]: the length-j part of τ on letter x
    let mut layers: Vec<Vec<Lin<Word>>> = vec![vec![]; max + 1];
    layers[1] = (0..nc)
        .map(|x| c.pi.column(x).map_keys(|&m| Word::from_slice(&[m as u32])))
        .collect();
    let split = |j: usize, layers: &[Vec<Lin<Word>>], x: &Lin<usize>| {
        let mut out = Lin::zero();
        for l in 1..j {
            out.add_assign(&cup(input, &layers[l], &layers[j - l], x, max));
        }
        out
    };
    let mut gens: Vec<Lin<Word>> = (0..nm)
        .map(|m| c.small.d().column(m).map_keys(|&y| Word::from_slice(&[y as u32])).neg())
        .collect();
    for j in 2..=max {
        let layer: Vec<Lin<Word>> = (0..nc).map(|x| split(j, &layers, c.h.column(x))).collect();
        layers[j] = layer;
        for (m, g) in gens.iter_mut().enumerate() {
            g.add_assign(&split(j, &layers, c.nabla.column(m)));
        }
    }
    let d = Derivation { degree: -1, generators: gens, max_len: max };
    let structure = AInfinityCoalgebra::from_cobar(c.small.basis().clone(), &d, max)?;
    let tau = (0..nc)
        .map(|x| {
            let mut t = Lin::zero();
            for layer in &layers[1..] {
                t.add_assign(&layer[x]);
            }
            t
        })
        .collect();
    Ok(CoTransferred { structure, tau })
}

/// Checks `d_Ω τ + τ d = τ ∪ τ` on every letter of `C`, modulo words longer
/// than `max`.
pub fn check_cotwisting(
    input: &DgCoalgebra,
    small: &AInfinityCoalgebra,
    tau: &CoTable,
    max: usize,
) -> IdentityReport {
    let mut report = IdentityReport { name: "cobar twisting cochain".into(), ..Default::default() };
    let letters: Arc<GradedBasis> = Arc::new(small.cobar_letters());
    let d = small.to_cobar(max);
    for x in 0..input.carrier.len() {
        let mut lhs = d.apply(&tau[x], &letters);
        for (&y, cy) in input.d.column(x) {
            lhs.add_scaled(&tau[y], cy);
        }
        let rhs = cup(input, tau, tau, &Lin::single(x, input.field().one()), max);
        let ok = lhs == rhs;
        report.record(1, input.carrier.degree(x), ok, || format!("letter {}", input.carrier.name(x)));
    }
    report
}
