//! Bar-side constructions: the bar perturbation of an algebra, the
//! tensor-trick lift of a contraction, and the shuffle-derivation check.

use rayon::prelude::*;

use crate::ainf::{check_bar_square_zero, word_name, AInfinityStructure, DgAlgebra, IdentityReport};
use crate::basis::GradedBasis;
use crate::complex::{Contraction, ContractionReport};
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::map::GradedMap;
use crate::perturb::{LazyContraction, LazyPerturbation, Perturber};
use crate::transfer::WordKey;
use crate::words::{
    degree_of, shuffle_lin, shuffle_product, tensor_homotopy, tensor_power, words_of_length, Coderivation,
    Derivation, Word,
};

/// The coderivation `∂` of `T^c[s𝐈A]` induced by the product, checked to
/// satisfy `(d + ∂)² = 0` on words of length `≤ max`.
pub fn bar_perturbation(a: &DgAlgebra, max: usize) -> Result<Coderivation> {
    a.validate().map_err(|e| Error::Structure(format!("bar perturbation: {e}")))?;
    let ainf = a.to_ainf(2);
    let report = check_bar_square_zero(&ainf, max);
    if let Some(w) = report.first_failure {
        return Err(Error::Structure(format!("bar differential does not square to zero on {w}")));
    }
    let mut b = ainf.to_bar();
    b.components.remove(&1);
    Ok(b)
}

/// `{mₙ}` to the bar coderivation.
pub fn coderivation_from_components(a: &AInfinityStructure) -> Coderivation {
    a.to_bar()
}

/// The bar coderivation back to `{mₙ}`; arities above `max` are refused.
pub fn components_from_coderivation(
    carrier: std::sync::Arc<GradedBasis>,
    b: &Coderivation,
    max: usize,
) -> Result<AInfinityStructure> {
    AInfinityStructure::from_bar(carrier, b, max)
}

/// Which tensor construction a contraction is lifted to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Tensor algebra on desuspended letters.
    Algebra,
    /// Tensor coalgebra on suspended letters.
    Coalgebra,
}

/// The tensor-trick contraction `(Tπ, T∇, Th)` on words of length `≤ max`.
pub struct TensorContraction<'a> {
    pub c: &'a Contraction,
    pub side: Side,
    pub max: usize,
    big_letters: GradedBasis,
    small_letters: GradedBasis,
    e: GradedMap,
}

pub fn lift_contraction_tensor(c: &Contraction, side: Side, max: usize) -> Result<TensorContraction<'_>> {
    let shift = match side {
        Side::Algebra => -1,
        Side::Coalgebra => 1,
    };
    Ok(TensorContraction {
        c,
        side,
        max,
        big_letters: c.big.basis().shifted(shift),
        small_letters: c.small.basis().shifted(shift),
        e: c.nabla.compose(&c.pi)?,
    })
}

fn linear_part(d: &GradedMap, max: usize) -> Derivation {
    Derivation {
        degree: -1,
        generators: (0..d.source().len())
            .map(|x| d.column(x).map_keys(|&y| Word::from_slice(&[y as u32])).neg())
            .collect(),
        max_len: max,
    }
}

impl TensorContraction<'_> {
    pub fn pi(&self, w: &[u32]) -> Lin<Word> {
        tensor_power(w, &|l| self.c.pi.column(l as usize).clone())
    }

    pub fn nabla(&self, w: &[u32]) -> Lin<Word> {
        tensor_power(w, &|l| self.c.nabla.column(l as usize).clone())
    }

    /// `Th = Σ Id^{⊗i} ⊗ h ⊗ (∇π)^{⊗rest}` with the shifted homotopy.
    pub fn h(&self, w: &[u32]) -> Lin<Word> {
        tensor_homotopy(
            w,
            &self.big_letters,
            &|l| self.c.h.column(l as usize).neg(),
            &|l| self.e.column(l as usize).clone(),
        )
    }

    /// Checks every contraction axiom on all words of length `≤ max`. On
    /// letters the differential acts by the Leibniz rule, which on words
    /// coincides with the co-Leibniz rule.
    pub fn verify(&self) -> Result<ContractionReport> {
        let d_big = linear_part(self.c.big.d(), self.max);
        let d_small = linear_part(self.c.small.d(), self.max);
        let db = |k: &WordKey| match k {
            WordKey::Big(w) => d_big.apply_word(w, &self.big_letters).map_keys(|v| WordKey::Big(v.clone())),
            WordKey::Small(_) => Lin::zero(),
        };
        let ds = |k: &WordKey| match k {
            WordKey::Small(w) => d_small.apply_word(w, &self.small_letters).map_keys(|v| WordKey::Small(v.clone())),
            WordKey::Big(_) => Lin::zero(),
        };
        let pi = |k: &WordKey| match k {
            WordKey::Big(w) => self.pi(w).map_keys(|v| WordKey::Small(v.clone())),
            WordKey::Small(_) => Lin::zero(),
        };
        let nabla = |k: &WordKey| match k {
            WordKey::Small(w) => self.nabla(w).map_keys(|v| WordKey::Big(v.clone())),
            WordKey::Big(_) => Lin::zero(),
        };
        let h = |k: &WordKey| match k {
            WordKey::Big(w) => self.h(w).map_keys(|v| WordKey::Big(v.clone())),
            WordKey::Small(_) => Lin::zero(),
        };
        let zero = |_: &WordKey| Lin::zero();
        let level = |k: &WordKey| k.len();
        let p = Perturber::new(
            self.c.field(),
            LazyContraction { d_big: &db, d_small: &ds, pi: &pi, nabla: &nabla, h: &h },
            LazyPerturbation { delta: &zero, drop: 1, level: &level, cap: self.max },
        )?;
        let all = |n: usize, side: fn(Word) -> WordKey| -> Vec<WordKey> {
            (1..=self.max).flat_map(|l| words_of_length(n, l)).map(side).collect()
        };
        let name = |k: &WordKey| match k {
            WordKey::Big(w) => word_name(w, &self.big_letters),
            WordKey::Small(w) => word_name(w, &self.small_letters),
        };
        let report = p.verify_on(
            &all(self.big_letters.len(), WordKey::Big),
            &all(self.small_letters.len(), WordKey::Small),
            &name,
        )?;
        Ok(report.contraction)
    }
}

/// Checks that the bar differential of `a` is a derivation of the shuffle
/// product: `b(u ⧢ v) = b(u) ⧢ v + (−1)^{|u|} u ⧢ b(v)` for nonempty words
/// with `|u| + |v| ≤ max` letters.
pub fn check_cinfinity(a: &AInfinityStructure, max: usize) -> IdentityReport {
    let letters = a.bar_letters();
    let b = a.to_bar();
    let mut report = IdentityReport { name: "shuffle derivation".into(), ..Default::default() };
    for total in 2..=max {
        let pairs: Vec<(Word, Word)> = (1..total)
            .flat_map(|i| {
                let left = words_of_length(letters.len(), i);
                let right = words_of_length(letters.len(), total - i);
                left.into_iter()
                    .flat_map(move |u| right.clone().into_iter().map(move |v| (u.clone(), v)))
            })
            .collect();
        let ok: Vec<bool> = pairs
            .par_iter()
            .map(|(u, v)| {
                let lhs = b.apply(&shuffle_product(u, v, &letters), &letters);
                let one = letters.field().one();
                let mut rhs = shuffle_lin(&b.apply_word(u, &letters), &Lin::single(v.clone(), one.clone()), &letters);
                let negate = degree_of(u, &letters).rem_euclid(2) == 1;
                rhs.add_assign(
                    &shuffle_lin(&Lin::single(u.clone(), one), &b.apply_word(v, &letters), &letters).signed(negate),
                );
                lhs == rhs
            })
            .collect();
        for ((u, v), ok) in pairs.iter().zip(ok) {
            report.record(total, degree_of(u, &letters) + degree_of(v, &letters), ok, || {
                format!("{} ⧢ {}", word_name(u, &letters), word_name(v, &letters))
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{homology_contraction, ChainComplex};
    use crate::corpus::{massey_algebra, triangular_algebra, truncated_polynomial};
    use crate::scalar::Field;
    use crate::transfer::transfer_hpt;
    use crate::words::word;
    use std::sync::Arc;

    #[test]
    fn bar_perturbation_of_truncated_polynomial_squares_to_zero() {
        let b = bar_perturbation(&truncated_polynomial(Field::Prime(5)), 4).unwrap();
        assert_eq!(b.components.keys().copied().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn zero_product_gives_zero_perturbation() {
        let mut a = massey_algebra(Field::Rational);
        a.mu.clear();
        assert!(bar_perturbation(&a, 3).unwrap().is_zero());
    }

    #[test]
    fn nonassociative_product_is_rejected() {
        // (x·x)·y = 0 but x·(x·y) = y
        let basis = Arc::new(GradedBasis::new(Field::Rational, [("x", 0), ("y", 0)]).unwrap());
        let mut mu = crate::words::Table::new();
        mu.insert(word(&[0, 0]), Lin::single(1, Field::Rational.one()));
        mu.insert(word(&[0, 1]), Lin::single(0, Field::Rational.one()));
        let a = DgAlgebra::new(basis.clone(), GradedMap::zero(basis.clone(), basis, -1), mu).unwrap();
        assert!(matches!(bar_perturbation(&a, 3), Err(Error::Structure(_))));
    }

    #[test]
    fn dictionary_round_trip() {
        let a = massey_algebra(Field::Rational).to_ainf(2);
        let b = coderivation_from_components(&a);
        assert_eq!(components_from_coderivation(a.carrier.clone(), &b, 2).unwrap(), a);
        let mut big = b.clone();
        big.components.insert(3, Default::default());
        big.components.get_mut(&3).unwrap().insert(word(&[0, 0, 0]), Lin::single(7, Field::Rational.one()));
        assert!(matches!(
            components_from_coderivation(a.carrier.clone(), &big, 2),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn lifted_contraction_passes_axioms() {
        let a = massey_algebra(Field::Rational);
        let c = homology_contraction(&a.complex());
        for side in [Side::Algebra, Side::Coalgebra] {
            let t = lift_contraction_tensor(&c, side, 3).unwrap();
            assert!(t.verify().unwrap().all_passed());
        }
    }

    #[test]
    fn lift_at_length_one_is_the_input() {
        let a = massey_algebra(Field::Rational);
        let c = homology_contraction(&a.complex());
        let t = lift_contraction_tensor(&c, Side::Coalgebra, 1).unwrap();
        for x in 0..c.big.dim() {
            let h1: Lin<usize> = t.h(&[x as u32]).iter().map(|(w, s)| (w[0] as usize, s.clone())).collect();
            assert_eq!(h1, c.h.column(x).neg());
        }
    }

    #[test]
    fn zero_homotopy_lifts_to_zero() {
        let a = truncated_polynomial(Field::Rational);
        let c = Contraction::trivial(ChainComplex::with_zero_differential(a.carrier.clone()));
        let t = lift_contraction_tensor(&c, Side::Coalgebra, 3).unwrap();
        for w in words_of_length(2, 3) {
            assert!(t.h(&w).is_zero());
            assert_eq!(t.pi(&w), Lin::single(w.clone(), Field::Rational.one()));
        }
    }

    #[test]
    fn commutative_transfer_is_cinfinity() {
        let a = truncated_polynomial(Field::Prime(5));
        let c = homology_contraction(&a.complex());
        let t = transfer_hpt(&a.to_ainf(4), &c, 4).unwrap();
        assert!(check_cinfinity(&t.structure, 4).passed());
    }

    #[test]
    fn noncommutative_product_breaks_the_shuffle_derivation() {
        let a = triangular_algebra(Field::Rational);
        assert!(!check_cinfinity(&a.to_ainf(2), 3).passed());
    }
}
