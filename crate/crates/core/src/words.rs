//! Word calculus on tensor (co)algebras truncated at a maximal length.

use std::collections::BTreeMap;

use smallvec::SmallVec;

use crate::basis::GradedBasis;
use crate::lin::Lin;
use crate::scalar::{Field, Scalar};

/// A tensor word of letter indices.
pub type Word = SmallVec<[u32; 8]>;

/// Multilinear map tabulated on input words, zero outside the table.
pub type Table = BTreeMap<Word, Lin<usize>>;

pub fn word(letters: &[u32]) -> Word {
    Word::from_slice(letters)
}

pub fn degree_of(w: &[u32], letters: &GradedBasis) -> i64 {
    w.iter().map(|&l| letters.degree(l as usize)).sum()
}

pub fn concat(parts: &[&[u32]]) -> Word {
    let mut w = Word::new();
    for p in parts {
        w.extend_from_slice(p);
    }
    w
}

/// All words of length `len` over `n` letters, in lexicographic order.
pub fn words_of_length(n: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Word::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * n);
        for w in &out {
            for l in 0..n as u32 {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Words of length `len` whose total degree lies in `accept`.
pub fn words_with_degree(letters: &GradedBasis, len: usize, accept: impl Fn(i64) -> bool) -> Vec<Word> {
    words_of_length(letters.len(), len)
        .into_iter()
        .filter(|w| accept(degree_of(w, letters)))
        .collect()
}

/// Applies a degree-0 letter map factorwise; no signs arise.
pub fn tensor_power(w: &[u32], f: &dyn Fn(u32) -> Lin<usize>) -> Lin<Word> {
    let field_one = |c: &Lin<usize>| c.iter().next().map(|(_, s)| s.field().one());
    let mut acc: Vec<(Word, Scalar)> = Vec::new();
    let mut first = true;
    for &l in w {
        let img = f(l);
        if img.is_zero() {
            return Lin::zero();
        }
        if first {
            let one = field_one(&img).expect("nonzero image");
            acc.push((Word::new(), one));
            first = false;
        }
        let mut next = Vec::with_capacity(acc.len() * img.len());
        for (prefix, c) in &acc {
            for (&j, x) in &img {
                let mut v = prefix.clone();
                v.push(j as u32);
                next.push((v, c * x));
            }
        }
        acc = next;
    }
    acc.into_iter().collect()
}

/// `Σᵢ (Id^{⊗i} ⊗ h ⊗ e^{⊗rest})(w)` with `h` of degree 1 and `e` of degree 0.
pub fn tensor_homotopy(
    w: &[u32],
    letters: &GradedBasis,
    h: &dyn Fn(u32) -> Lin<usize>,
    e: &dyn Fn(u32) -> Lin<usize>,
) -> Lin<Word> {
    let mut out = Lin::zero();
    let mut prefix_deg = 0;
    for i in 0..w.len() {
        let hi = h(w[i]);
        if !hi.is_zero() {
            let tail = tensor_power(&w[i + 1..], e);
            if !tail.is_zero() || i + 1 == w.len() {
                let negate = prefix_deg % 2 != 0;
                for (&j, c) in &hi {
                    let c = c.clone().signed(negate);
                    if i + 1 == w.len() {
                        let mut v = Word::from_slice(&w[..i]);
                        v.push(j as u32);
                        out.add_term(v, c);
                    } else {
                        for (t, ct) in &tail {
                            let mut v = Word::from_slice(&w[..i]);
                            v.push(j as u32);
                            v.extend_from_slice(t);
                            out.add_term(v, &c * ct);
                        }
                    }
                }
            }
        }
        prefix_deg += letters.degree(w[i] as usize);
    }
    out
}

/// A coderivation of the tensor coalgebra given by its corestrictions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coderivation {
    pub degree: i64,
    /// Arity `j` component: words of length `j` to letters.
    pub components: BTreeMap<usize, Table>,
}

impl Coderivation {
    pub fn zero(degree: i64) -> Self {
        Coderivation { degree, components: BTreeMap::new() }
    }

    pub fn component(&self, j: usize) -> Option<&Table> {
        self.components.get(&j)
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|t| t.values().all(Lin::is_zero))
    }

    /// Co-Leibniz extension to a word.
    pub fn apply_word(&self, w: &[u32], letters: &GradedBasis) -> Lin<Word> {
        let mut out = Lin::zero();
        let mut prefix_deg = 0i64;
        for i in 0..w.len() {
            let negate = (self.degree * prefix_deg).rem_euclid(2) == 1;
            for (&j, table) in &self.components {
                if i + j > w.len() {
                    continue;
                }
                if let Some(img) = table.get(&w[i..i + j]) {
                    for (&l, c) in img {
                        let mut v = Word::from_slice(&w[..i]);
                        v.push(l as u32);
                        v.extend_from_slice(&w[i + j..]);
                        out.add_term(v, c.clone().signed(negate));
                    }
                }
            }
            prefix_deg += letters.degree(w[i] as usize);
        }
        out
    }

    pub fn apply(&self, x: &Lin<Word>, letters: &GradedBasis) -> Lin<Word> {
        x.map_linear(|w| self.apply_word(w, letters))
    }

    /// Sum of two coderivations of the same degree.
    pub fn plus(&self, other: &Coderivation) -> Coderivation {
        let mut out = self.clone();
        for (&j, t) in &other.components {
            let slot = out.components.entry(j).or_default();
            for (w, img) in t {
                let e = slot.entry(w.clone()).or_default();
                e.add_assign(img);
            }
        }
        for t in out.components.values_mut() {
            t.retain(|_, v| !v.is_zero());
        }
        out.components.retain(|_, t| !t.is_empty());
        out
    }
}

/// A derivation of the tensor algebra given on generators, truncated at
/// word length `max_len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub degree: i64,
    /// Image of each letter as a combination of words.
    pub generators: Vec<Lin<Word>>,
    pub max_len: usize,
}

impl Derivation {
    pub fn zero(degree: i64, letters: usize, max_len: usize) -> Self {
        Derivation { degree, generators: vec![Lin::zero(); letters], max_len }
    }

    /// Component landing in words of length `j`.
    pub fn component(&self, j: usize) -> Vec<Lin<Word>> {
        self.generators
            .iter()
            .map(|g| {
                let mut c = g.clone();
                c.retain(|w| w.len() == j);
                c
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.generators.iter().all(Lin::is_zero)
    }

    /// Leibniz extension to a word; words longer than `max_len` are dropped.
    pub fn apply_word(&self, w: &[u32], letters: &GradedBasis) -> Lin<Word> {
        let mut out = Lin::zero();
        let mut prefix_deg = 0i64;
        for i in 0..w.len() {
            let negate = (self.degree * prefix_deg).rem_euclid(2) == 1;
            for (img, c) in &self.generators[w[i] as usize] {
                if w.len() - 1 + img.len() > self.max_len {
                    continue;
                }
                let v = concat(&[&w[..i], img, &w[i + 1..]]);
                out.add_term(v, c.clone().signed(negate));
            }
            prefix_deg += letters.degree(w[i] as usize);
        }
        out
    }

    pub fn apply(&self, x: &Lin<Word>, letters: &GradedBasis) -> Lin<Word> {
        x.map_linear(|w| self.apply_word(w, letters))
    }
}

/// Reduced deconcatenation `w ↦ Σ w[..i] ⊗ w[i..]`, `0 < i < len`.
pub fn deconcatenate(w: &[u32]) -> Vec<(Word, Word)> {
    (1..w.len()).map(|i| (Word::from_slice(&w[..i]), Word::from_slice(&w[i..]))).collect()
}

/// Signed shuffle product of two words.
pub fn shuffle_product(u: &[u32], v: &[u32], letters: &GradedBasis) -> Lin<Word> {
    let field = letters.field();
    let mut out = Lin::zero();
    shuffle_into(u, v, letters, &mut Word::new(), false, &mut out, field);
    out
}

fn shuffle_into(
    u: &[u32],
    v: &[u32],
    letters: &GradedBasis,
    prefix: &mut Word,
    negate: bool,
    out: &mut Lin<Word>,
    field: Field,
) {
    if u.is_empty() || v.is_empty() {
        let mut w = prefix.clone();
        w.extend_from_slice(u);
        w.extend_from_slice(v);
        out.add_term(w, field.one().signed(negate));
        return;
    }
    prefix.push(u[0]);
    shuffle_into(&u[1..], v, letters, prefix, negate, out, field);
    prefix.pop();
    // v[0] moves past every remaining letter of u
    let crossing = letters.degree(v[0] as usize) * degree_of(u, letters);
    prefix.push(v[0]);
    shuffle_into(u, &v[1..], letters, prefix, negate ^ (crossing.rem_euclid(2) == 1), out, field);
    prefix.pop();
}

/// Shuffle product extended bilinearly.
pub fn shuffle_lin(x: &Lin<Word>, y: &Lin<Word>, letters: &GradedBasis) -> Lin<Word> {
    let mut out = Lin::zero();
    for (u, a) in x {
        for (v, b) in y {
            out.add_scaled(&shuffle_product(u, v, letters), &(a * b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn letters(degs: &[i64]) -> GradedBasis {
        GradedBasis::new(Field::Rational, degs.iter().enumerate().map(|(i, &d)| (format!("x{i}"), d))).unwrap()
    }

    #[test]
    fn shuffle_unit_and_two_letters() {
        let l = letters(&[1, 1, 2]);
        assert_eq!(shuffle_product(&[0, 2], &[], &l), Lin::single(word(&[0, 2]), Field::Rational.one()));
        let s = shuffle_product(&[0], &[1], &l);
        assert_eq!(s.get(&word(&[0, 1])), Some(&Field::Rational.one()));
        assert_eq!(s.get(&word(&[1, 0])), Some(&Field::Rational.from_i64(-1)));
        let s = shuffle_product(&[0], &[2], &l);
        assert_eq!(s.get(&word(&[2, 0])), Some(&Field::Rational.one()));
    }

    #[test]
    fn shuffle_count_matches_binomial() {
        let l = letters(&[2, 4, 6]);
        let s = shuffle_product(&[0, 1], &[2], &l);
        assert_eq!(s.len(), 3);
        let s = shuffle_product(&[0, 1], &[2, 2], &l);
        // C(4,2) = 6 shuffles, some of which coincide as words
        let total: i64 = s.iter().map(|(_, c)| c.to_string().parse::<i64>().unwrap()).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn coderivation_extension_is_coleibniz() {
        let l = letters(&[1, 2, 0]);
        let f = Field::Rational;
        let mut comp: Table = BTreeMap::new();
        comp.insert(word(&[0, 2]), Lin::single(0, f.from_i64(3)));
        comp.insert(word(&[2, 2]), Lin::single(2, f.from_i64(-1)));
        let mut components = BTreeMap::new();
        components.insert(2, comp);
        let d = Coderivation { degree: -1, components };
        for len in 1..=4 {
            for w in words_of_length(3, len) {
                // Δ(Dw) = (D⊗1 + 1⊗D)Δw on the reduced diagonal
                let dw = d.apply_word(&w, &l);
                let mut lhs: Lin<(Word, Word)> = Lin::zero();
                for (v, c) in &dw {
                    for (a, b) in deconcatenate(v) {
                        lhs.add_term((a, b), c.clone());
                    }
                }
                let mut rhs: Lin<(Word, Word)> = Lin::zero();
                for (a, b) in deconcatenate(&w) {
                    for (da, c) in &d.apply_word(&a, &l) {
                        rhs.add_term((da.clone(), b.clone()), c.clone());
                    }
                    let negate = (degree_of(&a, &l) * d.degree).rem_euclid(2) == 1;
                    for (db, c) in &d.apply_word(&b, &l) {
                        rhs.add_term((a.clone(), db.clone()), c.clone().signed(negate));
                    }
                }
                assert_eq!(lhs, rhs, "word {w:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn shuffle_is_associative_and_commutative(
            degs in proptest::collection::vec(-2i64..3, 3),
            u in proptest::collection::vec(0u32..3, 0..3),
            v in proptest::collection::vec(0u32..3, 0..3),
            w in proptest::collection::vec(0u32..3, 0..2),
        ) {
            let l = letters(&degs);
            let uv = shuffle_product(&u, &v, &l);
            let vu = shuffle_product(&v, &u, &l);
            let negate = (degree_of(&u, &l) * degree_of(&v, &l)).rem_euclid(2) == 1;
            prop_assert_eq!(uv.clone(), vu.signed(negate));
            let left = shuffle_lin(&uv, &Lin::single(word(&w), Field::Rational.one()), &l);
            let vw = shuffle_product(&v, &w, &l);
            let right = shuffle_lin(&Lin::single(word(&u), Field::Rational.one()), &vw, &l);
            prop_assert_eq!(left, right);
        }
    }
}
