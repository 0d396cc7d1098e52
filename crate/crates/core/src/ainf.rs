//! A∞-algebras, their morphisms, the bar dictionary, and identity checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::GradedBasis;
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::map::GradedMap;
use crate::scalar::Field;
use crate::words::{degree_of, word, Coderivation, Table, Word};

fn odd(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

/// Sign exponent of `s^{⊗n}` on `a₁ ⊗ … ⊗ aₙ`: `Σ (n − i)|aᵢ|`.
pub fn suspension_exponent(w: &[u32], carrier: &GradedBasis) -> i64 {
    let n = w.len() as i64;
    w.iter()
        .enumerate()
        .map(|(i, &l)| (n - 1 - i as i64) * carrier.degree(l as usize))
        .sum()
}

/// Checks that every entry of a table has the expected output degree.
pub fn check_table_degrees(table: &Table, src: &GradedBasis, tgt: &GradedBasis, degree: i64, what: &str) -> Result<()> {
    for (w, img) in table {
        if w.iter().any(|&l| l as usize >= src.len()) {
            return Err(Error::Structure(format!("{what}: letter out of range")));
        }
        let expect = degree_of(w, src) + degree;
        for (&j, _) in img {
            if j >= tgt.len() || tgt.degree(j) != expect {
                return Err(Error::Structure(format!(
                    "{what}: entry on {} has degree {} (expected {expect})",
                    word_name(w, src),
                    tgt.degree(j.min(tgt.len().saturating_sub(1)))
                )));
            }
        }
    }
    Ok(())
}

pub fn word_name(w: &[u32], basis: &GradedBasis) -> String {
    let parts: Vec<&str> = w.iter().map(|&l| basis.name(l as usize)).collect();
    format!("({})", parts.join(", "))
}

pub fn table_apply(table: &Table, w: &[u32]) -> Lin<usize> {
    table.get(w).cloned().unwrap_or_default()
}

/// Removes zero entries.
pub fn prune(table: &mut Table) {
    table.retain(|_, v| !v.is_zero());
}

/// A strict differential graded algebra on an augmentation ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgAlgebra {
    pub carrier: Arc<GradedBasis>,
    pub d: GradedMap,
    /// Structure constants on pairs of letters.
    pub mu: Table,
}

impl DgAlgebra {
    pub fn new(carrier: Arc<GradedBasis>, d: GradedMap, mut mu: Table) -> Result<Self> {
        prune(&mut mu);
        if d.source() != &carrier || d.target() != &carrier {
            return Err(Error::Structure("differential does not act on the carrier".into()));
        }
        if mu.keys().any(|w| w.len() != 2) {
            return Err(Error::Structure("product entries need two inputs".into()));
        }
        check_table_degrees(&mu, &carrier, &carrier, 0, "product")?;
        Ok(DgAlgebra { carrier, d, mu })
    }

    pub fn field(&self) -> Field {
        self.carrier.field()
    }

    pub fn mul(&self, x: &Lin<usize>, y: &Lin<usize>) -> Lin<usize> {
        let mut out = Lin::zero();
        for (&a, ca) in x {
            for (&b, cb) in y {
                if let Some(img) = self.mu.get(&word(&[a as u32, b as u32])) {
                    out.add_scaled(img, &(ca * cb));
                }
            }
        }
        out
    }

    /// Verifies `d² = 0`, associativity and the Leibniz rule.
    pub fn validate(&self) -> Result<()> {
        crate::complex::ChainComplex::new(self.d.clone())?;
        let n = self.carrier.len();
        let one = self.field().one();
        let e = |i: usize| Lin::single(i, one.clone());
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(&e(a), &e(b));
                let lhs = self.d.apply(&ab);
                let mut rhs = self.mul(&self.d.apply(&e(a)), &e(b));
                let t = self.mul(&e(a), &self.d.apply(&e(b)));
                rhs.add_assign(&t.signed(odd(self.carrier.degree(a))));
                if lhs != rhs {
                    return Err(Error::AxiomViolation(format!(
                        "Leibniz rule fails on ({}, {})",
                        self.carrier.name(a),
                        self.carrier.name(b)
                    )));
                }
                if ab.is_zero() && (0..n).all(|c| !self.mu.contains_key(&word(&[b as u32, c as u32]))) {
                    continue;
                }
                for c in 0..n {
                    let l = self.mul(&ab, &e(c));
                    let r = self.mul(&e(a), &self.mul(&e(b), &e(c)));
                    if l != r {
                        return Err(Error::AxiomViolation(format!(
                            "associativity fails on ({}, {}, {})",
                            self.carrier.name(a),
                            self.carrier.name(b),
                            self.carrier.name(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_graded_commutative(&self) -> bool {
        self.mu.iter().all(|(w, img)| {
            let swapped = word(&[w[1], w[0]]);
            let negate = odd(self.carrier.degree(w[0] as usize) * self.carrier.degree(w[1] as usize));
            self.mu.get(&swapped).cloned().unwrap_or_default() == img.clone().signed(negate)
        }) && self.mu.keys().all(|w| {
            let swapped = word(&[w[1], w[0]]);
            self.mu.contains_key(&swapped)
        })
    }

    pub fn to_ainf(&self, max_arity: usize) -> AInfinityStructure {
        let mut ops = BTreeMap::new();
        let mut m1 = Table::new();
        for i in 0..self.carrier.len() {
            let c = self.d.column(i);
            if !c.is_zero() {
                m1.insert(word(&[i as u32]), c.clone());
            }
        }
        ops.insert(1, m1);
        ops.insert(2, self.mu.clone());
        AInfinityStructure::new(self.carrier.clone(), ops, max_arity.max(2)).expect("validated degrees")
    }

    pub fn complex(&self) -> crate::complex::ChainComplex {
        crate::complex::ChainComplex::new(self.d.clone()).expect("validated")
    }
}

/// An A∞-structure `{mₙ}` truncated at `max_arity`; `mₙ` has degree `n − 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfinityStructure {
    pub carrier: Arc<GradedBasis>,
    pub ops: BTreeMap<usize, Table>,
    pub max_arity: usize,
}

impl AInfinityStructure {
    pub fn new(carrier: Arc<GradedBasis>, mut ops: BTreeMap<usize, Table>, max_arity: usize) -> Result<Self> {
        for (&n, table) in ops.iter_mut() {
            if n == 0 {
                return Err(Error::Structure("operations have arity at least 1".into()));
            }
            if n > max_arity {
                return Err(Error::Truncation { arity: n, max: max_arity });
            }
            prune(table);
            if table.keys().any(|w| w.len() != n) {
                return Err(Error::Structure(format!("m{n} has an entry of the wrong arity")));
            }
            check_table_degrees(table, &carrier, &carrier, n as i64 - 2, &format!("m{n}"))?;
        }
        ops.retain(|_, t| !t.is_empty());
        Ok(AInfinityStructure { carrier, ops, max_arity })
    }

    pub fn field(&self) -> Field {
        self.carrier.field()
    }

    pub fn op(&self, n: usize) -> Option<&Table> {
        self.ops.get(&n)
    }

    pub fn apply_op(&self, n: usize, w: &[u32]) -> Lin<usize> {
        self.ops.get(&n).map(|t| table_apply(t, w)).unwrap_or_default()
    }

    pub fn is_minimal(&self) -> bool {
        self.ops.get(&1).is_none_or(|t| t.is_empty())
    }

    /// `m₁` as a differential on the carrier.
    pub fn differential(&self) -> GradedMap {
        let b = self.carrier.clone();
        GradedMap::from_fn(b.clone(), b, -1, |i| self.apply_op(1, &[i as u32])).expect("m1 has degree -1")
    }

    /// Suspended letters `s𝐈M`.
    pub fn bar_letters(&self) -> GradedBasis {
        self.carrier.shifted(1)
    }

    /// The bar coderivation `b = Σ bₙ`, `mₙ = −s⁻¹ bₙ s^{⊗n}`.
    pub fn to_bar(&self) -> Coderivation {
        let mut components = BTreeMap::new();
        for (&n, table) in &self.ops {
            let t: Table = table
                .iter()
                .map(|(w, img)| {
                    let negate = !odd(suspension_exponent(w, &self.carrier));
                    (w.clone(), img.clone().signed(negate))
                })
                .collect();
            components.insert(n, t);
        }
        Coderivation { degree: -1, components }
    }

    pub fn from_bar(carrier: Arc<GradedBasis>, b: &Coderivation, max_arity: usize) -> Result<Self> {
        let mut ops = BTreeMap::new();
        for (&n, table) in &b.components {
            let t: Table = table
                .iter()
                .map(|(w, img)| {
                    let negate = !odd(suspension_exponent(w, &carrier));
                    (w.clone(), img.clone().signed(negate))
                })
                .collect();
            ops.insert(n, t);
        }
        AInfinityStructure::new(carrier, ops, max_arity)
    }

    /// First `(arity, word)` where two structures differ, up to `max`.
    pub fn first_difference(&self, other: &AInfinityStructure, max: usize) -> Option<(usize, Word)> {
        for n in 1..=max {
            let empty = Table::new();
            let a = self.ops.get(&n).unwrap_or(&empty);
            let b = other.ops.get(&n).unwrap_or(&empty);
            let keys: BTreeSet<&Word> = a.keys().chain(b.keys()).collect();
            for k in keys {
                if a.get(k) != b.get(k) {
                    return Some((n, k.clone()));
                }
            }
        }
        None
    }

    /// Restriction to arities `≤ max`.
    pub fn truncated(&self, max: usize) -> AInfinityStructure {
        AInfinityStructure {
            carrier: self.carrier.clone(),
            ops: self.ops.range(..=max).map(|(&k, v)| (k, v.clone())).collect(),
            max_arity: max.min(self.max_arity),
        }
    }
}

/// Components `fₙ: M^{⊗n} → A` of degree `n − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfinityMorphism {
    pub source: Arc<AInfinityStructure>,
    pub target: Arc<AInfinityStructure>,
    pub comps: BTreeMap<usize, Table>,
}

impl AInfinityMorphism {
    pub fn new(
        source: Arc<AInfinityStructure>,
        target: Arc<AInfinityStructure>,
        mut comps: BTreeMap<usize, Table>,
    ) -> Result<Self> {
        for (&n, t) in comps.iter_mut() {
            prune(t);
            check_table_degrees(t, &source.carrier, &target.carrier, n as i64 - 1, &format!("f{n}"))?;
        }
        comps.retain(|_, t| !t.is_empty());
        Ok(AInfinityMorphism { source, target, comps })
    }

    pub fn apply(&self, n: usize, w: &[u32]) -> Lin<usize> {
        self.comps.get(&n).map(|t| table_apply(t, w)).unwrap_or_default()
    }

    pub fn first_difference(&self, other: &AInfinityMorphism, max: usize) -> Option<(usize, Word)> {
        for n in 1..=max {
            let empty = Table::new();
            let a = self.comps.get(&n).unwrap_or(&empty);
            let b = other.comps.get(&n).unwrap_or(&empty);
            let keys: BTreeSet<&Word> = a.keys().chain(b.keys()).collect();
            for k in keys {
                if a.get(k) != b.get(k) {
                    return Some((n, k.clone()));
                }
            }
        }
        None
    }
}

/// Residuals of an identity family, by arity and input degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: String,
    /// `(arity, degree) → (words checked, words with nonzero residual)`.
    pub cells: BTreeMap<(usize, i64), (usize, usize)>,
    pub first_failure: Option<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }

    pub fn words_checked(&self) -> usize {
        self.cells.values().map(|c| c.0).sum()
    }

    pub fn failing_words(&self) -> usize {
        self.cells.values().map(|c| c.1).sum()
    }

    pub fn record(&mut self, arity: usize, degree: i64, ok: bool, describe: impl FnOnce() -> String) {
        let cell = self.cells.entry((arity, degree)).or_default();
        cell.0 += 1;
        if !ok {
            cell.1 += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} words checked, {} nonzero residuals",
            self.name,
            self.words_checked(),
            self.failing_words()
        )?;
        if let Some(w) = &self.first_failure {
            writeln!(f, "  first failure: {w}")?;
        }
        Ok(())
    }
}

/// Words of length `len` over `letters` whose degree plus `offset` lies in
/// `targets`.
pub fn words_landing_in(letters: &GradedBasis, len: usize, offset: i64, targets: &BTreeSet<i64>) -> Vec<Word> {
    let degs = letters.degrees();
    if degs.is_empty() || targets.is_empty() {
        return vec![];
    }
    let lo = *degs.iter().min().unwrap();
    let hi = *degs.iter().max().unwrap();
    let mut out = Vec::new();
    let mut cur = Word::new();
    fn go(
        degs: &[i64],
        len: usize,
        offset: i64,
        targets: &BTreeSet<i64>,
        lo: i64,
        hi: i64,
        cur: &mut Word,
        sum: i64,
        out: &mut Vec<Word>,
    ) {
        let left = (len - cur.len()) as i64;
        let min = sum + left * lo + offset;
        let max = sum + left * hi + offset;
        if targets.range(min..=max).next().is_none() {
            return;
        }
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for (l, &d) in degs.iter().enumerate() {
            cur.push(l as u32);
            go(degs, len, offset, targets, lo, hi, cur, sum + d, out);
            cur.pop();
        }
    }
    go(degs, len, offset, targets, lo, hi, &mut cur, 0, &mut out);
    out
}

fn occupied(b: &GradedBasis) -> BTreeSet<i64> {
    b.degrees().iter().copied().collect()
}

/// Applies `Id^r ⊗ m_s ⊗ Id^t` to a word (Koszul sign from `|m_s| = s − 2`).
fn insert_op(a: &AInfinityStructure, w: &[u32], r: usize, s: usize) -> Lin<Word> {
    let img = a.apply_op(s, &w[r..r + s]);
    if img.is_zero() {
        return Lin::zero();
    }
    let negate = odd((s as i64 - 2) * degree_of(&w[..r], &a.carrier));
    let mut out = Lin::zero();
    for (&l, c) in &img {
        let mut v = Word::from_slice(&w[..r]);
        v.push(l as u32);
        v.extend_from_slice(&w[r + s..]);
        out.add_term(v, c.clone().signed(negate));
    }
    out
}

/// `Σ_{r+s+t=n} (−1)^{r+st} m_{r+1+t}(Id^r ⊗ m_s ⊗ Id^t)` on a word.
pub fn stasheff_residual(a: &AInfinityStructure, w: &[u32]) -> Lin<usize> {
    let n = w.len();
    let mut out = Lin::zero();
    for s in 1..=n {
        if a.op(s).is_none() {
            continue;
        }
        for r in 0..=n - s {
            let t = n - r - s;
            let outer = r + 1 + t;
            if a.op(outer).is_none() {
                continue;
            }
            let inner = insert_op(a, w, r, s);
            let negate = odd((r + s * t) as i64);
            for (v, c) in &inner {
                out.add_scaled(&a.apply_op(outer, v), &c.clone().signed(negate));
            }
        }
    }
    out
}

/// Evaluates the Stasheff identities on every word of arity `≤ max`.
pub fn check_stasheff(a: &AInfinityStructure, max: usize) -> IdentityReport {
    let mut report = IdentityReport { name: "stasheff".into(), ..Default::default() };
    let targets = occupied(&a.carrier);
    for n in 1..=max {
        let words = words_landing_in(&a.carrier, n, n as i64 - 3, &targets);
        let results: Vec<bool> = words.par_iter().map(|w| stasheff_residual(a, w).is_zero()).collect();
        for (w, ok) in words.iter().zip(results) {
            report.record(n, degree_of(w, &a.carrier), ok, || {
                format!("arity {n} at {}", word_name(w, &a.carrier))
            });
        }
    }
    report
}

/// Compositions of `n` into positive parts, in lexicographic order.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Left minus right side of the morphism identity on a word.
pub fn morphism_residual(f: &AInfinityMorphism, w: &[u32]) -> Lin<usize> {
    let src = &f.source;
    let tgt = &f.target;
    let n = w.len();
    let mut out = Lin::zero();
    for s in 1..=n {
        if src.op(s).is_none() {
            continue;
        }
        for r in 0..=n - s {
            let t = n - r - s;
            let inner = insert_op(src, w, r, s);
            let negate = odd((r + s * t) as i64);
            for (v, c) in &inner {
                out.add_scaled(&f.apply(r + 1 + t, v), &c.clone().signed(negate));
            }
        }
    }
    for parts in compositions(n) {
        let q = parts.len();
        if tgt.op(q).is_none() {
            continue;
        }
        let wsign: i64 = parts[..q - 1]
            .iter()
            .enumerate()
            .map(|(k, &i)| (q - 1 - k) as i64 * (i as i64 - 1))
            .sum();
        // (f_{i₁} ⊗ … ⊗ f_{i_q})(w) with Koszul signs
        let mut acc: Vec<(Word, crate::scalar::Scalar, bool)> = vec![(Word::new(), src.field().one(), odd(wsign))];
        let mut pos = 0;
        let mut prefix_deg = 0;
        for &i in &parts {
            let img = f.apply(i, &w[pos..pos + i]);
            let flip = odd((i as i64 - 1) * prefix_deg);
            let mut next = Vec::new();
            for (v, c, neg) in &acc {
                for (&l, x) in &img {
                    let mut v2 = v.clone();
                    v2.push(l as u32);
                    next.push((v2, c * x, neg ^ flip));
                }
            }
            acc = next;
            prefix_deg += degree_of(&w[pos..pos + i], &src.carrier);
            pos += i;
            if acc.is_empty() {
                break;
            }
        }
        for (v, c, neg) in acc {
            // right-hand side enters with a minus sign
            out.add_scaled(&tgt.apply_op(q, &v), &c.signed(!neg));
        }
    }
    out
}

/// Evaluates the morphism identities on every word of arity `≤ max`.
pub fn check_morphism(f: &AInfinityMorphism, max: usize) -> IdentityReport {
    let mut report = IdentityReport { name: "morphism".into(), ..Default::default() };
    let targets = occupied(&f.target.carrier);
    for n in 1..=max {
        let words = words_landing_in(&f.source.carrier, n, n as i64 - 2, &targets);
        let results: Vec<bool> = words.par_iter().map(|w| morphism_residual(f, w).is_zero()).collect();
        for (w, ok) in words.iter().zip(results) {
            report.record(n, degree_of(w, &f.source.carrier), ok, || {
                format!("arity {n} at {}", word_name(w, &f.source.carrier))
            });
        }
    }
    report
}

/// Checks `b∘b = 0` for the bar coderivation on words of length `≤ max`.
pub fn check_bar_square_zero(a: &AInfinityStructure, max: usize) -> IdentityReport {
    let mut report = IdentityReport { name: "bar square".into(), ..Default::default() };
    let letters = a.bar_letters();
    let b = a.to_bar();
    for n in 1..=max {
        let words = crate::words::words_of_length(letters.len(), n);
        let results: Vec<bool> = words
            .par_iter()
            .map(|w| b.apply(&b.apply_word(w, &letters), &letters).is_zero())
            .collect();
        for (w, ok) in words.iter().zip(results) {
            report.record(n, degree_of(w, &letters), ok, || format!("word {}", word_name(w, &letters)));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truncated_poly(field: Field) -> DgAlgebra {
        // t, t² with |t| = 2 and t³ = 0
        let b = Arc::new(GradedBasis::new(field, [("t", 2), ("t2", 4)]).unwrap());
        let mut mu = Table::new();
        mu.insert(word(&[0, 0]), Lin::single(1, field.one()));
        DgAlgebra::new(b.clone(), GradedMap::zero(b.clone(), b, -1), mu).unwrap()
    }

    #[test]
    fn suspension_sign_exponent() {
        let b = GradedBasis::new(Field::Rational, [("a", 1), ("b", 2), ("c", 3)]).unwrap();
        // 2·1 + 1·2 + 0·3
        assert_eq!(suspension_exponent(&[0, 1, 2], &b), 4);
    }

    #[test]
    fn strict_algebra_satisfies_stasheff() {
        let a = truncated_poly(Field::prime(5).unwrap());
        a.validate().unwrap();
        let s = a.to_ainf(4);
        assert!(check_stasheff(&s, 4).passed());
        assert!(check_bar_square_zero(&s, 4).passed());
    }

    #[test]
    fn bar_dictionary_round_trips() {
        let a = truncated_poly(Field::Rational).to_ainf(3);
        let back = AInfinityStructure::from_bar(a.carrier.clone(), &a.to_bar(), 3).unwrap();
        assert_eq!(back, a);
        let zero = AInfinityStructure::new(a.carrier.clone(), BTreeMap::new(), 3).unwrap();
        assert!(zero.to_bar().is_zero());
    }

    #[test]
    fn nonassociative_product_detected() {
        let f = Field::Rational;
        let b = Arc::new(GradedBasis::new(f, [("x", 0), ("y", 0)]).unwrap());
        let mut mu = Table::new();
        mu.insert(word(&[0, 0]), Lin::single(1, f.one()));
        mu.insert(word(&[1, 0]), Lin::single(1, f.one()));
        let a = DgAlgebra::new(b.clone(), GradedMap::zero(b.clone(), b, -1), mu).unwrap();
        assert!(matches!(a.validate(), Err(Error::AxiomViolation(_))));
        let s = a.to_ainf(3);
        assert!(!check_stasheff(&s, 3).passed());
        assert!(!check_bar_square_zero(&s, 3).passed());
    }

    #[test]
    fn identity_morphism_passes() {
        let a = Arc::new(truncated_poly(Field::Rational).to_ainf(4));
        let mut f1 = Table::new();
        for i in 0..a.carrier.len() {
            f1.insert(word(&[i as u32]), Lin::single(i, Field::Rational.one()));
        }
        let mut comps = BTreeMap::new();
        comps.insert(1, f1);
        let f = AInfinityMorphism::new(a.clone(), a, comps).unwrap();
        assert!(check_morphism(&f, 4).passed());
    }

    #[test]
    fn compositions_of_four() {
        assert_eq!(compositions(4).len(), 8);
        assert_eq!(compositions(3)[0], vec![1, 1, 1]);
    }
}
