//! Symmetric coalgebras, the Cartan–Chevalley–Eilenberg coalgebra of a DGLA,
//! and transfer of L∞-structures.
//!
//! `S^c[V]` is modelled by sorted words: letters in nondecreasing order, odd
//! letters at most once. The diagonal is the signed unshuffle coproduct.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::ainf::{check_table_degrees, prune, table_apply, word_name, IdentityReport};
use crate::basis::GradedBasis;
use crate::complex::{ChainComplex, Contraction};
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::map::GradedMap;
use crate::perturb::{perturb, Filtration, Perturbation, Perturbed};
use crate::scalar::{Field, Scalar};
use crate::words::{degree_of, tensor_homotopy, tensor_power, word, Table, Word};

fn odd(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

/// Refuses characteristic 2 and characteristics `p ≤ max`, where averaging
/// over symmetric groups is not exact.
pub fn check_field(field: Field, max: usize) -> Result<()> {
    match field {
        Field::Rational => Ok(()),
        Field::Prime(2) => Err(Error::UnsupportedField("characteristic 2 is not supported".into())),
        Field::Prime(p) if p as usize <= max => Err(Error::UnsupportedField(format!(
            "characteristic {p} does not exceed the maximal arity {max}"
        ))),
        Field::Prime(_) => Ok(()),
    }
}

/// Sorts a word into normal form with its Koszul sign; `None` when an odd
/// letter repeats.
pub fn sym_sort(w: &[u32], letters: &GradedBasis) -> Option<(Word, bool)> {
    let mut v = Word::from_slice(w);
    let mut negate = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            if odd(letters.degree(v[j - 1] as usize)) && odd(letters.degree(v[j] as usize)) {
                negate = !negate;
            }
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    let repeats = v.windows(2).any(|p| p[0] == p[1] && odd(letters.degree(p[0] as usize)));
    (!repeats).then_some((v, negate))
}

/// Normal-form words of length `len`.
pub fn sym_words_of_length(letters: &GradedBasis, len: usize) -> Vec<Word> {
    fn go(letters: &GradedBasis, len: usize, start: u32, cur: &mut Word, out: &mut Vec<Word>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for l in start..letters.len() as u32 {
            let repeat_ok = !odd(letters.degree(l as usize)) || cur.last() != Some(&l);
            if repeat_ok {
                cur.push(l);
                go(letters, len, l, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(letters, len, 0, &mut Word::new(), &mut out);
    out
}

/// Normal-form words of length `1..=max`.
pub fn sym_words(letters: &GradedBasis, max: usize) -> Vec<Word> {
    (1..=max).flat_map(|n| sym_words_of_length(letters, n)).collect()
}

/// Product of normal-form words as a signed normal-form word.
pub fn sym_mul(u: &[u32], v: &[u32], letters: &GradedBasis) -> Option<(Word, bool)> {
    let mut w = Word::from_slice(u);
    w.extend_from_slice(v);
    sym_sort(&w, letters)
}

/// Unshuffle terms `(w_I, w_J, ε(I))` over position subsets `I` with
/// `1 ≤ |I| ≤ len`, `ε` the Koszul sign of moving `I` to the front.
pub fn unshuffles(w: &[u32], letters: &GradedBasis) -> Vec<(Word, Word, bool)> {
    let n = w.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let mut front = Word::new();
        let mut back = Word::new();
        let mut negate = false;
        let mut back_deg = 0;
        for (i, &l) in w.iter().enumerate() {
            let d = letters.degree(l as usize);
            if mask & (1 << i) != 0 {
                if odd(d * back_deg) {
                    negate = !negate;
                }
                front.push(l);
            } else {
                back_deg += d;
                back.push(l);
            }
        }
        out.push((front, back, negate));
    }
    out
}

/// A coderivation of `S^c[V]` given by its corestrictions `q_j`, tabulated on
/// normal-form words of length `j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymCoderivation {
    pub components: BTreeMap<usize, Table>,
}

impl SymCoderivation {
    pub fn corestriction(&self, w: &[u32]) -> Lin<usize> {
        self.components.get(&w.len()).map(|t| table_apply(t, w)).unwrap_or_default()
    }

    /// `Q(w) = Σ_{I ≠ ∅} ε(I) q(w_I) ⊙ w_J`.
    pub fn apply_word(&self, w: &[u32], letters: &GradedBasis) -> Lin<Word> {
        let mut out = Lin::zero();
        for (front, back, negate) in unshuffles(w, letters) {
            for (&l, c) in &self.corestriction(&front) {
                if let Some((v, s)) = sym_mul(&[l as u32], &back, letters) {
                    out.add_term(v, c.clone().signed(negate ^ s));
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &Lin<Word>, letters: &GradedBasis) -> Lin<Word> {
        x.map_linear(|w| self.apply_word(w, letters))
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(|t| t.values().all(Lin::is_zero))
    }

    /// Part of arity at least `j`.
    pub fn from_arity(&self, j: usize) -> SymCoderivation {
        SymCoderivation { components: self.components.range(j..).map(|(&k, t)| (k, t.clone())).collect() }
    }
}

/// A differential graded Lie algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgLieAlgebra {
    pub carrier: Arc<GradedBasis>,
    pub d: GradedMap,
    /// Structure constants on ordered pairs of letters.
    pub bracket: Table,
}

impl DgLieAlgebra {
    pub fn new(carrier: Arc<GradedBasis>, d: GradedMap, mut bracket: Table) -> Result<Self> {
        prune(&mut bracket);
        if d.source() != &carrier || d.target() != &carrier {
            return Err(Error::Structure("differential does not act on the carrier".into()));
        }
        if bracket.keys().any(|w| w.len() != 2) {
            return Err(Error::Structure("bracket entries need two inputs".into()));
        }
        check_table_degrees(&bracket, &carrier, &carrier, 0, "bracket")?;
        Ok(DgLieAlgebra { carrier, d, bracket })
    }

    pub fn field(&self) -> Field {
        self.carrier.field()
    }

    pub fn is_abelian(&self) -> bool {
        self.bracket.is_empty()
    }

    pub fn br(&self, x: &Lin<usize>, y: &Lin<usize>) -> Lin<usize> {
        let mut out = Lin::zero();
        for (&a, ca) in x {
            for (&b, cb) in y {
                if let Some(img) = self.bracket.get(&word(&[a as u32, b as u32])) {
                    out.add_scaled(img, &(ca * cb));
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Lin<usize> {
        Lin::single(i, self.field().one())
    }

    /// Verifies `d² = 0`, graded skew-symmetry and the Leibniz rule. The
    /// Jacobi identity is checked separately by [`DgLieAlgebra::jacobi_failure`].
    pub fn validate(&self) -> Result<()> {
        ChainComplex::new(self.d.clone())?;
        let c = &self.carrier;
        for a in 0..c.len() {
            for b in 0..c.len() {
                let (x, y) = (self.unit(a), self.unit(b));
                let ab = self.br(&x, &y);
                let ba = self.br(&y, &x).signed(!odd(c.degree(a) * c.degree(b)));
                if ab != ba {
                    return Err(Error::AxiomViolation(format!("bracket not skew on ({}, {})", c.name(a), c.name(b))));
                }
                let lhs = self.d.apply(&ab);
                let mut rhs = self.br(&self.d.apply(&x), &y);
                rhs.add_assign(&self.br(&x, &self.d.apply(&y)).signed(odd(c.degree(a))));
                if lhs != rhs {
                    return Err(Error::AxiomViolation(format!(
                        "Leibniz rule fails on ({}, {})",
                        c.name(a),
                        c.name(b)
                    )));
                }
            }
        }
        Ok(())
    }

    /// First triple violating `[a,[b,c]] = [[a,b],c] + (−1)^{|a||b|}[b,[a,c]]`.
    pub fn jacobi_failure(&self) -> Option<String> {
        let c = &self.carrier;
        for a in 0..c.len() {
            for b in 0..c.len() {
                for e in 0..c.len() {
                    let (x, y, z) = (self.unit(a), self.unit(b), self.unit(e));
                    let lhs = self.br(&x, &self.br(&y, &z));
                    let mut rhs = self.br(&self.br(&x, &y), &z);
                    rhs.add_assign(&self.br(&y, &self.br(&x, &z)).signed(odd(c.degree(a) * c.degree(b))));
                    if lhs != rhs {
                        return Some(format!("({}, {}, {})", c.name(a), c.name(b), c.name(e)));
                    }
                }
            }
        }
        None
    }

    /// Suspended letters `s𝔤`.
    pub fn cce_letters(&self) -> GradedBasis {
        self.carrier.shifted(1)
    }
}

/// The CCE coderivation: `q₁(sx) = −s dx`, `q₂(sx ⊙ sy) = (−1)^{|x|+1} s[x, y]`.
pub fn cce_coalgebra(g: &DgLieAlgebra) -> SymCoderivation {
    let letters = g.cce_letters();
    let mut q = SymCoderivation::default();
    let q1: Table = (0..g.carrier.len())
        .map(|x| (word(&[x as u32]), g.d.column(x).neg()))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    q.components.insert(1, q1);
    let q2: Table = sym_words_of_length(&letters, 2)
        .into_iter()
        .map(|w| {
            let img = g.br(&g.unit(w[0] as usize), &g.unit(w[1] as usize));
            let negate = !odd(g.carrier.degree(w[0] as usize));
            (w, img.signed(negate))
        })
        .filter(|(_, v)| !v.is_zero())
        .collect();
    q.components.insert(2, q2);
    q.components.retain(|_, t| !t.is_empty());
    q
}

/// Checks `Q∘Q = 0` for the CCE coderivation on words of length `≤ max`.
pub fn check_cce_square_zero(g: &DgLieAlgebra, max: usize) -> IdentityReport {
    let q = cce_coalgebra(g);
    square_zero_report(&q, &g.cce_letters(), max, "cce square")
}

fn square_zero_report(q: &SymCoderivation, letters: &GradedBasis, max: usize, name: &str) -> IdentityReport {
    let mut report = IdentityReport { name: name.into(), ..Default::default() };
    let words = sym_words(letters, max);
    let ok: Vec<bool> = words.par_iter().map(|w| q.apply(&q.apply_word(w, letters), letters).is_zero()).collect();
    for (w, ok) in words.iter().zip(ok) {
        report.record(w.len(), degree_of(w, letters), ok, || format!("word {}", word_name(w, letters)));
    }
    report
}

/// `[a, b](w) = Σ ε(I) (−1)^{|b||w_I|} [a(w_I), b(w_J)]` over proper
/// nonempty position subsets.
pub fn cup_bracket(
    g: &DgLieAlgebra,
    letters: &GradedBasis,
    a: &dyn Fn(&[u32]) -> Lin<usize>,
    b: &dyn Fn(&[u32]) -> Lin<usize>,
    b_degree: i64,
    w: &[u32],
) -> Lin<usize> {
    let mut out = Lin::zero();
    for (front, back, negate) in unshuffles(w, letters) {
        if back.is_empty() {
            continue;
        }
        let x = a(&front);
        if x.is_zero() {
            continue;
        }
        let y = b(&back);
        if y.is_zero() {
            continue;
        }
        let sign = negate ^ odd(b_degree * degree_of(&front, letters));
        out.add_assign(&g.br(&x, &y).signed(sign));
    }
    out
}

/// An L∞-structure on `M`: a coderivation of `S^c[sM]` by its corestrictions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LInfinityStructure {
    pub carrier: Arc<GradedBasis>,
    pub coderivation: SymCoderivation,
    pub max_arity: usize,
}

impl LInfinityStructure {
    pub fn letters(&self) -> GradedBasis {
        self.carrier.shifted(1)
    }

    /// Checks `(d + 𝒟)² = 0` on words of length `≤ max`.
    pub fn check_square_zero(&self, max: usize) -> IdentityReport {
        square_zero_report(&self.coderivation, &self.letters(), max, "linf square")
    }

    /// Whether each component `j` is tabulated on words of length `j`, so
    /// that it lowers word length by `j − 1`.
    pub fn is_filtered(&self) -> bool {
        self.coderivation.components.iter().all(|(&j, t)| t.keys().all(|w| w.len() == j))
    }
}

/// A degree −1 map `S^c[sM] → 𝔤`, by word length.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieTwistingCochain {
    pub components: BTreeMap<usize, Table>,
}

impl LieTwistingCochain {
    pub fn apply(&self, w: &[u32]) -> Lin<usize> {
        self.components.get(&w.len()).map(|t| table_apply(t, w)).unwrap_or_default()
    }
}

/// Output of [`transfer_linf`].
#[derive(Clone, Debug)]
pub struct LinfTransferred {
    pub structure: LInfinityStructure,
    pub tau: LieTwistingCochain,
    /// The perturbed contraction of the symmetric tensor-trick lift.
    pub perturbed: Perturbed,
    /// Whether the perturbation lemma reproduced the recursion exactly.
    pub agrees_with_perturbation: bool,
}

/// Transfers a DGLA along `c` with the recursion
/// `τʲ = ½ h Σ [τˡ, τ^{j−l}]`, `𝒟ʲ = s ½ π Σ [τˡ, τ^{j−l}]`, and runs the
/// perturbation lemma on the symmetric lift for comparison.
pub fn transfer_linf(g: &DgLieAlgebra, c: &Contraction, max: usize) -> Result<LinfTransferred> {
    check_field(g.field(), max)?;
    if c.big.basis() != &g.carrier || c.big.d() != &g.d {
        return Err(Error::Structure("contraction does not start at the Lie algebra".into()));
    }
    if let Some(t) = g.jacobi_failure() {
        return Err(Error::AxiomViolation(format!("Jacobi identity fails on {t}")));
    }
    let field = g.field();
    let half = field.inverse_of(2).expect("odd characteristic");
    let letters = c.small.basis().shifted(1);
    let mut tau = LieTwistingCochain::default();
    tau.components.insert(
        1,
        (0..letters.len())
            .map(|m| (word(&[m as u32]), c.nabla.column(m).clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect(),
    );
    let mut q = SymCoderivation::default();
    let q1: Table = (0..letters.len())
        .map(|m| (word(&[m as u32]), c.small.d().column(m).neg()))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    if !q1.is_empty() {
        q.components.insert(1, q1);
    }
    for j in 2..=max {
        let words = sym_words_of_length(&letters, j);
        let rows: Vec<(Word, Lin<usize>)> = words
            .par_iter()
            .map(|w| {
                let t = |u: &[u32]| tau.apply(u);
                (w.clone(), cup_bracket(g, &letters, &t, &t, -1, w).scaled(&half))
            })
            .collect();
        let mut tj = Table::new();
        let mut qj = Table::new();
        for (w, s) in rows {
            let t = c.h.apply(&s);
            let p = c.pi.apply(&s);
            if !t.is_zero() {
                tj.insert(w.clone(), t);
            }
            if !p.is_zero() {
                qj.insert(w, p);
            }
        }
        tau.components.insert(j, tj);
        if !qj.is_empty() {
            q.components.insert(j, qj);
        }
    }
    let structure = LInfinityStructure { carrier: c.small.basis().clone(), coderivation: q, max_arity: max };
    let lift = symmetric_contraction(c, max)?;
    let cce = cce_coalgebra(g).from_arity(2);
    let delta = GradedMap::from_fn(lift.contraction.big.basis().clone(), lift.contraction.big.basis().clone(), -1, |i| {
        lift.big_to_index(&cce.apply_word(&lift.big_words[i], &lift.big_letters))
    })?;
    let filtration = Filtration {
        big: lift.big_words.iter().map(Word::len).collect(),
        small: lift.small_words.iter().map(Word::len).collect(),
    };
    let perturbed = perturb(&lift.contraction, &Perturbation { delta, drop: 1 }, &filtration, max)?;
    let higher = structure.coderivation.from_arity(2);
    let agrees = (0..lift.small_words.len()).all(|i| {
        lift.small_to_index(&higher.apply_word(&lift.small_words[i], &letters)) == *perturbed.transferred.column(i)
    });
    Ok(LinfTransferred { structure, tau, perturbed, agrees_with_perturbation: agrees })
}

/// Checks `dτ + τ𝒟 = ½[τ, τ]` on normal-form words of length `≤ max`.
pub fn check_master(g: &DgLieAlgebra, m: &LInfinityStructure, tau: &LieTwistingCochain, max: usize) -> IdentityReport {
    let letters = m.letters();
    let mut report = IdentityReport { name: "master equation".into(), ..Default::default() };
    let Some(half) = g.field().inverse_of(2) else {
        report.first_failure = Some("characteristic 2".into());
        return report;
    };
    let words = sym_words(&letters, max);
    let ok: Vec<bool> = words
        .par_iter()
        .map(|w| {
            let t = |u: &[u32]| tau.apply(u);
            let mut lhs = g.d.apply(&tau.apply(w));
            for (v, c) in &m.coderivation.apply_word(w, &letters) {
                lhs.add_scaled(&tau.apply(v), c);
            }
            lhs == cup_bracket(g, &letters, &t, &t, -1, w).scaled(&half)
        })
        .collect();
    for (w, ok) in words.iter().zip(ok) {
        report.record(w.len(), degree_of(w, &letters), ok, || format!("word {}", word_name(w, &letters)));
    }
    report
}

/// The tensor-trick contraction lifted to normal-form words of length
/// `≤ max`, as finite matrices.
pub struct SymmetricLift {
    pub contraction: Contraction,
    pub big_letters: GradedBasis,
    pub small_letters: GradedBasis,
    pub big_words: Vec<Word>,
    pub small_words: Vec<Word>,
    big_index: BTreeMap<Word, usize>,
    small_index: BTreeMap<Word, usize>,
}

impl SymmetricLift {
    pub fn big_to_index(&self, x: &Lin<Word>) -> Lin<usize> {
        x.iter().filter_map(|(w, c)| self.big_index.get(w).map(|&i| (i, c.clone()))).collect()
    }

    pub fn small_to_index(&self, x: &Lin<Word>) -> Lin<usize> {
        x.iter().filter_map(|(w, c)| self.small_index.get(w).map(|&i| (i, c.clone()))).collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// `ι(v₁ ⊙ … ⊙ vₙ) = Σ_σ ε(σ) v_σ`.
fn symmetrize(w: &[u32], letters: &GradedBasis, one: &Scalar) -> Lin<Word> {
    let mut out = Lin::zero();
    for p in permutations(w.len()) {
        let v: Word = p.iter().map(|&i| w[i]).collect();
        // sign of sorting v back to w
        if let Some((_, negate)) = sym_sort(&v, letters) {
            out.add_term(v, one.clone().signed(negate));
        }
    }
    out
}

fn quotient(x: &Lin<Word>, letters: &GradedBasis) -> Lin<Word> {
    let mut out = Lin::zero();
    for (w, c) in x {
        if let Some((v, negate)) = sym_sort(w, letters) {
            out.add_term(v, c.clone().signed(negate));
        }
    }
    out
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn sym_basis(field: Field, letters: &GradedBasis, words: &[Word]) -> Result<Arc<GradedBasis>> {
    Ok(Arc::new(GradedBasis::new(
        field,
        words.iter().map(|w| (word_name(w, letters), degree_of(w, letters))),
    )?))
}

/// Lifts `c` to `S^c` on normal-form words of length `≤ max` with
/// `h_S = q∘Th∘ι / n!`, corrected to satisfy the side conditions.
pub fn symmetric_contraction(c: &Contraction, max: usize) -> Result<SymmetricLift> {
    let field = c.field();
    check_field(field, max)?;
    let big_letters = c.big.basis().shifted(1);
    let small_letters = c.small.basis().shifted(1);
    let big_words = sym_words(&big_letters, max);
    let small_words = sym_words(&small_letters, max);
    let big_index: BTreeMap<Word, usize> = big_words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let small_index: BTreeMap<Word, usize> = small_words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let bb = sym_basis(field, &big_letters, &big_words)?;
    let sb = sym_basis(field, &small_letters, &small_words)?;
    let e = c.nabla.compose(&c.pi)?;
    let one = field.one();
    let index = |x: Lin<Word>, idx: &BTreeMap<Word, usize>| -> Lin<usize> {
        x.iter().filter_map(|(w, c)| idx.get(w).map(|&i| (i, c.clone()))).collect()
    };
    let linear = |d: &GradedMap, letters: &GradedBasis, words: &[Word], idx: &BTreeMap<Word, usize>, basis: &Arc<GradedBasis>| {
        let q = SymCoderivation {
            components: [(1, (0..d.source().len()).map(|x| (word(&[x as u32]), d.column(x).neg())).collect())].into(),
        };
        GradedMap::from_fn(basis.clone(), basis.clone(), -1, |i| index(q.apply_word(&words[i], letters), idx))
    };
    let d_big = linear(c.big.d(), &big_letters, &big_words, &big_index, &bb)?;
    let d_small = linear(c.small.d(), &small_letters, &small_words, &small_index, &sb)?;
    let pi = GradedMap::from_fn(bb.clone(), sb.clone(), 0, |i| {
        index(quotient(&tensor_power(&big_words[i], &|l| c.pi.column(l as usize).clone()), &small_letters), &small_index)
    })?;
    let nabla = GradedMap::from_fn(sb.clone(), bb.clone(), 0, |i| {
        index(quotient(&tensor_power(&small_words[i], &|l| c.nabla.column(l as usize).clone()), &big_letters), &big_index)
    })?;
    let h_s = GradedMap::from_fn(bb.clone(), bb.clone(), 1, |i| {
        let w = &big_words[i];
        let sym = symmetrize(w, &big_letters, &one);
        let mut th = Lin::zero();
        for (v, coeff) in &sym {
            let img = tensor_homotopy(v, &big_letters, &|l| c.h.column(l as usize).neg(), &|l| e.column(l as usize).clone());
            th.add_scaled(&img, coeff);
        }
        let inv = field.inverse_of(factorial(w.len())).expect("characteristic exceeds the arity");
        index(quotient(&th, &big_letters).scaled(&inv), &big_index)
    })?;
    // (1 − ∇π) h (1 − ∇π), then h d h
    let id = GradedMap::identity(bb.clone());
    let proj = id.sub(&nabla.compose(&pi)?)?;
    let h1 = proj.compose(&h_s)?.compose(&proj)?;
    let h2 = h1.compose(&d_big)?.compose(&h1)?;
    let contraction = Contraction::new(ChainComplex::new(d_big)?, ChainComplex::new(d_small)?, pi, nabla, h2)?;
    Ok(SymmetricLift { contraction, big_letters, small_letters, big_words, small_words, big_index, small_index })
}
