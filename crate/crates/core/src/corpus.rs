//! Fixtures and seeded random generators for test structures.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ainf::DgAlgebra;
use crate::basis::GradedBasis;
use crate::coalgebra::{dualize_algebra, DgCoalgebra};
use crate::complex::{homology_contraction, ChainComplex, Contraction, WeakSystem};
use crate::error::Result;
use crate::linfty::DgLieAlgebra;
use crate::lin::Lin;
use crate::map::GradedMap;
use crate::scalar::Field;
use crate::words::{word, Table, Word};

/// Strict 𝔽[t]/t³ with `|t| = 2`, trivial differential.
pub fn truncated_polynomial(field: Field) -> DgAlgebra {
    let b = Arc::new(GradedBasis::new(field, [("t", 2), ("t2", 4)]).expect("distinct names"));
    let mut mu = Table::new();
    mu.insert(word(&[0, 0]), Lin::single(1, field.one()));
    DgAlgebra::new(b.clone(), GradedMap::zero(b.clone(), b, -1), mu).expect("valid fixture")
}

/// The standard algebra carrying a nontrivial triple Massey product
/// `⟨a, b, c⟩` with `ab = dx` and `bc = dy`.
pub fn massey_algebra(field: Field) -> DgAlgebra {
    let names = [("a", 1), ("b", 1), ("c", 1), ("ab", 2), ("bc", 2), ("x", 3), ("y", 3), ("xc", 4), ("ay", 4)];
    let b = Arc::new(GradedBasis::new(field, names).expect("distinct names"));
    let one = field.one();
    let mut d = vec![Lin::zero(); names.len()];
    d[5] = Lin::single(3, one.clone());
    d[6] = Lin::single(4, one.clone());
    let d = GradedMap::new(b.clone(), b.clone(), -1, d).expect("degree -1");
    let mut mu = Table::new();
    for (l, r, p) in [(0, 1, 3), (1, 2, 4), (5, 2, 7), (0, 6, 8)] {
        mu.insert(word(&[l, r]), Lin::single(p, one.clone()));
    }
    DgAlgebra::new(b, d, mu).expect("valid fixture")
}

/// A 2×2 upper-triangular-style algebra: `u·v = w`, `v·u = 0`, with `dz = w`
/// making the product in homology vanish. Not graded commutative.
pub fn triangular_algebra(field: Field) -> DgAlgebra {
    let names = [("u", 1), ("v", 1), ("w", 2), ("z", 3), ("zv", 4), ("uz", 4)];
    let b = Arc::new(GradedBasis::new(field, names).expect("distinct names"));
    let one = field.one();
    let mut d = vec![Lin::zero(); names.len()];
    d[3] = Lin::single(2, one.clone());
    let d = GradedMap::new(b.clone(), b.clone(), -1, d).expect("degree -1");
    let mut mu = Table::new();
    for (l, r, p) in [(0, 1, 2), (3, 1, 4), (0, 3, 5)] {
        mu.insert(word(&[l, r]), Lin::single(p, one.clone()));
    }
    DgAlgebra::new(b, d, mu).expect("valid fixture")
}

/// Six-dimensional nilpotent DGLA: `a, b, c, u` in degree 0, `x, w` in
/// degree 1, `[a, b] = u`, `[x, c] = w`, `dx = u`. Its transferred ternary
/// operation is nonzero.
pub fn nilpotent_dgla(field: Field) -> DgLieAlgebra {
    let b = Arc::new(
        GradedBasis::new(field, [("a", 0), ("b", 0), ("c", 0), ("u", 0), ("x", 1), ("w", 1)]).expect("valid basis"),
    );
    let mut cols = vec![Lin::zero(); 6];
    cols[4] = Lin::single(3, field.one());
    let d = GradedMap::new(b.clone(), b.clone(), -1, cols).expect("valid differential");
    let mut t = Table::new();
    for (x, y, z) in [(0, 1, 3), (4, 2, 5)] {
        t.insert(word(&[x, y]), Lin::single(z, field.one()));
        t.insert(word(&[y, x]), Lin::single(z, field.from_i64(-1)));
    }
    DgLieAlgebra::new(b, d, t).expect("valid fixture")
}

/// Size limits for random monomial algebras.
#[derive(Clone, Copy, Debug)]
pub struct AlgebraShape {
    pub generators: usize,
    /// Lowest degree of a generator that bounds nothing.
    pub min_degree: i64,
    pub max_degree: i64,
    pub max_basis: usize,
    pub max_word: usize,
    pub commutative: bool,
    /// Place every generator in degrees `≤ −2` instead of `≥ 1`.
    pub negative: bool,
}

impl Default for AlgebraShape {
    fn default() -> Self {
        AlgebraShape { generators: 5, min_degree: 1, max_degree: 4, max_basis: 16, max_word: 3, commutative: false, negative: false }
    }
}

/// Free (graded-commutative) monomials modulo the complement of a finite
/// factor-closed set of words.
struct Monomials<'a> {
    degrees: &'a [i64],
    commutative: bool,
}

impl Monomials<'_> {
    fn degree(&self, w: &[u32]) -> i64 {
        w.iter().map(|&g| self.degrees[g as usize]).sum()
    }

    /// Product in the free algebra: concatenation, or sorted merge with the
    /// Koszul sign. `None` when an odd generator repeats.
    fn mul(&self, u: &[u32], v: &[u32]) -> Option<(Word, bool)> {
        let mut w: Word = u.iter().chain(v).copied().collect();
        if !self.commutative {
            return Some((w, false));
        }
        let mut negate = false;
        // insertion sort, tracking transpositions of odd letters
        for i in 1..w.len() {
            let mut j = i;
            while j > 0 && w[j - 1] > w[j] {
                if self.degrees[w[j - 1] as usize] % 2 != 0 && self.degrees[w[j] as usize] % 2 != 0 {
                    negate = !negate;
                }
                w.swap(j - 1, j);
                j -= 1;
            }
        }
        let repeats_odd = w.windows(2).any(|p| p[0] == p[1] && self.degrees[p[0] as usize] % 2 != 0);
        (!repeats_odd).then_some((w, negate))
    }

    /// Leibniz extension of `d` (given on generators) to a free monomial.
    fn d(&self, gens: &[Lin<Word>], w: &[u32]) -> Lin<Word> {
        let mut out = Lin::zero();
        let mut prefix = 0;
        for i in 0..w.len() {
            for (img, c) in &gens[w[i] as usize] {
                let Some((left, s1)) = self.mul(&w[..i], img) else { continue };
                let Some((full, s2)) = self.mul(&left, &w[i + 1..]) else { continue };
                let negate = (prefix % 2 != 0) ^ s1 ^ s2;
                out.add_term(full, c.clone().signed(negate));
            }
            prefix += self.degrees[w[i] as usize];
        }
        out
    }

    /// Immediate sub-monomials used for factor closure.
    fn parents(&self, w: &[u32]) -> Vec<Word> {
        if self.commutative {
            (0..w.len())
                .map(|i| w[..i].iter().chain(&w[i + 1..]).copied().collect())
                .collect()
        } else {
            vec![Word::from_slice(&w[1..]), Word::from_slice(&w[..w.len() - 1])]
        }
    }

    fn close(&self, w: &[u32], set: &mut BTreeSet<Word>) {
        if w.is_empty() || !set.insert(Word::from_slice(w)) {
            return;
        }
        for p in self.parents(w) {
            self.close(&p, set);
        }
    }

    /// Words outside the set whose immediate sub-monomials all lie in it.
    fn minimal_outside(&self, set: &BTreeSet<Word>, gens: usize) -> Vec<Word> {
        let mut out = BTreeSet::new();
        let base: Vec<Word> = std::iter::once(Word::new()).chain(set.iter().cloned()).collect();
        for w in &base {
            for g in 0..gens as u32 {
                let candidates = if self.commutative {
                    self.mul(w, &[g]).map(|(v, _)| v).into_iter().collect::<Vec<_>>()
                } else {
                    let mut l = Word::from_slice(&[g]);
                    l.extend_from_slice(w);
                    let mut r = w.clone();
                    r.push(g);
                    vec![l, r]
                };
                for c in candidates {
                    if !set.contains(&c) && self.parents(&c).iter().all(|p| p.is_empty() || set.contains(p)) {
                        out.insert(c);
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

fn monomial_name(w: &[u32]) -> String {
    w.iter().map(|g| format!("x{g}")).collect()
}

/// A random monomial algebra with a Leibniz differential whose values on
/// generators are cycles built from earlier generators.
pub fn random_monomial_algebra(rng: &mut impl Rng, field: Field, shape: AlgebraShape) -> Result<DgAlgebra> {
    let gens = shape.generators.max(1);
    let top = shape.max_degree.max(1);
    // generators after the first few may be chosen to bound a product of
    // two earlier ones
    let mut degrees: Vec<i64> = Vec::with_capacity(gens);
    let mut killers: Vec<Option<Word>> = Vec::with_capacity(gens);
    for g in 0..gens {
        let pair = (g >= 2 && rng.gen_bool(0.7))
            .then(|| (rng.gen_range(0..g) as u32, rng.gen_range(0..g) as u32))
            .filter(|&(p, q)| {
                let k = degrees[p as usize] + degrees[q as usize] + 1;
                if shape.negative {
                    k >= -top
                } else {
                    k <= top
                }
            });
        match pair {
            Some((p, q)) => {
                degrees.push(degrees[p as usize] + degrees[q as usize] + 1);
                killers.push(Some(word(&[p, q])));
            }
            None => {
                degrees.push(if shape.negative {
                    rng.gen_range(-3..=-2)
                } else {
                    let low = shape.min_degree.clamp(0, top);
                    rng.gen_range(low..=top.min(2).max(low))
                });
                killers.push(None);
            }
        }
    }
    let mono = Monomials { degrees: &degrees, commutative: shape.commutative };
    let mut set = BTreeSet::new();
    for g in 0..gens as u32 {
        set.insert(Word::from_slice(&[g]));
    }
    for k in killers.iter().flatten() {
        if let Some((w, _)) = mono.mul(k, &[]) {
            mono.close(&w, &mut set);
        }
    }
    let featured: Vec<u32> = (0..gens as u32).filter(|&g| killers[g as usize].is_some()).collect();
    for _ in 0..4 * shape.max_basis {
        let len = rng.gen_range(2..=shape.max_word.max(2));
        let mut w: Word = (0..len).map(|_| rng.gen_range(0..gens as u32)).collect();
        if !featured.is_empty() && rng.gen_bool(0.5) {
            let at = rng.gen_range(0..len);
            w[at] = *featured.choose(rng).expect("nonempty");
        }
        let Some((w, _)) = mono.mul(&w, &[]) else { continue };
        let mut trial = set.clone();
        mono.close(&w, &mut trial);
        if trial.len() <= shape.max_basis {
            set = trial;
        }
    }
    let minimal = mono.minimal_outside(&set, gens);
    let mut gen_d: Vec<Lin<Word>> = vec![Lin::zero(); gens];
    for g in 0..gens {
        let target = degrees[g] - 1;
        let is_cycle = |w: &Word, gen_d: &[Lin<Word>]| restrict(&mono.d(gen_d, w), &set).is_zero();
        let mut cycles: Vec<Word> = set
            .iter()
            .filter(|w| w.iter().all(|&l| (l as usize) < g) && mono.degree(w) == target)
            .filter(|w| is_cycle(w, &gen_d))
            .cloned()
            .collect();
        cycles.shuffle(rng);
        if let Some(k) = killers[g].as_ref().and_then(|k| mono.mul(k, &[])).map(|(w, _)| w) {
            if let Some(pos) = cycles.iter().position(|w| *w == k) {
                cycles.swap(0, pos);
            }
        } else if rng.gen_bool(0.5) {
            continue;
        }
        if cycles.is_empty() {
            continue;
        }
        let mut value = Lin::zero();
        for w in cycles.iter().take(rng.gen_range(1..=2)) {
            value.add_term(w.clone(), field.from_i64(rng.gen_range(1..=3)));
        }
        let previous = std::mem::replace(&mut gen_d[g], value);
        let well_defined = minimal
            .iter()
            .all(|u| mono.d(&gen_d, u).keys().all(|k| !set.contains(k)));
        if !well_defined {
            gen_d[g] = previous;
        }
    }
    let words: Vec<Word> = {
        let mut v: Vec<Word> = set.into_iter().collect();
        v.sort_by_key(|w| (mono.degree(w), w.len(), w.clone()));
        v
    };
    let index: BTreeMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let basis = Arc::new(GradedBasis::new(
        field,
        words.iter().map(|w| (monomial_name(w), mono.degree(w))),
    )?);
    let to_index = |x: &Lin<Word>| -> Lin<usize> {
        x.iter().filter_map(|(w, c)| index.get(w).map(|&i| (i, c.clone()))).collect()
    };
    let cols = words.iter().map(|w| to_index(&mono.d(&gen_d, w))).collect();
    let d = GradedMap::new(basis.clone(), basis.clone(), -1, cols)?;
    let mut mu = Table::new();
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate() {
            if let Some((p, negate)) = mono.mul(u, v) {
                if let Some(&k) = index.get(&p) {
                    mu.insert(word(&[i as u32, j as u32]), Lin::single(k, field.one().signed(negate)));
                }
            }
        }
    }
    let alg = DgAlgebra::new(basis, d, mu)?;
    alg.validate()?;
    Ok(alg)
}

/// A random strict coalgebra in degrees `≥ 2`, dual to a random monomial
/// algebra in degrees `≤ −2`.
pub fn random_coalgebra(rng: &mut impl Rng, field: Field, shape: AlgebraShape) -> Result<DgCoalgebra> {
    let alg = random_monomial_algebra(rng, field, AlgebraShape { negative: true, ..shape })?;
    let c = dualize_algebra(&alg.to_ainf(2)).strict()?;
    c.validate()?;
    Ok(c)
}

/// Ordinary Lie algebras in degree 0 used as coefficients of random DGLAs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieKind {
    Line,
    Abelian2,
    /// `[e, f] = f`.
    Affine,
    /// `[x, y] = z`.
    Heisenberg,
    Sl2,
}

impl LieKind {
    pub const ALL: [LieKind; 5] = [LieKind::Line, LieKind::Abelian2, LieKind::Affine, LieKind::Heisenberg, LieKind::Sl2];

    pub fn dim(self) -> usize {
        match self {
            LieKind::Line => 1,
            LieKind::Abelian2 | LieKind::Affine => 2,
            LieKind::Heisenberg | LieKind::Sl2 => 3,
        }
    }

    /// Structure constants `[x_i, x_j] = Σ c x_k` for `i < j`.
    fn brackets(self) -> Vec<(usize, usize, usize, i64)> {
        match self {
            LieKind::Line | LieKind::Abelian2 => vec![],
            LieKind::Affine => vec![(0, 1, 1, 1)],
            LieKind::Heisenberg => vec![(0, 1, 2, 1)],
            // h, e, f
            LieKind::Sl2 => vec![(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)],
        }
    }
}

/// `L ⊗ A` with `[x⊗a, y⊗b] = [x, y]⊗ab` and `d(x⊗a) = x⊗da`, where `A` is
/// `a` with a unit adjoined when `unital`.
pub fn tensor_dgla(kind: LieKind, a: &DgAlgebra, unital: bool) -> Result<DgLieAlgebra> {
    let field = a.field();
    let offset = usize::from(unital);
    let na = a.carrier.len() + offset;
    let a_name = |j: usize| if unital && j == 0 { "1".to_string() } else { a.carrier.name(j - offset).to_string() };
    let a_deg = |j: usize| if unital && j == 0 { 0 } else { a.carrier.degree(j - offset) };
    let a_unit = |j: usize| Lin::single(j - offset, field.one());
    let a_mul = |i: usize, j: usize| -> Lin<usize> {
        match (unital && i == 0, unital && j == 0) {
            (true, true) => Lin::single(0, field.one()),
            (true, false) => Lin::single(j, field.one()),
            (false, true) => Lin::single(i, field.one()),
            (false, false) => a.mul(&a_unit(i), &a_unit(j)).map_keys(|k| k + offset),
        }
    };
    let idx = |x: usize, j: usize| x * na + j;
    let names = (0..kind.dim()).flat_map(|x| (0..na).map(move |j| (x, j)));
    let basis = Arc::new(GradedBasis::new(
        field,
        names.map(|(x, j)| (format!("x{x}*{}", a_name(j)), a_deg(j))),
    )?);
    let mut cols = vec![Lin::zero(); basis.len()];
    for x in 0..kind.dim() {
        for j in offset..na {
            cols[idx(x, j)] = a.d.column(j - offset).map_keys(|k| idx(x, k + offset));
        }
    }
    let d = GradedMap::new(basis.clone(), basis.clone(), -1, cols)?;
    let mut lie = vec![vec![Lin::zero(); kind.dim()]; kind.dim()];
    for (i, j, k, c) in kind.brackets() {
        lie[i][j].add_term(k, field.from_i64(c));
        lie[j][i].add_term(k, field.from_i64(-c));
    }
    let mut bracket = Table::new();
    for x in 0..kind.dim() {
        for y in 0..kind.dim() {
            for i in 0..na {
                for j in 0..na {
                    let ab = a_mul(i, j);
                    let mut out = Lin::zero();
                    for (&z, c) in &lie[x][y] {
                        for (&k, e) in &ab {
                            out.add_term(idx(z, k), c * e);
                        }
                    }
                    if !out.is_zero() {
                        bracket.insert(word(&[idx(x, i) as u32, idx(y, j) as u32]), out);
                    }
                }
            }
        }
    }
    let g = DgLieAlgebra::new(basis, d, bracket)?;
    g.validate()?;
    Ok(g)
}

/// A random DGLA `L ⊗ A` of dimension at most `max_dim`, with `A` built
/// from at most `generators` generators.
pub fn random_dgla(rng: &mut impl Rng, field: Field, generators: usize, max_dim: usize) -> Result<DgLieAlgebra> {
    loop {
        let kind = *LieKind::ALL.choose(rng).expect("nonempty");
        let unital = rng.gen_bool(0.3);
        let room = max_dim / kind.dim();
        if room <= usize::from(unital) {
            continue;
        }
        let budget = room - usize::from(unital);
        let shape = AlgebraShape {
            generators: rng.gen_range(1..=generators.clamp(1, budget)),
            min_degree: 1,
            max_degree: 3,
            max_basis: budget,
            max_word: 2,
            commutative: true,
            negative: rng.gen_bool(0.2),
        };
        let a = random_monomial_algebra(rng, field, shape)?;
        let flat = a.d.columns().iter().all(Lin::is_zero);
        if flat && rng.gen_bool(0.8) {
            continue;
        }
        if (a.carrier.len() + usize::from(unital)) * kind.dim() <= max_dim {
            return tensor_dgla(kind, &a, unital);
        }
    }
}

/// A random degree-preserving automorphism and its inverse.
pub fn random_automorphism(rng: &mut impl Rng, basis: &Arc<GradedBasis>) -> Result<(GradedMap, GradedMap)> {
    let field = basis.field();
    let n = basis.len();
    let mut strict = |lower: bool| -> Result<GradedMap> {
        let cols = (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&i| if lower { i > j } else { i < j })
                    .filter(|&i| basis.degree(i) == basis.degree(j))
                    .filter_map(|i| {
                        let c = rng.gen_range(-2..=2);
                        (c != 0).then(|| (i, field.from_i64(c)))
                    })
                    .collect()
            })
            .collect();
        GradedMap::new(basis.clone(), basis.clone(), 0, cols)
    };
    let id = GradedMap::identity(basis.clone());
    // (1 + N)⁻¹ = Σ (−N)ᵏ for nilpotent N
    let unipotent = |nil: GradedMap| -> Result<(GradedMap, GradedMap)> {
        let mut inv = id.clone();
        let mut power = id.clone();
        for _ in 0..n {
            power = power.compose(&nil.neg())?;
            inv = inv.add(&power)?;
        }
        Ok((id.add(&nil)?, inv))
    };
    let (l, l_inv) = unipotent(strict(true)?)?;
    let (u, u_inv) = unipotent(strict(false)?)?;
    Ok((l.compose(&u)?, u_inv.compose(&l_inv)?))
}

/// A weak system: a homology contraction of a random complex with an extra
/// zero-differential summand on the small side that `∇` kills, conjugated
/// by random automorphisms of both sides.
pub fn random_weak_system(rng: &mut impl Rng, field: Field) -> Result<WeakSystem> {
    let shape = AlgebraShape { generators: rng.gen_range(2..=5), max_basis: 10, ..Default::default() };
    let big = random_monomial_algebra(rng, field, shape)?.complex();
    let k = homology_contraction(&big);
    let hb = k.small.basis();
    let extra = rng.gen_range(1..=3);
    let small = Arc::new(GradedBasis::new(
        field,
        (0..hb.len())
            .map(|i| (hb.name(i).to_string(), hb.degree(i)))
            .chain((0..extra).map(|i| (format!("z{i}"), rng.gen_range(0..=4)))),
    )?);
    let pi = GradedMap::new(big.basis().clone(), small.clone(), 0, k.pi.columns().to_vec())?;
    let nabla_cols = (0..small.len())
        .map(|i| if i < hb.len() { k.nabla.column(i).clone() } else { Lin::zero() })
        .collect();
    let nabla = GradedMap::new(small.clone(), big.basis().clone(), 0, nabla_cols)?;
    let (g, g_inv) = random_automorphism(rng, &small)?;
    let (b, b_inv) = random_automorphism(rng, big.basis())?;
    let d = b.compose(big.d())?.compose(&b_inv)?;
    let c = Contraction {
        big: ChainComplex::new(d)?,
        small: ChainComplex::with_zero_differential(small),
        pi: g.compose(&pi)?.compose(&b_inv)?,
        nabla: b.compose(&nabla)?.compose(&g_inv)?,
        h: b.compose(&k.h)?.compose(&b_inv)?,
    };
    Ok(WeakSystem(c))
}

fn restrict(x: &Lin<Word>, set: &BTreeSet<Word>) -> Lin<Word> {
    x.iter().filter(|(w, _)| set.contains(*w)).map(|(w, c)| (w.clone(), c.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixtures_validate() {
        for f in [Field::Rational, Field::Prime(5)] {
            massey_algebra(f).validate().unwrap();
            truncated_polynomial(f).validate().unwrap();
            triangular_algebra(f).validate().unwrap();
        }
        assert!(!triangular_algebra(Field::Rational).is_graded_commutative());
        let g = nilpotent_dgla(Field::Rational);
        g.validate().unwrap();
        assert!(g.jacobi_failure().is_none());
    }

    #[test]
    fn random_algebras_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..40 {
            let shape = AlgebraShape { commutative: i % 2 == 1, ..Default::default() };
            let field = if i % 3 == 0 { Field::Prime(5) } else { Field::Rational };
            let a = random_monomial_algebra(&mut rng, field, shape).unwrap();
            if shape.commutative {
                assert!(a.is_graded_commutative());
            }
        }
    }

    #[test]
    fn random_dglas_satisfy_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let g = random_dgla(&mut rng, Field::Rational, 4, 12).unwrap();
            assert!(g.carrier.len() <= 12);
            assert!(g.jacobi_failure().is_none());
        }
    }

    #[test]
    fn random_weak_systems_normalize() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let w = random_weak_system(&mut rng, Field::Rational).unwrap();
            let n = crate::complex::normalize_weak_system(&w).unwrap();
            assert!(n.blocks.holds());
            assert!(n.contraction.verify().all_passed());
        }
    }

    #[test]
    fn lie_kinds_are_lie_algebras() {
        let one = random_monomial_algebra(
            &mut ChaCha8Rng::seed_from_u64(0),
            Field::Prime(7),
            AlgebraShape { generators: 1, max_basis: 1, commutative: true, ..Default::default() },
        )
        .unwrap();
        for kind in LieKind::ALL {
            let g = tensor_dgla(kind, &one, true).unwrap();
            assert_eq!(g.carrier.len(), 2 * kind.dim());
            assert!(g.jacobi_failure().is_none());
        }
    }
}
