//! The ordinary perturbation lemma.
//!
//! [`Perturber`] evaluates the four series lazily on arbitrary basis keys,
//! which lets the same engine run on finite complexes and on tensor word
//! spaces that are never materialized. [`perturb`] is the finite-matrix
//! front end.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::complex::{Axiom, AxiomCheck, ChainComplex, Contraction, ContractionReport};
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::map::GradedMap;
use crate::scalar::Field;

/// A linear operator given on basis keys.
pub type KeyOp<'a, K> = &'a (dyn Fn(&K) -> Lin<K> + Sync);

/// Contraction data as key-wise operators.
#[derive(Clone, Copy)]
pub struct LazyContraction<'a, K: Ord> {
    pub d_big: KeyOp<'a, K>,
    pub d_small: KeyOp<'a, K>,
    pub pi: KeyOp<'a, K>,
    pub nabla: KeyOp<'a, K>,
    pub h: KeyOp<'a, K>,
}

/// A perturbation `∂` of the big differential together with the filtration
/// it lowers.
#[derive(Clone, Copy)]
pub struct LazyPerturbation<'a, K: Ord> {
    pub delta: KeyOp<'a, K>,
    pub drop: usize,
    pub level: &'a (dyn Fn(&K) -> usize + Sync),
    pub cap: usize,
}

pub fn apply<K: Ord + Clone>(op: KeyOp<'_, K>, x: &Lin<K>) -> Lin<K> {
    x.map_linear(|k| op(k))
}

/// Lazy evaluator of the perturbed contraction.
pub struct Perturber<'a, K: Ord> {
    field: Field,
    c: LazyContraction<'a, K>,
    p: LazyPerturbation<'a, K>,
    terms: AtomicUsize,
}

impl<'a, K: Ord + Clone + Sync + Send> Perturber<'a, K> {
    pub fn new(field: Field, c: LazyContraction<'a, K>, p: LazyPerturbation<'a, K>) -> Result<Self> {
        if p.drop == 0 {
            return Err(Error::Divergence("perturbation must lower the filtration by at least 1".into()));
        }
        Ok(Perturber { field, c, p, terms: AtomicUsize::new(0) })
    }

    /// Upper bound on the number of summed terms in any series.
    pub fn term_bound(&self) -> usize {
        self.p.cap.div_ceil(self.p.drop) + 1
    }

    /// Largest number of nonzero terms seen in any series so far.
    pub fn terms_used(&self) -> usize {
        self.terms.load(Ordering::Relaxed)
    }

    fn level_of(&self, x: &Lin<K>) -> Result<Option<usize>> {
        let mut top = None;
        for k in x.keys() {
            let l = (self.p.level)(k);
            if l > self.p.cap {
                return Err(Error::Divergence(format!("filtration level {l} exceeds cap {}", self.p.cap)));
            }
            top = top.max(Some(l));
        }
        Ok(top)
    }

    /// `∂x`, checking that every key drops by at least `drop` levels.
    pub fn delta(&self, x: &Lin<K>) -> Result<Lin<K>> {
        let mut out = Lin::zero();
        for (k, c) in x {
            let img = (self.p.delta)(k);
            let from = (self.p.level)(k);
            for key in img.keys() {
                let to = (self.p.level)(key);
                if to + self.p.drop > from {
                    return Err(Error::Divergence(format!(
                        "perturbation raises or keeps the filtration ({from} -> {to})"
                    )));
                }
            }
            out.add_scaled(&img, c);
        }
        Ok(out)
    }

    fn sum_series(&self, start: Lin<K>, step: impl Fn(&Lin<K>) -> Result<Lin<K>>) -> Result<Lin<K>> {
        let bound = self.term_bound();
        let mut total = Lin::zero();
        let mut term = start;
        let mut n = 0;
        while !term.is_zero() {
            self.level_of(&term)?;
            n += 1;
            if n > bound {
                return Err(Error::Divergence(format!("series did not terminate within {bound} terms")));
            }
            total.add_assign(&term);
            term = step(&term)?;
        }
        self.terms.fetch_max(n, Ordering::Relaxed);
        Ok(total)
    }

    fn minus_h_delta(&self, x: &Lin<K>) -> Result<Lin<K>> {
        Ok(apply(self.c.h, &self.delta(x)?).neg())
    }

    fn minus_delta_h(&self, x: &Lin<K>) -> Result<Lin<K>> {
        Ok(self.delta(&apply(self.c.h, x))?.neg())
    }

    /// `∇_∂ = Σ (−h∂)ⁿ ∇`.
    pub fn nabla(&self, m: &Lin<K>) -> Result<Lin<K>> {
        self.sum_series(apply(self.c.nabla, m), |x| self.minus_h_delta(x))
    }

    /// `π_∂ = Σ π(−∂h)ⁿ`.
    pub fn pi(&self, x: &Lin<K>) -> Result<Lin<K>> {
        let s = self.sum_series(x.clone(), |y| self.minus_delta_h(y))?;
        Ok(apply(self.c.pi, &s))
    }

    /// `h_∂ = Σ (−h∂)ⁿ h`.
    pub fn h(&self, x: &Lin<K>) -> Result<Lin<K>> {
        self.sum_series(apply(self.c.h, x), |y| self.minus_h_delta(y))
    }

    /// `Σ π∂(−h∂)ⁿ∇`.
    pub fn transferred_first(&self, m: &Lin<K>) -> Result<Lin<K>> {
        Ok(apply(self.c.pi, &self.delta(&self.nabla(m)?)?))
    }

    /// `Σ π(−∂h)ⁿ∂∇`.
    pub fn transferred_second(&self, m: &Lin<K>) -> Result<Lin<K>> {
        let start = self.delta(&apply(self.c.nabla, m))?;
        let s = self.sum_series(start, |y| self.minus_delta_h(y))?;
        Ok(apply(self.c.pi, &s))
    }

    /// The transferred perturbation `𝒟`, evaluated in both forms.
    pub fn transferred(&self, m: &Lin<K>) -> Result<Lin<K>> {
        let a = self.transferred_first(m)?;
        let b = self.transferred_second(m)?;
        if a != b {
            return Err(Error::SignConsistency("the two forms of the transferred perturbation differ".into()));
        }
        Ok(a)
    }

    /// `(d + ∂)` on the big side.
    pub fn big_differential(&self, x: &Lin<K>) -> Result<Lin<K>> {
        let mut out = apply(self.c.d_big, x);
        out.add_assign(&self.delta(x)?);
        Ok(out)
    }

    /// `(d + 𝒟)` on the small side.
    pub fn small_differential(&self, m: &Lin<K>) -> Result<Lin<K>> {
        let mut out = apply(self.c.d_small, m);
        out.add_assign(&self.transferred(m)?);
        Ok(out)
    }

    /// Checks `(d + ∂)² = 0` on the given keys.
    pub fn check_square_zero(&self, keys: &[K], name: &(dyn Fn(&K) -> String + Sync)) -> Result<()> {
        keys.par_iter().try_for_each(|k| {
            let x = Lin::single(k.clone(), self.field.one());
            let y = self.big_differential(&self.big_differential(&x)?)?;
            if y.is_zero() {
                Ok(())
            } else {
                Err(Error::PerturbationInvalid(format!("(d + ∂)² ≠ 0 on {}", name(k))))
            }
        })
    }

    /// Verifies every contraction axiom of the perturbed data on the listed
    /// keys, together with `(d + 𝒟)² = 0`.
    pub fn verify_on(
        &self,
        big_keys: &[K],
        small_keys: &[K],
        name: &(dyn Fn(&K) -> String + Sync),
    ) -> Result<PerturbReport> {
        let unit = |k: &K| Lin::single(k.clone(), self.field.one());
        let first_failure = |keys: &[K], test: &(dyn Fn(&K) -> Result<bool> + Sync)| -> Result<Option<String>> {
            let flags: Vec<bool> = keys.par_iter().map(test).collect::<Result<_>>()?;
            Ok(flags.iter().position(|ok| !ok).map(|i| name(&keys[i])))
        };
        let mut checks = Vec::new();
        let mut push = |axiom, offending: Option<String>| {
            checks.push(AxiomCheck { axiom, passed: offending.is_none(), offending })
        };
        push(
            Axiom::Retraction,
            first_failure(small_keys, &|k| Ok(self.pi(&self.nabla(&unit(k))?)? == unit(k)))?,
        );
        push(
            Axiom::Homotopy,
            first_failure(big_keys, &|k| {
                let x = unit(k);
                let mut lhs = self.big_differential(&self.h(&x)?)?;
                lhs.add_assign(&self.h(&self.big_differential(&x)?)?);
                let rhs = x.difference(&self.nabla(&self.pi(&x)?)?);
                Ok(lhs == rhs)
            })?,
        );
        push(Axiom::PiH, first_failure(big_keys, &|k| Ok(self.pi(&self.h(&unit(k))?)?.is_zero()))?);
        push(Axiom::HNabla, first_failure(small_keys, &|k| Ok(self.h(&self.nabla(&unit(k))?)?.is_zero()))?);
        push(Axiom::HH, first_failure(big_keys, &|k| Ok(self.h(&self.h(&unit(k))?)?.is_zero()))?);
        push(
            Axiom::PiChain,
            first_failure(big_keys, &|k| {
                let x = unit(k);
                Ok(self.pi(&self.big_differential(&x)?)? == self.small_differential(&self.pi(&x)?)?)
            })?,
        );
        push(
            Axiom::NablaChain,
            first_failure(small_keys, &|k| {
                let m = unit(k);
                Ok(self.big_differential(&self.nabla(&m)?)? == self.nabla(&self.small_differential(&m)?)?)
            })?,
        );
        let square = first_failure(small_keys, &|k| {
            Ok(self.small_differential(&self.small_differential(&unit(k))?)?.is_zero())
        })?;
        Ok(PerturbReport {
            contraction: ContractionReport { checks },
            square_zero: square.is_none(),
            square_zero_offending: square,
        })
    }
}

#[derive(Clone, Debug)]
pub struct PerturbReport {
    pub contraction: ContractionReport,
    pub square_zero: bool,
    pub square_zero_offending: Option<String>,
}

impl PerturbReport {
    pub fn all_passed(&self) -> bool {
        self.contraction.all_passed() && self.square_zero
    }
}

/// Filtration levels of the basis elements on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    pub big: Vec<usize>,
    pub small: Vec<usize>,
}

/// A perturbation of the big differential of a finite contraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    pub delta: GradedMap,
    pub drop: usize,
}

/// Output of [`perturb`].
#[derive(Clone, Debug)]
pub struct Perturbed {
    /// The transferred perturbation `𝒟` on the small complex.
    pub transferred: GradedMap,
    /// The contraction of `(N, d + ∂)` onto `(M, d + 𝒟)`.
    pub contraction: Contraction,
    /// Largest number of summed terms in any series.
    pub terms: usize,
}

pub fn perturb(c: &Contraction, p: &Perturbation, f: &Filtration, cap: usize) -> Result<Perturbed> {
    let nb = c.big.dim();
    let ns = c.small.dim();
    if p.delta.source() != c.big.basis() || p.delta.target() != c.big.basis() {
        return Err(Error::BasisMismatch {
            left: p.delta.source().describe(),
            right: c.big.basis().describe(),
        });
    }
    if p.delta.degree() != -1 && !p.delta.is_zero() {
        return Err(Error::Structure(format!("perturbation has degree {}", p.delta.degree())));
    }
    if f.big.len() != nb || f.small.len() != ns {
        return Err(Error::Structure("filtration does not match the bases".into()));
    }
    let filtered = |m: &GradedMap, src: &[usize], tgt: &[usize]| {
        (0..m.source().len()).all(|i| m.column(i).keys().all(|&j| tgt[j] <= src[i]))
    };
    if !(filtered(c.big.d(), &f.big, &f.big)
        && filtered(&c.h, &f.big, &f.big)
        && filtered(&c.pi, &f.big, &f.small)
        && filtered(&c.nabla, &f.small, &f.big)
        && filtered(c.small.d(), &f.small, &f.small))
    {
        return Err(Error::Structure("contraction is not filtered".into()));
    }
    // Keys: big side uses 0..nb, small side uses nb..nb+ns.
    let d_big = |&k: &usize| c.big.d().column(k).clone();
    let d_small = |&k: &usize| c.small.d().column(k - nb).map_keys(|&j| j + nb);
    let pi = |&k: &usize| c.pi.column(k).map_keys(|&j| j + nb);
    let nabla = |&k: &usize| c.nabla.column(k - nb).clone();
    let h = |&k: &usize| c.h.column(k).clone();
    let delta = |&k: &usize| if k < nb { p.delta.column(k).clone() } else { Lin::zero() };
    let level = |&k: &usize| if k < nb { f.big[k] } else { f.small[k - nb] };
    let lazy = LazyContraction { d_big: &d_big, d_small: &d_small, pi: &pi, nabla: &nabla, h: &h };
    let engine = Perturber::new(c.field(), lazy, LazyPerturbation { delta: &delta, drop: p.drop, level: &level, cap })?;
    let big_keys: Vec<usize> = (0..nb).collect();
    let name = |&k: &usize| c.big.basis().name(k).to_string();
    engine.check_square_zero(&big_keys, &name)?;

    let small_cols = |g: &(dyn Fn(&Lin<usize>) -> Result<Lin<usize>> + Sync)| -> Result<Vec<Lin<usize>>> {
        (0..ns)
            .into_par_iter()
            .map(|i| g(&Lin::single(nb + i, c.field().one())))
            .collect()
    };
    let big_cols = |g: &(dyn Fn(&Lin<usize>) -> Result<Lin<usize>> + Sync)| -> Result<Vec<Lin<usize>>> {
        (0..nb)
            .into_par_iter()
            .map(|i| g(&Lin::single(i, c.field().one())))
            .collect()
    };
    let down = |v: Lin<usize>| v.map_keys(|&j| j - nb);
    let dd = small_cols(&|m| engine.transferred(m))?;
    let nabla_cols = small_cols(&|m| engine.nabla(m))?;
    let pi_cols = big_cols(&|x| engine.pi(x))?;
    let h_cols = big_cols(&|x| engine.h(x))?;

    let sb = c.small.basis().clone();
    let bb = c.big.basis().clone();
    let transferred = GradedMap::new(sb.clone(), sb.clone(), -1, dd.into_iter().map(down).collect())?;
    let big_d = c.big.d().add(&p.delta)?;
    let small_d = c.small.d().add(&transferred)?;
    let contraction = Contraction::new(
        ChainComplex::new(big_d)?,
        ChainComplex::new(small_d).map_err(|e| Error::SignConsistency(format!("transferred differential: {e}")))?,
        GradedMap::new(bb.clone(), sb.clone(), 0, pi_cols.into_iter().map(down).collect())?,
        GradedMap::new(sb, bb.clone(), 0, nabla_cols)?,
        GradedMap::new(bb.clone(), bb, 1, h_cols)?,
    )?;
    Ok(Perturbed { transferred, contraction, terms: engine.terms_used() })
}

/// Convenience for filtrations given by a level function on names.
pub fn filtration_from(c: &Contraction, big: impl Fn(usize) -> usize, small: impl Fn(usize) -> usize) -> Filtration {
    Filtration {
        big: (0..c.big.dim()).map(big).collect(),
        small: (0..c.small.dim()).map(small).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::GradedBasis;
    use crate::complex::homology_contraction;
    use std::sync::Arc;

    fn basis(field: Field, degs: &[i64]) -> Arc<GradedBasis> {
        Arc::new(GradedBasis::new(field, degs.iter().enumerate().map(|(i, &d)| (format!("e{i}"), d))).unwrap())
    }

    fn map(b: &Arc<GradedBasis>, deg: i64, entries: &[(usize, usize, i64)]) -> GradedMap {
        let f = b.field();
        let mut cols = vec![Lin::zero(); b.len()];
        for &(s, t, c) in entries {
            cols[s].add_term(t, f.from_i64(c));
        }
        GradedMap::new(b.clone(), b.clone(), deg, cols).unwrap()
    }

    /// Two filtered copies of `e_top → e_low` with a perturbation linking them.
    fn two_level(field: Field) -> (Contraction, Perturbation, Filtration) {
        // e0 (deg 1, level 1), e1 (deg 0, level 1), e2 (deg 1, level 0), e3 (deg 0, level 0), e4 (deg 0, level 2)
        let b = basis(field, &[1, 0, 1, 0, 0]);
        let d = map(&b, -1, &[(0, 1, 1), (2, 3, 1)]);
        let c = homology_contraction(&ChainComplex::new(d).unwrap());
        let delta = map(&b, -1, &[(0, 3, 1)]);
        let f = filtration_from(&c, |i| [1, 1, 0, 0, 2][i], |_| 2);
        (c, Perturbation { delta, drop: 1 }, f)
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let (c, p, f) = two_level(Field::Rational);
        let zero = Perturbation { delta: p.delta.scale(&Field::Rational.zero()), drop: 1 };
        let out = perturb(&c, &zero, &f, 2).unwrap();
        assert!(out.transferred.is_zero());
        assert_eq!(out.contraction.pi, c.pi);
        assert_eq!(out.contraction.nabla, c.nabla);
        assert_eq!(out.contraction.h, c.h);
        assert!(out.terms <= 1);
    }

    #[test]
    fn nilpotent_of_order_two_uses_two_terms() {
        let (c, p, f) = two_level(Field::Rational);
        let out = perturb(&c, &p, &f, 2).unwrap();
        assert_eq!(out.terms, 2);
        assert!(out.terms <= 2usize.div_ceil(1) + 1);
        assert!(out.contraction.verify().all_passed());
        // direct oracle: h_∂ = h − h∂h on every element
        let h = &c.h;
        let hdh = h.compose(&p.delta).unwrap().compose(h).unwrap();
        assert_eq!(out.contraction.h, h.sub(&hdh).unwrap());
    }

    #[test]
    fn invalid_perturbation_rejected() {
        let field = Field::Rational;
        let b = basis(field, &[2, 1, 0]);
        let c = homology_contraction(&ChainComplex::new(map(&b, -1, &[])).unwrap());
        let delta = map(&b, -1, &[(0, 1, 1), (1, 2, 1)]);
        let f = filtration_from(&c, |i| 2 - i, |i| i);
        let err = perturb(&c, &Perturbation { delta, drop: 1 }, &f, 2).unwrap_err();
        assert!(matches!(err, Error::PerturbationInvalid(_)), "{err:?}");
    }

    #[test]
    fn non_lowering_perturbation_diverges() {
        let field = Field::Rational;
        let b = basis(field, &[1, 0]);
        let c = homology_contraction(&ChainComplex::new(map(&b, -1, &[])).unwrap());
        let delta = map(&b, -1, &[(0, 1, 1)]);
        let f = filtration_from(&c, |_| 0, |_| 0);
        let err = perturb(&c, &Perturbation { delta, drop: 1 }, &f, 1).unwrap_err();
        assert!(matches!(err, Error::Divergence(_)));
    }
}
