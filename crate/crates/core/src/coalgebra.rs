//! Coalgebras, A∞-coalgebras, the cobar dictionary and finite-type duality.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ainf::{suspension_exponent, word_name, AInfinityStructure};
use crate::basis::GradedBasis;
use crate::complex::{ChainComplex, Contraction};
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::map::GradedMap;
use crate::scalar::Field;
use crate::words::{degree_of, word, Derivation, Table, Word};

fn odd(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

/// Images of basis letters, indexed by letter.
pub type CoTable = Vec<Lin<Word>>;

fn check_cotable(table: &CoTable, carrier: &GradedBasis, n: usize, degree: i64, what: &str) -> Result<()> {
    if table.len() != carrier.len() {
        return Err(Error::Structure(format!("{what}: expected {} columns", carrier.len())));
    }
    for (x, img) in table.iter().enumerate() {
        for (w, _) in img {
            if w.len() != n || w.iter().any(|&l| l as usize >= carrier.len()) {
                return Err(Error::Structure(format!("{what}: malformed word in image of {}", carrier.name(x))));
            }
            if degree_of(w, carrier) != carrier.degree(x) + degree {
                return Err(Error::Structure(format!(
                    "{what}: term {} in image of {} has the wrong degree",
                    word_name(w, carrier),
                    carrier.name(x)
                )));
            }
        }
    }
    Ok(())
}

/// A strict differential graded coalgebra on a coaugmentation coideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgCoalgebra {
    pub carrier: Arc<GradedBasis>,
    pub d: GradedMap,
    /// Reduced diagonal, letters to two-letter words.
    pub delta: CoTable,
}

impl DgCoalgebra {
    pub fn new(carrier: Arc<GradedBasis>, d: GradedMap, delta: CoTable) -> Result<Self> {
        if d.source() != &carrier || d.target() != &carrier {
            return Err(Error::Structure("differential does not act on the carrier".into()));
        }
        check_cotable(&delta, &carrier, 2, 0, "diagonal")?;
        Ok(DgCoalgebra { carrier, d, delta })
    }

    pub fn field(&self) -> Field {
        self.carrier.field()
    }

    pub fn complex(&self) -> ChainComplex {
        ChainComplex::new(self.d.clone()).expect("validated differential")
    }

    /// Verifies `d² = 0`, coassociativity and the co-Leibniz rule.
    pub fn validate(&self) -> Result<()> {
        ChainComplex::new(self.d.clone())?;
        let c = &self.carrier;
        for x in 0..c.len() {
            let mut left = Lin::zero();
            let mut right = Lin::zero();
            for (w, coeff) in &self.delta[x] {
                for (u, c2) in &self.delta[w[0] as usize] {
                    left.add_term(word(&[u[0], u[1], w[1]]), coeff * c2);
                }
                for (u, c2) in &self.delta[w[1] as usize] {
                    right.add_term(word(&[w[0], u[0], u[1]]), coeff * c2);
                }
            }
            if left != right {
                return Err(Error::AxiomViolation(format!("coassociativity fails on {}", c.name(x))));
            }
            let mut lhs = Lin::zero();
            for (&y, cy) in self.d.column(x) {
                lhs.add_scaled(&self.delta[y], cy);
            }
            let mut rhs = Lin::zero();
            for (w, coeff) in &self.delta[x] {
                for (&y, cy) in self.d.column(w[0] as usize) {
                    rhs.add_term(word(&[y as u32, w[1]]), coeff * cy);
                }
                let negate = odd(c.degree(w[0] as usize));
                for (&y, cy) in self.d.column(w[1] as usize) {
                    rhs.add_term(word(&[w[0], y as u32]), (coeff * cy).signed(negate));
                }
            }
            if lhs != rhs {
                return Err(Error::AxiomViolation(format!("co-Leibniz rule fails on {}", c.name(x))));
            }
        }
        Ok(())
    }

    pub fn to_ainf(&self, max_arity: usize) -> AInfinityCoalgebra {
        let mut ops = BTreeMap::new();
        ops.insert(
            1,
            (0..self.carrier.len())
                .map(|x| self.d.column(x).map_keys(|&y| word(&[y as u32])))
                .collect(),
        );
        ops.insert(2, self.delta.clone());
        AInfinityCoalgebra::new(self.carrier.clone(), ops, max_arity.max(2)).expect("validated coalgebra")
    }
}

/// An A∞-coalgebra `{Δₙ}` truncated at `max_arity`; `Δₙ` has degree `n − 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfinityCoalgebra {
    pub carrier: Arc<GradedBasis>,
    pub ops: BTreeMap<usize, CoTable>,
    pub max_arity: usize,
}

impl AInfinityCoalgebra {
    pub fn new(carrier: Arc<GradedBasis>, mut ops: BTreeMap<usize, CoTable>, max_arity: usize) -> Result<Self> {
        for (&n, table) in ops.iter_mut() {
            if n == 0 {
                return Err(Error::Structure("cooperations have arity at least 1".into()));
            }
            if n > max_arity {
                return Err(Error::Truncation { arity: n, max: max_arity });
            }
            check_cotable(table, &carrier, n, n as i64 - 2, &format!("Δ{n}"))?;
        }
        ops.retain(|_, t| t.iter().any(|v| !v.is_zero()));
        Ok(AInfinityCoalgebra { carrier, ops, max_arity })
    }

    pub fn field(&self) -> Field {
        self.carrier.field()
    }

    pub fn op(&self, n: usize) -> Option<&CoTable> {
        self.ops.get(&n)
    }

    /// Desuspended letters `s⁻¹𝐉C`.
    pub fn cobar_letters(&self) -> GradedBasis {
        self.carrier.shifted(-1)
    }

    /// The cobar derivation `D = Σ Dₙ` on words of length `≤ max_len`, with
    /// `Dₙ(s⁻¹x) = (−1)ⁿ Σ (−1)^{Σ(n−i)|yᵢ|} Δₙ(x)_y s⁻¹y₁…s⁻¹yₙ`.
    pub fn to_cobar(&self, max_len: usize) -> Derivation {
        let mut gens = vec![Lin::zero(); self.carrier.len()];
        for (&n, table) in &self.ops {
            for (x, img) in table.iter().enumerate() {
                for (w, c) in img {
                    let negate = odd(n as i64 + suspension_exponent(w, &self.carrier));
                    gens[x].add_term(w.clone(), c.clone().signed(negate));
                }
            }
        }
        Derivation { degree: -1, generators: gens, max_len }
    }

    pub fn from_cobar(carrier: Arc<GradedBasis>, d: &Derivation, max_arity: usize) -> Result<Self> {
        let mut ops: BTreeMap<usize, CoTable> = BTreeMap::new();
        for (x, img) in d.generators.iter().enumerate() {
            for (w, c) in img {
                let n = w.len();
                let negate = odd(n as i64 + suspension_exponent(w, &carrier));
                ops.entry(n).or_insert_with(|| vec![Lin::zero(); carrier.len()])[x]
                    .add_term(w.clone(), c.clone().signed(negate));
            }
        }
        AInfinityCoalgebra::new(carrier, ops, max_arity)
    }

    pub fn differential(&self) -> GradedMap {
        let b = self.carrier.clone();
        GradedMap::from_fn(b.clone(), b, -1, |x| {
            self.ops
                .get(&1)
                .map(|t| t[x].iter().map(|(w, c)| (w[0] as usize, c.clone())).collect())
                .unwrap_or_default()
        })
        .expect("Δ1 has degree -1")
    }

    /// The strict coalgebra, if no cooperation of arity `≥ 3` is present.
    pub fn strict(&self) -> Result<DgCoalgebra> {
        if self.ops.keys().any(|&n| n > 2) {
            return Err(Error::Structure("expected a strict differential graded coalgebra".into()));
        }
        let delta = self.ops.get(&2).cloned().unwrap_or_else(|| vec![Lin::zero(); self.carrier.len()]);
        DgCoalgebra::new(self.carrier.clone(), self.differential(), delta)
    }

    pub fn first_difference(&self, other: &AInfinityCoalgebra, max: usize) -> Option<(usize, usize)> {
        for n in 1..=max {
            let (a, b) = (self.ops.get(&n), other.ops.get(&n));
            if a == b {
                continue;
            }
            let len = self.carrier.len().max(other.carrier.len());
            let zero = Lin::zero();
            for x in 0..len {
                let l = a.and_then(|t| t.get(x)).unwrap_or(&zero);
                let r = b.and_then(|t| t.get(x)).unwrap_or(&zero);
                if l != r {
                    return Some((n, x));
                }
            }
        }
        None
    }

    /// Connectivity regimes in which the cobar construction needs no
    /// completion: `𝐉C` in degrees `≥ 2` or in degrees `≤ 0`.
    pub fn is_connected(&self) -> bool {
        let d = self.carrier.degrees();
        d.iter().all(|&k| k >= 2) || d.iter().all(|&k| k <= 0)
    }
}

/// The cobar derivation of a strict coalgebra, checking `(d + ∂)² = 0` on
/// generators up to word length `max_len`.
pub fn cobar_perturbation(c: &DgCoalgebra, max_len: usize) -> Result<Derivation> {
    c.validate().map_err(|e| Error::Structure(format!("cobar perturbation: {e}")))?;
    let full = c.to_ainf(max_len.max(2)).to_cobar(max_len);
    let mut higher = full.clone();
    for g in higher.generators.iter_mut() {
        g.retain(|w| w.len() >= 2);
    }
    let letters = c.carrier.shifted(-1);
    for x in 0..c.carrier.len() {
        let once = full.generators[x].clone();
        if !full.apply(&once, &letters).is_zero() {
            return Err(Error::Structure(format!("cobar differential does not square to zero on {}", c.carrier.name(x))));
        }
    }
    Ok(higher)
}

/// Dual A∞-algebra of a finite-type A∞-coalgebra: `mₙ = (−1)^{n+1} Δₙᵀ`.
pub fn dualize_coalgebra(c: &AInfinityCoalgebra) -> AInfinityStructure {
    let carrier = Arc::new(c.carrier.dual());
    let mut ops = BTreeMap::new();
    for (&n, table) in &c.ops {
        let mut t = Table::new();
        for (x, img) in table.iter().enumerate() {
            for (w, coeff) in img {
                t.entry(w.clone())
                    .or_insert_with(Lin::zero)
                    .add_term(x, coeff.clone().signed(n % 2 == 0));
            }
        }
        ops.insert(n, t);
    }
    AInfinityStructure::new(carrier, ops, c.max_arity).expect("transposed degrees match")
}

/// Dual A∞-coalgebra of a finite-type A∞-algebra: `Δₙ = (−1)^{n+1} mₙᵀ`.
pub fn dualize_algebra(a: &AInfinityStructure) -> AInfinityCoalgebra {
    let carrier = Arc::new(a.carrier.dual());
    let mut ops = BTreeMap::new();
    for (&n, table) in &a.ops {
        let mut t: CoTable = vec![Lin::zero(); carrier.len()];
        for (w, img) in table {
            for (&x, coeff) in img {
                t[x].add_term(w.clone(), coeff.clone().signed(n % 2 == 0));
            }
        }
        ops.insert(n, t);
    }
    AInfinityCoalgebra::new(carrier, ops, a.max_arity).expect("transposed degrees match")
}

/// Transposed contraction between dual complexes: `π* = ∇ᵀ`, `∇* = πᵀ`,
/// `h* = hᵀ`.
pub fn dualize_contraction(c: &Contraction) -> Result<Contraction> {
    let big = ChainComplex::new(c.big.d().transpose())?;
    let small = ChainComplex::new(c.small.d().transpose())?;
    Contraction::new(big, small, c.nabla.transpose(), c.pi.transpose(), c.h.transpose())
}
