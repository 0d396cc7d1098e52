//! Transfer of A∞-structures along a contraction onto a smaller complex.

mod cobar;
mod hpt;
mod kadeishvili;
mod recursive;
mod trees;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use cobar::{check_cotwisting, transfer_coalgebra, transfer_coalgebra_recursive, CoTransferred, CobarMode, CobarPerturbation};
pub use hpt::{transfer_hpt, BarPerturbation};
pub use kadeishvili::{epsilon1, epsilon2, transfer_kadeishvili};
pub use recursive::{check_twisting_cochain, cup, transfer_recursive, TwistingCochain};
pub use trees::{count_trees, enumerate_trees, transfer_trees, Tree, DEFAULT_TREE_BUDGET};

use crate::ainf::{AInfinityMorphism, AInfinityStructure, DgAlgebra};
use crate::basis::GradedBasis;
use crate::complex::Contraction;
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::map::GradedMap;
use crate::words::{Table, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Hpt,
    Recursive,
    Kadeishvili,
    Trees,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Hpt, Method::Recursive, Method::Kadeishvili, Method::Trees];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hpt => "hpt",
            Method::Recursive => "recursive",
            Method::Kadeishvili => "kadeishvili",
            Method::Trees => "trees",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown method {s:?}")))
    }
}

/// A basis word of the big or the small side of a lifted contraction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WordKey {
    Big(Word),
    Small(Word),
}

impl WordKey {
    pub fn len(&self) -> usize {
        match self {
            WordKey::Big(w) | WordKey::Small(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Result of one transfer method.
#[derive(Clone, Debug)]
pub struct Transferred {
    pub method: Method,
    pub structure: AInfinityStructure,
    /// Components `fₙ: M^{⊗n} → A`, when the method produces them.
    pub morphism: Option<AInfinityMorphism>,
}

/// Suspended contraction data on letters, shared by all methods.
pub(crate) struct Setup<'a> {
    pub input: &'a AInfinityStructure,
    pub c: &'a Contraction,
    pub big: Arc<GradedBasis>,
    pub small: Arc<GradedBasis>,
    /// Suspended letters of the big side.
    pub sbig: GradedBasis,
    /// Suspended letters of the small side.
    pub ssmall: GradedBasis,
    pub e: GradedMap,
    pub max: usize,
}

impl<'a> Setup<'a> {
    pub fn new(input: &'a AInfinityStructure, c: &'a Contraction, max: usize) -> Result<Self> {
        if c.big.basis() != &input.carrier {
            return Err(Error::BasisMismatch {
                left: c.big.basis().describe(),
                right: input.carrier.describe(),
            });
        }
        if &input.differential() != c.big.d() {
            return Err(Error::Structure("contraction differential differs from m1".into()));
        }
        if max < 1 {
            return Err(Error::Structure("maximal arity must be at least 1".into()));
        }
        if let Some((&n, _)) = input.ops.range(max + 1..).next() {
            return Err(Error::Truncation { arity: n, max });
        }
        Ok(Setup {
            input,
            c,
            big: c.big.basis().clone(),
            small: c.small.basis().clone(),
            sbig: c.big.basis().shifted(1),
            ssmall: c.small.basis().shifted(1),
            e: c.nabla.compose(&c.pi)?,
            max,
        })
    }

    pub fn pi(&self, l: u32) -> Lin<usize> {
        self.c.pi.column(l as usize).clone()
    }

    pub fn nabla(&self, l: u32) -> Lin<usize> {
        self.c.nabla.column(l as usize).clone()
    }

    /// Suspended homotopy `h_s = −s h s⁻¹`.
    pub fn h_s(&self, l: u32) -> Lin<usize> {
        self.c.h.column(l as usize).neg()
    }

    pub fn e(&self, l: u32) -> Lin<usize> {
        self.e.column(l as usize).clone()
    }

    /// The small complex's differential as an arity-one table.
    pub fn small_m1(&self) -> Table {
        let d = self.c.small.d();
        (0..self.small.len())
            .filter(|&i| !d.column(i).is_zero())
            .map(|i| (Word::from_slice(&[i as u32]), d.column(i).clone()))
            .collect()
    }

    /// Structure on the small side from bar components of arity `≥ 2`.
    pub fn from_bar(&self, ops: BTreeMap<usize, Table>) -> Result<AInfinityStructure> {
        let bar = crate::words::Coderivation { degree: -1, components: ops };
        let mut structure = AInfinityStructure::from_bar(self.small.clone(), &bar, self.max)?;
        let m1 = self.small_m1();
        if !m1.is_empty() {
            structure.ops.insert(1, m1);
        }
        Ok(structure)
    }

    pub fn morphism(&self, structure: &AInfinityStructure, comps: BTreeMap<usize, Table>) -> Result<AInfinityMorphism> {
        AInfinityMorphism::new(Arc::new(structure.clone()), Arc::new(self.input.clone()), comps)
    }

    /// The input viewed as a strict algebra, if it is one.
    pub fn strict(&self) -> Result<DgAlgebra> {
        if self.input.ops.keys().any(|&n| n > 2) {
            return Err(Error::Structure("method requires a strict differential graded algebra".into()));
        }
        DgAlgebra::new(
            self.big.clone(),
            self.c.big.d().clone(),
            self.input.op(2).cloned().unwrap_or_default(),
        )
    }
}

/// Runs the requested methods and checks that they agree exactly.
pub fn transfer_all(
    input: &AInfinityStructure,
    c: &Contraction,
    max: usize,
    methods: &[Method],
) -> Result<Vec<Transferred>> {
    transfer_all_with_budget(input, c, max, methods, trees::DEFAULT_TREE_BUDGET)
}

/// [`transfer_all`] with an explicit cap on the trees enumerated per arity.
pub fn transfer_all_with_budget(
    input: &AInfinityStructure,
    c: &Contraction,
    max: usize,
    methods: &[Method],
    tree_budget: u128,
) -> Result<Vec<Transferred>> {
    let results: Vec<Transferred> = methods
        .iter()
        .map(|&m| match m {
            Method::Trees => transfer_trees(input, c, max, tree_budget),
            _ => run_method(m, input, c, max),
        })
        .collect::<Result<_>>()?;
    if let Some(first) = results.first() {
        for other in &results[1..] {
            if let Some((n, w)) = first.structure.first_difference(&other.structure, max) {
                return Err(Error::MethodDivergence(format!(
                    "{} and {} differ on m{n} at {}",
                    first.method,
                    other.method,
                    crate::ainf::word_name(&w, &first.structure.carrier)
                )));
            }
        }
        let with_f: Vec<&Transferred> = results.iter().filter(|t| t.morphism.is_some()).collect();
        if let Some(base) = with_f.first() {
            for other in &with_f[1..] {
                let (a, b) = (base.morphism.as_ref().unwrap(), other.morphism.as_ref().unwrap());
                if let Some((n, w)) = a.first_difference(b, max) {
                    return Err(Error::MethodDivergence(format!(
                        "{} and {} differ on f{n} at {}",
                        base.method,
                        other.method,
                        crate::ainf::word_name(&w, &first.structure.carrier)
                    )));
                }
            }
        }
    }
    Ok(results)
}

pub fn run_method(method: Method, input: &AInfinityStructure, c: &Contraction, max: usize) -> Result<Transferred> {
    match method {
        Method::Hpt => transfer_hpt(input, c, max),
        Method::Recursive => transfer_recursive(input, c, max).map(|(t, _)| t),
        Method::Kadeishvili => transfer_kadeishvili(input, c, max),
        Method::Trees => transfer_trees(input, c, max, trees::DEFAULT_TREE_BUDGET),
    }
}
