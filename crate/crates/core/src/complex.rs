//! Chain complexes, contractions onto homology, and weak systems.

use std::fmt;
use std::sync::Arc;

use crate::basis::GradedBasis;
use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::map::GradedMap;
use crate::scalar::Field;

/// A finite complex with differential of degree −1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    basis: Arc<GradedBasis>,
    d: GradedMap,
}

impl ChainComplex {
    pub fn new(d: GradedMap) -> Result<Self> {
        if d.source() != d.target() {
            return Err(Error::BasisMismatch {
                left: d.source().describe(),
                right: d.target().describe(),
            });
        }
        if d.degree() != -1 && !d.is_zero() {
            return Err(Error::Structure(format!("differential has degree {}", d.degree())));
        }
        let dd = d.compose(&d)?;
        if let Some(i) = (0..dd.source().len()).find(|&i| !dd.column(i).is_zero()) {
            return Err(Error::AxiomViolation(format!("d∘d ≠ 0 on {}", d.source().name(i))));
        }
        Ok(ChainComplex { basis: d.source().clone(), d })
    }

    pub fn with_zero_differential(basis: Arc<GradedBasis>) -> Self {
        let d = GradedMap::zero(basis.clone(), basis.clone(), -1);
        ChainComplex { basis, d }
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn d(&self) -> &GradedMap {
        &self.d
    }

    pub fn field(&self) -> Field {
        self.basis.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Betti numbers per occupied degree.
    pub fn betti(&self) -> Vec<(i64, usize)> {
        self.basis
            .occupied_degrees()
            .into_iter()
            .map(|k| {
                let here = self.d.row_reduce(k);
                let incoming = self.d.row_reduce(k + 1).rank;
                (k, here.kernel.len() - incoming)
            })
            .collect()
    }
}

/// Contraction data `π: N → M`, `∇: M → N`, `h: N → N` between a big
/// complex `N` and a small complex `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub big: ChainComplex,
    pub small: ChainComplex,
    pub pi: GradedMap,
    pub nabla: GradedMap,
    pub h: GradedMap,
}

/// Same carrier as a contraction, without the requirement `π∇ = Id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakSystem(pub Contraction);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// π∇ = Id
    Retraction,
    /// dh + hd = Id − ∇π
    Homotopy,
    PiH,
    HNabla,
    HH,
    PiChain,
    NablaChain,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::Retraction,
        Axiom::Homotopy,
        Axiom::PiH,
        Axiom::HNabla,
        Axiom::HH,
        Axiom::PiChain,
        Axiom::NablaChain,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Axiom::Retraction => "pi nabla = id",
            Axiom::Homotopy => "dh + hd = id - nabla pi",
            Axiom::PiH => "pi h = 0",
            Axiom::HNabla => "h nabla = 0",
            Axiom::HH => "h h = 0",
            Axiom::PiChain => "pi chain map",
            Axiom::NablaChain => "nabla chain map",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// Name of the first basis element on which the identity fails.
    pub offending: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionReport {
    pub checks: Vec<AxiomCheck>,
}

impl ContractionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self, axiom: Axiom) -> bool {
        self.checks.iter().any(|c| c.axiom == axiom && c.passed)
    }

    pub fn failures(&self) -> Vec<&AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for ContractionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match &c.offending {
                None => writeln!(f, "{:<26} ok", c.axiom.label())?,
                Some(e) => writeln!(f, "{:<26} FAILED at {e}", c.axiom.label())?,
            }
        }
        Ok(())
    }
}

fn first_bad(lhs: &GradedMap, rhs: &GradedMap) -> Option<String> {
    (0..lhs.source().len())
        .find(|&i| lhs.column(i) != rhs.column(i))
        .map(|i| lhs.source().name(i).to_string())
}

fn first_nonzero(m: &GradedMap) -> Option<String> {
    (0..m.source().len())
        .find(|&i| !m.column(i).is_zero())
        .map(|i| m.source().name(i).to_string())
}

impl Contraction {
    pub fn new(
        big: ChainComplex,
        small: ChainComplex,
        pi: GradedMap,
        nabla: GradedMap,
        h: GradedMap,
    ) -> Result<Self> {
        let shape = |m: &GradedMap, s: &Arc<GradedBasis>, t: &Arc<GradedBasis>, deg: i64, what: &str| {
            if m.source() != s || m.target() != t {
                return Err(Error::Structure(format!("{what} has the wrong source or target")));
            }
            if m.degree() != deg && !m.is_zero() {
                return Err(Error::Structure(format!("{what} has degree {}", m.degree())));
            }
            Ok(())
        };
        shape(&pi, big.basis(), small.basis(), 0, "pi")?;
        shape(&nabla, small.basis(), big.basis(), 0, "nabla")?;
        shape(&h, big.basis(), big.basis(), 1, "h")?;
        Ok(Contraction { big, small, pi, nabla, h })
    }

    pub fn field(&self) -> Field {
        self.big.field()
    }

    /// Identity contraction of a complex onto itself.
    pub fn trivial(c: ChainComplex) -> Self {
        let id = GradedMap::identity(c.basis().clone());
        let h = GradedMap::zero(c.basis().clone(), c.basis().clone(), 1);
        Contraction { big: c.clone(), small: c, pi: id.clone(), nabla: id, h }
    }

    pub fn verify(&self) -> ContractionReport {
        let mut checks = Vec::new();
        let mut push = |axiom, offending: Option<String>| {
            checks.push(AxiomCheck { axiom, passed: offending.is_none(), offending })
        };
        let id_small = GradedMap::identity(self.small.basis().clone());
        let id_big = GradedMap::identity(self.big.basis().clone());
        let d = self.big.d();
        let dm = self.small.d();
        let pn = self.pi.compose(&self.nabla).expect("shapes checked");
        push(Axiom::Retraction, first_bad(&pn, &id_small));
        let lhs = d.compose(&self.h).unwrap().add(&self.h.compose(d).unwrap()).unwrap();
        let rhs = id_big.sub(&self.nabla.compose(&self.pi).unwrap()).unwrap();
        push(Axiom::Homotopy, first_bad(&lhs, &rhs));
        push(Axiom::PiH, first_nonzero(&self.pi.compose(&self.h).unwrap()));
        push(Axiom::HNabla, first_nonzero(&self.h.compose(&self.nabla).unwrap()));
        push(Axiom::HH, first_nonzero(&self.h.compose(&self.h).unwrap()));
        push(
            Axiom::PiChain,
            first_bad(&self.pi.compose(d).unwrap(), &dm.compose(&self.pi).unwrap()),
        );
        push(
            Axiom::NablaChain,
            first_bad(&d.compose(&self.nabla).unwrap(), &self.nabla.compose(dm).unwrap()),
        );
        ContractionReport { checks }
    }

    /// Splits `x` as `dh x + ∇π x + hd x`.
    pub fn hodge_split(&self, x: &Lin<usize>) -> HodgeParts {
        let d = self.big.d();
        HodgeParts {
            boundary: d.apply(&self.h.apply(x)),
            harmonic: self.nabla.apply(&self.pi.apply(x)),
            homotopy: self.h.apply(&d.apply(x)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeParts {
    pub boundary: Lin<usize>,
    pub harmonic: Lin<usize>,
    pub homotopy: Lin<usize>,
}

impl HodgeParts {
    pub fn sum(&self) -> Lin<usize> {
        let mut s = self.boundary.clone();
        s.add_assign(&self.harmonic);
        s.add_assign(&self.homotopy);
        s
    }
}

/// Contraction of a complex onto its homology (zero differential).
///
/// Representatives are the echelon kernel vectors not in the span of the
/// boundaries, taken in order; `h` inverts `d` on the span of the pivot
/// columns.
pub fn homology_contraction(c: &ChainComplex) -> Contraction {
    let field = c.field();
    let basis = c.basis();
    let d = c.d();
    let mut small_elems: Vec<(String, i64)> = Vec::new();
    let mut reps: Vec<Lin<usize>> = Vec::new();
    let mut pi_cols = vec![Lin::zero(); basis.len()];
    let mut h_cols = vec![Lin::zero(); basis.len()];

    for k in basis.occupied_degrees() {
        let here = d.row_reduce(k);
        let above = d.row_reduce(k + 1);
        let idx = basis.in_degree(k);
        let local = |g: usize| idx.iter().position(|&i| i == g).expect("same degree");
        let to_dense = |v: &Lin<usize>| {
            let mut col = vec![field.zero(); idx.len()];
            for (&g, x) in v {
                col[local(g)] = x.clone();
            }
            col
        };
        let mut span: Vec<Vec<crate::scalar::Scalar>> = above.image.iter().map(to_dense).collect();
        let mut chosen: Vec<Lin<usize>> = Vec::new();
        for z in &here.kernel {
            let mut trial = span.clone();
            trial.push(to_dense(z));
            let m = Dense { rows: trial.len(), cols: idx.len(), data: trial.clone() };
            if m.rank() == trial.len() {
                span = trial;
                chosen.push(z.clone());
            }
        }
        // Q = [representatives | boundaries d(e_j) | pivot columns e_l]
        let mut qcols: Vec<Vec<crate::scalar::Scalar>> = chosen.iter().map(to_dense).collect();
        qcols.extend(above.image.iter().map(to_dense));
        for &l in &here.pivots {
            qcols.push(to_dense(&Lin::single(l, field.one())));
        }
        assert_eq!(qcols.len(), idx.len(), "rank-nullity in degree {k}");
        let q = Dense { rows: idx.len(), cols: idx.len(), data: qcols }.transpose();
        let qinv = q.inverse(field).expect("adapted basis is a basis");
        let first_small = small_elems.len();
        for (r, z) in chosen.iter().enumerate() {
            small_elems.push((format!("H({k};{r})"), k));
            reps.push(z.clone());
        }
        let nreps = chosen.len();
        for (c, &g) in idx.iter().enumerate() {
            let mut pi = Lin::zero();
            let mut h = Lin::zero();
            for row in 0..idx.len() {
                let coeff = qinv.get(row, c);
                if coeff.is_zero() {
                    continue;
                }
                if row < nreps {
                    pi.add_term(first_small + row, coeff.clone());
                } else if row < nreps + above.pivots.len() {
                    h.add_term(above.pivots[row - nreps], coeff.clone());
                }
            }
            pi_cols[g] = pi;
            h_cols[g] = h;
        }
    }

    let small_basis = Arc::new(GradedBasis::new(field, small_elems).expect("names are unique"));
    let small = ChainComplex::with_zero_differential(small_basis.clone());
    let pi = GradedMap::new(basis.clone(), small_basis.clone(), 0, pi_cols).expect("degree 0");
    let nabla = GradedMap::new(small_basis, basis.clone(), 0, reps).expect("degree 0");
    let h = GradedMap::new(basis.clone(), basis.clone(), 1, h_cols).expect("degree 1");
    Contraction { big: c.clone(), small, pi, nabla, h }
}

/// Result of normalizing a weak system.
#[derive(Clone, Debug)]
pub struct Normalized {
    /// Contraction of the big complex onto the image of `π∇`.
    pub contraction: Contraction,
    /// The kernel of `π∇` with its induced differential.
    pub complement: ChainComplex,
    pub blocks: BlockForm,
}

/// Block-form checks with respect to `small = im(π∇) ⊕ ker(π∇)` and
/// `big = ∇(im π∇) ⊕ ker π`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockForm {
    pub projector_idempotent: bool,
    /// `∇` vanishes on `ker(π∇)`.
    pub nabla_kills_complement: bool,
    /// `π` lands in `im(π∇)` and kills `ker π` trivially.
    pub pi_into_image: bool,
    /// `h` vanishes on `∇(im π∇)`.
    pub h_vanishes_on_image: bool,
    /// `h` maps into `ker π`.
    pub h_preserves_kernel: bool,
    pub image_dim: usize,
    pub complement_dim: usize,
}

impl BlockForm {
    pub fn holds(&self) -> bool {
        self.projector_idempotent
            && self.nabla_kills_complement
            && self.pi_into_image
            && self.h_vanishes_on_image
            && self.h_preserves_kernel
    }
}

pub fn normalize_weak_system(w: &WeakSystem) -> Result<Normalized> {
    let c = &w.0;
    let field = c.field();
    let report = c.verify();
    for axiom in [Axiom::Homotopy, Axiom::PiH, Axiom::HNabla, Axiom::HH, Axiom::PiChain, Axiom::NablaChain] {
        if !report.passed(axiom) {
            return Err(Error::AxiomViolation(format!("weak system fails {}", axiom.label())));
        }
    }
    let sb = c.small.basis().clone();
    let e = c.pi.compose(&c.nabla)?;
    let ee = e.compose(&e)?;
    if let Some(i) = e.first_difference(&ee) {
        return Err(Error::AxiomViolation(format!(
            "pi nabla is not idempotent (at {})",
            sb.name(i)
        )));
    }

    // Adapted basis of the small side: images of pivot columns, then kernel.
    let mut img_elems = Vec::new();
    let mut img_vecs: Vec<Lin<usize>> = Vec::new();
    let mut ker_elems = Vec::new();
    let mut ker_vecs: Vec<Lin<usize>> = Vec::new();
    // coordinates of each small basis element in the adapted basis
    let mut img_coord = vec![Lin::zero(); sb.len()];
    let mut ker_coord = vec![Lin::zero(); sb.len()];
    for k in sb.occupied_degrees() {
        let rr = e.row_reduce(k);
        let idx = sb.in_degree(k);
        let base_img = img_vecs.len();
        let base_ker = ker_vecs.len();
        for (&p, v) in rr.pivots.iter().zip(&rr.image) {
            img_elems.push((sb.name(p).to_string(), k));
            img_vecs.push(v.clone());
        }
        let free: Vec<usize> = idx.iter().copied().filter(|i| !rr.pivots.contains(i)).collect();
        for (&f, v) in free.iter().zip(&rr.kernel) {
            ker_elems.push((sb.name(f).to_string(), k));
            ker_vecs.push(v.clone());
        }
        let cols: Vec<Vec<_>> = rr
            .image
            .iter()
            .chain(&rr.kernel)
            .map(|v| idx.iter().map(|i| v.get(i).cloned().unwrap_or_else(|| field.zero())).collect())
            .collect();
        let q = Dense { rows: cols.len(), cols: idx.len(), data: cols }.transpose();
        let qinv = q.inverse(field).expect("image and kernel of a projector span");
        let ni = rr.image.len();
        for (c_local, &g) in idx.iter().enumerate() {
            for row in 0..idx.len() {
                let x = qinv.get(row, c_local);
                if x.is_zero() {
                    continue;
                }
                if row < ni {
                    img_coord[g].add_term(base_img + row, x.clone());
                } else {
                    ker_coord[g].add_term(base_ker + row - ni, x.clone());
                }
            }
        }
    }
    let img_basis = Arc::new(GradedBasis::new(field, img_elems)?);
    let ker_basis = Arc::new(GradedBasis::new(field, ker_elems)?);
    let to_img = |v: &Lin<usize>| v.map_linear(|&g| img_coord[g].clone());
    let to_ker = |v: &Lin<usize>| v.map_linear(|&g| ker_coord[g].clone());

    let dm = c.small.d();
    let d1 = GradedMap::from_fn(img_basis.clone(), img_basis.clone(), -1, |r| to_img(&dm.apply(&img_vecs[r])))?;
    let d2 = GradedMap::from_fn(ker_basis.clone(), ker_basis.clone(), -1, |r| to_ker(&dm.apply(&ker_vecs[r])))?;
    let small1 = ChainComplex::new(d1)?;
    let complement = ChainComplex::new(d2)?;
    let pi1 = GradedMap::from_fn(c.big.basis().clone(), img_basis.clone(), 0, |i| to_img(c.pi.column(i)))?;
    let nabla1 = GradedMap::from_fn(img_basis.clone(), c.big.basis().clone(), 0, |r| c.nabla.apply(&img_vecs[r]))?;
    let contraction = Contraction::new(c.big.clone(), small1, pi1, nabla1, c.h.clone())?;

    let nabla_kills_complement = ker_vecs.iter().all(|v| c.nabla.apply(v).is_zero());
    let pi_into_image = (0..c.big.dim()).all(|i| to_ker(c.pi.column(i)).is_zero());
    let h_vanishes_on_image = img_vecs.iter().all(|v| c.h.apply(&c.nabla.apply(v)).is_zero());
    let h_preserves_kernel = (0..c.big.dim()).all(|i| c.pi.apply(c.h.column(i)).is_zero());
    let blocks = BlockForm {
        projector_idempotent: true,
        nabla_kills_complement,
        pi_into_image,
        h_vanishes_on_image,
        h_preserves_kernel,
        image_dim: img_basis.len(),
        complement_dim: ker_basis.len(),
    };
    Ok(Normalized { contraction, complement, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn complex(field: Field, degs: &[i64], entries: &[(usize, usize, i64)]) -> ChainComplex {
        let b = Arc::new(GradedBasis::new(field, degs.iter().enumerate().map(|(i, &d)| (format!("e{i}"), d))).unwrap());
        let mut cols = vec![Lin::zero(); degs.len()];
        for &(src, tgt, c) in entries {
            cols[src].add_term(tgt, field.from_i64(c));
        }
        ChainComplex::new(GradedMap::new(b.clone(), b, -1, cols).unwrap()).unwrap()
    }

    #[test]
    fn acyclic_two_term_complex() {
        let c = complex(Field::Rational, &[1, 0], &[(0, 1, 1)]);
        let k = homology_contraction(&c);
        assert_eq!(k.small.dim(), 0);
        assert!(k.verify().all_passed());
        assert_eq!(k.h.column(1), &Lin::single(0, Field::Rational.one()));
    }

    #[test]
    fn zero_differential_gives_identity() {
        let c = complex(Field::Rational, &[0, 1, 1], &[]);
        let k = homology_contraction(&c);
        assert_eq!(k.small.dim(), 3);
        assert!(k.h.is_zero());
        assert_eq!(k.pi.compose(&k.nabla).unwrap(), GradedMap::identity(k.small.basis().clone()));
        assert_eq!(k.small.basis().name(1), "H(1;0)");
    }

    #[test]
    fn tampered_homotopy_is_reported() {
        let c = complex(Field::Rational, &[1, 0, 0], &[(0, 1, 1), (0, 2, 1)]);
        let mut k = homology_contraction(&c);
        assert!(k.verify().all_passed());
        let col = (0..3).find(|&i| !k.h.column(i).is_zero()).unwrap();
        let mut cols = k.h.columns().to_vec();
        cols[col] = Lin::zero();
        k.h = GradedMap::new(k.h.source().clone(), k.h.target().clone(), 1, cols).unwrap();
        let report = k.verify();
        let bad = report.failures();
        assert_eq!(bad[0].axiom, Axiom::Homotopy);
        assert!(bad[0].offending.is_some());
    }

    #[test]
    fn contractible_weak_system() {
        let c = complex(Field::Rational, &[1, 0], &[(0, 1, 1)]);
        let k = homology_contraction(&c);
        let n = normalize_weak_system(&WeakSystem(k.clone())).unwrap();
        assert_eq!(n.contraction.small.dim(), 0);
        assert!(n.contraction.verify().all_passed());
        let dh = c.d().compose(&k.h).unwrap().add(&k.h.compose(c.d()).unwrap()).unwrap();
        assert_eq!(dh, GradedMap::identity(c.basis().clone()));
    }

    #[test]
    fn hodge_split_of_harmonic_element() {
        let f = Field::prime(7).unwrap();
        let c = complex(f, &[2, 1, 1, 0], &[(0, 1, 1), (0, 2, 3), (1, 3, 1), (2, 3, 2)]);
        let k = homology_contraction(&c);
        for i in 0..k.small.dim() {
            let x = k.nabla.column(i).clone();
            let parts = k.hodge_split(&x);
            assert!(parts.boundary.is_zero() && parts.homotopy.is_zero());
            assert_eq!(parts.harmonic, x);
        }
        let x: Lin<usize> = (0..4).map(|i| (i, Scalar::Fp(i as u64 + 1, 7))).collect();
        assert_eq!(k.hodge_split(&x).sum(), x);
    }
}
