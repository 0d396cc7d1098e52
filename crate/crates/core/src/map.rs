//! Degree-homogeneous linear maps between finite graded bases.

use std::sync::Arc;

use crate::basis::GradedBasis;
use crate::dense::Dense;
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::scalar::{Field, Scalar};

/// A linear map of fixed degree, stored column by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    source: Arc<GradedBasis>,
    target: Arc<GradedBasis>,
    degree: i64,
    cols: Vec<Lin<usize>>,
}

/// Row-reduction data for one degree block of a map.
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub rank: usize,
    /// Source indices of the pivot columns.
    pub pivots: Vec<usize>,
    /// Echelon kernel basis, one vector per free column.
    pub kernel: Vec<Lin<usize>>,
    /// Images of the pivot columns.
    pub image: Vec<Lin<usize>>,
}

pub fn koszul(a: i64, b: i64) -> bool {
    (a * b).rem_euclid(2) == 1
}

fn mismatch(a: &GradedBasis, b: &GradedBasis) -> Error {
    Error::BasisMismatch { left: a.describe(), right: b.describe() }
}

impl GradedMap {
    pub fn new(
        source: Arc<GradedBasis>,
        target: Arc<GradedBasis>,
        degree: i64,
        cols: Vec<Lin<usize>>,
    ) -> Result<Self> {
        if cols.len() != source.len() {
            return Err(Error::Structure(format!(
                "map has {} columns, source has {} elements",
                cols.len(),
                source.len()
            )));
        }
        if source.field() != target.field() {
            return Err(mismatch(&source, &target));
        }
        for (i, col) in cols.iter().enumerate() {
            for (&j, _) in col {
                if j >= target.len() {
                    return Err(Error::Structure(format!("row index {j} out of range")));
                }
                if target.degree(j) != source.degree(i) + degree {
                    return Err(Error::Structure(format!(
                        "map of degree {degree} sends {} (degree {}) to {} (degree {})",
                        source.name(i),
                        source.degree(i),
                        target.name(j),
                        target.degree(j)
                    )));
                }
            }
        }
        Ok(GradedMap { source, target, degree, cols })
    }

    pub fn from_fn(
        source: Arc<GradedBasis>,
        target: Arc<GradedBasis>,
        degree: i64,
        f: impl FnMut(usize) -> Lin<usize>,
    ) -> Result<Self> {
        let cols = (0..source.len()).map(f).collect();
        GradedMap::new(source, target, degree, cols)
    }

    pub fn zero(source: Arc<GradedBasis>, target: Arc<GradedBasis>, degree: i64) -> Self {
        let cols = vec![Lin::zero(); source.len()];
        GradedMap { source, target, degree, cols }
    }

    pub fn identity(basis: Arc<GradedBasis>) -> Self {
        let one = basis.field().one();
        let cols = (0..basis.len()).map(|i| Lin::single(i, one.clone())).collect();
        GradedMap { source: basis.clone(), target: basis, degree: 0, cols }
    }

    pub fn source(&self) -> &Arc<GradedBasis> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedBasis> {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn field(&self) -> Field {
        self.source.field()
    }

    pub fn column(&self, i: usize) -> &Lin<usize> {
        &self.cols[i]
    }

    pub fn columns(&self) -> &[Lin<usize>] {
        &self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> Scalar {
        self.cols[col].get(&row).cloned().unwrap_or_else(|| self.field().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Lin::is_zero)
    }

    pub fn apply(&self, x: &Lin<usize>) -> Lin<usize> {
        x.map_linear(|&i| self.cols[i].clone())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GradedMap) -> Result<GradedMap> {
        if *inner.target != *self.source {
            return Err(mismatch(&inner.target, &self.source));
        }
        let cols = inner.cols.iter().map(|c| self.apply(c)).collect();
        Ok(GradedMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            degree: self.degree + inner.degree,
            cols,
        })
    }

    fn check_same_shape(&self, other: &GradedMap) -> Result<()> {
        if *self.source != *other.source {
            return Err(mismatch(&self.source, &other.source));
        }
        if *self.target != *other.target {
            return Err(mismatch(&self.target, &other.target));
        }
        if self.degree != other.degree && !(self.is_zero() || other.is_zero()) {
            return Err(Error::Structure(format!(
                "cannot add maps of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap> {
        self.check_same_shape(other)?;
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.add_assign(b);
                c
            })
            .collect();
        Ok(GradedMap { source: self.source.clone(), target: self.target.clone(), degree, cols })
    }

    pub fn sub(&self, other: &GradedMap) -> Result<GradedMap> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedMap {
        self.scale(&-self.field().one())
    }

    pub fn scale(&self, c: &Scalar) -> GradedMap {
        GradedMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            cols: self.cols.iter().map(|col| col.scaled(c)).collect(),
        }
    }

    /// `f ⊗ g` on tensor bases; `(f⊗g)(x⊗y) = (−1)^{|g||x|} f(x)⊗g(y)`.
    pub fn tensor(f: &GradedMap, g: &GradedMap) -> GradedMap {
        let source = Arc::new(f.source.tensor(&g.source));
        let target = Arc::new(f.target.tensor(&g.target));
        let w = g.target.len();
        let mut cols = Vec::with_capacity(source.len());
        for i in 0..f.source.len() {
            let sign = koszul(g.degree, f.source.degree(i));
            for j in 0..g.source.len() {
                let mut col = Lin::zero();
                for (&a, ca) in f.column(i) {
                    for (&b, cb) in g.column(j) {
                        col.add_term(a * w + b, (ca * cb).signed(sign));
                    }
                }
                cols.push(col);
            }
        }
        GradedMap { source, target, degree: f.degree + g.degree, cols }
    }

    /// Naive transpose between dual bases.
    pub fn transpose(&self) -> GradedMap {
        let source = Arc::new(self.target.dual());
        let target = Arc::new(self.source.dual());
        let mut cols = vec![Lin::zero(); source.len()];
        for (j, col) in self.cols.iter().enumerate() {
            for (&i, c) in col {
                cols[i].add_term(j, c.clone());
            }
        }
        GradedMap { source, target, degree: self.degree, cols }
    }

    /// Dense block from source degree `k` to target degree `k + deg`.
    pub fn block(&self, k: i64) -> (Dense, Vec<usize>, Vec<usize>) {
        let src = self.source.in_degree(k);
        let tgt = self.target.in_degree(k + self.degree);
        let mut row_of = vec![usize::MAX; self.target.len()];
        for (r, &t) in tgt.iter().enumerate() {
            row_of[t] = r;
        }
        let mut m = Dense::zeros(self.field(), tgt.len(), src.len());
        for (c, &s) in src.iter().enumerate() {
            for (&t, v) in self.column(s) {
                m.set(row_of[t], c, v.clone());
            }
        }
        (m, src, tgt)
    }

    pub fn row_reduce(&self, k: i64) -> RowReduction {
        let field = self.field();
        let (m, src, _) = self.block(k);
        let ech = m.echelon();
        let pivots: Vec<usize> = ech.pivots.iter().map(|&c| src[c]).collect();
        let kernel = m
            .kernel(field)
            .into_iter()
            .map(|v| v.into_iter().enumerate().map(|(c, x)| (src[c], x)).collect())
            .collect();
        let image = pivots.iter().map(|&p| self.cols[p].clone()).collect();
        RowReduction { rank: pivots.len(), pivots, kernel, image }
    }

    /// First source element on which two maps differ.
    pub fn first_difference(&self, other: &GradedMap) -> Option<usize> {
        (0..self.cols.len().min(other.cols.len())).find(|&i| self.cols[i] != other.cols[i])
    }

    /// Restriction to a subset of source elements, listed by index.
    pub fn with_source(&self, source: Arc<GradedBasis>, pick: &[usize]) -> GradedMap {
        GradedMap {
            source,
            target: self.target.clone(),
            degree: self.degree,
            cols: pick.iter().map(|&i| self.cols[i].clone()).collect(),
        }
    }
}
