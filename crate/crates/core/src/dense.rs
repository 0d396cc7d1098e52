//! Dense exact matrices used for degree-wise elimination.

use crate::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Scalar>>,
}

/// Reduced row-echelon form with the pivot columns chosen left to right.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rref: Dense,
    pub pivots: Vec<usize>,
}

impl Dense {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Dense {
        Dense { rows, cols, data: vec![vec![field.zero(); cols]; rows] }
    }

    pub fn identity(field: Field, n: usize) -> Dense {
        let mut m = Dense::zeros(field, n, n);
        for i in 0..n {
            m.data[i][i] = field.one();
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r][c] = v;
    }

    pub fn mul(&self, other: &Dense, field: Field) -> Dense {
        assert_eq!(self.cols, other.rows);
        let mut out = Dense::zeros(field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.data[r][col].is_zero()) else {
                continue;
            };
            m.data.swap(row, p);
            let inv = m.data[row][col].inverse().expect("nonzero pivot");
            for c in col..m.cols {
                let v = &m.data[row][c] * &inv;
                m.data[row][c] = v;
            }
            for r in 0..m.rows {
                if r == row || m.data[r][col].is_zero() {
                    continue;
                }
                let factor = m.data[r][col].clone();
                for c in col..m.cols {
                    if m.data[row][c].is_zero() {
                        continue;
                    }
                    let v = &m.data[r][c] - &(&factor * &m.data[row][c]);
                    m.data[r][c] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Echelon { rref: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Kernel basis: one vector per free column, with a 1 in that column.
    pub fn kernel(&self, field: Field) -> Vec<Vec<Scalar>> {
        let e = self.echelon();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in e.pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut out = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut v = vec![field.zero(); self.cols];
            v[free] = field.one();
            for (r, &c) in e.pivots.iter().enumerate() {
                v[c] = -&e.rref.data[r][free];
            }
            out.push(v);
        }
        out
    }

    pub fn inverse(&self, field: Field) -> Option<Dense> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Dense::zeros(field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i][j] = self.data[i][j].clone();
            }
            aug.data[i][n + i] = field.one();
        }
        let e = aug.echelon();
        if e.pivots.len() < n || e.pivots.iter().take(n).enumerate().any(|(i, &p)| i != p) {
            return None;
        }
        let mut inv = Dense::zeros(field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.data[i][j] = e.rref.data[i][n + j].clone();
            }
        }
        Some(inv)
    }

    pub fn transpose(&self) -> Dense {
        let mut data = Vec::with_capacity(self.cols);
        for c in 0..self.cols {
            data.push((0..self.rows).map(|r| self.data[r][c].clone()).collect());
        }
        Dense { rows: self.cols, cols: self.rows, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let f = Field::Rational;
        let mut m = Dense::zeros(f, 2, 2);
        m.set(0, 0, f.from_i64(2));
        m.set(0, 1, f.from_i64(1));
        m.set(1, 0, f.from_i64(1));
        m.set(1, 1, f.from_i64(1));
        let inv = m.inverse(f).unwrap();
        assert_eq!(m.mul(&inv, f), Dense::identity(f, 2));
    }

    #[test]
    fn singular_has_no_inverse() {
        let f = Field::prime(5).unwrap();
        let mut m = Dense::zeros(f, 2, 2);
        m.set(0, 0, f.one());
        m.set(1, 0, f.one());
        assert!(m.inverse(f).is_none());
        assert_eq!(m.kernel(f).len(), 1);
    }
}
