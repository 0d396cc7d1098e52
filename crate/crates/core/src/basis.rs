//! Finite graded vector spaces with named basis elements.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Field;

/// An ordered list of named, graded basis elements over a field.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    field: Field,
    names: Vec<String>,
    degrees: Vec<i64>,
    index: HashMap<String, usize>,
}

impl PartialEq for GradedBasis {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.names == other.names && self.degrees == other.degrees
    }
}

impl Eq for GradedBasis {}

impl GradedBasis {
    pub fn new<S: Into<String>>(field: Field, elements: impl IntoIterator<Item = (S, i64)>) -> Result<Self> {
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        let mut index = HashMap::new();
        for (name, deg) in elements {
            let name = name.into();
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(Error::Structure(format!("duplicate basis element {name:?}")));
            }
            names.push(name);
            degrees.push(deg);
        }
        Ok(GradedBasis { field, names, degrees, index })
    }

    pub fn empty(field: Field) -> Self {
        GradedBasis { field, names: vec![], degrees: vec![], index: HashMap::new() }
    }

    pub fn into_arc(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Indices of basis elements in degree `k`, in basis order.
    pub fn in_degree(&self, k: i64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degrees[i] == k).collect()
    }

    pub fn occupied_degrees(&self) -> Vec<i64> {
        self.degrees.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Short human-readable description used in error messages.
    pub fn describe(&self) -> String {
        let shown: Vec<String> = self
            .names
            .iter()
            .zip(&self.degrees)
            .take(6)
            .map(|(n, d)| format!("{n}:{d}"))
            .collect();
        let more = if self.len() > 6 { ", ..." } else { "" };
        format!("[{}{}] over {}", shown.join(", "), more, self.field)
    }

    /// Same elements with degrees shifted by `k`.
    pub fn shifted(&self, k: i64) -> GradedBasis {
        GradedBasis {
            field: self.field,
            names: self.names.clone(),
            degrees: self.degrees.iter().map(|d| d + k).collect(),
            index: self.index.clone(),
        }
    }

    /// The dual basis: degrees negated, names toggled by a trailing `*`.
    pub fn dual(&self) -> GradedBasis {
        let names: Vec<String> = self.names.iter().map(|n| toggle_star(n)).collect();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        GradedBasis {
            field: self.field,
            names,
            degrees: self.degrees.iter().map(|d| -d).collect(),
            index,
        }
    }

    /// Basis of `self ⊗ other`, pairs `(i, j)` at index `i·|other| + j`.
    pub fn tensor(&self, other: &GradedBasis) -> GradedBasis {
        let mut elems = Vec::with_capacity(self.len() * other.len());
        for i in 0..self.len() {
            for j in 0..other.len() {
                elems.push((
                    format!("{}|{}", self.names[i], other.names[j]),
                    self.degrees[i] + other.degrees[j],
                ));
            }
        }
        GradedBasis::new(self.field, elems).expect("tensor names are unique")
    }

    /// Sub-basis picked by indices (in the given order).
    pub fn select(&self, indices: &[usize]) -> GradedBasis {
        GradedBasis::new(self.field, indices.iter().map(|&i| (self.names[i].clone(), self.degrees[i])))
            .expect("selection of distinct indices")
    }
}

pub fn toggle_star(name: &str) -> String {
    match name.strip_suffix('*') {
        Some(base) => base.to_string(),
        None => format!("{name}*"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_is_involutive() {
        let b = GradedBasis::new(Field::Rational, [("a", 1), ("b", 2)]).unwrap();
        assert_eq!(b.dual().dual(), b);
        assert_eq!(b.dual().degree(1), -2);
        assert_eq!(b.dual().name(0), "a*");
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(GradedBasis::new(Field::Rational, [("a", 1), ("a", 2)]).is_err());
    }
}
