//! Sparse linear combinations over an exact field.

use std::collections::btree_map::{self, BTreeMap, Entry};

use crate::scalar::Scalar;

/// A finite linear combination `Σ cₖ·k` with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lin<K: Ord> {
    terms: BTreeMap<K, Scalar>,
}

impl<K: Ord> Default for Lin<K> {
    fn default() -> Self {
        Lin { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(key: K, coeff: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(key, coeff);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, key: &K) -> Option<&Scalar> {
        self.terms.get(key)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, Scalar> {
        self.terms.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, K, Scalar> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, key: K, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Lin<K>) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn add_owned(&mut self, other: Lin<K>) {
        if self.terms.is_empty() {
            *self = other;
            return;
        }
        for (k, c) in other.terms {
            self.add_term(k, c);
        }
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, other: &Lin<K>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn sub_assign(&mut self, other: &Lin<K>) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), -c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Lin<K> {
        if c.is_zero() {
            return Lin::zero();
        }
        Lin {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Lin<K> {
        Lin {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn signed(self, negate: bool) -> Lin<K> {
        if negate {
            Lin {
                terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect(),
            }
        } else {
            self
        }
    }

    pub fn difference(&self, other: &Lin<K>) -> Lin<K> {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    /// Applies a linear map given on basis keys.
    pub fn map_linear<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> Lin<J>) -> Lin<J> {
        let mut out = Lin::zero();
        for (k, c) in &self.terms {
            let image = f(k);
            if c.is_one() {
                out.add_owned(image);
            } else {
                out.add_scaled(&image, c);
            }
        }
        out
    }

    /// Renames keys, merging coefficients that collide.
    pub fn map_keys<J: Ord + Clone>(&self, mut f: impl FnMut(&K) -> J) -> Lin<J> {
        let mut out = Lin::zero();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&K) -> bool) {
        self.terms.retain(|k, _| keep(k));
    }
}

impl<K: Ord> IntoIterator for Lin<K> {
    type Item = (K, Scalar);
    type IntoIter = btree_map::IntoIter<K, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl<'a, K: Ord> IntoIterator for &'a Lin<K> {
    type Item = (&'a K, &'a Scalar);
    type IntoIter = btree_map::Iter<'a, K, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl<K: Ord + Clone> FromIterator<(K, Scalar)> for Lin<K> {
    fn from_iter<I: IntoIterator<Item = (K, Scalar)>>(iter: I) -> Self {
        let mut out = Lin::zero();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}
