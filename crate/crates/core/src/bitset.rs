//! Dense bitsets over fact ids.
//!
//! Every set of facts in the planner (states, related-fact sets, mutex rows)
//! is a [`FactSet`]. The set grows on demand, and equality and hashing ignore
//! trailing zero words, so two sets holding the same ids compare equal no
//! matter how much capacity each was created with.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::ground::FactId;

const BITS: usize = 64;

#[derive(Clone, Default)]
pub struct FactSet {
    words: Vec<u64>,
}

impl FactSet {
    pub const fn new() -> Self {
        FactSet { words: Vec::new() }
    }

    /// An empty set with room for ids below `n` without reallocating.
    pub fn with_capacity(n: usize) -> Self {
        FactSet {
            words: vec![0; n.div_ceil(BITS)],
        }
    }

    pub fn from_ids<I: IntoIterator<Item = FactId>>(ids: I) -> Self {
        let mut s = FactSet::new();
        for id in ids {
            s.insert(id);
        }
        s
    }

    #[inline]
    fn locate(id: FactId) -> (usize, u64) {
        let i = id.index();
        (i / BITS, 1u64 << (i % BITS))
    }

    /// Returns `true` if the id was not already present.
    #[inline]
    pub fn insert(&mut self, id: FactId) -> bool {
        let (w, m) = Self::locate(id);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & m == 0;
        self.words[w] |= m;
        fresh
    }

    /// Returns `true` if the id was present.
    #[inline]
    pub fn remove(&mut self, id: FactId) -> bool {
        let (w, m) = Self::locate(id);
        match self.words.get_mut(w) {
            Some(word) => {
                let had = *word & m != 0;
                *word &= !m;
                had
            }
            None => false,
        }
    }

    #[inline]
    pub fn contains(&self, id: FactId) -> bool {
        let (w, m) = Self::locate(id);
        self.words.get(w).is_some_and(|word| word & m != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn union_with(&mut self, other: &FactSet) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn difference_with(&mut self, other: &FactSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub fn intersect_with(&mut self, other: &FactSet) {
        for (i, a) in self.words.iter_mut().enumerate() {
            *a &= other.words.get(i).copied().unwrap_or(0);
        }
    }

    pub fn is_subset(&self, other: &FactSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, &a)| a & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn intersects(&self, other: &FactSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .any(|(a, b)| a & b != 0)
    }

    /// Ids in increasing order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            word: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Index one past the last non-zero word.
    fn trimmed_len(&self) -> usize {
        self.words
            .iter()
            .rposition(|&w| w != 0)
            .map_or(0, |p| p + 1)
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words[..self.trimmed_len()]
    }
}

impl PartialEq for FactSet {
    fn eq(&self, other: &Self) -> bool {
        self.words() == other.words()
    }
}

impl Eq for FactSet {}

impl Hash for FactSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.words().hash(state);
    }
}

impl fmt::Debug for FactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|i| i.0)).finish()
    }
}

impl FromIterator<FactId> for FactSet {
    fn from_iter<T: IntoIterator<Item = FactId>>(iter: T) -> Self {
        FactSet::from_ids(iter)
    }
}

impl Extend<FactId> for FactSet {
    fn extend<T: IntoIterator<Item = FactId>>(&mut self, iter: T) {
        for id in iter {
            self.insert(id);
        }
    }
}

impl<'a> IntoIterator for &'a FactSet {
    type Item = FactId;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    word: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = FactId;

    #[inline]
    fn next(&mut self) -> Option<FactId> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(FactId((self.word * BITS + bit) as u32));
            }
            self.word += 1;
            if self.word >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::hash_map::DefaultHasher;
    use std::collections::BTreeSet;

    fn ids(v: &[u32]) -> FactSet {
        v.iter().map(|&i| FactId(i)).collect()
    }

    fn hash_of(s: &FactSet) -> u64 {
        let mut h = DefaultHasher::new();
        s.hash(&mut h);
        h.finish()
    }

    #[test]
    fn capacity_does_not_affect_equality() {
        let mut a = FactSet::with_capacity(1000);
        a.insert(FactId(3));
        let b = ids(&[3]);
        assert_eq!(a, b);
        assert_eq!(hash_of(&a), hash_of(&b));
        a.insert(FactId(900));
        a.remove(FactId(900));
        assert_eq!(a, b);
        assert_eq!(hash_of(&a), hash_of(&b));
    }

    #[test]
    fn subset_handles_length_mismatch() {
        assert!(ids(&[1, 2]).is_subset(&ids(&[1, 2, 500])));
        assert!(!ids(&[1, 500]).is_subset(&ids(&[1, 2])));
        assert!(FactSet::with_capacity(300).is_subset(&FactSet::new()));
    }

    proptest! {
        #[test]
        fn behaves_like_btreeset(a in proptest::collection::vec(0u32..300, 0..40),
                                 b in proptest::collection::vec(0u32..300, 0..40)) {
            let (sa, sb) = (ids(&a), ids(&b));
            let (ta, tb): (BTreeSet<u32>, BTreeSet<u32>) =
                (a.iter().copied().collect(), b.iter().copied().collect());
            prop_assert_eq!(sa.iter().map(|f| f.0).collect::<Vec<_>>(),
                            ta.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(sa.len(), ta.len());
            let mut u = sa.clone(); u.union_with(&sb);
            prop_assert_eq!(u.iter().map(|f| f.0).collect::<BTreeSet<_>>(),
                            ta.union(&tb).copied().collect::<BTreeSet<_>>());
            let mut d = sa.clone(); d.difference_with(&sb);
            prop_assert_eq!(d.iter().map(|f| f.0).collect::<BTreeSet<_>>(),
                            ta.difference(&tb).copied().collect::<BTreeSet<_>>());
            let mut i = sa.clone(); i.intersect_with(&sb);
            prop_assert_eq!(i.iter().map(|f| f.0).collect::<BTreeSet<_>>(),
                            ta.intersection(&tb).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(sa.is_subset(&sb), ta.is_subset(&tb));
            prop_assert_eq!(sa.intersects(&sb), !ta.is_disjoint(&tb));
        }
    }
}
