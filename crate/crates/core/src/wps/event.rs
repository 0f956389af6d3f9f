use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;

/// A subset of the sample space, stored as a bitset over point indices.
///
/// Ordering compares the sorted point lists, so collections of events sort
/// the same way regardless of how they were built.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventSet(FixedBitSet);

impl EventSet {
    pub fn empty(universe: usize) -> Self {
        EventSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> Self {
        let mut b = FixedBitSet::with_capacity(universe);
        b.insert_range(..);
        EventSet(b)
    }

    pub fn from_points(universe: usize, points: impl IntoIterator<Item = usize>) -> Self {
        let mut b = FixedBitSet::with_capacity(universe);
        for p in points {
            b.insert(p);
        }
        EventSet(b)
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, p: usize) {
        self.0.insert(p);
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.contains(p)
    }

    pub fn count(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.universe()
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &EventSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &EventSet) -> EventSet {
        let mut b = self.0.clone();
        b.union_with(&other.0);
        EventSet(b)
    }

    pub fn intersection(&self, other: &EventSet) -> EventSet {
        let mut b = self.0.clone();
        b.intersect_with(&other.0);
        EventSet(b)
    }

    pub fn difference(&self, other: &EventSet) -> EventSet {
        let mut b = self.0.clone();
        b.difference_with(&other.0);
        EventSet(b)
    }

    pub fn complement(&self) -> EventSet {
        let mut b = self.0.clone();
        b.toggle_range(..);
        EventSet(b)
    }

    pub fn points(&self) -> Vec<usize> {
        self.0.ones().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    /// Union of a family over the same universe.
    pub fn union_all<'a>(
        universe: usize,
        family: impl IntoIterator<Item = &'a EventSet>,
    ) -> EventSet {
        family
            .into_iter()
            .fold(EventSet::empty(universe), |acc, e| acc.union(e))
    }

    /// Image of this set under a point relabelling `new_index[old]`.
    pub fn mapped(&self, new_index: &[usize]) -> EventSet {
        EventSet::from_points(self.universe(), self.iter().map(|p| new_index[p]))
    }
}

impl Ord for EventSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.ones().cmp(other.0.ones())
    }
}

impl PartialOrd for EventSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = EventSet::from_points(5, [0, 2]);
        let b = EventSet::from_points(5, [2, 3]);
        assert_eq!(a.union(&b).points(), vec![0, 2, 3]);
        assert_eq!(a.intersection(&b).points(), vec![2]);
        assert_eq!(a.difference(&b).points(), vec![0]);
        assert_eq!(a.complement().points(), vec![1, 3, 4]);
        assert!(EventSet::full(5).is_full());
        assert!(a.intersection(&b).is_subset(&a));
        assert_eq!(a.to_string(), "{0,2}");
    }

    #[test]
    fn canonical_order() {
        let mut v = [
            EventSet::from_points(4, [1]),
            EventSet::from_points(4, [0, 3]),
            EventSet::from_points(4, [0]),
            EventSet::empty(4),
        ];
        v.sort();
        let pts: Vec<Vec<usize>> = v.iter().map(|e| e.points()).collect();
        assert_eq!(pts, vec![vec![], vec![0], vec![0, 3], vec![1]]);
    }
}
