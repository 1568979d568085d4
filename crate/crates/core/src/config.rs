//! Partial configurations: finite maps from vertices to spins.

use std::collections::btree_map;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{Region, Vertex};
use crate::system::Spin;

/// A finite assignment `Λ → [q]`. Iteration is row-major.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PartialConfiguration {
    spins: BTreeMap<Vertex, Spin>,
}

impl PartialConfiguration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn get(&self, v: Vertex) -> Option<Spin> {
        self.spins.get(&v).copied()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.spins.contains_key(&v)
    }

    /// Assign `v`, failing if it already holds a different spin.
    pub fn assign(&mut self, v: Vertex, s: Spin) -> Result<()> {
        match self.spins.entry(v) {
            btree_map::Entry::Vacant(e) => {
                e.insert(s);
                Ok(())
            }
            btree_map::Entry::Occupied(e) if *e.get() == s => Ok(()),
            btree_map::Entry::Occupied(_) => Err(Error::Conflict(v)),
        }
    }

    /// Overwrite (or insert) the spin at `v`.
    pub fn set(&mut self, v: Vertex, s: Spin) {
        self.spins.insert(v, s);
    }

    pub fn remove(&mut self, v: Vertex) -> Option<Spin> {
        self.spins.remove(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vertex, Spin)> + '_ {
        self.spins.iter().map(|(v, s)| (*v, *s))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.spins.keys().copied()
    }

    /// The configuration on the union of both domains, if they agree on the overlap.
    pub fn merge(&self, other: &PartialConfiguration) -> Result<PartialConfiguration> {
        let mut out = self.clone();
        for (v, s) in other.iter() {
            out.assign(v, s)?;
        }
        Ok(out)
    }

    pub fn restrict(&self, region: &Region) -> PartialConfiguration {
        self.iter().filter(|(v, _)| region.contains(*v)).collect()
    }

    pub fn domain(&self) -> Region {
        Region::Set(self.spins.keys().copied().collect())
    }
}

impl FromIterator<(Vertex, Spin)> for PartialConfiguration {
    fn from_iter<I: IntoIterator<Item = (Vertex, Spin)>>(iter: I) -> Self {
        PartialConfiguration { spins: iter.into_iter().collect() }
    }
}

impl Extend<(Vertex, Spin)> for PartialConfiguration {
    fn extend<I: IntoIterator<Item = (Vertex, Spin)>>(&mut self, iter: I) {
        self.spins.extend(iter);
    }
}
