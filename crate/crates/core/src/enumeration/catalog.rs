use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{CanonicalFtKey, FunctionalTopology, QuerySpec};

/// Where a catalog came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Enumeration,
    Oracle,
    Imported,
}

/// Deduplicated set of functional topologies for one query, ordered by
/// canonical key and indexed by delay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FtCatalog {
    query: QuerySpec,
    provenance: Provenance,
    fts: Vec<FunctionalTopology>,
    keys: Vec<CanonicalFtKey>,
    delay_index: BTreeMap<usize, Vec<usize>>,
}

impl FtCatalog {
    /// Collects topologies, dropping duplicates by canonical key.
    pub fn from_topologies<I>(query: QuerySpec, provenance: Provenance, fts: I) -> Self
    where
        I: IntoIterator<Item = FunctionalTopology>,
    {
        let map: BTreeMap<CanonicalFtKey, FunctionalTopology> =
            fts.into_iter().map(|ft| (ft.canonical_key(), ft)).collect();
        Self::from_sorted(query, provenance, map)
    }

    pub(crate) fn from_sorted(
        query: QuerySpec,
        provenance: Provenance,
        map: BTreeMap<CanonicalFtKey, FunctionalTopology>,
    ) -> Self {
        let (keys, fts): (Vec<_>, Vec<_>) = map.into_iter().unzip();
        let mut delay_index: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, ft) in fts.iter().enumerate() {
            delay_index.entry(ft.delay()).or_default().push(i);
        }
        FtCatalog {
            query,
            provenance,
            fts,
            keys,
            delay_index,
        }
    }

    pub fn query(&self) -> &QuerySpec {
        &self.query
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.fts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fts.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FunctionalTopology> {
        self.fts.iter()
    }

    pub fn as_slice(&self) -> &[FunctionalTopology] {
        &self.fts
    }

    pub fn keys(&self) -> &[CanonicalFtKey] {
        &self.keys
    }

    pub fn contains_key(&self, key: &CanonicalFtKey) -> bool {
        self.keys.binary_search(key).is_ok()
    }

    pub fn get(&self, key: &CanonicalFtKey) -> Option<&FunctionalTopology> {
        self.keys.binary_search(key).ok().map(|i| &self.fts[i])
    }

    /// Topologies whose delay is exactly `delay`.
    pub fn by_delay(&self, delay: usize) -> impl Iterator<Item = &FunctionalTopology> + '_ {
        self.delay_index
            .get(&delay)
            .into_iter()
            .flatten()
            .map(move |&i| &self.fts[i])
    }

    /// `delay -> count`, only for delays that occur.
    pub fn delay_histogram(&self) -> BTreeMap<usize, usize> {
        self.delay_index
            .iter()
            .map(|(&d, v)| (d, v.len()))
            .collect()
    }
}

impl<'a> IntoIterator for &'a FtCatalog {
    type Item = &'a FunctionalTopology;
    type IntoIter = std::slice::Iter<'a, FunctionalTopology>;

    fn into_iter(self) -> Self::IntoIter {
        self.fts.iter()
    }
}
