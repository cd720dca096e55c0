//! Degeneracy, Bell numbers, redundancy and in-network evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::enumeration::{find_fts, EnumerationError, FtCatalog};
use crate::graph::{FunctionalTopology, GraphError, NodeId, PhysicalNetwork, QuerySpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("input family is empty")]
    EmptyFamily,
    #[error("no value supplied for input `{0}`")]
    MissingValue(NodeId),
    #[error("arithmetic overflow while evaluating")]
    Overflow,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// Number of catalog entries whose delay is exactly `d`.
pub fn weak_degeneracy(catalog: &FtCatalog, d: usize) -> usize {
    catalog.by_delay(d).count()
}

/// Number of catalog entries whose delay is at most `d`.
pub fn cumulative_weak_degeneracy(catalog: &FtCatalog, d: usize) -> usize {
    catalog.iter().filter(|ft| ft.delay() <= d).count()
}

/// Bell number `B_n` from `B_{n+1} = sum_k C(n, k) B_k`, `B_0 = 1`.
pub fn bell_number(n: usize) -> BigUint {
    let mut bell: Vec<BigUint> = vec![BigUint::one()];
    // binomial row C(m, .) for the current m
    let mut row: Vec<BigUint> = vec![BigUint::one()];
    for m in 0..n {
        let next = row
            .iter()
            .zip(&bell)
            .fold(BigUint::zero(), |acc, (c, b)| acc + c * b);
        bell.push(next);
        let mut new_row = Vec::with_capacity(m + 2);
        new_row.push(BigUint::one());
        for k in 1..=m {
            new_row.push(&row[k - 1] + &row[k]);
        }
        new_row.push(BigUint::one());
        row = new_row;
    }
    bell.swap_remove(n)
}

fn big_as_number<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match value.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&value.to_string()),
    }
}

fn ratio_as_string<S: Serializer>(value: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_string())
}

/// Weak degeneracy per delay, next to the Bell number of the input count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegeneracyReport {
    pub query: QuerySpec,
    pub per_delay: BTreeMap<usize, usize>,
    pub total: usize,
    #[serde(serialize_with = "big_as_number")]
    pub bell_bound: BigUint,
}

impl DegeneracyReport {
    pub fn from_catalog(catalog: &FtCatalog) -> Self {
        let per_delay = catalog.delay_histogram();
        DegeneracyReport {
            query: catalog.query().clone(),
            total: per_delay.values().sum(),
            per_delay,
            bell_bound: bell_number(catalog.query().inputs().len()),
        }
    }
}

/// Aggregate functions that are symmetric and divisible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionSpec {
    Sum,
    Max,
    Min,
    Count,
}

impl FunctionSpec {
    pub const ALL: [FunctionSpec; 4] = [Self::Sum, Self::Max, Self::Min, Self::Count];

    /// Partial result contributed by a single input reading.
    fn lift(self, value: i64) -> i64 {
        match self {
            FunctionSpec::Count => 1,
            _ => value,
        }
    }

    fn combine(self, a: i64, b: i64) -> Result<i64, MetricsError> {
        match self {
            FunctionSpec::Sum | FunctionSpec::Count => {
                a.checked_add(b).ok_or(MetricsError::Overflow)
            }
            FunctionSpec::Max => Ok(a.max(b)),
            FunctionSpec::Min => Ok(a.min(b)),
        }
    }

    /// Direct evaluation over a nonempty multiset; `None` when empty.
    pub fn apply<I: IntoIterator<Item = i64>>(
        self,
        values: I,
    ) -> Result<Option<i64>, MetricsError> {
        let mut acc = None;
        for v in values {
            let v = self.lift(v);
            acc = Some(match acc {
                None => v,
                Some(a) => self.combine(a, v)?,
            });
        }
        Ok(acc)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionSpec::Sum => "sum",
            FunctionSpec::Max => "max",
            FunctionSpec::Min => "min",
            FunctionSpec::Count => "count",
        })
    }
}

/// Evaluates `f` the way the network would: every node merges its
/// children's partial results (in label order) with its own reading when it
/// is an input, then forwards the partial result to its parent.
pub fn evaluate_ft(
    ft: &FunctionalTopology,
    inputs: &BTreeSet<NodeId>,
    f: FunctionSpec,
    values: &BTreeMap<NodeId, i64>,
) -> Result<i64, MetricsError> {
    if let Some(x) = inputs.iter().find(|x| !values.contains_key(*x)) {
        return Err(MetricsError::MissingValue(x.clone()));
    }
    let children = ft.children();

    fn partial(
        node: &NodeId,
        children: &BTreeMap<&NodeId, Vec<&NodeId>>,
        inputs: &BTreeSet<NodeId>,
        f: FunctionSpec,
        values: &BTreeMap<NodeId, i64>,
    ) -> Result<Option<i64>, MetricsError> {
        let mut acc = if inputs.contains(node) {
            Some(f.lift(values[node]))
        } else {
            None
        };
        for child in children.get(node).into_iter().flatten() {
            if let Some(p) = partial(child, children, inputs, f, values)? {
                acc = Some(match acc {
                    None => p,
                    Some(a) => f.combine(a, p)?,
                });
            }
        }
        Ok(acc)
    }

    partial(ft.root(), &children, inputs, f, values)?
        .ok_or_else(|| MetricsError::MissingValue(ft.root().clone()))
}

/// `1` iff the node sets of `a` and `b` intersect in exactly `X ∪ {Y}`.
pub fn pairwise_redundancy(
    a: &FunctionalTopology,
    b: &FunctionalTopology,
    query: &QuerySpec,
) -> u8 {
    let shared = a.nodes().intersection(b.nodes()).count();
    let terminals_shared = query.inputs().len() + 1;
    let covers = query
        .inputs()
        .iter()
        .chain(std::iter::once(query.sink()))
        .all(|t| a.nodes().contains(t) && b.nodes().contains(t));
    u8::from(covers && shared == terminals_shared)
}

/// [`pairwise_redundancy`] that additionally requires no shared link.
pub fn strict_pairwise_redundancy(
    a: &FunctionalTopology,
    b: &FunctionalTopology,
    query: &QuerySpec,
) -> u8 {
    if pairwise_redundancy(a, b, query) == 0 {
        return 0;
    }
    let ea: BTreeSet<_> = a.undirected_edges().collect();
    u8::from(!b.undirected_edges().any(|e| ea.contains(&e)))
}

/// Redundancy figures for one input set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputSetRedundancy {
    pub inputs: Vec<NodeId>,
    pub ft_count: usize,
    /// Unordered pairs `(i, j)`, `i < j`, with `r = 1`; indices follow
    /// catalog order.
    pub redundant_pairs: Vec<(usize, usize)>,
    pub partner_counts: Vec<usize>,
    /// Sum of `r` over ordered pairs `i != j`.
    pub ordered_pair_sum: u64,
    #[serde(serialize_with = "ratio_as_string")]
    pub value: Ratio<u64>,
}

impl InputSetRedundancy {
    pub fn from_catalog(catalog: &FtCatalog) -> Self {
        let fts = catalog.as_slice();
        let n = fts.len();
        let mut redundant_pairs = Vec::new();
        let mut partner_counts = vec![0; n];
        for i in 0..n {
            for j in i + 1..n {
                if pairwise_redundancy(&fts[i], &fts[j], catalog.query()) == 1 {
                    redundant_pairs.push((i, j));
                    partner_counts[i] += 1;
                    partner_counts[j] += 1;
                }
            }
        }
        let ordered_pair_sum = 2 * redundant_pairs.len() as u64;
        let value = if n == 0 {
            Ratio::zero()
        } else {
            Ratio::new(ordered_pair_sum, n as u64)
        };
        InputSetRedundancy {
            inputs: catalog.query().inputs().iter().cloned().collect(),
            ft_count: n,
            redundant_pairs,
            partner_counts,
            ordered_pair_sum,
            value,
        }
    }

    fn empty(inputs: &BTreeSet<NodeId>) -> Self {
        InputSetRedundancy {
            inputs: inputs.iter().cloned().collect(),
            ft_count: 0,
            redundant_pairs: Vec::new(),
            partner_counts: Vec::new(),
            ordered_pair_sum: 0,
            value: Ratio::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedundancyReport {
    pub sink: NodeId,
    pub d_max: Option<usize>,
    pub family: Vec<InputSetRedundancy>,
    /// Input sets for which no topology exists within the budget.
    pub empty_sets: Vec<Vec<NodeId>>,
    #[serde(serialize_with = "ratio_as_string")]
    pub average: Ratio<u64>,
    pub average_f64: f64,
}

/// Average redundancy over a family of input sets: per set, the sum of `r`
/// over ordered pairs divided by the number of topologies, then the mean of
/// those values over the family. Sets without topologies contribute 0.
pub fn average_redundancy(
    net: &PhysicalNetwork,
    sink: &NodeId,
    family: &[BTreeSet<NodeId>],
    d_max: Option<usize>,
) -> Result<RedundancyReport, MetricsError> {
    if family.is_empty() {
        return Err(MetricsError::EmptyFamily);
    }
    let mut per_set = Vec::with_capacity(family.len());
    let mut empty_sets = Vec::new();
    for inputs in family {
        let query = QuerySpec::new(net, inputs.iter().cloned(), sink.clone(), d_max)?;
        let entry = match find_fts(net, &query) {
            Ok(catalog) => InputSetRedundancy::from_catalog(&catalog),
            Err(EnumerationError::NoPathWithinBudget { .. }) => InputSetRedundancy::empty(inputs),
            Err(e) => return Err(e.into()),
        };
        if entry.ft_count == 0 {
            empty_sets.push(entry.inputs.clone());
        }
        per_set.push(entry);
    }
    let sum = per_set
        .iter()
        .fold(Ratio::<u64>::zero(), |acc, s| acc + s.value);
    let average = sum / Ratio::from_integer(family.len() as u64);
    Ok(RedundancyReport {
        sink: sink.clone(),
        d_max,
        family: per_set,
        empty_sets,
        average_f64: *average.numer() as f64 / *average.denom() as f64,
        average,
    })
}

/// All `k`-subsets of the non-sink nodes in lexicographic label order,
/// truncated to `cap` sets.
pub fn k_subset_family(
    net: &PhysicalNetwork,
    sink: &NodeId,
    k: usize,
    cap: usize,
) -> Vec<BTreeSet<NodeId>> {
    let pool: Vec<&NodeId> = net.nodes().iter().filter(|n| *n != sink).collect();
    let mut out = Vec::new();
    if k == 0 || k > pool.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    while out.len() < cap {
        out.push(idx.iter().map(|&i| pool[i].clone()).collect());
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < pool.len() - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}
