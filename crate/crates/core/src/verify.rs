//! Cross-checks of the enumeration and simulation against the oracles.

use serde::Serialize;

use crate::enumeration::{count_spanning_trees, distinct_unions, find_fts, FtCatalog};
use crate::graph::{CanonicalFtKey, FunctionalTopology, PhysicalNetwork, QuerySpec};
use crate::oracle::{self, OracleError};
use crate::sim::{run_simulation, FailureModel, Strategy, StrategyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
    /// Smallest failing witness, when any check failed.
    pub counterexample: Option<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub failure: FailureModel,
    pub rounds: u64,
    pub max_nodes: usize,
    pub exact_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            failure: FailureModel::new(0.3, 0.1, 42).expect("valid defaults"),
            rounds: 20_000,
            max_nodes: oracle::DEFAULT_MAX_NODES,
            exact_cap: oracle::DEFAULT_MAX_FTS,
        }
    }
}

/// Keys missing from and extra in `candidate` relative to `reference`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CatalogDiff {
    pub missing: Vec<CanonicalFtKey>,
    pub extra: Vec<CanonicalFtKey>,
}

impl CatalogDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

pub fn compare_catalogs(candidate: &FtCatalog, reference: &FtCatalog) -> CatalogDiff {
    CatalogDiff {
        missing: reference
            .keys()
            .iter()
            .filter(|k| !candidate.contains_key(k))
            .cloned()
            .collect(),
        extra: candidate
            .keys()
            .iter()
            .filter(|k| !reference.contains_key(k))
            .cloned()
            .collect(),
    }
}

/// Runs every check on a freshly enumerated catalog.
pub fn verify_instance(
    net: &PhysicalNetwork,
    query: &QuerySpec,
    options: &VerifyOptions,
) -> Result<VerifyReport, crate::enumeration::EnumerationError> {
    let catalog = find_fts(net, query)?;
    Ok(verify_catalog(net, query, &catalog, options))
}

/// Runs every check with `candidate` standing in for the enumeration output.
pub fn verify_catalog(
    net: &PhysicalNetwork,
    query: &QuerySpec,
    candidate: &FtCatalog,
    options: &VerifyOptions,
) -> VerifyReport {
    let mut checks = Vec::new();
    let mut counterexample = None;
    let mut fail = |checks: &mut Vec<CheckOutcome>, name, detail: String, witness: String| {
        checks.push(CheckOutcome {
            name,
            status: CheckStatus::Fail,
            detail,
        });
        counterexample.get_or_insert(witness);
    };

    // every entry is a valid topology for the query
    match candidate
        .iter()
        .find_map(|ft| ft.check_against(net, query).err().map(|e| (ft, e)))
    {
        None => checks.push(pass(
            "catalog-invariants",
            format!("{} topologies", candidate.len()),
        )),
        Some((ft, e)) => fail(
            &mut checks,
            "catalog-invariants",
            e.to_string(),
            ft.canonical_key().to_string(),
        ),
    }

    match oracle::oracle_enumerate_fts_capped(net, query, options.max_nodes) {
        Ok(reference) => {
            let diff = compare_catalogs(candidate, &reference);
            if diff.is_empty() {
                checks.push(pass(
                    "enumeration-vs-oracle",
                    format!("{} topologies match", reference.len()),
                ));
            } else {
                let witness = diff
                    .missing
                    .first()
                    .map(|k| format!("missing {k}"))
                    .or_else(|| diff.extra.first().map(|k| format!("extra {k}")))
                    .unwrap_or_default();
                fail(
                    &mut checks,
                    "enumeration-vs-oracle",
                    format!("{} missing, {} extra", diff.missing.len(), diff.extra.len()),
                    witness,
                );
            }
        }
        Err(e @ OracleError::TooManyNodes { .. }) => {
            checks.push(skipped("enumeration-vs-oracle", e))
        }
        Err(e) => checks.push(skipped("enumeration-vs-oracle", e)),
    }

    match distinct_unions(net, query) {
        Ok(unions) => {
            let bad = unions.iter().find_map(|u| {
                let found = count_spanning_trees(u);
                let expected = oracle::matrix_tree_count(u).ok()?;
                (expected != found.into()).then_some((u, found, expected))
            });
            match bad {
                None => checks.push(pass(
                    "spanning-trees-vs-matrix-tree",
                    format!("{} unions", unions.len()),
                )),
                Some((u, found, expected)) => {
                    let edges: Vec<String> =
                        u.labeled_edges().map(|(a, b)| format!("{a}-{b}")).collect();
                    fail(
                        &mut checks,
                        "spanning-trees-vs-matrix-tree",
                        format!("backtracking found {found}, determinant gives {expected}"),
                        format!("union {{{}}}", edges.join(", ")),
                    );
                }
            }
        }
        Err(e) => checks.push(skipped("spanning-trees-vs-matrix-tree", e)),
    }

    checks.push(monte_carlo_check(candidate, options, &mut counterexample));
    VerifyReport {
        checks,
        counterexample,
    }
}

fn monte_carlo_check(
    catalog: &FtCatalog,
    options: &VerifyOptions,
    counterexample: &mut Option<String>,
) -> CheckOutcome {
    const NAME: &str = "monte-carlo-vs-exact";
    if catalog.is_empty() {
        return skipped(NAME, "empty catalog");
    }
    let pool: Vec<&FunctionalTopology> = catalog.iter().collect();
    let exact = match oracle::exact_success_probability_of(
        &pool,
        catalog.query(),
        &options.failure,
        options.exact_cap,
    ) {
        Ok(p) => p,
        Err(e) => return skipped(NAME, e),
    };
    let strategies = [
        Strategy::new(StrategyKind::StaticSingle),
        Strategy::new(StrategyKind::DegenerateFallback),
    ];
    let report = match run_simulation(catalog, &options.failure, &strategies, options.rounds) {
        Ok(r) => r,
        Err(e) => return skipped(NAME, e),
    };
    let fallback = &report.strategies[1];
    let rate = fallback.success_rate;
    // the larger of the two variances keeps the bound meaningful near 0 and 1
    let var = (rate * (1.0 - rate)).max(exact * (1.0 - exact));
    let bound = 3.0 * (var / options.rounds as f64).sqrt();
    let violations: u64 = report.dominance.iter().map(|d| d.violations).sum();
    let detail = format!(
        "rate {rate:.6}, exact {exact:.6}, bound {bound:.6}, dominance violations {violations}"
    );
    if (rate - exact).abs() <= bound && violations == 0 {
        pass(NAME, detail)
    } else {
        counterexample.get_or_insert_with(|| format!("seed {}: {detail}", options.failure.seed()));
        CheckOutcome {
            name: NAME,
            status: CheckStatus::Fail,
            detail,
        }
    }
}

fn pass(name: &'static str, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        status: CheckStatus::Pass,
        detail,
    }
}

fn skipped(name: &'static str, why: impl ToString) -> CheckOutcome {
    CheckOutcome {
        name,
        status: CheckStatus::Skipped,
        detail: why.to_string(),
    }
}
