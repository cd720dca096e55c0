use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};

use anyhow::{bail, Context as _, Result};
use serde_json::{json, Value};

use ftenum::io::{catalog_to_dot, ft_to_dot, load_network, read_catalog_json, write_catalog_json};
use ftenum::metrics::{average_redundancy, cumulative_weak_degeneracy, k_subset_family};
use ftenum::sim::{run_simulation_with, Constraint, Objective, SimulationOptions};
use ftenum::verify::{verify_catalog, CheckStatus, VerifyOptions};
use ftenum::{
    bell_number, find_fts_with, DegeneracyReport, EnumerationOptions, FailureModel, FtCatalog,
    NodeId, PhysicalNetwork, QuerySpec, Strategy, StrategyKind,
};

use crate::report::{csv_string, open_output, summary, Context};
use crate::{
    BellArgs, EnumerateArgs, Format, NetArgs, ObjectiveArg, QueryArgs, RedundancyArgs,
    SimulateArgs, StrategyArg, VerifyArgs,
};

fn load(net: &NetArgs) -> Result<PhysicalNetwork> {
    load_network(&net.net).with_context(|| format!("cannot load network {}", net.net.display()))
}

fn labels(raw: &[String]) -> Vec<NodeId> {
    raw.iter().map(|s| NodeId::from(s.trim())).collect()
}

fn build_query(net: &PhysicalNetwork, args: &NetArgs, inputs: &[String]) -> Result<QuerySpec> {
    Ok(QuerySpec::new(
        net,
        labels(inputs),
        args.sink.trim(),
        args.dmax,
    )?)
}

fn net_echo(args: &NetArgs) -> Value {
    json!({
        "net": args.net.display().to_string(),
        "sink": args.sink,
        "dmax": args.dmax,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn histogram_lines(hist: &BTreeMap<usize, usize>) -> String {
    let mut s = String::new();
    for (d, n) in hist {
        let _ = writeln!(s, "  delay {d}: {n}");
    }
    s
}

fn query_line(q: &QuerySpec) -> String {
    let inputs: Vec<&str> = q.inputs().iter().map(NodeId::as_str).collect();
    format!(
        "inputs {{{}}} -> sink {} within {} hop{}",
        inputs.join(", "),
        q.sink(),
        q.d_max(),
        if q.d_max() == 1 { "" } else { "s" }
    )
}

fn enumerate_catalog(
    net: &PhysicalNetwork,
    query: &QuerySpec,
    threads: usize,
    progress: bool,
) -> Result<FtCatalog> {
    let last = AtomicU64::new(u64::MAX);
    let report = |done: u64, total: u64| {
        let pct = (done * 100).checked_div(total).unwrap_or(100);
        if last.swap(pct, Ordering::Relaxed) != pct {
            eprint!("\rcombinations {done}/{total} ({pct}%)");
            if done == total {
                eprintln!();
            }
        }
    };
    let options = EnumerationOptions {
        threads,
        progress: progress.then_some(&report as &(dyn Fn(u64, u64) + Sync)),
    };
    Ok(find_fts_with(net, query, &options)?)
}

pub fn enumerate(ctx: &Context, args: &EnumerateArgs) -> Result<ExitCode> {
    let q = &args.query;
    let net = load(&q.net)?;
    let query = build_query(&net, &q.net, &q.inputs)?;
    let catalog = enumerate_catalog(&net, &query, q.output.threads, args.progress)?;
    let config = merge(
        net_echo(&q.net),
        json!({
            "inputs": q.inputs,
            "format": q.output.format.name(),
            "dot_dir": args.dot_dir.as_ref().map(|p| p.display().to_string()),
        }),
    );

    let mut out = open_output(q.output.out.as_deref())?;
    match q.output.format {
        Format::Json => ctx.stream_envelope(&mut out, "enumerate", &config, None, |w| {
            Ok(write_catalog_json(w, &catalog)?)
        })?,
        Format::Csv => out.write_all(
            csv_string(|w| {
                w.write_record(["index", "root", "delay", "energy", "edges"])?;
                for (i, ft) in catalog.iter().enumerate() {
                    let edges: Vec<String> = ft
                        .edges()
                        .iter()
                        .map(|(a, b)| format!("{a}->{b}"))
                        .collect();
                    w.write_record([
                        i.to_string(),
                        ft.root().to_string(),
                        ft.delay().to_string(),
                        ft.energy().to_string(),
                        edges.join(";"),
                    ])?;
                }
                Ok(())
            })?
            .as_bytes(),
        )?,
        Format::Dot => out.write_all(catalog_to_dot(&catalog).as_bytes())?,
    }
    out.flush()?;

    if let Some(dir) = &args.dot_dir {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let width = catalog.len().saturating_sub(1).to_string().len();
        for (i, ft) in catalog.iter().enumerate() {
            let name = format!("ft{i:0width$}");
            let path = dir.join(format!("{name}.dot"));
            fs::write(&path, ft_to_dot(ft, &name))
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
    }

    summary(
        q.output.out.is_some(),
        &format!(
            "{} functional topologies, {}\n{}",
            catalog.len(),
            query_line(&query),
            histogram_lines(&catalog.delay_histogram())
        ),
    );
    Ok(ExitCode::SUCCESS)
}

pub fn degeneracy(ctx: &Context, args: &QueryArgs) -> Result<ExitCode> {
    let net = load(&args.net)?;
    let query = build_query(&net, &args.net, &args.inputs)?;
    let catalog = enumerate_catalog(&net, &query, args.output.threads, false)?;
    let report = DegeneracyReport::from_catalog(&catalog);
    let cumulative: BTreeMap<usize, usize> = report
        .per_delay
        .keys()
        .map(|&d| (d, cumulative_weak_degeneracy(&catalog, d)))
        .collect();
    let config = merge(
        net_echo(&args.net),
        json!({ "inputs": args.inputs, "format": args.output.format.name() }),
    );

    let text = match args.output.format {
        Format::Json => {
            let mut value = serde_json::to_value(&report)?;
            value["cumulative"] = serde_json::to_value(&cumulative)?;
            ctx.envelope("degeneracy", &config, None, &value)?
        }
        Format::Csv => csv_string(|w| {
            w.write_record(["delay", "count", "cumulative", "bell"])?;
            for (d, n) in &report.per_delay {
                w.write_record([
                    d.to_string(),
                    n.to_string(),
                    cumulative[d].to_string(),
                    report.bell_bound.to_string(),
                ])?;
            }
            Ok(())
        })?,
        Format::Dot => bail!("degeneracy has no DOT view; use json or csv"),
    };
    let mut out = open_output(args.output.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;

    summary(
        args.output.out.is_some(),
        &format!(
            "{} functional topologies, {}\n{}  bell B_{} = {}\n",
            report.total,
            query_line(&query),
            histogram_lines(&report.per_delay),
            query.inputs().len(),
            report.bell_bound
        ),
    );
    Ok(ExitCode::SUCCESS)
}

/// One input set per non-empty line, or a JSON list of lists.
fn read_family(path: &Path) -> Result<Vec<BTreeSet<NodeId>>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read family {}", path.display()))?;
    if text.trim_start().starts_with('[') {
        let sets: Vec<Vec<Value>> = serde_json::from_str(&text)
            .with_context(|| format!("invalid family JSON in {}", path.display()))?;
        return sets
            .into_iter()
            .map(|set| {
                set.into_iter()
                    .map(|v| match v {
                        Value::String(s) => Ok(NodeId::new(s)),
                        Value::Number(n) => Ok(NodeId::new(n.to_string())),
                        other => bail!("family label must be a string or integer, found {other}"),
                    })
                    .collect()
            })
            .collect();
    }
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(NodeId::from)
                .collect()
        })
        .collect())
}

pub fn redundancy(ctx: &Context, args: &RedundancyArgs) -> Result<ExitCode> {
    let net = load(&args.net)?;
    let sink = NodeId::from(args.net.sink.trim());
    if !net.contains(&sink) {
        bail!("unknown node `{sink}`");
    }
    let family = if let Some(path) = &args.family {
        read_family(path)?
    } else if let Some(k) = args.k {
        k_subset_family(&net, &sink, k, args.family_cap)
    } else if !args.inputs.is_empty() {
        vec![labels(&args.inputs).into_iter().collect()]
    } else {
        bail!("no input-set family: pass --family FILE, --k N or --inputs");
    };
    let report = average_redundancy(&net, &sink, &family, args.net.dmax)?;
    let config = merge(
        net_echo(&args.net),
        json!({
            "inputs": args.inputs,
            "family": args.family.as_ref().map(|p| p.display().to_string()),
            "k": args.k,
            "family_cap": args.family_cap,
            "format": args.output.format.name(),
        }),
    );

    let text = match args.output.format {
        Format::Json => ctx.envelope("redundancy", &config, None, &report)?,
        Format::Csv => csv_string(|w| {
            w.write_record(["set", "i", "j", "r"])?;
            for (s, entry) in report.family.iter().enumerate() {
                let pairs: BTreeSet<(usize, usize)> =
                    entry.redundant_pairs.iter().copied().collect();
                for i in 0..entry.ft_count {
                    for j in i + 1..entry.ft_count {
                        let r = u8::from(pairs.contains(&(i, j)));
                        w.write_record([
                            s.to_string(),
                            i.to_string(),
                            j.to_string(),
                            r.to_string(),
                        ])?;
                    }
                }
            }
            Ok(())
        })?,
        Format::Dot => bail!("redundancy has no DOT view; use json or csv"),
    };
    let mut out = open_output(args.output.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;

    let mut lines = format!(
        "R = {} ({:.6}) over {} input sets\n",
        report.average,
        report.average_f64,
        report.family.len()
    );
    for entry in report.family.iter().take(20) {
        let inputs: Vec<&str> = entry.inputs.iter().map(NodeId::as_str).collect();
        let _ = writeln!(
            lines,
            "  {{{}}}: {} topologies, {} redundant pairs, value {}",
            inputs.join(", "),
            entry.ft_count,
            entry.redundant_pairs.len(),
            entry.value
        );
    }
    if report.family.len() > 20 {
        let _ = writeln!(lines, "  ... {} more", report.family.len() - 20);
    }
    summary(args.output.out.is_some(), &lines);
    Ok(ExitCode::SUCCESS)
}

pub fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<ExitCode> {
    let q = &args.query;
    let net = load(&q.net)?;
    let query = build_query(&net, &q.net, &q.inputs)?;
    let catalog = enumerate_catalog(&net, &query, q.output.threads, false)?;
    let model = FailureModel::new(
        args.failure.node_fail,
        args.failure.edge_fail,
        args.failure.seed,
    )?;

    let mut kinds: Vec<StrategyArg> = Vec::new();
    for s in &args.strategies {
        if !kinds.contains(s) {
            kinds.push(*s);
        }
    }
    if kinds.is_empty() {
        kinds = vec![
            StrategyArg::Static,
            StrategyArg::Fallback,
            StrategyArg::Pair,
        ];
    }
    let constraint = Constraint {
        max_delay: args.max_delay,
        max_energy: args.max_energy,
    };
    let objective = match args.objective {
        ObjectiveArg::Delay => Objective::Delay,
        ObjectiveArg::Energy => Objective::Energy,
    };
    let strategies: Vec<Strategy> = kinds
        .iter()
        .map(|k| {
            let kind = match k {
                StrategyArg::Static => StrategyKind::StaticSingle,
                StrategyArg::Fallback => StrategyKind::DegenerateFallback,
                StrategyArg::Pair => StrategyKind::RedundantPair,
            };
            Strategy {
                objective,
                ..Strategy::new(kind).with_constraint(constraint)
            }
        })
        .collect();
    let options = SimulationOptions {
        threads: q.output.threads,
        exact_cap: args.exact_cap,
    };
    let report = run_simulation_with(&catalog, &model, &strategies, args.failure.rounds, &options)?;

    let config = merge(
        net_echo(&q.net),
        json!({
            "inputs": q.inputs,
            "node_fail": args.failure.node_fail,
            "edge_fail": args.failure.edge_fail,
            "rounds": args.failure.rounds,
            "strategies": kinds.iter().map(|k| format!("{k:?}").to_lowercase()).collect::<Vec<_>>(),
            "max_delay": args.max_delay,
            "max_energy": args.max_energy,
            "objective": format!("{:?}", args.objective).to_lowercase(),
            "exact_cap": args.exact_cap,
            "format": q.output.format.name(),
        }),
    );

    let text = match q.output.format {
        Format::Json => ctx.envelope("simulate", &config, Some(report.seed), &report)?,
        Format::Csv => csv_string(|w| {
            w.write_record(["strategy", "rounds", "successes", "rate", "ci", "exact"])?;
            for s in &report.strategies {
                w.write_record([
                    s.label.clone(),
                    s.rounds.to_string(),
                    s.successes.to_string(),
                    s.success_rate.to_string(),
                    s.ci95_half_width.to_string(),
                    s.exact.map(|e| e.to_string()).unwrap_or_default(),
                ])?;
            }
            Ok(())
        })?,
        Format::Dot => bail!("simulate has no DOT view; use json or csv"),
    };
    let mut out = open_output(q.output.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;

    let mut lines = format!(
        "{} functional topologies, {}; {} rounds, seed {}\n{}",
        catalog.len(),
        query_line(&query),
        report.rounds,
        report.seed,
        histogram_lines(&report.degeneracy)
    );
    for s in &report.strategies {
        let exact = s
            .exact
            .map(|e| format!(" (exact {e:.6})"))
            .unwrap_or_default();
        let _ = writeln!(
            lines,
            "  {}: {}/{} = {:.6} ± {:.6}{exact}",
            s.label, s.successes, s.rounds, s.success_rate, s.ci95_half_width
        );
        if let Some(w) = &s.warning {
            let _ = writeln!(lines, "    warning: {w}");
        }
    }
    for d in &report.dominance {
        let _ = writeln!(
            lines,
            "  dominance {} <= {}: {} violations",
            d.subset, d.superset, d.violations
        );
    }
    summary(q.output.out.is_some(), &lines);
    Ok(ExitCode::SUCCESS)
}

/// Accepts a bare catalog or an `enumerate` report wrapping one.
fn read_catalog_file(path: &Path) -> Result<FtCatalog> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read catalog {}", path.display()))?;
    let value: Value = serde_json::from_str(&text)
        .with_context(|| format!("invalid JSON in {}", path.display()))?;
    let inner = match value.get("result") {
        Some(r) => r.to_string(),
        None => text,
    };
    read_catalog_json(&inner).with_context(|| format!("invalid catalog in {}", path.display()))
}

pub fn verify(ctx: &Context, args: &VerifyArgs) -> Result<ExitCode> {
    let net = load(&args.net)?;
    let query = build_query(&net, &args.net, &args.inputs)?;
    let candidate = match &args.catalog {
        Some(path) => read_catalog_file(path)?,
        None => enumerate_catalog(&net, &query, 1, false)?,
    };
    let options = VerifyOptions {
        failure: FailureModel::new(args.node_fail, args.edge_fail, args.seed)?,
        rounds: args.rounds,
        max_nodes: args.max_nodes,
        exact_cap: args.exact_cap,
    };
    let report = verify_catalog(&net, &query, &candidate, &options);

    if let Some(path) = &args.out {
        let config = merge(
            net_echo(&args.net),
            json!({
                "inputs": args.inputs,
                "catalog": args.catalog.as_ref().map(|p| p.display().to_string()),
                "node_fail": args.node_fail,
                "edge_fail": args.edge_fail,
                "rounds": args.rounds,
                "max_nodes": args.max_nodes,
                "exact_cap": args.exact_cap,
            }),
        );
        let mut out = open_output(Some(path))?;
        out.write_all(
            ctx.envelope("verify", &config, Some(args.seed), &report)?
                .as_bytes(),
        )?;
        out.flush()?;
    }

    println!("{}", query_line(&query));
    for c in &report.checks {
        let tag = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        };
        println!("{tag} {}: {}", c.name, c.detail);
    }
    if let Some(cx) = &report.counterexample {
        println!("counterexample: {cx}");
    }
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

pub fn bell(ctx: &Context, args: &BellArgs) -> Result<ExitCode> {
    let values: Vec<String> = (0..=args.n).map(|n| bell_number(n).to_string()).collect();
    let text = match args.format {
        Format::Json => {
            // numbers while they fit in u64, strings beyond
            let rows: Vec<Value> = values
                .iter()
                .enumerate()
                .map(|(n, b)| {
                    let bell = b
                        .parse::<u64>()
                        .map_or_else(|_| Value::from(b.as_str()), Value::from);
                    json!({ "n": n, "bell": bell })
                })
                .collect();
            let config = json!({ "n": args.n, "format": "json" });
            ctx.envelope("bell", &config, None, &rows)?
        }
        Format::Csv => csv_string(|w| {
            w.write_record(["n", "bell"])?;
            for (n, b) in values.iter().enumerate() {
                w.write_record([n.to_string(), b.clone()])?;
            }
            Ok(())
        })?,
        Format::Dot => bail!("bell has no DOT view; use json or csv"),
    };
    let mut out = open_output(args.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    let mut lines = String::new();
    for (n, b) in values.iter().enumerate() {
        let _ = writeln!(lines, "B_{n} = {b}");
    }
    summary(args.out.is_some(), &lines);
    Ok(ExitCode::SUCCESS)
}
