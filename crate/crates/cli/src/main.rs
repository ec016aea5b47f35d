mod args;

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{
    ChainRuleArgs, Cli, Command, CorpusArgs, DecomposeArgs, DistFormat, KellyArgs, LatticeArgs,
    OutputFormat, Source, VerifyArgs,
};
use ppid_core::decomposition::{verify_target_chain_rule, AtomTable, ChainRuleReport};
use ppid_core::distribution::parse_probability;
use ppid_core::io::{load_distribution, write_json, write_tsv, Format};
use ppid_core::kelly::{wire_indices, RaceMarket, TrajectorySummary};
use ppid_core::report::{self, clean};
use ppid_core::verify::run_suite;
use ppid_core::{
    corpus, decompose, DecomposeOptions, Error, JointDistribution, LogBase, RedundancyLattice,
    TargetView,
};

/// Exit status when a checked property does not hold.
const PROPERTY_FAILED: u8 = 1;
const USAGE_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut buf = Vec::new();
    let status = match run(&cli.command, &mut buf) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(&buf)),
        None => io::stdout().lock().write_all(&buf),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(USAGE_ERROR);
    }
    ExitCode::from(status)
}

fn run(command: &Command, out: &mut Vec<u8>) -> Result<u8, Error> {
    match command {
        Command::Decompose(a) => cmd_decompose(a, out).map(|_| 0),
        Command::Lattice(a) => cmd_lattice(a, out).map(|_| 0),
        Command::Chainrule(a) => cmd_chainrule(a, out),
        Command::Corpus(a) => cmd_corpus(a, out).map(|_| 0),
        Command::Kelly(a) => cmd_kelly(a, out).map(|_| 0),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn epsilon(text: &Option<String>) -> Result<Option<ppid_core::Probability>, Error> {
    text.as_deref()
        .map(|t| parse_probability(t).map(|(p, _)| p))
        .transpose()
}

fn load(source: &Source) -> Result<JointDistribution, Error> {
    if let Some(name) = &source.corpus {
        return corpus::build(name, epsilon(&source.epsilon)?.as_ref());
    }
    if source.epsilon.is_some() {
        return Err(Error::OutOfRange(
            "--epsilon applies to --corpus rdnerr".into(),
        ));
    }
    let path = source.input.as_deref().ok_or(Error::EmptySelection)?;
    let format = match source.input_format {
        Some(DistFormat::Json) => Format::Json,
        Some(DistFormat::Tsv) => Format::Tsv,
        None if path.extension().is_some_and(|e| e == "json") => Format::Json,
        None => Format::Tsv,
    };
    let dist = if path == Path::new("-") {
        let mut text = Vec::new();
        io::stdin().read_to_end(&mut text)?;
        load_distribution(text.as_slice(), format)?
    } else {
        load_distribution(File::open(path)?, format)?
    };
    for w in dist.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(dist)
}

fn check_tol(tol: f64) -> Result<(), Error> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "tolerance {tol} must be positive"
        )))
    }
}

fn check_cap(dist: &JointDistribution, cap: usize) -> Result<(), Error> {
    if dist.n() > cap {
        return Err(Error::LatticeCap { n: dist.n(), cap });
    }
    Ok(())
}

fn component_list(dist: &JointDistribution, text: &str, sep: char) -> Result<Vec<usize>, Error> {
    let target = dist.schema().require_target()?;
    let comps = target.components();
    text.split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            target
                .component_index(name)
                .or_else(|| {
                    name.parse::<usize>()
                        .ok()
                        .filter(|&j| j >= 1 && j <= comps.len())
                        .map(|j| j - 1)
                })
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        })
        .collect()
}

fn target_view(dist: &JointDistribution, text: &str) -> Result<TargetView, Error> {
    let (about, given) = match text.split_once('|') {
        Some((a, g)) => (a, Some(g)),
        None => (text, None),
    };
    let about = component_list(dist, about, ',')?;
    if about.is_empty() {
        return Err(Error::EmptySelection);
    }
    let given = match given {
        Some(g) => component_list(dist, g, ',')?,
        None => Vec::new(),
    };
    Ok(TargetView::about(&about).given(&given))
}

fn options(base: f64, cap: usize, jobs: usize) -> Result<DecomposeOptions, Error> {
    Ok(DecomposeOptions {
        base: LogBase::new(base)?,
        cap,
        jobs: jobs.max(1),
        view: None,
    })
}

fn cmd_decompose(a: &DecomposeArgs, out: &mut Vec<u8>) -> Result<(), Error> {
    let dist = load(&a.source)?;
    check_cap(&dist, a.cap)?;
    let mut opts = options(a.base, a.cap, a.jobs)?;
    if let Some(t) = &a.targets {
        opts.view = Some(target_view(&dist, t)?);
    }
    let table = decompose(&dist, &opts)?;
    let (pointwise, average) = match (a.pointwise, a.average) {
        (false, false) => (true, true),
        other => other,
    };
    match a.format {
        OutputFormat::Csv => {
            let average_only = a.average && !a.pointwise;
            if !average_only {
                report::write_pointwise_csv(&table, &mut *out)?;
            }
            if a.average {
                if !average_only {
                    writeln!(out)?;
                }
                report::write_average_csv(&table, &mut *out)?;
            }
        }
        OutputFormat::Json => report::write_json(&table, pointwise, average, &mut *out)?,
        OutputFormat::Pretty => report::write_pretty(&table, pointwise, average, &mut *out)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct LatticeJson {
    n: usize,
    nodes: Vec<String>,
    covers: Vec<(String, String)>,
}

fn cmd_lattice(a: &LatticeArgs, out: &mut Vec<u8>) -> Result<(), Error> {
    let lattice = RedundancyLattice::with_cap(a.n, a.cap)?;
    let name = |i: usize| lattice.node(i).to_string();
    match a.format {
        OutputFormat::Pretty => out.extend_from_slice(lattice.render().as_bytes()),
        OutputFormat::Csv => {
            writeln!(out, "lower,upper")?;
            for (lo, hi) in lattice.cover_edges() {
                writeln!(out, "{},{}", name(lo), name(hi))?;
            }
        }
        OutputFormat::Json => {
            let doc = LatticeJson {
                n: a.n,
                nodes: (0..lattice.len()).map(name).collect(),
                covers: lattice
                    .cover_edges()
                    .into_iter()
                    .map(|(lo, hi)| (name(lo), name(hi)))
                    .collect(),
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct NodeAverage {
    node: String,
    atom: String,
    pi: f64,
}

fn averages(table: &AtomTable) -> Vec<NodeAverage> {
    table
        .averages()
        .iter()
        .enumerate()
        .map(|(i, a)| NodeAverage {
            node: table.nodes()[i].to_string(),
            atom: table.atom_name(i),
            pi: clean(a.pi),
        })
        .collect()
}

#[derive(Serialize)]
struct ChainRuleJson<'a> {
    first: String,
    second: String,
    tolerance: f64,
    passed: bool,
    max_forward_residual: f64,
    max_reverse_residual: f64,
    averages: Vec<(&'static str, String, Vec<NodeAverage>)>,
    entries: &'a [ppid_core::decomposition::ChainRuleEntry],
}

fn cmd_chainrule(a: &ChainRuleArgs, out: &mut Vec<u8>) -> Result<u8, Error> {
    check_tol(a.tol)?;
    let dist = load(&a.source)?;
    check_cap(&dist, a.cap)?;
    let groups: Vec<&str> = a.targets.split(',').map(str::trim).collect();
    let [first, second] = groups.as_slice() else {
        return Err(Error::OutOfRange(format!(
            "--targets needs two groups, got `{}`",
            a.targets
        )));
    };
    let first_idx = component_list(&dist, first, '+')?;
    let second_idx = component_list(&dist, second, '+')?;
    let report = verify_target_chain_rule(
        &dist,
        &first_idx,
        &second_idx,
        &options(a.base, a.cap, a.jobs)?,
    )?;
    let passed = report.max_residual() <= a.tol;
    write_chain_rule(&report, first, second, a, passed, out)?;
    Ok(if passed { 0 } else { PROPERTY_FAILED })
}

fn write_chain_rule(
    report: &ChainRuleReport,
    first: &str,
    second: &str,
    a: &ChainRuleArgs,
    passed: bool,
    out: &mut Vec<u8>,
) -> Result<(), Error> {
    match a.format {
        OutputFormat::Json => {
            let doc = ChainRuleJson {
                first: first.to_string(),
                second: second.to_string(),
                tolerance: a.tol,
                passed,
                max_forward_residual: clean(report.max_forward_residual),
                max_reverse_residual: clean(report.max_reverse_residual),
                averages: report
                    .tables()
                    .into_iter()
                    .map(|(term, t)| (term, t.view().describe(t.schema()), averages(t)))
                    .collect(),
                entries: &report.entries,
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(
                out,
                "realisation,node,joint,first,second_given_first,second,first_given_second,forward_residual,reverse_residual"
            )?;
            for e in &report.entries {
                let v = [
                    e.joint,
                    e.first,
                    e.second_given_first,
                    e.second,
                    e.first_given_second,
                    e.forward_residual(),
                    e.reverse_residual(),
                ]
                .map(|x| clean(x).to_string());
                writeln!(out, "{},{},{}", e.realisation, e.node, v.join(","))?;
            }
        }
        OutputFormat::Pretty => {
            writeln!(
                out,
                "chain rule {first} then {second}: {}",
                if passed { "holds" } else { "VIOLATED" }
            )?;
            writeln!(
                out,
                "  max residual ({first} first)  {:e}",
                report.max_forward_residual
            )?;
            writeln!(
                out,
                "  max residual ({second} first)  {:e}",
                report.max_reverse_residual
            )?;
            for (_, t) in report.tables() {
                let cells: Vec<String> = averages(t)
                    .iter()
                    .filter(|n| n.pi != 0.0)
                    .map(|n| format!("{}={}", n.atom, n.pi))
                    .collect();
                writeln!(
                    out,
                    "  {:<12} {}",
                    t.view().describe(t.schema()),
                    cells.join(" ")
                )?;
            }
        }
    }
    Ok(())
}

fn cmd_corpus(a: &CorpusArgs, out: &mut Vec<u8>) -> Result<(), Error> {
    let dist = corpus::build(&a.name, epsilon(&a.epsilon)?.as_ref())?;
    match a.format {
        DistFormat::Tsv => write_tsv(&dist, &mut *out)?,
        DistFormat::Json => {
            write_json(&dist, &mut *out)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct KellyJson {
    wire: Vec<String>,
    rng: &'static str,
    seed: u64,
    races: usize,
    analytic_rate: f64,
    empirical_rate: f64,
    side_information_value: Option<f64>,
    trajectory_summary: TrajectorySummary,
}

fn cmd_kelly(a: &KellyArgs, out: &mut Vec<u8>) -> Result<(), Error> {
    let dist = load(&a.source)?;
    let names: Vec<&str> = a
        .wire
        .as_deref()
        .map(|w| {
            w.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect()
        })
        .unwrap_or_default();
    let wire = wire_indices(&dist, &names)?;
    let market = RaceMarket::fair(dist, &wire)?;
    let sim = market.simulate_races(a.races, a.seed)?;
    let side = if market.wire().is_empty() {
        None
    } else {
        Some(clean(market.value_of_side_information()?.value))
    };
    let doc = KellyJson {
        wire: market
            .wire()
            .iter()
            .map(|&i| market.dist().schema().predictors()[i].name.clone())
            .collect(),
        rng: sim.algorithm,
        seed: sim.seed,
        races: sim.races,
        analytic_rate: clean(sim.analytic_rate),
        empirical_rate: clean(sim.empirical_rate),
        side_information_value: side,
        trajectory_summary: sim.summary(),
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, out: &mut Vec<u8>) -> Result<u8, Error> {
    check_tol(a.tol)?;
    let dist = load(&a.source)?;
    check_cap(&dist, a.cap)?;
    let checks = run_suite(&dist, &options(2.0, a.cap, a.jobs)?, a.tol)?;
    match a.format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &checks)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "property,passed,max_violation,cases")?;
            for c in &checks {
                writeln!(
                    out,
                    "{},{},{},{}",
                    c.name,
                    c.passed,
                    clean(c.max_violation),
                    c.cases
                )?;
            }
        }
        OutputFormat::Pretty => {
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                writeln!(
                    out,
                    "{status} {:<24} cases {:>6}  max deviation {:.1e}",
                    c.name,
                    c.cases,
                    clean(c.max_violation)
                )?;
            }
        }
    }
    Ok(if checks.iter().all(|c| c.passed) {
        0
    } else {
        PROPERTY_FAILED
    })
}
