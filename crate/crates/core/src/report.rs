//! CSV, JSON and plain-text renderings of an [`AtomTable`].
//!
//! Pointwise CSV columns, in order: `p`, one column per predictor, the target,
//! `node`, `r_plus`, `r_minus`, `pi_plus`, `pi_minus`, `pi`. The averaged CSV
//! is one header and one row of `Π` values, headed `R,U1,U2,C` for two
//! predictors and by node notation otherwise.

use std::io::Write;

use serde::Serialize;

use crate::decomposition::{AtomTable, BivariateAtoms, NodeAtoms};
use crate::distribution::MassMode;
use crate::error::Result;

/// Collapses `-0.0` so equal tables print identically.
pub fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn num(x: f64) -> String {
    clean(x).to_string()
}

fn csv_error(e: csv::Error) -> crate::error::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => std::io::Error::other(format!("{other:?}")).into(),
    }
}

pub fn pointwise_header(table: &AtomTable) -> Vec<String> {
    let mut h = vec!["p".to_string()];
    h.extend(table.schema().predictors().iter().map(|v| v.name.clone()));
    h.push(table.view().describe(table.schema()));
    h.extend(
        ["node", "r_plus", "r_minus", "pi_plus", "pi_minus", "pi"]
            .iter()
            .map(|s| s.to_string()),
    );
    h
}

pub fn write_pointwise_csv(table: &AtomTable, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(pointwise_header(table)).map_err(csv_error)?;
    for ra in table.realisations() {
        let mut lead = vec![ra.realisation.probability().to_string()];
        lead.extend(table.schema().row_labels(ra.realisation.row()));
        for (node, a) in table.nodes().iter().zip(&ra.atoms) {
            let mut rec = lead.clone();
            rec.push(node.to_string());
            rec.extend([a.r_plus, a.r_minus, a.pi_plus, a.pi_minus, a.pi].map(num));
            w.write_record(rec).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_average_csv(table: &AtomTable, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = (0..table.nodes().len())
        .map(|i| table.atom_name(i))
        .collect();
    w.write_record(header).map_err(csv_error)?;
    w.write_record(table.averages().iter().map(|a| num(a.pi)))
        .map_err(csv_error)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonAtoms {
    node: String,
    r_plus: f64,
    r_minus: f64,
    pi_plus: f64,
    pi_minus: f64,
    pi: f64,
}

impl JsonAtoms {
    fn new(node: String, a: &NodeAtoms) -> Self {
        Self {
            node,
            r_plus: clean(a.r_plus),
            r_minus: clean(a.r_minus),
            pi_plus: clean(a.pi_plus),
            pi_minus: clean(a.pi_minus),
            pi: clean(a.pi),
        }
    }
}

#[derive(Serialize)]
struct JsonRealisation {
    p: String,
    outcome: Vec<String>,
    atoms: Vec<JsonAtoms>,
}

#[derive(Serialize)]
struct JsonSummary {
    averages: Vec<JsonAtoms>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bivariate: Option<JsonBivariate>,
    total: f64,
}

#[derive(Serialize)]
struct JsonBivariate {
    #[serde(rename = "R")]
    r: f64,
    #[serde(rename = "U1")]
    u1: f64,
    #[serde(rename = "U2")]
    u2: f64,
    #[serde(rename = "C")]
    c: f64,
}

impl From<BivariateAtoms> for JsonBivariate {
    fn from(b: BivariateAtoms) -> Self {
        Self {
            r: clean(b.redundant),
            u1: clean(b.unique1),
            u2: clean(b.unique2),
            c: clean(b.complementary),
        }
    }
}

#[derive(Serialize)]
struct JsonTable {
    base: f64,
    mode: MassMode,
    target: String,
    predictors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    realisations: Option<Vec<JsonRealisation>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<JsonSummary>,
}

/// JSON nested by realisation then node, followed by a summary of averages.
pub fn write_json(
    table: &AtomTable,
    pointwise: bool,
    average: bool,
    out: impl Write,
) -> Result<()> {
    let names = |i: usize| table.nodes()[i].to_string();
    let realisations = pointwise.then(|| {
        table
            .realisations()
            .iter()
            .map(|ra| JsonRealisation {
                p: ra.realisation.probability().to_string(),
                outcome: table.schema().row_labels(ra.realisation.row()),
                atoms: ra
                    .atoms
                    .iter()
                    .enumerate()
                    .map(|(i, a)| JsonAtoms::new(names(i), a))
                    .collect(),
            })
            .collect()
    });
    let summary = average.then(|| JsonSummary {
        averages: table
            .averages()
            .iter()
            .enumerate()
            .map(|(i, a)| JsonAtoms::new(names(i), a))
            .collect(),
        bivariate: table.bivariate().map(JsonBivariate::from),
        total: clean(table.total()),
    });
    let doc = JsonTable {
        base: table.base().value(),
        mode: table.mode(),
        target: table.view().describe(table.schema()),
        predictors: table
            .schema()
            .predictors()
            .iter()
            .map(|v| v.name.clone())
            .collect(),
        realisations,
        summary,
    };
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}

/// Aligned text tables for reading at a terminal.
pub fn write_pretty(
    table: &AtomTable,
    pointwise: bool,
    average: bool,
    mut out: impl Write,
) -> Result<()> {
    let f = |x: f64| format!("{:>9.4}", clean(x));
    let width = table
        .nodes()
        .iter()
        .map(|n| n.to_string().len())
        .max()
        .unwrap_or(4)
        .max(4);
    let head = format!(
        "  {:<width$} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "node", "r+", "r-", "π+", "π-", "π"
    );
    writeln!(out, "target: {}", table.view().describe(table.schema()))?;
    if pointwise {
        for ra in table.realisations() {
            let labels = table.schema().row_labels(ra.realisation.row()).join(" ");
            writeln!(out, "\np = {}  ({labels})", ra.realisation.probability())?;
            writeln!(out, "{head}")?;
            for (node, a) in table.nodes().iter().zip(&ra.atoms) {
                writeln!(
                    out,
                    "  {:<width$} {} {} {} {} {}",
                    node.to_string(),
                    f(a.r_plus),
                    f(a.r_minus),
                    f(a.pi_plus),
                    f(a.pi_minus),
                    f(a.pi)
                )?;
            }
        }
    }
    if average {
        writeln!(out, "\naverage")?;
        writeln!(out, "{head}")?;
        for (i, (node, a)) in table.nodes().iter().zip(table.averages()).enumerate() {
            let label = if table.lattice().n() == 2 {
                format!("{} {}", table.atom_name(i), node)
            } else {
                node.to_string()
            };
            writeln!(
                out,
                "  {:<width$} {} {} {} {} {}",
                label,
                f(a.r_plus),
                f(a.r_minus),
                f(a.pi_plus),
                f(a.pi_minus),
                f(a.pi),
                width = width + 3
            )?;
        }
        writeln!(out, "  total {}", f(table.total()))?;
    }
    Ok(())
}
