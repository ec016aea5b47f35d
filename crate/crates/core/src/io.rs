//! Text formats for joint distributions.
//!
//! TSV: an optional header `#p<TAB>s1<TAB>...<TAB>sn<TAB>t`, then one row per
//! outcome: probability (`1/4` or `0.25`), one label per predictor, and the
//! target label. Composite target labels are comma-joined component labels;
//! a header target column such as `t1,t2,t3` names the components. Rows
//! without tabs are split on whitespace. Other `#` lines are comments.
//!
//! JSON: `{"schema": {...}, "mass": [{"outcome": [...], "p": "1/4"}]}`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::distribution::{
    parse_probability, DistributionBuilder, JointDistribution, MassMode, Probability, TargetSchema,
    Variable, VariableSchema,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Tsv,
    Json,
}

pub fn load_distribution(mut source: impl Read, format: Format) -> Result<JointDistribution> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    match format {
        Format::Tsv => parse_tsv(&text),
        Format::Json => parse_json(&text),
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

pub fn parse_tsv(text: &str) -> Result<JointDistribution> {
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<(usize, Probability, Vec<String>)> = Vec::new();
    let mut decimal = false;
    let mut width: Option<usize> = None;
    let mut components: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let fields = split_fields(rest);
            if header.is_none() && rows.is_empty() && fields.first() == Some(&"p") {
                header = Some(fields[1..].iter().map(|s| s.to_string()).collect());
            }
            continue;
        }
        let fields = split_fields(line);
        if fields.len() < 2 {
            return Err(Error::Malformed {
                line: line_no,
                message: "expected a probability followed by labels".into(),
            });
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(Error::ColumnCount {
                    line: line_no,
                    expected: w,
                    found: fields.len(),
                })
            }
            _ => {}
        }
        let (p, is_decimal) = parse_probability(fields[0]).map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        decimal |= is_decimal;
        let target: Vec<&str> = fields[fields.len() - 1].split(',').collect();
        match components {
            None => components = Some(target.len()),
            Some(m) if m != target.len() => {
                return Err(Error::Malformed {
                    line: line_no,
                    message: format!("target has {} components, expected {m}", target.len()),
                })
            }
            _ => {}
        }
        let mut labels: Vec<String> = fields[1..fields.len() - 1]
            .iter()
            .map(|s| s.to_string())
            .collect();
        labels.extend(target.iter().map(|s| s.trim().to_string()));
        rows.push((line_no, p, labels));
    }

    let width = width.ok_or_else(|| Error::Malformed {
        line: 0,
        message: "no data rows".into(),
    })?;
    let n = width - 2;
    let m = components.unwrap_or(1);
    let (predictor_names, target_name, component_names) = match header {
        Some(h) => {
            if h.len() != n + 1 {
                return Err(Error::ColumnCount {
                    line: 1,
                    expected: width,
                    found: h.len() + 1,
                });
            }
            let target = h[n].clone();
            let parts: Vec<String> = target.split(',').map(|s| s.trim().to_string()).collect();
            let comps = if m > 1 {
                if parts.len() == m {
                    Some(parts)
                } else {
                    Some((1..=m).map(|j| format!("{target}{j}")).collect())
                }
            } else {
                None
            };
            (h[..n].to_vec(), target, comps)
        }
        None => {
            let comps = (m > 1).then(|| (1..=m).map(|j| format!("t{j}")).collect());
            (
                (1..=n).map(|i| format!("s{i}")).collect(),
                "t".to_string(),
                comps,
            )
        }
    };
    let names: Vec<&str> = predictor_names.iter().map(String::as_str).collect();
    let mut builder = DistributionBuilder::new(&names, &target_name);
    if let Some(c) = &component_names {
        let c: Vec<&str> = c.iter().map(String::as_str).collect();
        builder = builder.composite(&c);
    }
    builder = builder.mode(if decimal {
        MassMode::Decimal
    } else {
        MassMode::Rational
    });
    for (_, p, labels) in rows {
        builder.push(p, labels);
    }
    builder.build()
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonDocument {
    schema: JsonSchema,
    mass: Vec<JsonMass>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonSchema {
    predictors: Vec<Variable>,
    target: JsonTarget,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonTarget {
    name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    components: Option<Vec<Variable>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonMass {
    outcome: Vec<String>,
    p: JsonProbability,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonProbability {
    Text(String),
    Number(f64),
}

pub fn parse_json(text: &str) -> Result<JointDistribution> {
    let doc: JsonDocument = serde_json::from_str(text)?;
    let target = match doc.schema.target.components {
        Some(comps) => TargetSchema::composite(doc.schema.target.name, comps),
        None => TargetSchema::simple(Variable::new(
            doc.schema.target.name,
            doc.schema.target.alphabet,
        )),
    };
    let schema = VariableSchema::new(doc.schema.predictors, Some(target))?;
    let n = schema.n();
    let target = schema.target().expect("target");
    let mut decimal = false;
    let mut rows = Vec::with_capacity(doc.mass.len());
    for (k, entry) in doc.mass.iter().enumerate() {
        let line = k + 1;
        if entry.outcome.len() != n + 1 {
            return Err(Error::ColumnCount {
                line,
                expected: n + 1,
                found: entry.outcome.len(),
            });
        }
        let (p, is_decimal) = match &entry.p {
            JsonProbability::Text(s) => parse_probability(s)?,
            JsonProbability::Number(x) => parse_probability(&x.to_string())?,
        };
        decimal |= is_decimal || matches!(entry.p, JsonProbability::Number(_));
        let mut row = Vec::with_capacity(schema.atom_count());
        for (i, label) in entry.outcome[..n].iter().enumerate() {
            let var = &schema.predictors()[i];
            row.push(var.index_of(label).ok_or_else(|| Error::UnknownLabel {
                variable: var.name.clone(),
                label: label.clone(),
            })?);
        }
        row.extend(target.parse_label(&entry.outcome[n])?);
        rows.push((row, p));
    }
    let mode = if decimal {
        MassMode::Decimal
    } else {
        MassMode::Rational
    };
    JointDistribution::new(schema, rows, mode)
}

fn target_header(dist: &JointDistribution) -> String {
    let t = dist.schema().target().expect("target");
    if t.is_composite() {
        t.components()
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    } else {
        t.name().to_string()
    }
}

pub fn write_tsv(dist: &JointDistribution, mut out: impl Write) -> Result<()> {
    dist.schema().require_target()?;
    let mut header = vec!["#p".to_string()];
    header.extend(dist.schema().predictors().iter().map(|p| p.name.clone()));
    header.push(target_header(dist));
    writeln!(out, "{}", header.join("\t"))?;
    for r in dist.realisations() {
        let mut fields = vec![r.probability().to_string()];
        fields.extend(dist.schema().row_labels(r.row()));
        writeln!(out, "{}", fields.join("\t"))?;
    }
    Ok(())
}

pub fn write_json(dist: &JointDistribution, out: impl Write) -> Result<()> {
    let target = dist.schema().require_target()?;
    let doc = JsonDocument {
        schema: JsonSchema {
            predictors: dist.schema().predictors().to_vec(),
            target: JsonTarget {
                name: target.name().to_string(),
                alphabet: if target.is_composite() {
                    Vec::new()
                } else {
                    target.alphabet()
                },
                components: target.is_composite().then(|| target.components().to_vec()),
            },
        },
        mass: dist
            .realisations()
            .iter()
            .map(|r| JsonMass {
                outcome: dist.schema().row_labels(r.row()),
                p: JsonProbability::Text(r.probability().to_string()),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(out, &doc)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::ratio;

    #[test]
    fn xor_tsv() {
        let text = "#p\ts1\ts2\tt\n1/4\t0\t0\t0\n1/4\t0\t1\t1\n1/4\t1\t0\t1\n1/4\t1\t1\t0\n";
        let d = parse_tsv(text).unwrap();
        assert_eq!(d.support_size(), 4);
        assert_eq!(d.n(), 2);
        assert_eq!(d.mode(), MassMode::Rational);
    }

    #[test]
    fn whitespace_rows_and_default_names() {
        let d = parse_tsv("1 0 0\n").unwrap();
        assert_eq!(d.support_size(), 1);
        assert_eq!(d.schema().predictors()[0].name, "s1");
        assert_eq!(d.schema().target().unwrap().name(), "t");
    }

    #[test]
    fn duplicates_merge() {
        let d = parse_tsv("1/8 0 0 0\n1/8 0 0 0\n3/4 1 1 1\n").unwrap();
        assert_eq!(d.support_size(), 2);
        assert_eq!(d.realisations()[0].probability(), &ratio(1, 4));
        assert_eq!(d.warnings().len(), 1);
    }

    #[test]
    fn decimal_mode() {
        let d = parse_tsv("0.5 0 0\n0.5 1 1\n").unwrap();
        assert_eq!(d.mode(), MassMode::Decimal);
        assert!(parse_tsv("0.5 0 0\n0.4 1 1\n").is_err());
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(
            parse_tsv("1/2 0 0\n1/2 1\n"),
            Err(Error::ColumnCount { line: 2, .. })
        ));
        assert!(matches!(
            parse_tsv("x 0 0\n"),
            Err(Error::Malformed { line: 1, .. })
        ));
        assert!(parse_tsv("").is_err());
    }

    #[test]
    fn composite_header() {
        let text = "#p\ts1\tt1,t2\n1/2\t0\t0,0\n1/2\t1\t1,0\n";
        let d = parse_tsv(text).unwrap();
        let t = d.schema().target().unwrap();
        assert!(t.is_composite());
        assert_eq!(t.components()[1].name, "t2");
    }

    #[test]
    fn json_round_trip() {
        let d = parse_tsv("#p\ts1\tt1,t2\n1/2\t0\t0,0\n1/2\t1\t1,0\n").unwrap();
        let mut buf = Vec::new();
        write_json(&d, &mut buf).unwrap();
        let back = parse_json(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert!(back.same_distribution(&d));
    }

    #[test]
    fn json_numbers_are_decimal() {
        let text = r#"{"schema":{"predictors":[{"name":"s1","alphabet":["0","1"]}],
            "target":{"name":"t","alphabet":["0","1"]}},
            "mass":[{"outcome":["0","0"],"p":0.25},{"outcome":["1","1"],"p":"3/4"}]}"#;
        let d = parse_json(text).unwrap();
        assert_eq!(d.mode(), MassMode::Decimal);
        assert_eq!(d.support_size(), 2);
    }
}
