//! Edge-list instance files and budget files.
//!
//! Two instance schemas are accepted, chosen by the header:
//!
//! * `s,t,alpha,beta`: posterior counts including the +1 prior;
//! * `s,t,x_hat,n`: an estimated failure rate and an observation count, from
//!   which `alpha = 1 + round(x_hat n)` and `beta = 1 + n - round(x_hat n)`.
//!
//! Channel and customer names are indexed in order of first appearance.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use robust_alloc::{Edge, InfluenceInstance};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Counts,
    Estimate,
}

impl Schema {
    pub fn header(self) -> [&'static str; 4] {
        match self {
            Schema::Counts => ["s", "t", "alpha", "beta"],
            Schema::Estimate => ["s", "t", "x_hat", "n"],
        }
    }
}

pub fn parse_instance(path: &Path) -> Result<InfluenceInstance, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_instance_reader(file, &path.display().to_string())
}

pub fn parse_instance_str(text: &str) -> Result<InfluenceInstance, CliError> {
    parse_instance_reader(text.as_bytes(), "<input>")
}

struct Names {
    index: HashMap<String, usize>,
    names: Vec<String>,
}

impl Names {
    fn new() -> Self {
        Names {
            index: HashMap::new(),
            names: Vec::new(),
        }
    }

    fn id(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }
}

pub fn parse_instance_reader<R: Read>(reader: R, source_name: &str) -> Result<InfluenceInstance, CliError> {
    let err = |line: u64, msg: String| CliError::Parse {
        source_name: source_name.to_string(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| err(1, e.to_string()))?,
        None => return Err(err(1, "missing header".into())),
    };
    let fields: Vec<&str> = header.iter().collect();
    let schema = [Schema::Counts, Schema::Estimate]
        .into_iter()
        .find(|s| fields == s.header())
        .ok_or_else(|| {
            err(
                1,
                format!(
                    "unknown header `{}`; expected `s,t,alpha,beta` or `s,t,x_hat,n`",
                    fields.join(",")
                ),
            )
        })?;

    let (mut channels, mut customers) = (Names::new(), Names::new());
    let mut edges = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != 4 {
            return Err(err(line, format!("expected 4 fields, found {}", rec.len())));
        }
        let num = |k: usize| -> Result<f64, CliError> {
            let v: f64 = rec[k].parse().map_err(|_| {
                err(
                    line,
                    format!("field `{}` is not a number: `{}`", schema.header()[k], &rec[k]),
                )
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(line, format!("field `{}` is not finite", schema.header()[k])))
            }
        };
        if rec[0].is_empty() || rec[1].is_empty() {
            return Err(err(line, "empty channel or customer name".into()));
        }
        let (a, b) = (num(2)?, num(3)?);
        let s = channels.id(&rec[0]);
        let t = customers.id(&rec[1]);
        let edge = match schema {
            Schema::Counts => {
                if !(a >= 1.0 && b >= 1.0) {
                    return Err(err(line, format!("alpha and beta must be >= 1, got ({a}, {b})")));
                }
                Edge::from_counts(s, t, a, b)
            }
            Schema::Estimate => {
                if !(0.0..=1.0).contains(&a) {
                    return Err(err(line, format!("x_hat must lie in [0, 1], got {a}")));
                }
                if b < 0.0 {
                    return Err(err(line, format!("n must be >= 0, got {b}")));
                }
                Edge::from_estimate(s, t, a, b)
            }
        };
        edges.push(edge);
    }
    Ok(InfluenceInstance::new(channels.names, customers.names, edges)?)
}

/// Writes `inst` so that [`parse_instance`] reproduces it exactly.
pub fn write_instance(path: &Path, inst: &InfluenceInstance, schema: Schema) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    let wrap = |e| CliError::csv(path, e);
    w.write_record(schema.header()).map_err(wrap)?;
    for e in inst.edges() {
        let (a, b) = match schema {
            Schema::Counts => (e.alpha, e.beta),
            Schema::Estimate => (e.x_hat, e.n),
        };
        w.write_record([
            inst.channels()[e.channel].as_str(),
            inst.customers()[e.customer].as_str(),
            &a.to_string(),
            &b.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads a `channel,y` file. Channels missing from the file get zero.
pub fn read_budget(path: &Path, inst: &InfluenceInstance) -> Result<Vec<f64>, CliError> {
    let name = path.display().to_string();
    let err = |line: u64, msg: String| CliError::Parse {
        source_name: name.clone(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::csv(path, e))?;
    let header = rdr.headers().map_err(|e| CliError::csv(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != ["channel", "y"] {
        return Err(err(1, "expected header `channel,y`".into()));
    }
    let index: HashMap<&str, usize> = inst
        .channels()
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let mut y = vec![0.0; inst.num_channels()];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 2 {
            return Err(err(line, format!("expected 2 fields, found {}", rec.len())));
        }
        let &i = index
            .get(&rec[0])
            .ok_or_else(|| err(line, format!("unknown channel `{}`", &rec[0])))?;
        y[i] = rec[1]
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| err(line, format!("budget must be a finite number >= 0, got `{}`", &rec[1])))?;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_schema() {
        let inst = parse_instance_str("s,t,alpha,beta\na,u,3,2").unwrap();
        assert_eq!(inst.num_channels(), 1);
        assert_eq!(inst.num_customers(), 1);
        assert!((inst.x_hat()[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn estimate_schema_reconstructs_counts() {
        let inst = parse_instance_str("s,t,x_hat,n\na,u,0.25,10\nb,u,0.5,0\n").unwrap();
        let e = &inst.edges()[0];
        assert_eq!((e.alpha, e.beta, e.x_hat), (4.0, 8.0, 0.25));
        let e = &inst.edges()[1];
        assert_eq!((e.alpha, e.beta), (1.0, 1.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_instance_str("s,t,alpha,beta\na,u,3,2\nb,u,x,2\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 3, .. }), "{e}");
        let e = parse_instance_str("s,t,alpha,beta\na,u,3\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 2, .. }), "{e}");
        let e = parse_instance_str("a,b,c,d\n").unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 1, .. }), "{e}");
    }

    #[test]
    fn empty_and_duplicate_edges_are_validation_errors() {
        assert!(matches!(
            parse_instance_str("s,t,alpha,beta\n"),
            Err(CliError::Solver(_))
        ));
        let e = parse_instance_str("s,t,alpha,beta\na,u,3,2\na,u,1,1\n").unwrap_err();
        assert!(matches!(e, CliError::Solver(_)));
        assert!(e.to_string().contains("duplicate"));
    }
}
