//! Text formats: CSV instances, CSV marginals and JSON result documents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{format_rational, parse_rational, Matrix, MixResult, Rational};
use crate::varbounds::DiscreteMarginal;

/// Reads `key=value` pairs from a `# k1=v1 k2=v2` header line.
fn header_fields(line: &str) -> Vec<(&str, &str)> {
    line.trim_start_matches('#')
        .split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .collect()
}

fn header_usize(fields: &[(&str, &str)], key: &str) -> Result<Option<usize>> {
    fields
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| {
            v.parse()
                .map_err(|_| Error::Parse(format!("header field {key}={v} is not a count")))
        })
        .transpose()
}

type Table<'a> = (Vec<Vec<Rational>>, Vec<(&'a str, &'a str)>);

/// Data rows of a CSV text as rationals, plus the header fields (if any).
fn parse_table(text: &str) -> Result<Table<'_>> {
    let mut header = Vec::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            let fields = header_fields(line);
            if !fields.is_empty() {
                if !header.is_empty() {
                    return Err(Error::Parse(format!(
                        "second header on line {}",
                        lineno + 1
                    )));
                }
                header = fields;
            }
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                parse_rational(cell.trim())
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::DimensionMismatch(format!(
                    "line {} has {} entries, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok((rows, header))
}

/// Parses an instance: one row per line, comma-separated integers or
/// rationals, optional header `# m=<m> d=<d> scale=<s>`.
pub fn parse_instance(text: &str) -> Result<Matrix> {
    let (rows, header) = parse_table(text)?;
    let (m, d) = (rows.len(), rows[0].len());
    if let Some(hm) = header_usize(&header, "m")? {
        if hm != m {
            return Err(Error::DimensionMismatch(format!(
                "header says m={hm}, found {m} rows"
            )));
        }
    }
    if let Some(hd) = header_usize(&header, "d")? {
        if hd != d {
            return Err(Error::DimensionMismatch(format!(
                "header says d={hd}, found {d} columns"
            )));
        }
    }
    match header.iter().find(|(k, _)| *k == "scale") {
        Some((_, s)) => {
            let scale: i128 = s
                .parse()
                .map_err(|_| Error::Parse(format!("header field scale={s} is not an integer")))?;
            Matrix::from_rationals_with_scale(rows, scale)
        }
        None => Matrix::from_rationals(rows),
    }
}

/// Writes an instance in original units with a full header.
pub fn write_instance(a: &Matrix) -> String {
    let mut out = format!("# m={} d={} scale={}\n", a.rows(), a.cols(), a.scale());
    for i in 0..a.rows() {
        let cells: Vec<String> = a
            .row(i)
            .iter()
            .map(|&v| format_rational(&a.entry_to_original(v)))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses marginals: one marginal per column, rows `r = 0..=N`, header
/// `# N=<N> d=<d>`.
pub fn parse_marginals(text: &str) -> Result<Vec<DiscreteMarginal>> {
    let (rows, header) = parse_table(text)?;
    let (n, d) = (rows.len() - 1, rows[0].len());
    if let Some(hn) = header_usize(&header, "N")? {
        if hn != n {
            return Err(Error::DimensionMismatch(format!(
                "header says N={hn}, found {} rows",
                n + 1
            )));
        }
    }
    if let Some(hd) = header_usize(&header, "d")? {
        if hd != d {
            return Err(Error::DimensionMismatch(format!(
                "header says d={hd}, found {d} columns"
            )));
        }
    }
    (0..d)
        .map(|j| DiscreteMarginal::from_quantiles(rows.iter().map(|r| r[j]).collect()))
        .collect()
}

pub fn write_marginals(marginals: &[DiscreteMarginal]) -> Result<String> {
    let first = marginals
        .first()
        .ok_or_else(|| Error::DimensionMismatch("no marginals".into()))?;
    let n = first.n();
    if marginals.iter().any(|m| m.n() != n) {
        return Err(Error::DimensionMismatch(
            "marginals have different N".into(),
        ));
    }
    let mut out = format!("# N={n} d={}\n", marginals.len());
    for r in 0..=n {
        let cells: Vec<String> = marginals
            .iter()
            .map(|m| format_rational(&m.quantile(r)))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub epsilon: Option<String>,
    pub budget_steps: Option<usize>,
    pub budget_states: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_us: u64,
}

/// Machine-readable answer. Values are exact rationals in the units of the
/// input file; `profile[j][k]` is the destination row of source row `k` in
/// column `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub objective: String,
    pub value: String,
    pub status: String,
    pub profile: Vec<Vec<usize>>,
    pub row_sums: Vec<String>,
    pub solver: String,
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    pub timing: Timing,
}

impl ResultDocument {
    pub fn from_result(
        a: &Matrix,
        result: &MixResult,
        solver: &str,
        parameters: Parameters,
    ) -> Self {
        ResultDocument {
            objective: result.objective.to_string(),
            value: format_rational(&a.row_sum_to_original(result.value)),
            status: result.status.to_string(),
            profile: result.profile.perms().to_vec(),
            row_sums: result
                .row_sums
                .iter()
                .map(|&s| format_rational(&a.row_sum_to_original(s)))
                .collect(),
            solver: solver.to_string(),
            parameters,
            details: serde_json::Value::Null,
            timing: Timing::default(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("result document: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_gamma;

    #[test]
    fn instance_round_trip() {
        let text = "# m=2 d=3 scale=4\n1/2,0.25,3\n-1,2,0\n";
        let a = parse_instance(text).unwrap();
        assert_eq!(a.scale(), 4);
        assert_eq!(a.to_rows(), vec![vec![2, 1, 12], vec![-4, 8, 0]]);
        assert_eq!(
            write_instance(&a),
            "# m=2 d=3 scale=4\n0.5,0.25,3\n-1,2,0\n"
        );
        assert_eq!(parse_instance(&write_instance(&a)).unwrap(), a);
    }

    #[test]
    fn instance_without_header() {
        let a = parse_instance("1, 2\n\n3, 4\n").unwrap();
        assert_eq!(a.to_rows(), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(a.scale(), 1);
    }

    #[test]
    fn malformed_instances() {
        assert!(parse_instance("1,2\n3\n").is_err());
        assert!(parse_instance("1,x\n").is_err());
        assert!(parse_instance("# m=3 d=2\n1,2\n").is_err());
        assert!(parse_instance("").is_err());
        assert!(parse_instance("# m=1 d=1 scale=2\n1/3\n").is_err());
    }

    #[test]
    fn marginals_round_trip() {
        let text = "# N=2 d=2\n0,1/3\n1,1/2\n2,5\n";
        let ms = parse_marginals(text).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[1].quantile(0), Rational::new(1, 3));
        assert_eq!(parse_marginals(&write_marginals(&ms).unwrap()).unwrap(), ms);
        assert!(parse_marginals("# N=2 d=1\n0\n2\n1\n").is_err());
    }

    #[test]
    fn document_round_trip() {
        let a = parse_instance("0.5,1\n2,0\n").unwrap();
        let g = brute_force_gamma(&a).unwrap();
        let doc = ResultDocument::from_result(&a, &g, "brute", Parameters::default());
        assert_eq!(doc.value, "2");
        assert_eq!(doc.row_sums, vec!["1.5", "2"]);
        assert_eq!(ResultDocument::from_json(&doc.to_json()).unwrap(), doc);
    }
}
