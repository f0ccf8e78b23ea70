//! Text formats: edge lists, result/diagnostic/truth CSVs.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::extractor::{DetectionResult, NodeStatus};
use crate::graph::{Graph, LoadReport};

/// Formats like C's `%.6g`: six significant digits, trailing zeros trimmed.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.5e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Parses a whitespace-separated edge list. `#` lines and blank lines are
/// skipped; any other line must hold exactly two identifiers.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<(Graph, LoadReport)> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = t.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: k + 1,
                found: tokens.len(),
            });
        }
        pairs.push((tokens[0].to_string(), tokens[1].to_string()));
    }
    Ok(Graph::from_edge_list_with_report(&pairs))
}

pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    for (i, j) in g.edges() {
        writeln!(w, "{} {}", g.label(i), g.label(j))?;
    }
    Ok(())
}

/// `node,true_community` with 1-based block labels.
pub fn write_truth_csv<W: Write>(g: &Graph, labels: &[usize], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["node", "true_community"])?;
    for (i, c) in labels.iter().enumerate() {
        out.write_record([g.label(i), c.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `node,community,status`; community is the 1-based extraction rank, or 0
/// for nodes never placed in a community.
pub fn write_result_csv<W: Write>(g: &Graph, result: &DetectionResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["node", "community", "status"])?;
    for (i, s) in result.node_status().into_iter().enumerate() {
        let (rank, status) = match s {
            NodeStatus::Kept(r) => (r, "kept"),
            NodeStatus::Filtered(r) => (r, "filtered"),
            NodeStatus::Unassigned => (0, "unassigned"),
        };
        out.write_record([g.label(i), rank.to_string(), status.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_diagnostics_csv<W: Write>(result: &DetectionResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "extraction_round",
        "eta",
        "phi",
        "n_nodes",
        "n_edges",
        "tail_prob",
        "perm_pvalue",
        "kept",
    ])?;
    for (k, (c, d)) in result
        .communities
        .iter()
        .zip(&result.diagnostics)
        .enumerate()
    {
        out.write_record([
            (k + 1).to_string(),
            fmt_g(d.eta),
            fmt_g(d.phi),
            c.n_nodes.to_string(),
            c.n_internal_edges.to_string(),
            fmt_g(c.tail_prob),
            c.perm_pvalue.map(fmt_g).unwrap_or_default(),
            c.kept.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Node-to-label map read from a two-or-more column CSV with a header.
///
/// `label_of` turns a row into a label; returning `None` marks the node
/// as unlabeled.
fn read_labeled<R, F>(
    reader: R,
    columns: &[&str],
    label_of: F,
) -> Result<Vec<(String, Option<String>)>>
where
    R: std::io::Read,
    F: Fn(&[&str]) -> Option<String>,
{
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let idx: Vec<usize> = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h.trim() == *c)
                .ok_or_else(|| Error::Io(format!("missing column '{c}'")))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let fields: Vec<&str> = idx
            .iter()
            .map(|&i| rec.get(i).unwrap_or("").trim())
            .collect();
        out.push((fields[0].to_string(), label_of(&fields)));
    }
    Ok(out)
}

/// Reads `node,true_community`.
pub fn read_truth_csv<R: std::io::Read>(reader: R) -> Result<Vec<(String, Option<String>)>> {
    read_labeled(reader, &["node", "true_community"], |f| {
        Some(f[1].to_string())
    })
}

/// Reads `node,community,status`; only `kept` rows carry a label.
pub fn read_result_csv<R: std::io::Read>(reader: R) -> Result<Vec<(String, Option<String>)>> {
    read_labeled(reader, &["node", "community", "status"], |f| {
        (f[2] == "kept").then(|| f[1].to_string())
    })
}

/// Aligns two node-keyed labelings on their common nodes, in the order of
/// the first. Errors when no node appears in both.
pub fn align_labels(
    detected: &[(String, Option<String>)],
    truth: &[(String, Option<String>)],
) -> Result<(Vec<String>, Vec<Option<String>>, Vec<Option<String>>)> {
    let lookup: HashMap<&str, &Option<String>> =
        truth.iter().map(|(k, v)| (k.as_str(), v)).collect();
    let mut nodes = Vec::new();
    let mut d = Vec::new();
    let mut t = Vec::new();
    for (node, label) in detected {
        if let Some(tl) = lookup.get(node.as_str()) {
            nodes.push(node.clone());
            d.push(label.clone());
            t.push((*tl).clone());
        }
    }
    if nodes.is_empty() {
        return Err(Error::UndefinedMetric(
            "result and truth share no node identifiers".into(),
        ));
    }
    Ok((nodes, d, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_g_matches_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (2.0 / 3.0, "0.666667"),
            (123456.0, "123456"),
            (1234567.0, "1.23457e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-0.25, "-0.25"),
            (99999.95, "99999.9"),
            (999999.5, "1e+06"),
            (f64::NEG_INFINITY, "-inf"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_g(x), s, "{x}");
        }
    }

    #[test]
    fn parse_edge_list() {
        let text = "# comment\na b\n\nb c\n  c   a  \n";
        let (g, report) = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(report.pairs_read, 3);
    }

    #[test]
    fn parse_error_has_line_number() {
        let text = "a b\n# ok\na b c\n";
        assert_eq!(
            read_edge_list(text.as_bytes()).unwrap_err(),
            Error::Parse { line: 3, found: 3 }
        );
    }

    #[test]
    fn edge_list_round_trip() {
        let (g, _) = read_edge_list("x y\ny z\nz w\n".as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let (h, _) = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn result_csv_reading_keeps_only_kept() {
        let text = "node,community,status\na,1,kept\nb,2,filtered\nc,0,unassigned\n";
        let rows = read_result_csv(text.as_bytes()).unwrap();
        assert_eq!(rows[0], ("a".into(), Some("1".into())));
        assert_eq!(rows[1].1, None);
        assert_eq!(rows[2].1, None);
    }

    #[test]
    fn align_requires_overlap() {
        let a = vec![("x".to_string(), Some("1".to_string()))];
        let b = vec![("y".to_string(), Some("1".to_string()))];
        assert!(align_labels(&a, &b).is_err());
    }
}
