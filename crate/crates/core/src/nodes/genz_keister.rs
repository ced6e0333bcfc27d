//! Nested Genz-Keister (Kronrod-Patterson-Normal) rules with 1, 3, 9, 19
//! and 35 nodes.
//!
//! The rules are embedded as a text table; one record per level:
//!
//! ```text
//! <cardinality> <exactness degree>
//! <node> <weight>        (cardinality lines, ascending nodes)
//! ```
//!
//! Lines starting with `#` are comments.

use std::sync::OnceLock;

use super::{NodeFamily, UnivariateRule};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const GENZ_KEISTER_MAX_LEVEL: usize = 4;

const TABLE: &str = include_str!("../../data/genz_keister.txt");

#[derive(Clone, Debug, PartialEq)]
pub struct GenzKeisterLevel {
    pub exactness: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn table() -> &'static [GenzKeisterLevel] {
    static PARSED: OnceLock<Vec<GenzKeisterLevel>> = OnceLock::new();
    PARSED.get_or_init(|| parse_genz_keister_table(TABLE).expect("embedded Genz-Keister table is well formed"))
}

pub(crate) fn cardinality(level: usize) -> Result<usize> {
    table().get(level).map(|l| l.nodes.len()).ok_or(Error::RuleExhausted {
        family: NodeFamily::GenzKeister,
        level,
        max_level: GENZ_KEISTER_MAX_LEVEL,
    })
}

pub fn genz_keister<T: Scalar>(level: usize) -> Result<UnivariateRule<T>> {
    let rec = table().get(level).ok_or(Error::RuleExhausted {
        family: NodeFamily::GenzKeister,
        level,
        max_level: GENZ_KEISTER_MAX_LEVEL,
    })?;
    Ok(UnivariateRule {
        family: NodeFamily::GenzKeister,
        level,
        nodes: rec.nodes.iter().map(|&x| T::of(x)).collect(),
        weights: rec.weights.iter().map(|&w| T::of(w)).collect(),
        exactness: Some(rec.exactness),
    })
}

pub fn parse_genz_keister_table(text: &str) -> Result<Vec<GenzKeisterLevel>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut levels = Vec::new();
    while let Some((line_no, header)) = lines.next() {
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (count, exactness) = match fields.as_slice() {
            [c, e] => (parse_usize(c, line_no)?, parse_usize(e, line_no)?),
            _ => {
                return Err(Error::Table {
                    line: line_no,
                    reason: "expected '<cardinality> <exactness>'".into(),
                })
            }
        };
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for _ in 0..count {
            let (line_no, row) = lines.next().ok_or(Error::Table {
                line: line_no,
                reason: format!("record truncated, expected {count} nodes"),
            })?;
            let vals: Vec<&str> = row.split_whitespace().collect();
            match vals.as_slice() {
                [x, w] => {
                    nodes.push(parse_f64(x, line_no)?);
                    weights.push(parse_f64(w, line_no)?);
                }
                _ => {
                    return Err(Error::Table {
                        line: line_no,
                        reason: "expected '<node> <weight>'".into(),
                    })
                }
            }
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Table {
                line: line_no,
                reason: "nodes must be strictly ascending".into(),
            });
        }
        levels.push(GenzKeisterLevel {
            exactness,
            nodes,
            weights,
        });
    }
    Ok(levels)
}

/// Writes levels in the table format, 17 significant digits.
pub fn write_genz_keister_table(levels: &[GenzKeisterLevel]) -> String {
    let mut out = String::new();
    for level in levels {
        out.push_str(&format!("{} {}\n", level.nodes.len(), level.exactness));
        for (x, w) in level.nodes.iter().zip(&level.weights) {
            out.push_str(&format!("{x:.17e} {w:.17e}\n"));
        }
    }
    out
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Table {
        line,
        reason: format!("not an integer: {tok:?}"),
    })
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse().map_err(|_| Error::Table {
        line,
        reason: format!("not a number: {tok:?}"),
    })
}
