//! Tree file format.
//!
//! ```json
//! { "n": 4, "s": 2, "edges": [ {"u":1,"v":2,"w":[[1,0],[0,1]]}, ... ] }
//! ```
//!
//! Vertices are 1-based, each edge is directed `u -> v`, and `w` is the
//! row-major `s x s` weight.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::tree::{RawEdge, WeightedTree};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeFile {
    pub n: usize,
    pub s: usize,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub w: Vec<Vec<f64>>,
}

impl TreeFile {
    pub fn from_tree(t: &WeightedTree) -> Self {
        Self {
            n: t.n(),
            s: t.s(),
            edges: t
                .to_raw()
                .into_iter()
                .map(|e| EdgeRecord {
                    u: e.tail,
                    v: e.head,
                    w: e.weight.to_rows(),
                })
                .collect(),
        }
    }

    pub fn into_tree(self) -> Result<WeightedTree> {
        let s = self.s;
        let mut raw = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.into_iter().enumerate() {
            if e.w.len() != s || e.w.iter().any(|row| row.len() != s) {
                let cols = e.w.first().map_or(0, Vec::len);
                return Err(Error::BadWeightShape(format!(
                    "edge {} weight is {}x{cols}, expected {s}x{s}",
                    k + 1,
                    e.w.len()
                )));
            }
            let weight = DenseMatrix::from_rows(&e.w)?;
            raw.push(RawEdge {
                tail: e.u,
                head: e.v,
                weight,
            });
        }
        WeightedTree::validate(self.n, s, raw)
    }

    /// Canonical text: integers where exact, otherwise 17 significant
    /// digits, so that parsing the output restores every bit.
    pub fn to_canonical_string(&self) -> String {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|e| {
                let rows: Vec<String> = e
                    .w
                    .iter()
                    .map(|r| {
                        let cells: Vec<String> = r.iter().map(|&x| format_number(x)).collect();
                        format!("[{}]", cells.join(", "))
                    })
                    .collect();
                format!(
                    "    {{\"u\": {}, \"v\": {}, \"w\": [{}]}}",
                    e.u,
                    e.v,
                    rows.join(", ")
                )
            })
            .collect();
        format!(
            "{{\n  \"n\": {},\n  \"s\": {},\n  \"edges\": [\n{}\n  ]\n}}\n",
            self.n,
            self.s,
            edges.join(",\n")
        )
    }
}

/// Integers below 2^53 print exactly; anything else uses 17 significant
/// digits in scientific notation.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0" } else { "0" }.into();
    }
    if x.fract() == 0.0 && x.abs() < 9_007_199_254_740_992.0 {
        return format!("{}", x as i64);
    }
    format!("{x:.16e}")
}

/// Parses and validates a tree file.
pub fn parse_tree_file(text: &str) -> Result<WeightedTree> {
    let file: TreeFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_tree()
}

/// Canonical text for a tree; the inverse of [`parse_tree_file`].
pub fn write_tree_file(t: &WeightedTree) -> String {
    TreeFile::from_tree(t).to_canonical_string()
}
