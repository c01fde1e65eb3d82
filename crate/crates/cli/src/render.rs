//! Text rendering shared by the subcommands.

use sqdist::io::format_number;
use sqdist::{DenseMatrix, WeightedTree};

/// Largest magnitude at which every integer is exactly representable.
const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0;

/// Scientific notation with 12 significant digits.
pub fn sci12(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn has_integer_weights(t: &WeightedTree) -> bool {
    t.weights().all(|w| w.as_slice().iter().all(|x| x.fract() == 0.0))
}

/// The integer a determinant must equal, when integer weights make it one
/// and it fits binary64 exactly.
pub fn exact_integer(value: f64, integer_weights: bool) -> Option<i64> {
    (integer_weights && value.is_finite() && value.abs() < EXACT_LIMIT).then(|| value.round() as i64)
}

/// A factor value as an integer when it is one, otherwise 12 digits.
pub fn factor_value(x: f64) -> String {
    let r = x.round();
    if x.is_finite() && r.abs() < EXACT_LIMIT && (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        format!("{}", r as i64)
    } else {
        sci12(x)
    }
}

/// Matrix rows with every entry in canonical number form.
pub fn exact_table(m: &DenseMatrix) -> String {
    let cells: Vec<String> = m.as_slice().iter().map(|&x| format_number(x)).collect();
    let width = cells.iter().map(String::len).max().unwrap_or(1);
    let mut out = String::new();
    for r in 0..m.rows() {
        let line: Vec<String> = (0..m.cols())
            .map(|c| format!("{:>width$}", cells[r * m.cols() + c]))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}
