//! Human-readable rendering of matrices for command output. Display only; files
//! keep full precision.

use qudit_destruction::numerics::ComplexMatrix;
use qudit_destruction::state_space::ExtendedSpace;

fn entry(re: f64, im: f64) -> String {
    // adding 0.0 turns -0.0 into 0.0
    format!("{:>9.6}{:+.6}i", re + 0.0, im + 0.0)
}

/// Fixed-width rows, six decimals per component.
pub fn matrix(m: &ComplexMatrix, indent: &str) -> String {
    let n = m.dim();
    (0..n)
        .map(|i| {
            let row: Vec<String> = (0..n).map(|j| entry(m.get(i, j).re, m.get(i, j).im)).collect();
            format!("{indent}{}", row.join("  "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn basis_name(space: ExtendedSpace, i: usize) -> String {
    if i == space.vac_index() {
        "vac".to_string()
    } else {
        i.to_string()
    }
}

/// Writes a 0/1 matrix as a sum of `|r><c|` terms, or `None` if any entry is
/// something else.
pub fn ket_bra_sum(space: ExtendedSpace, m: &ComplexMatrix) -> Option<String> {
    let n = m.dim();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            if z.im != 0.0 || (z.re != 0.0 && z.re != 1.0) {
                return None;
            }
            if z.re == 1.0 {
                terms.push(format!("|{}><{}|", basis_name(space, i), basis_name(space, j)));
            }
        }
    }
    Some(if terms.is_empty() { "0".to_string() } else { terms.join(" + ") })
}

pub fn real_list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{:.6}", v + 0.0)).collect();
    format!("[{}]", parts.join(", "))
}
