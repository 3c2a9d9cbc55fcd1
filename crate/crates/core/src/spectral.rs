//! Perron roots of nonnegative integer matrices.
//!
//! The spectral radius of a nonnegative matrix is the largest spectral radius
//! among its irreducible diagonal blocks. Each block `B` is handled by power
//! iteration on `B + I`, which is primitive, starting from the all-ones vector.
//! The iteration stops when the Collatz–Wielandt bracket
//! `min_i (Bx)_i / x_i <= rho <= max_i (Bx)_i / x_i` is tighter than
//! [`BRACKET_TOLERANCE`].

use crate::connectivity::strongly_connected_components;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::IntMatrix;

pub const BRACKET_TOLERANCE: f64 = 1e-12;
pub const ITERATION_CAP: usize = 100_000;
/// Tolerance used whenever two spectral radii are compared.
pub const COMPARE_TOLERANCE: f64 = 1e-9;

pub fn spectral_radius(m: &IntMatrix) -> Result<f64> {
    if m.rows() == 0 || !m.is_square() {
        return Err(Error::EmptyMatrix);
    }
    let n = m.rows();
    let succ: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| m[(i, j)] > 0).collect()).collect();
    let mut best = 0.0f64;
    for comp in strongly_connected_components(n, &succ) {
        if comp.len() == 1 {
            best = best.max(m[(comp[0], comp[0])] as f64);
            continue;
        }
        best = best.max(irreducible_radius(&m.submatrix(&comp, &comp)));
    }
    Ok(best)
}

/// Spectral radius of a graph's adjacency matrix; 0 for the empty graph.
pub fn graph_spectral_radius(g: &Graph) -> f64 {
    if g.vertex_count() == 0 {
        return 0.0;
    }
    spectral_radius(&g.adjacency_matrix()).expect("nonempty square matrix")
}

fn irreducible_radius(block: &IntMatrix) -> f64 {
    let n = block.rows();
    let mut x = vec![1.0f64; n];
    let mut y = vec![0.0f64; n];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    for _ in 0..ITERATION_CAP {
        for i in 0..n {
            let row = block.row(i);
            y[i] = x[i] + row.iter().zip(&x).map(|(&a, &b)| a as f64 * b).sum::<f64>();
        }
        lo = f64::INFINITY;
        hi = 0.0;
        for i in 0..n {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if hi - lo <= BRACKET_TOLERANCE * hi {
            break;
        }
        let scale = y.iter().cloned().fold(0.0, f64::max);
        for i in 0..n {
            x[i] = y[i] / scale;
        }
    }
    (lo + hi) / 2.0 - 1.0
}

/// `a < b` beyond the comparison tolerance.
pub fn strictly_less(a: f64, b: f64) -> bool {
    a < b - COMPARE_TOLERANCE
}

pub fn approx_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= COMPARE_TOLERANCE
}
