use num_traits::{One, Zero};

use super::{LinalgError, RMatrix, RVector, Rational};

/// General solution of `a x = b` over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearSolution {
    Inconsistent,
    /// `particular` has every free variable set to zero; `null_space` is
    /// one basis vector per free variable.
    Solvable {
        particular: RVector,
        null_space: Vec<RVector>,
    },
}

impl LinearSolution {
    pub fn is_consistent(&self) -> bool {
        matches!(self, LinearSolution::Solvable { .. })
    }

    /// The particular solution, if the solution is unique.
    pub fn unique(&self) -> Option<&RVector> {
        match self {
            LinearSolution::Solvable { particular, null_space } if null_space.is_empty() => Some(particular),
            _ => None,
        }
    }
}

/// Reduced row echelon form together with the pivot columns.
pub fn rref(a: &RMatrix) -> (RMatrix, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols() {
        if row == m.rows() {
            break;
        }
        let Some(p) = (row..m.rows()).find(|&r| !m[(r, col)].is_zero()) else {
            continue;
        };
        m.swap_rows(p, row);
        let inv = m[(row, col)].recip();
        m.scale_row(row, &inv);
        for r in 0..m.rows() {
            if r != row && !m[(r, col)].is_zero() {
                let f = -m[(r, col)].clone();
                m.add_row_multiple(r, row, &f);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

/// Solves `a x = b` exactly. Inconsistency is a normal outcome, not an error.
pub fn solve_linear(a: &RMatrix, b: &RVector) -> Result<LinearSolution, LinalgError> {
    if a.rows() != b.dim() {
        return Err(LinalgError::DimensionMismatch(format!(
            "system has {} equations but right-hand side has length {}",
            a.rows(),
            b.dim()
        )));
    }
    let n = a.cols();
    let mut aug = RMatrix::zeros(a.rows(), n + 1);
    aug.set_block(0, 0, a);
    for i in 0..a.rows() {
        aug[(i, n)] = b[i].clone();
    }
    let (reduced, pivots) = rref(&aug);
    if pivots.last() == Some(&n) {
        return Ok(LinearSolution::Inconsistent);
    }

    let mut particular = RVector::zeros(n);
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = reduced[(r, n)].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let null_space = free
        .iter()
        .map(|&f| {
            let mut v = RVector::zeros(n);
            v[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -reduced[(r, f)].clone();
            }
            v
        })
        .collect();
    Ok(LinearSolution::Solvable { particular, null_space })
}

/// Basis of `{x : a x = 0}`.
pub fn null_space(a: &RMatrix) -> Vec<RVector> {
    match solve_linear(a, &RVector::zeros(a.rows())) {
        Ok(LinearSolution::Solvable { null_space, .. }) => null_space,
        _ => unreachable!("homogeneous systems are always consistent"),
    }
}
