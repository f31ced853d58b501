use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{LinalgError, RMatrix, RVector, Rational};

/// Sylvester signature of a real symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub positives: usize,
    pub negatives: usize,
    pub zeros: usize,
}

impl Signature {
    pub fn new(positives: usize, negatives: usize, zeros: usize) -> Self {
        Signature {
            positives,
            negatives,
            zeros,
        }
    }

    pub fn dim(&self) -> usize {
        self.positives + self.negatives + self.zeros
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.positives, self.negatives, self.zeros)
    }
}

/// A symmetric bilinear form given by its Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SymmetricForm(RMatrix);

impl SymmetricForm {
    pub fn new(matrix: RMatrix) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if let Some((row, col)) = matrix.first_asymmetry() {
            return Err(LinalgError::NotSymmetric { row, col });
        }
        Ok(SymmetricForm(matrix))
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> RMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// `x^T Q y`
    pub fn pair(&self, x: &RVector, y: &RVector) -> Rational {
        x.dot(&self.0.mul_vec(y))
    }

    /// Orthogonal sum, `self` in the leading coordinates.
    pub fn direct_sum(&self, other: &SymmetricForm) -> SymmetricForm {
        SymmetricForm(RMatrix::direct_sum(&self.0, &other.0))
    }

    /// The form `P^T Q P` obtained by the change of variables `x = P y`.
    pub fn congruent(&self, p: &RMatrix) -> Result<SymmetricForm, LinalgError> {
        let m = p.transpose().try_mul(&self.0)?.try_mul(p)?;
        Ok(SymmetricForm(m))
    }

    pub fn scale(&self, s: &Rational) -> SymmetricForm {
        SymmetricForm(self.0.scale(s))
    }

    pub fn leading_principal_minors(&self) -> Vec<Rational> {
        (1..=self.dim())
            .map(|k| {
                self.0
                    .submatrix(0, k, 0, k)
                    .determinant()
                    .expect("principal submatrix is square")
            })
            .collect()
    }

    /// Sylvester's criterion.
    pub fn is_positive_definite(&self) -> bool {
        self.leading_principal_minors().iter().all(Signed::is_positive)
    }

    pub fn require_positive_definite(&self) -> Result<(), LinalgError> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(LinalgError::NotPositiveDefinite)
        }
    }

    /// Diagonal of a form congruent to this one, by symmetric elimination.
    pub fn congruence_diagonal(&self) -> Vec<Rational> {
        let n = self.dim();
        let mut a = self.0.clone();
        for i in 0..n {
            if a[(i, i)].is_zero() {
                if let Some(j) = ((i + 1)..n).find(|&j| !a[(j, j)].is_zero()) {
                    a.swap_rows(i, j);
                    a.swap_cols(i, j);
                } else if let Some(j) = ((i + 1)..n).find(|&j| !a[(i, j)].is_zero()) {
                    // a[j][j] == 0 here, so the new pivot is 2 a[i][j] != 0
                    let one = Rational::from_integer(1.into());
                    a.add_row_multiple(i, j, &one);
                    a.add_col_multiple(i, j, &one);
                } else {
                    continue;
                }
            }
            let pivot = a[(i, i)].clone();
            for j in (i + 1)..n {
                if a[(j, i)].is_zero() {
                    continue;
                }
                let f = -(&a[(j, i)] / &pivot);
                a.add_row_multiple(j, i, &f);
                a.add_col_multiple(j, i, &f);
            }
        }
        (0..n).map(|i| a[(i, i)].clone()).collect()
    }

    pub fn signature(&self) -> Signature {
        let diag = self.congruence_diagonal();
        Signature {
            positives: diag.iter().filter(|x| x.is_positive()).count(),
            negatives: diag.iter().filter(|x| x.is_negative()).count(),
            zeros: diag.iter().filter(|x| x.is_zero()).count(),
        }
    }
}

pub fn signature(q: &SymmetricForm) -> Signature {
    q.signature()
}

impl<'de> Deserialize<'de> for SymmetricForm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let m = RMatrix::deserialize(deserializer)?;
        SymmetricForm::new(m).map_err(serde::de::Error::custom)
    }
}
