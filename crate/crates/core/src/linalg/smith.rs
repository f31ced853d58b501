use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use super::{Integer, LinalgError, RMatrix, RVector, Rational};

/// `u * a * v = s` with `u`, `v` unimodular and `s` diagonal, each
/// diagonal entry dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: RMatrix,
    pub s: RMatrix,
    pub v: RMatrix,
}

impl SmithForm {
    /// The diagonal `d_1 | d_2 | ...`, including trailing zeros.
    pub fn invariant_factors(&self) -> Vec<Integer> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].to_integer())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().iter().filter(|d| !d.is_zero()).count()
    }
}

type Grid = Vec<Vec<Integer>>;

fn identity(n: usize) -> Grid {
    (0..n)
        .map(|i| (0..n).map(|j| Integer::from((i == j) as u8)).collect())
        .collect()
}

/// row[dst] -= q * row[src]
fn row_axpy(m: &mut Grid, dst: usize, src: usize, q: &Integer) {
    let src_row = m[src].clone();
    for (x, y) in m[dst].iter_mut().zip(&src_row) {
        *x -= q * y;
    }
}

/// col[dst] -= q * col[src]
fn col_axpy(m: &mut Grid, dst: usize, src: usize, q: &Integer) {
    for row in m.iter_mut() {
        let y = row[src].clone();
        row[dst] -= q * y;
    }
}

fn swap_cols(m: &mut Grid, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Smith normal form of an integer matrix.
pub fn smith_normal_form(a: &RMatrix) -> Result<SmithForm, LinalgError> {
    let mut s = a.to_integer_rows()?;
    let (rows, cols) = (a.rows(), a.cols());
    let mut u = identity(rows);
    let mut v = identity(cols);

    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !s[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| s[i][j].abs().cmp(&s[k][l].abs()))
        else {
            break;
        };
        s.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut s, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut clean = true;
            for i in (t + 1)..rows {
                if !s[i][t].is_zero() {
                    let q = s[i][t].div_floor(&s[t][t]);
                    row_axpy(&mut s, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                    clean &= s[i][t].is_zero();
                }
            }
            for j in (t + 1)..cols {
                if !s[t][j].is_zero() {
                    let q = s[t][j].div_floor(&s[t][t]);
                    col_axpy(&mut s, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                    clean &= s[t][j].is_zero();
                }
            }
            if !clean {
                // a remainder smaller than the pivot survived; promote it
                let cand = ((t + 1)..rows)
                    .map(|i| (i, t))
                    .chain(((t + 1)..cols).map(|j| (t, j)))
                    .filter(|&(i, j)| !s[i][j].is_zero())
                    .min_by(|&(i, j), &(k, l)| s[i][j].abs().cmp(&s[k][l].abs()))
                    .expect("unclean pivot row/column has a nonzero entry");
                if cand.1 == t {
                    s.swap(t, cand.0);
                    u.swap(t, cand.0);
                } else {
                    swap_cols(&mut s, t, cand.1);
                    swap_cols(&mut v, t, cand.1);
                }
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let offending = ((t + 1)..rows).find(|&i| ((t + 1)..cols).any(|j| !s[i][j].is_multiple_of(&s[t][t])));
            match offending {
                Some(i) => {
                    let minus_one = -Integer::one();
                    row_axpy(&mut s, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if s[t][t].is_negative() {
            for x in s[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }

    Ok(SmithForm {
        u: RMatrix::from_integer_rows(&u)?,
        s: RMatrix::from_integer_rows(&s)?,
        v: RMatrix::from_integer_rows(&v)?,
    })
}

/// An integer solution of `a x = b` (`a` integral, `b` rational), if any.
/// Free coordinates are set to zero in Smith coordinates.
pub fn solve_over_integers(a: &RMatrix, b: &RVector) -> Result<Option<RVector>, LinalgError> {
    if a.rows() != b.dim() {
        return Err(LinalgError::DimensionMismatch(format!(
            "system has {} equations but right-hand side has length {}",
            a.rows(),
            b.dim()
        )));
    }
    let snf = smith_normal_form(a)?;
    let c = snf.u.mul_vec(b);
    let factors = snf.invariant_factors();
    let mut y = RVector::zeros(a.cols());
    for i in 0..a.rows() {
        let d = factors.get(i).cloned().unwrap_or_else(Integer::zero);
        if d.is_zero() {
            if !c[i].is_zero() {
                return Ok(None);
            }
        } else {
            let yi = &c[i] / Rational::from_integer(d);
            if !yi.is_integer() {
                return Ok(None);
            }
            y[i] = yi;
        }
    }
    Ok(Some(snf.v.mul_vec(&y)))
}
