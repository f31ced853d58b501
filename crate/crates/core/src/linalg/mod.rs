//! Exact rational and integer linear algebra.
//!
//! Everything here is computed over `BigRational`; there is no floating
//! point anywhere in the crate. Matrices are dense and row-major, which is
//! plenty for the dimensions involved (n + 2 <= 12 in practice).

mod form;
mod smith;
mod solve;

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use form::{signature, Signature, SymmetricForm};
pub use smith::{smith_normal_form, solve_over_integers, SmithForm};
pub use solve::{null_space, rref, solve_linear, LinearSolution};

pub type Integer = BigInt;
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("non-integral entry at ({row}, {col})")]
    NotIntegral { row: usize, col: usize },
    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },
    #[error("form is not positive definite")]
    NotPositiveDefinite,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
}

/// Integer `v` as a rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// The rational `num / den`, reduced.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"`, or either with a leading sign. A unicode minus is
/// accepted as well since hand-written files tend to contain it.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim().replace('\u{2212}', "-");
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let parse_int = |part: &str| -> Result<BigInt, ParseRationalError> {
        let digits = part.strip_prefix(['+', '-']).unwrap_or(part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError::Malformed(text.to_string()));
        }
        part.parse::<BigInt>()
            .map_err(|_| ParseRationalError::Malformed(text.to_string()))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(&s)?)),
        Some((n, d)) => {
            let num = parse_int(n)?;
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(text.to_string()));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Canonical string form: `"-3/2"`, `"4"`.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a Rational>) -> Integer {
    values.fold(Integer::one(), |acc, x| acc.lcm(x.denom()))
}

/// Least positive integer `c` with `c * x` integral.
pub trait DenominatorLcm {
    fn denominator_lcm(&self) -> Integer;
}

impl DenominatorLcm for Rational {
    fn denominator_lcm(&self) -> Integer {
        self.denom().clone()
    }
}

impl DenominatorLcm for RVector {
    fn denominator_lcm(&self) -> Integer {
        lcm_of_denominators(self.0.iter())
    }
}

impl DenominatorLcm for RMatrix {
    fn denominator_lcm(&self) -> Integer {
        lcm_of_denominators(self.data.iter())
    }
}

pub fn denominator_lcm<T: DenominatorLcm + ?Sized>(x: &T) -> Integer {
    x.denominator_lcm()
}

/// A dense column vector of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RVector(Vec<Rational>);

impl RVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        RVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RVector(vec![Rational::zero(); dim])
    }

    /// Standard basis vector `e_i` (zero-based `i`).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RVector(entries.iter().map(|&x| int(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Rational::is_integer)
    }

    pub fn dot(&self, other: &RVector) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dot product of unequal lengths");
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn add(&self, other: &RVector) -> RVector {
        assert_eq!(self.dim(), other.dim());
        RVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RVector) -> RVector {
        assert_eq!(self.dim(), other.dim());
        RVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Rational) -> RVector {
        RVector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn neg(&self) -> RVector {
        RVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Index<usize> for RVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for RVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl FromIterator<Rational> for RVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RVector(iter.into_iter().collect())
    }
}

impl fmt::Display for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for RVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.0.iter().map(format_rational).collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(deserializer)?;
        strings
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>, _>>()
            .map(RVector)
            .map_err(serde::de::Error::custom)
    }
}

/// A dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
            return Err(LinalgError::DimensionMismatch(format!(
                "row {i} has {} entries, expected {ncols}",
                r.len()
            )));
        }
        Ok(RMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from integer rows. Panics on ragged input; intended
    /// for literals.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(rows).expect("ragged integer matrix literal")
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    /// Block-diagonal `a ⊕ b`.
    pub fn direct_sum(a: &RMatrix, b: &RMatrix) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(a.rows, a.cols, b);
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[RVector]) -> Result<Self, LinalgError> {
        let rows = cols.first().map_or(0, RVector::dim);
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.dim() != rows {
                return Err(LinalgError::DimensionMismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    c.dim()
                )));
            }
            for i in 0..rows {
                m[(i, j)] = c[i].clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> RVector {
        RVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> RVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).into_entries()).collect()
    }

    pub fn transpose(&self) -> RMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Copy of the block with rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> RMatrix {
        let mut m = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m[(i - r0, j - c0)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &RMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Exact product; fails if `self.cols != other.rows`.
    pub fn try_mul(&self, other: &RMatrix) -> Result<RMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &RVector) -> RVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| self.row(i).dot(v)).collect()
    }

    pub fn add(&self, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    pub(crate) fn first_asymmetry(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_integral(&self) -> bool {
        self.first_non_integral().is_none()
    }

    pub fn first_non_integral(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|x| !x.is_integer())
            .map(|k| (k / self.cols, k % self.cols))
    }

    /// Entries as integers, or the position of the first non-integral one.
    pub fn to_integer_rows(&self) -> Result<Vec<Vec<Integer>>, LinalgError> {
        if let Some((row, col)) = self.first_non_integral() {
            return Err(LinalgError::NotIntegral { row, col });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_integer()).collect())
            .collect())
    }

    pub fn from_integer_rows(rows: &[Vec<Integer>]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().cloned().map(Rational::from_integer).collect())
                .collect(),
        )
    }

    fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn determinant(&self) -> Result<Rational, LinalgError> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let pivot = a[(c, c)].clone();
            det *= &pivot;
            for r in (c + 1)..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = &a[(r, c)] / &pivot;
                a.add_row_multiple(r, c, &-f);
            }
        }
        Ok(det)
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<RMatrix, LinalgError> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a[(r, c)].is_zero()).ok_or(LinalgError::Singular)?;
            if p != c {
                a.swap_rows(p, c);
                inv.swap_rows(p, c);
            }
            let scale = a[(c, c)].recip();
            a.scale_row(c, &scale);
            inv.scale_row(c, &scale);
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = -a[(r, c)].clone();
                a.add_row_multiple(r, c, &f);
                inv.add_row_multiple(r, c, &f);
            }
        }
        Ok(inv)
    }

    /// `self^k`; negative exponents go through the inverse.
    pub fn pow(&self, k: i64) -> Result<RMatrix, LinalgError> {
        self.require_square()?;
        let mut base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub(crate) fn scale_row(&mut self, r: usize, s: &Rational) {
        for j in 0..self.cols {
            self[(r, j)] *= s;
        }
    }

    /// row[dst] += f * row[src]
    pub(crate) fn add_row_multiple(&mut self, dst: usize, src: usize, f: &Rational) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * f;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += f * col[src]
    pub(crate) fn add_col_multiple(&mut self, dst: usize, src: usize, f: &Rational) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * f;
            self[(i, dst)] += v;
        }
    }
}

/// Exact product. The `*` operator on `&RMatrix` panics on a shape
/// mismatch instead.
pub fn mat_mul(a: &RMatrix, b: &RMatrix) -> Result<RMatrix, LinalgError> {
    a.try_mul(b)
}

pub fn mat_inverse(a: &RMatrix) -> Result<RMatrix, LinalgError> {
    a.inverse()
}

impl Mul for &RMatrix {
    type Output = RMatrix;
    fn mul(self, rhs: &RMatrix) -> RMatrix {
        self.try_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RMatrix {
    /// Right-aligned columns, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(format_rational).collect();
        let mut widths = vec![0; self.cols];
        for (k, c) in cells.iter().enumerate() {
            widths[k % self.cols] = widths[k % self.cols].max(c.chars().count());
        }
        for i in 0..self.rows {
            let line: Vec<String> = (0..self.cols)
                .map(|j| format!("{:>w$}", cells[i * self.cols + j], w = widths[j]))
                .collect();
            write!(f, "[ {} ]", line.join("  "))?;
            if i + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl Serialize for RMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| format_rational(&self[(i, j)])).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(deserializer)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        RMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

/// Smallest prime not dividing `x` (for `x = 0` every prime divides, so
/// there is none).
pub fn smallest_prime_not_dividing(x: &Integer) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let x = x.abs();
    (2u64..).filter(|&q| is_prime(q)).find(|&q| !(&x % q).is_zero())
}

pub fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d))
}
