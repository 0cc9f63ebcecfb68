//! Exact rational scalars, vectors and matrices.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, Integer, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;
pub type RatVector = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("singular matrix")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rvec(xs: &[(i64, i64)]) -> RatVector {
    xs.iter().map(|&(n, d)| rat(n, d)).collect()
}

/// Parses `"n/d"`, `"n"` or a finite decimal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let t = s.trim();
    let err = || ArithError::Parse(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((w, f)) = t.split_once('.') {
        let neg = w.starts_with('-');
        let w = w.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if w.is_empty() { "0" } else { w }, f);
        let n: BigInt = digits.parse().map_err(|_| err())?;
        let d = num::pow(BigInt::from(10), f.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(n))
}

/// Canonical `"num/den"` form.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Bit length of an integer: `floor(log2 |n|) + 1`, and 1 for zero.
pub fn bit_length_int(n: &BigInt) -> u64 {
    n.bits().max(1)
}

/// Bit length of a rational on its lowest-terms representation.
pub fn bit_length(r: &Rational) -> u64 {
    bit_length_int(r.numer()) + bit_length_int(r.denom())
}

pub fn bit_length_vec(v: &[Rational]) -> u64 {
    v.iter().map(bit_length).max().unwrap_or(1)
}

/// `ceil(log2 n)` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

pub fn ceil_log2_big(n: &BigUint) -> u64 {
    if n <= &BigUint::one() {
        0
    } else {
        (n - 1u32).bits()
    }
}

pub fn lcm_of_denominators<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ArithError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(ArithError::Dimension("ragged rows".into()));
        }
        Ok(RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .expect("rectangular")
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

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> RatVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.data.iter()
    }

    pub fn from_columns(cols: &[RatVector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> RatVector {
        assert_eq!(x.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: Rational = (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    /// Principal submatrix on the sorted index set `idx`.
    pub fn principal(&self, idx: &[usize]) -> RatMatrix {
        let mut m = Self::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn max_bit_length(&self) -> u64 {
        self.data.iter().map(bit_length).max().unwrap_or(1)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Scales each row of `[A | B]` by the lcm of its denominators.
fn integer_rows(a: &RatMatrix, b: &RatMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let rows = (0..a.rows)
        .map(|i| {
            let l = lcm_of_denominators(a.row(i).iter().chain(b.row(i)));
            scale *= &l;
            a.row(i)
                .iter()
                .chain(b.row(i))
                .map(|x| (x * Rational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    (rows, scale)
}

/// Bareiss elimination of `[A | B]` to upper-triangular form in place.
/// Returns the sign of the row permutation, or `None` when `A` is singular.
fn bareiss(m: &mut [Vec<BigInt>], n: usize) -> Option<i32> {
    let mut sign = 1;
    let mut prev = BigInt::one();
    let width = m.first().map_or(0, |r| r.len());
    for k in 0..n {
        let piv = (k..n).find(|&r| !m[r][k].is_zero())?;
        if piv != k {
            m.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..width {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Some(sign)
}

/// Exact determinant via fraction-free elimination.
pub fn determinant(a: &RatMatrix) -> Rational {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.rows;
    if n == 0 {
        return Rational::one();
    }
    let (mut m, scale) = integer_rows(a, &RatMatrix::zeros(n, 0));
    match bareiss(&mut m, n) {
        None => Rational::zero(),
        Some(sign) => Rational::new(m[n - 1][n - 1].clone() * sign, scale),
    }
}

/// Solves `A X = B` for every column of `B`.
pub fn solve_many(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix, ArithError> {
    if !a.is_square() || a.rows != b.rows {
        return Err(ArithError::Dimension(format!(
            "{}x{} system with {} right-hand rows",
            a.rows, a.cols, b.rows
        )));
    }
    let n = a.rows;
    let (mut m, _) = integer_rows(a, b);
    bareiss(&mut m, n).ok_or(ArithError::Singular)?;
    let mut x = RatMatrix::zeros(n, b.cols);
    for c in 0..b.cols {
        for i in (0..n).rev() {
            let mut s = Rational::from_integer(m[i][n + c].clone());
            for j in i + 1..n {
                s -= Rational::from_integer(m[i][j].clone()) * x.get(j, c);
            }
            x.set(i, c, s / Rational::from_integer(m[i][i].clone()));
        }
    }
    Ok(x)
}

/// Solves `A x = b` exactly.
pub fn solve_linear(a: &RatMatrix, b: &[Rational]) -> Result<RatVector, ArithError> {
    let rhs = RatMatrix::from_columns(&[b.to_vec()]);
    if b.len() != a.rows {
        return Err(ArithError::Dimension(format!("rhs length {} vs {} rows", b.len(), a.rows)));
    }
    Ok(solve_many(a, &rhs)?.column(0))
}

pub fn inverse(a: &RatMatrix) -> Result<RatMatrix, ArithError> {
    solve_many(a, &RatMatrix::identity(a.rows))
}

/// `sum |x_i|^p`.
pub fn lp_power(x: &[Rational], p: u32) -> Rational {
    x.iter().map(|v| num::pow(v.abs(), p as usize)).sum()
}

/// Compares `||x||_p` with `||y||_p` through their exact `p`-th powers.
pub fn lp_power_compare(x: &[Rational], y: &[Rational], p: u32) -> Ordering {
    assert_eq!(x.len(), y.len(), "lp_power_compare on vectors of different length");
    assert!(p >= 1, "p must be positive");
    lp_power(x, p).cmp(&lp_power(y, p))
}

/// Compares `||x||_p` with `c * ||y||_p` for `c >= 0`.
pub fn lp_scaled_compare(x: &[Rational], c: &Rational, y: &[Rational], p: u32) -> Ordering {
    lp_power(x, p).cmp(&(num::pow(c.clone(), p as usize) * lp_power(y, p)))
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Lexicographic sign of a row: first nonzero entry decides.
pub fn lex_sign(row: &[Rational]) -> Sign {
    for x in row {
        if x.is_positive() {
            return Sign::Plus;
        }
        if x.is_negative() {
            return Sign::Minus;
        }
    }
    Sign::NoSign
}

/// Simplest rational (smallest denominator) strictly inside `(lo, hi)`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi, "empty interval");
    let fl = lo.floor();
    if &(fl.clone() + Rational::one()) < hi {
        return fl + Rational::one();
    }
    let fl_lo = fl.clone();
    let a = lo - &fl_lo;
    let b = hi - &fl_lo;
    // 0 <= a < b <= 1; recurse on reciprocals.
    if a.is_zero() {
        // Need x in (0, b): 1/x > 1/b.
        let inv = b.recip();
        let n = inv.floor() + Rational::one();
        return fl_lo + n.recip();
    }
    let inner = simplest_between(&b.recip(), &a.recip());
    fl_lo + inner.recip()
}

pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_rat(&v).map_err(serde::de::Error::custom)
    }

    pub(crate) fn value_to_rat(v: &serde_json::Value) -> Result<Rational, ArithError> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(ArithError::Parse(other.to_string())),
        }
    }
}

pub mod serde_rat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RatVector, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(|x| serde_rat::value_to_rat(x).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_rat_mat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &RatMatrix, s: S) -> Result<S::Ok, S::Error> {
        m.to_rows()
            .iter()
            .map(|r| r.iter().map(format_rational).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RatMatrix, D::Error> {
        let v = Vec::<Vec<serde_json::Value>>::deserialize(d)?;
        let rows = v
            .iter()
            .map(|r| r.iter().map(serde_rat::value_to_rat).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        RatMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_rat_mat::serialize(self, s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        serde_rat_mat::deserialize(d)
    }
}
