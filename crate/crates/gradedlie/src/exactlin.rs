//! Exact rational scalars and exact sparse linear algebra.
//!
//! Everything in this crate is computed over Q with no rounding anywhere:
//! [`Scalar`] is an arbitrary-precision rational kept in canonical form
//! (reduced, positive denominator), [`SparseMatrix`] stores only nonzero
//! entries, and [`rref`] / [`nullspace`] / [`in_span`] are Gaussian
//! elimination with a deterministic pivot rule (first nonzero entry in
//! row-major scan), so reduced forms and nullspace bases are unique and
//! byte-stable across runs.
//!
//! The coefficient field is Q rather than C. All defining linear systems in
//! this crate have rational coefficients once the algebra parameters are
//! fixed rationals, so nullities over Q agree with nullities over C; no
//! dimension count below is affected by the restriction.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

/// Arbitrary-precision rational in canonical form: reduced fraction with
/// positive denominator. The coefficient field for the whole crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den` as a canonical rational. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// True exactly when `self` lies in `1/2 + Z`.
    pub fn is_odd_half_integer(&self) -> bool {
        let doubled = &self.0 + &self.0;
        doubled.is_integer() && !self.0.is_integer()
    }

    pub fn recip(&self) -> Scalar {
        assert!(!self.is_zero(), "division by zero");
        Scalar(self.0.recip())
    }

    /// Integer power, negative exponents allowed for nonzero values.
    pub fn pow(&self, exp: i64) -> Scalar {
        if exp == 0 {
            return Scalar::one();
        }
        assert!(!self.is_zero() || exp > 0, "negative power of zero scalar");
        let e = i32::try_from(exp).expect("exponent out of range");
        Scalar(self.0.pow(e))
    }

    pub fn abs(&self) -> Scalar {
        Scalar(self.0.abs())
    }

    /// Parses `p`, `-p`, or `p/q` (sign on the numerator).
    pub fn parse(text: &str) -> Result<Scalar, ScalarParseError> {
        let s = text.trim();
        if s.is_empty() {
            return Err(ScalarParseError(text.to_owned()));
        }
        let (num_s, den_s) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = BigInt::from_str(num_s).map_err(|_| ScalarParseError(text.to_owned()))?;
        let den = BigInt::from_str(den_s).map_err(|_| ScalarParseError(text.to_owned()))?;
        if den.is_zero() {
            return Err(ScalarParseError(text.to_owned()));
        }
        Ok(Scalar(BigRational::new(num, den)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarParseError(pub String);

impl fmt::Display for ScalarParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a rational number: {:?} (expected p or p/q)", self.0)
    }
}

impl std::error::Error for ScalarParseError {}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(self.0 / rhs.0)
    }
}

impl Div<&Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(self.0 / &rhs.0)
    }
}

impl Div<Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(&self.0 / rhs.0)
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(&self.0 / &rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

/// Sparse matrix over [`Scalar`]: only nonzero entries are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Stores `value` at `(row, col)`; zero values erase the entry.
    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    /// Adds `value` into `(row, col)`.
    pub fn add_to(&mut self, row: usize, col: usize, value: &Scalar) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        let cur = self.get(row, col) + value;
        self.set(row, col, cur);
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = SparseMatrix::new(nrows, ncols);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Matrix-vector product, exact.
    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        let mut out = vec![Scalar::zero(); self.rows];
        for ((r, c), a) in &self.entries {
            if !v[*c].is_zero() {
                out[*r] = &out[*r] + &(a * &v[*c]);
            }
        }
        out
    }

    fn row_map(&self, r: usize) -> BTreeMap<usize, Scalar> {
        self.entries
            .range((r, 0)..=(r, self.cols.saturating_sub(1)))
            .map(|((_, c), v)| (*c, v.clone()))
            .collect()
    }
}

/// Result of reduced row-echelon elimination.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rank: usize,
    /// Pivot columns in ascending order; `pivots[i]` belongs to row `i` of `reduced`.
    pub pivots: Vec<usize>,
    pub reduced: SparseMatrix,
}

/// `dst += c * src`, dropping entries that cancel to zero.
fn axpy(dst: &mut BTreeMap<usize, Scalar>, c: &Scalar, src: &BTreeMap<usize, Scalar>) {
    for (col, v) in src {
        let add = c * v;
        match dst.get_mut(col) {
            Some(cur) => {
                let next = &*cur + &add;
                if next.is_zero() {
                    dst.remove(col);
                } else {
                    *cur = next;
                }
            }
            None => {
                if !add.is_zero() {
                    dst.insert(*col, add);
                }
            }
        }
    }
}

/// Unique reduced row-echelon form over Q.
///
/// Rows are absorbed one at a time and the pivot-row set is kept fully
/// reduced throughout, so each incoming row only ever touches a handful of
/// entries; this keeps the Leibniz systems (thousands of rows, each with at
/// most seven nonzeros) cheap.
pub fn rref(m: &SparseMatrix) -> Rref {
    // pivot col -> fully reduced row with 1 at the pivot col
    let mut pivot_rows: BTreeMap<usize, BTreeMap<usize, Scalar>> = BTreeMap::new();

    for r in 0..m.rows {
        let mut row = m.row_map(r);
        // Eliminating a pivot column never introduces another pivot column
        // (pivot rows are zero on all other pivots), so one pass suffices.
        let hits: Vec<usize> = row
            .keys()
            .copied()
            .filter(|c| pivot_rows.contains_key(c))
            .collect();
        for c in hits {
            if let Some(coef) = row.remove(&c) {
                let neg = -&coef;
                let mut src = pivot_rows[&c].clone();
                src.remove(&c);
                axpy(&mut row, &neg, &src);
            }
        }
        let Some((&pc, _)) = row.iter().next() else {
            continue; // row reduced to zero
        };
        let inv = row[&pc].recip();
        for v in row.values_mut() {
            *v = &*v * &inv;
        }
        // Re-establish full reduction above the new pivot.
        let mut reduced_row = row.clone();
        reduced_row.remove(&pc);
        for prow in pivot_rows.values_mut() {
            if let Some(coef) = prow.remove(&pc) {
                let neg = -&coef;
                axpy(prow, &neg, &reduced_row);
            }
        }
        pivot_rows.insert(pc, row);
    }

    let pivots: Vec<usize> = pivot_rows.keys().copied().collect();
    let rank = pivots.len();
    let mut reduced = SparseMatrix::new(m.rows, m.cols);
    for (i, (_, row)) in pivot_rows.into_iter().enumerate() {
        for (c, v) in row {
            reduced.set(i, c, v);
        }
    }
    Rref {
        rank,
        pivots,
        reduced,
    }
}

/// Canonical nullspace basis of `m`: one vector per free column in ascending
/// column order, with the free variable set to 1. `m  v = 0` holds exactly
/// for every returned `v`.
pub fn nullspace(m: &SparseMatrix) -> Vec<Vec<Scalar>> {
    let r = rref(m);
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; m.cols];
        for &p in &r.pivots {
            v[p] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..m.cols {
        if pivot_set[free] {
            continue;
        }
        let mut v = vec![Scalar::zero(); m.cols];
        v[free] = Scalar::one();
        for (row, &p) in r.pivots.iter().enumerate() {
            let a = r.reduced.get(row, free);
            if !a.is_zero() {
                v[p] = -a;
            }
        }
        basis.push(v);
    }
    basis
}

/// Exact span membership: coordinates `c` with `sum c_i basis_i = target`,
/// or `None` when `target` is outside the span. Dependent basis vectors are
/// fine; free coordinates are set to 0, which makes the answer canonical.
pub fn in_span(basis: &[Vec<Scalar>], target: &[Scalar]) -> Option<Vec<Scalar>> {
    for b in basis {
        assert_eq!(b.len(), target.len(), "vector length mismatch");
    }
    if basis.is_empty() {
        return if target.iter().all(Scalar::is_zero) {
            Some(Vec::new())
        } else {
            None
        };
    }
    let dim = target.len();
    let ncols = basis.len() + 1;
    let aug = basis.len();
    let mut m = SparseMatrix::new(dim, ncols);
    for (j, b) in basis.iter().enumerate() {
        for (i, v) in b.iter().enumerate() {
            m.set(i, j, v.clone());
        }
    }
    for (i, v) in target.iter().enumerate() {
        m.set(i, aug, v.clone());
    }
    let r = rref(&m);
    if r.pivots.contains(&aug) {
        return None; // inconsistent: target adds rank
    }
    let mut coords = vec![Scalar::zero(); basis.len()];
    for (row, &p) in r.pivots.iter().enumerate() {
        coords[p] = r.reduced.get(row, aug);
    }
    Some(coords)
}
