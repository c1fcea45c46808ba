//! Integer matrices over arbitrary-precision integers: Smith and Hermite
//! normal forms with unimodular transforms, and fraction-free determinants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigInt>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimMismatch("rows of unequal length".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        let rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|x| BigInt::from(*x)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimMismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    col.len()
                )));
            }
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
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

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch(format!(
                "{}x{} times {}x{}",
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
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self[(i, j)] == if i == j { BigInt::one() } else { BigInt::zero() })
            })
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = f * &self[(src, j)];
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = f * &self[(i, src)];
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // entries as JSON numbers when they fit, else strings
        let rows: Vec<Vec<serde_json_num::Num>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(serde_json_num::Num::from).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<serde_json_num::Num>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<BigInt>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.0).collect())
            .collect();
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

mod serde_json_num {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Serialize};

    pub struct Num(pub BigInt);

    impl From<&BigInt> for Num {
        fn from(b: &BigInt) -> Self {
            Num(b.clone())
        }
    }

    impl Serialize for Num {
        fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            match self.0.to_i64() {
                Some(v) => s.serialize_i64(v),
                None => s.serialize_str(&self.0.to_string()),
            }
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Str(String),
    }

    impl<'de> Deserialize<'de> for Num {
        fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            match Raw::deserialize(d)? {
                Raw::Int(v) => Ok(Num(BigInt::from(v))),
                Raw::Str(s) => s
                    .trim()
                    .parse()
                    .map(Num)
                    .map_err(|_| serde::de::Error::custom(format!("invalid integer `{s}`"))),
            }
        }
    }
}

/// `U * M * V = S` with `S` diagonal, `d_1 | d_2 | ...`, all `d_i >= 0`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries of `S` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }

    /// Nonzero invariant factors.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| !d.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }

    /// Re-checks `U M V = S`, unimodularity, and the divisibility chain.
    pub fn verify(&self, m: &IntMatrix) -> bool {
        let Ok(umv) = self.u.mul(m).and_then(|x| x.mul(&self.v)) else {
            return false;
        };
        if umv != self.s || !self.u.is_unimodular() || !self.v.is_unimodular() {
            return false;
        }
        for i in 0..self.s.rows {
            for j in 0..self.s.cols {
                if i != j && !self.s[(i, j)].is_zero() {
                    return false;
                }
            }
        }
        let d = self.diagonal();
        d.iter().all(|x| !x.is_negative())
            && d.windows(2).all(|w| {
                if w[0].is_zero() {
                    w[1].is_zero()
                } else {
                    w[1].is_multiple_of(&w[0])
                }
            })
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let (r, c) = (m.rows, m.cols);
    for t in 0..r.min(c) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = &s[(i, j)];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, s, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..r {
                if !s[(i, t)].is_zero() {
                    let q = -s[(i, t)].div_floor(&s[(t, t)]);
                    s.add_row(i, t, &q);
                    u.add_row(i, t, &q);
                    clean &= s[(i, t)].is_zero();
                }
            }
            for j in t + 1..c {
                if !s[(t, j)].is_zero() {
                    let q = -s[(t, j)].div_floor(&s[(t, t)]);
                    s.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    clean &= s[(t, j)].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // divisibility: pull in any entry the pivot does not divide
            let bad = (t + 1..r)
                .find(|&i| (t + 1..c).any(|j| !s[(i, j)].is_multiple_of(&s[(t, t)])));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, s, v)
}

fn finish(u: IntMatrix, s: IntMatrix, v: IntMatrix) -> SmithForm {
    SmithForm { u, s, v }
}

/// Row-style Hermite normal form: `U * M = H`, `H` in echelon form with
/// positive pivots and reduced entries above each pivot. Zero rows trail.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub u: IntMatrix,
    pub h: IntMatrix,
    pub rank: usize,
}

impl HermiteForm {
    /// Nonzero rows of `H`: the canonical basis of the row lattice.
    pub fn basis(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank).map(|i| self.h.row(i).to_vec()).collect()
    }
}

pub fn hermite_normal_form(m: &IntMatrix) -> HermiteForm {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let (r, c) = (m.rows, m.cols);
    let mut pr = 0;
    for col in 0..c {
        if pr == r {
            break;
        }
        loop {
            let best = (pr..r)
                .filter(|&i| !h[(i, col)].is_zero())
                .min_by(|&a, &b| h[(a, col)].abs().cmp(&h[(b, col)].abs()));
            let Some(p) = best else { break };
            h.swap_rows(pr, p);
            u.swap_rows(pr, p);
            let mut done = true;
            for i in pr + 1..r {
                if !h[(i, col)].is_zero() {
                    let q = -h[(i, col)].div_floor(&h[(pr, col)]);
                    h.add_row(i, pr, &q);
                    u.add_row(i, pr, &q);
                    done &= h[(i, col)].is_zero();
                }
            }
            if done {
                break;
            }
        }
        if h[(pr, col)].is_zero() {
            continue;
        }
        if h[(pr, col)].is_negative() {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        for i in 0..pr {
            let q = -h[(i, col)].div_floor(&h[(pr, col)]);
            h.add_row(i, pr, &q);
            u.add_row(i, pr, &q);
        }
        pr += 1;
    }
    HermiteForm { u, h, rank: pr }
}

/// Basis of the integer kernel `{x in Z^cols : M x = 0}`, as columns of `V`.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    (rank..m.cols).map(|j| snf.v.column(j)).collect()
}
