//! Skew-symmetric matrices over [`Scalar`], pfaffians and pfaffian minors.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{Rational, Scalar};

/// Largest dimension accepted by the matching-sum oracle.
pub const ORACLE_LIMIT: usize = 12;

/// `n x n` skew-symmetric matrix. Indices in the public API are 1-based.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SkewMatrix {
    n: usize,
    // dense row-major, full skew storage
    data: Vec<Scalar>,
}

impl SkewMatrix {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            data: vec![Scalar::zero(); n * n],
        }
    }

    /// Builds from the strict upper triangle, `f(i, j)` for `1 <= i < j <= n`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut m = Self::zero(n);
        for i in 1..=n {
            for j in i + 1..=n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from a full square array; only the upper triangle is read.
    pub fn from_rows(rows: &[Vec<Scalar>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimMismatch("rows of unequal length".into()));
        }
        for i in 0..n {
            if !rows[i][i].is_zero() {
                return Err(Error::Invalid(format!("nonzero diagonal at {}", i + 1)));
            }
            for j in i + 1..n {
                if rows[j][i] != -&rows[i][j] {
                    return Err(Error::Invalid(format!("not skew at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i - 1][j - 1].clone()))
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        let rows: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.iter().map(|x| Scalar::from_int(*x)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, i: usize, j: usize) {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "index ({i}, {j}) outside 1..={}",
            self.n
        );
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        self.check(i, j);
        &self.data[(i - 1) * self.n + (j - 1)]
    }

    /// 0-based access for inner loops.
    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.n + j]
    }

    /// Sets `(i, j)` and `(j, i)` consistently. Panics on `i == j`.
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.check(i, j);
        assert_ne!(i, j, "diagonal of a skew matrix is zero");
        let n = self.n;
        self.data[(j - 1) * n + (i - 1)] = -&v;
        self.data[(i - 1) * n + (j - 1)] = v;
    }

    /// Iterates `(i, j, value)` over the strict upper triangle.
    pub fn upper(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        let n = self.n;
        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn map(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> Self {
        Self::from_fn(self.n, |i, j| f(self.get(i, j)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self, other)?;
        Ok(Self::from_fn(self.n, |i, j| self.get(i, j) + other.get(i, j)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_dim(self, other)?;
        Ok(Self::from_fn(self.n, |i, j| self.get(i, j) - other.get(i, j)))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map(|x| x.scale(r))
    }

    pub fn is_rational(&self) -> bool {
        self.data.iter().all(Scalar::is_rational)
    }

    /// Submatrix on the rows and columns of `idx`.
    pub fn restrict(&self, idx: &MinorIndex) -> Result<Self> {
        idx.check_within(self.n)?;
        let v = idx.as_slice();
        Ok(Self::from_fn(v.len(), |a, b| self.get(v[a - 1], v[b - 1]).clone()))
    }

    /// Exact value at the rational point `a = x`.
    pub fn eval_rational(&self, x: &Rational) -> Self {
        self.map(|s| Scalar::from_rational(s.eval_rational(x)))
    }

    /// Dense double matrix, evaluating `a` at `alpha`.
    pub fn to_f64(&self, alpha: f64) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j).to_f64(alpha)).collect())
            .collect()
    }

    /// Full square matrix of scalars.
    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j).clone()).collect())
            .collect()
    }
}

fn same_dim(a: &SkewMatrix, b: &SkewMatrix) -> Result<()> {
    if a.n != b.n {
        return Err(Error::DimMismatch(format!("{} vs {}", a.n, b.n)));
    }
    Ok(())
}

impl fmt::Debug for SkewMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SkewMatrix(n={}", self.n)?;
        for (i, j, v) in self.upper() {
            if !v.is_zero() {
                write!(f, ", ({i},{j})={v}")?;
            }
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    i: usize,
    j: usize,
    value: Scalar,
}

#[derive(Serialize, Deserialize)]
struct SkewJson {
    n: usize,
    entries: Vec<EntryJson>,
}

impl TryFrom<SkewJson> for SkewMatrix {
    type Error = Error;

    fn try_from(j: SkewJson) -> Result<Self> {
        let mut m = SkewMatrix::zero(j.n);
        let mut seen = std::collections::BTreeSet::new();
        for (k, e) in j.entries.into_iter().enumerate() {
            if !(1 <= e.i && e.i < e.j && e.j <= j.n) {
                return Err(Error::Parse(format!(
                    "entries[{k}]: need 1 <= i < j <= {}, got i={}, j={}",
                    j.n, e.i, e.j
                )));
            }
            if !seen.insert((e.i, e.j)) {
                return Err(Error::Parse(format!("entries[{k}]: duplicate ({}, {})", e.i, e.j)));
            }
            m.set(e.i, e.j, e.value);
        }
        Ok(m)
    }
}

impl From<&SkewMatrix> for SkewJson {
    fn from(m: &SkewMatrix) -> Self {
        SkewJson {
            n: m.n,
            entries: m
                .upper()
                .filter(|(_, _, v)| !v.is_zero())
                .map(|(i, j, v)| EntryJson { i, j, value: v.clone() })
                .collect(),
        }
    }
}

impl Serialize for SkewMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SkewJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SkewMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SkewJson::deserialize(d)?;
        SkewMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Strictly increasing even-length index tuple, 1-based, possibly empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct MinorIndex(Vec<usize>);

impl MinorIndex {
    pub fn new(v: Vec<usize>) -> Result<Self> {
        if v.len() % 2 != 0 {
            return Err(Error::Invalid(format!("minor index {v:?} has odd length")));
        }
        if v.first() == Some(&0) || v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(format!(
                "minor index {v:?} must be strictly increasing and 1-based"
            )));
        }
        Ok(Self(v))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// `(1, 2, ..., k)`.
    pub fn leading(k: usize) -> Self {
        Self((1..=k).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn check_within(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&l) if l > n => Err(Error::BadIndex { index: l, n }),
            _ => Ok(()),
        }
    }

    /// Indices of `1..=n` not in `self`.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (1..=n).filter(|k| !self.0.contains(k)).collect()
    }

    /// Bitmask with bit `k-1` set for each index `k`.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, k| m | 1 << (k - 1))
    }

    /// Drops the last two indices.
    pub fn truncated(&self) -> Self {
        let k = self.0.len().saturating_sub(2);
        Self(self.0[..k].to_vec())
    }
}

impl<'de> Deserialize<'de> for MinorIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        MinorIndex::new(v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for MinorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Pfaffian by expansion along the last column, memoized on index subsets.
pub fn pfaffian(a: &SkewMatrix) -> Result<Scalar> {
    if a.n % 2 != 0 {
        return Err(Error::OddDimension(a.n));
    }
    if a.n > 64 {
        return Err(Error::Invalid("dimension above 64 not supported".into()));
    }
    let full = if a.n == 64 { u64::MAX } else { (1u64 << a.n) - 1 };
    let mut memo = PfMemo::new(a);
    Ok(memo.pf(full))
}

/// Shared-memo evaluator: pfaffians of all principal submatrices on demand.
pub struct PfMemo<'a> {
    a: &'a SkewMatrix,
    cache: HashMap<u64, Scalar>,
}

impl<'a> PfMemo<'a> {
    pub fn new(a: &'a SkewMatrix) -> Self {
        Self {
            a,
            cache: HashMap::new(),
        }
    }

    /// Pfaffian of the submatrix on the 0-based indices set in `mask`.
    pub fn pf(&mut self, mask: u64) -> Scalar {
        if mask == 0 {
            return Scalar::one();
        }
        if mask.count_ones() % 2 == 1 {
            return Scalar::zero();
        }
        if let Some(v) = self.cache.get(&mask) {
            return v.clone();
        }
        let last = 63 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << last);
        let mut acc = Scalar::zero();
        let mut pos = 0usize;
        let mut bits = rest;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let entry = self.a.at(k, last);
            if !entry.is_zero() {
                let sub = self.pf(rest & !(1 << k));
                if !sub.is_zero() {
                    let term = entry * &sub;
                    acc = if pos % 2 == 0 { acc + term } else { acc - term };
                }
            }
            pos += 1;
        }
        self.cache.insert(mask, acc.clone());
        acc
    }

    pub fn minor(&mut self, idx: &MinorIndex) -> Result<Scalar> {
        idx.check_within(self.a.n)?;
        Ok(self.pf(idx.mask()))
    }
}

/// Pfaffian as a signed sum over perfect matchings. Brute-force oracle.
pub fn pfaffian_perm(a: &SkewMatrix) -> Result<Scalar> {
    if a.n % 2 != 0 {
        return Err(Error::OddDimension(a.n));
    }
    if a.n > ORACLE_LIMIT {
        return Err(Error::OracleLimit {
            n: a.n,
            limit: ORACLE_LIMIT,
        });
    }
    let mut total = Scalar::zero();
    let mut seq = Vec::with_capacity(a.n);
    let mut used = vec![false; a.n];
    matchings(a, &mut used, &mut seq, &mut total);
    Ok(total)
}

fn matchings(a: &SkewMatrix, used: &mut [bool], seq: &mut Vec<usize>, total: &mut Scalar) {
    let Some(i) = used.iter().position(|u| !u) else {
        let inversions = (0..seq.len())
            .flat_map(|x| (x + 1..seq.len()).map(move |y| (x, y)))
            .filter(|&(x, y)| seq[x] > seq[y])
            .count();
        let mut prod = Scalar::one();
        for pair in seq.chunks(2) {
            prod = prod * a.at(pair[0], pair[1]);
        }
        *total = if inversions % 2 == 0 {
            &*total + prod
        } else {
            &*total - prod
        };
        return;
    };
    used[i] = true;
    for j in i + 1..used.len() {
        if !used[j] {
            used[j] = true;
            seq.push(i);
            seq.push(j);
            matchings(a, used, seq, total);
            seq.truncate(seq.len() - 2);
            used[j] = false;
        }
    }
    used[i] = false;
}

/// Division-free determinant (Berkowitz) of a square Scalar matrix.
pub fn determinant(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    if n == 0 {
        return Scalar::one();
    }
    // coefficients of the characteristic polynomial, leading first
    let mut vect = vec![Scalar::one(), -&m[0][0]];
    for r in 1..n {
        // toeplitz column: 1, -a_rr, -R C, -R M C, ...
        let mut t = Vec::with_capacity(r + 2);
        t.push(Scalar::one());
        t.push(-&m[r][r]);
        let mut c: Vec<Scalar> = (0..r).map(|i| m[i][r].clone()).collect();
        for _ in 0..r {
            let rc: Scalar = (0..r).map(|j| &m[r][j] * &c[j]).sum();
            t.push(-rc);
            c = (0..r)
                .map(|i| (0..r).map(|j| &m[i][j] * &c[j]).sum())
                .collect();
        }
        let next: Vec<Scalar> = (0..r + 2)
            .map(|i| {
                (0..=i.min(r))
                    .map(|j| &t[i - j] * &vect[j])
                    .sum::<Scalar>()
            })
            .collect();
        vect = next;
    }
    let d = vect[n].clone();
    if n % 2 == 0 {
        d
    } else {
        -d
    }
}

/// Pfaffian of the submatrix on `idx`; `pf` of the empty minor is 1.
pub fn pfaffian_minor(a: &SkewMatrix, idx: &MinorIndex) -> Result<Scalar> {
    idx.check_within(a.n)?;
    PfMemo::new(a).minor(idx)
}

/// Even-length increasing tuples of `1..=n`, ordered by length then lexicographically.
pub fn enumerate_minors(n: usize) -> Vec<MinorIndex> {
    let mut out = Vec::with_capacity(1 << n.saturating_sub(1));
    for len in (0..=n).step_by(2) {
        let mut cur = Vec::with_capacity(len);
        combos(1, n, len, &mut cur, &mut out);
    }
    out
}

fn combos(start: usize, n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<MinorIndex>) {
    if cur.len() == len {
        out.push(MinorIndex(cur.clone()));
        return;
    }
    let need = len - cur.len();
    for k in start..=n + 1 - need {
        cur.push(k);
        combos(k + 1, n, len, cur, out);
        cur.pop();
    }
}

/// All pfaffian minors over `enumerate_minors(n)` in canonical order.
pub fn all_minors(a: &SkewMatrix) -> Vec<(MinorIndex, Scalar)> {
    let minors = enumerate_minors(a.n);
    // group by top index so each worker shares a memo on related subsets
    minors
        .into_par_iter()
        .map_init(
            || PfMemo::new(a),
            |memo, idx| {
                let v = memo.pf(idx.mask());
                (idx, v)
            },
        )
        .collect()
}

/// `(-1)^(sigma(I) - |I|/2)` with `sigma` the index sum.
pub fn summation_sign(idx: &MinorIndex) -> i8 {
    if (idx.index_sum() + idx.len() / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Both sides of the pfaffian summation identity for `A + B`.
pub fn pfaffian_sum_sides(a: &SkewMatrix, b: &SkewMatrix) -> Result<(Scalar, Scalar)> {
    same_dim(a, b)?;
    let n = a.n;
    let lhs = pfaffian(&a.add(b)?)?;
    let mut ma = PfMemo::new(a);
    let mut mb = PfMemo::new(b);
    let full = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    let mut rhs = Scalar::zero();
    for idx in enumerate_minors(n) {
        let pa = ma.pf(idx.mask());
        if pa.is_zero() {
            continue;
        }
        let pb = mb.pf(full & !idx.mask());
        let term = pa * pb;
        rhs = if summation_sign(&idx) > 0 {
            rhs + term
        } else {
            rhs - term
        };
    }
    Ok((lhs, rhs))
}

/// Skew matrix with every entry above the diagonal equal to 1.
pub fn z_matrix(n: usize) -> SkewMatrix {
    SkewMatrix::from_fn(n, |_, _| Scalar::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn sym(n: usize) -> SkewMatrix {
        // distinct monomials a^(2^k) to keep entries generic
        let mut k = 0;
        SkewMatrix::from_fn(n, |_, _| {
            k += 1;
            Scalar::alpha_pow(1 << (k - 1))
        })
    }

    #[test]
    fn two_by_two() {
        let m = SkewMatrix::from_fn(2, |_, _| Scalar::from_rational(rat(3, 4)));
        assert_eq!(pfaffian(&m).unwrap(), Scalar::from_rational(rat(3, 4)));
        assert_eq!(pfaffian_perm(&m).unwrap(), Scalar::from_rational(rat(3, 4)));
    }

    #[test]
    fn four_by_four_generic() {
        let m = sym(4);
        let g = |i, j| m.get(i, j).clone();
        let expect = g(1, 2) * g(3, 4) - g(1, 3) * g(2, 4) + g(1, 4) * g(2, 3);
        assert_eq!(pfaffian(&m).unwrap(), expect);
        assert_eq!(pfaffian_perm(&m).unwrap(), expect);
    }

    #[test]
    fn zero_and_empty() {
        assert!(pfaffian(&SkewMatrix::zero(4)).unwrap().is_zero());
        assert_eq!(pfaffian(&SkewMatrix::zero(0)).unwrap(), Scalar::one());
        assert_eq!(pfaffian(&SkewMatrix::zero(3)), Err(Error::OddDimension(3)));
        assert!(matches!(
            pfaffian_perm(&SkewMatrix::zero(14)),
            Err(Error::OracleLimit { .. })
        ));
    }

    #[test]
    fn z_pfaffians() {
        for k in 1..=5 {
            assert_eq!(pfaffian(&z_matrix(2 * k)).unwrap(), Scalar::one());
        }
        assert_eq!(pfaffian_perm(&z_matrix(4)).unwrap(), Scalar::one());
    }

    #[test]
    fn pf_squared_is_det() {
        let m = sym(6);
        let pf = pfaffian(&m).unwrap();
        assert_eq!(&pf * &pf, determinant(&m.to_rows()));
    }

    #[test]
    fn det_small_cases() {
        let s = |x: i64| Scalar::from_int(x);
        assert_eq!(determinant(&[vec![s(3)]]), s(3));
        assert_eq!(determinant(&[vec![s(1), s(2)], vec![s(3), s(4)]]), s(-2));
        let m = vec![
            vec![s(2), s(0), s(1)],
            vec![s(1), s(3), s(2)],
            vec![s(1), s(1), s(2)],
        ];
        assert_eq!(determinant(&m), s(6));
    }

    #[test]
    fn minors_enumeration() {
        let m3 = enumerate_minors(3);
        let expect: Vec<Vec<usize>> = vec![vec![], vec![1, 2], vec![1, 3], vec![2, 3]];
        assert_eq!(m3.iter().map(|m| m.0.clone()).collect::<Vec<_>>(), expect);
        assert_eq!(enumerate_minors(2).len(), 2);
        assert_eq!(enumerate_minors(10).len(), 512);
        assert_eq!(enumerate_minors(1), vec![MinorIndex::empty()]);
    }

    #[test]
    fn minor_values() {
        let m = sym(4);
        assert_eq!(pfaffian_minor(&m, &MinorIndex::empty()).unwrap(), Scalar::one());
        assert_eq!(
            pfaffian_minor(&m, &MinorIndex::new(vec![1, 2]).unwrap()).unwrap(),
            m.get(1, 2).clone()
        );
        assert!(matches!(
            pfaffian_minor(&m, &MinorIndex::new(vec![1, 5]).unwrap()),
            Err(Error::BadIndex { index: 5, n: 4 })
        ));
        assert!(MinorIndex::new(vec![2, 1]).is_err());
        assert!(MinorIndex::new(vec![1]).is_err());
    }

    #[test]
    fn sum_sides_b_zero() {
        let a = sym(4);
        let (l, r) = pfaffian_sum_sides(&a, &SkewMatrix::zero(4)).unwrap();
        assert_eq!(l, r);
        assert_eq!(l, pfaffian(&a).unwrap());
        assert!(pfaffian_sum_sides(&a, &SkewMatrix::zero(2)).is_err());
    }

    #[test]
    fn sum_sides_symbolic_six() {
        let a = sym(6);
        let b = SkewMatrix::from_fn(6, |i, j| Scalar::from_rational(rat(i as i64, j as i64 + 1)));
        let (l, r) = pfaffian_sum_sides(&a, &b).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn json_round_trip() {
        let m = sym(4);
        let s = serde_json::to_string(&m).unwrap();
        let back: SkewMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
        let bad = r#"{"n":3,"entries":[{"i":2,"j":1,"value":"1"}]}"#;
        assert!(serde_json::from_str::<SkewMatrix>(bad).is_err());
    }
}
