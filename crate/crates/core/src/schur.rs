//! The pfaffian Schur complement `F`, its closed-form iterates, and the
//! SO(n,n|Z) action on skew matrices.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{Rational, Scalar};
use crate::intmat::IntMatrix;
use crate::skewpf::{enumerate_minors, pfaffian, MinorIndex, PfMemo, SkewMatrix};

/// Exact ratio `num / den` with `den` a nonzero scalar.
#[derive(Clone, Debug, Serialize)]
pub struct RatioScalar {
    pub num: Scalar,
    pub den: Scalar,
}

impl RatioScalar {
    pub fn new(num: Scalar, den: Scalar) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Invalid("zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn from_scalar(s: Scalar) -> Self {
        Self {
            num: s,
            den: Scalar::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self {
                num: &self.num + &o.num,
                den: self.den.clone(),
            };
        }
        Self {
            num: &self.num * &o.den + &o.num * &self.den,
            den: &self.den * &o.den,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.num.is_zero() {
            return Err(Error::Invalid("division by zero ratio".into()));
        }
        Ok(Self {
            num: &self.num * &o.den,
            den: &self.den * &o.num,
        })
    }

    /// Exact value at `a = x`, if the denominator does not vanish there.
    pub fn eval_rational(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval_rational(x);
        (!d.is_zero()).then(|| self.num.eval_rational(x) / d)
    }
}

impl PartialEq for RatioScalar {
    fn eq(&self, o: &Self) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }
}

/// Skew matrix of ratios, 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioMatrix {
    n: usize,
    upper: Vec<RatioScalar>,
}

impl RatioMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> RatioScalar) -> Self {
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 1..=n {
            for j in i + 1..=n {
                upper.push(f(i, j));
            }
        }
        Self { n, upper }
    }

    pub fn try_from_fn(
        n: usize,
        mut f: impl FnMut(usize, usize) -> Result<RatioScalar>,
    ) -> Result<Self> {
        let mut upper = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                upper.push(f(i, j)?);
            }
        }
        Ok(Self { n, upper })
    }

    pub fn from_skew(m: &SkewMatrix) -> Self {
        Self::from_fn(m.n(), |i, j| RatioScalar::from_scalar(m.get(i, j).clone()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        // row-major strict upper triangle
        (i - 1) * (2 * self.n - i) / 2 + (j - i - 1)
    }

    /// Entry `(i, j)` for `i < j`; use [`RatioMatrix::entry`] for any order.
    pub fn get(&self, i: usize, j: usize) -> &RatioScalar {
        assert!(1 <= i && i < j && j <= self.n, "need 1 <= i < j <= n");
        &self.upper[self.slot(i, j)]
    }

    pub fn entry(&self, i: usize, j: usize) -> RatioScalar {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.get(i, j).clone(),
            std::cmp::Ordering::Greater => self.get(j, i).neg(),
            std::cmp::Ordering::Equal => RatioScalar::from_scalar(Scalar::zero()),
        }
    }

    /// Evaluates at `a = x`; `None` if some denominator vanishes there.
    pub fn eval_rational(&self, x: &Rational) -> Option<Vec<Vec<Rational>>> {
        let mut out = vec![vec![Rational::zero(); self.n]; self.n];
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                let v = self.get(i, j).eval_rational(x)?;
                out[j - 1][i - 1] = -v.clone();
                out[i - 1][j - 1] = v;
            }
        }
        Some(out)
    }
}

/// `F(theta)`: the `(n-2) x (n-2)` matrix with entries `pf(1,2,j+2,k+2) / theta_12`.
pub fn schur_f(theta: &SkewMatrix) -> Result<RatioMatrix> {
    let n = theta.n();
    if n < 2 {
        return Err(Error::Invalid(format!("dimension {n} is below 2")));
    }
    let t12 = theta.get(1, 2).clone();
    if t12.is_zero() {
        return Err(Error::SingularBlock);
    }
    let mut memo = PfMemo::new(theta);
    RatioMatrix::try_from_fn(n - 2, |j, k| {
        let idx = MinorIndex::new(vec![1, 2, j + 2, k + 2])?;
        RatioScalar::new(memo.minor(&idx)?, t12.clone())
    })
}

/// One step of `F` on a matrix of ratios, using only field operations.
pub fn schur_f_ratio(theta: &RatioMatrix) -> Result<RatioMatrix> {
    let n = theta.n();
    if n < 2 {
        return Err(Error::Invalid(format!("dimension {n} is below 2")));
    }
    let r12 = theta.get(1, 2).clone();
    if r12.is_zero() {
        return Err(Error::SingularBlock);
    }
    RatioMatrix::try_from_fn(n - 2, |j, k| {
        let (a, b) = (j + 2, k + 2);
        let pf4 = r12
            .mul(&theta.entry(a, b))
            .sub(&theta.entry(1, a).mul(&theta.entry(2, b)))
            .add(&theta.entry(1, b).mul(&theta.entry(2, a)));
        pf4.div(&r12)
    })
}

/// Closed form of the `m`-th iterate of `F`.
pub fn f_power_closed(theta: &SkewMatrix, m: usize) -> Result<RatioMatrix> {
    let n = theta.n();
    if m == 0 {
        return Ok(RatioMatrix::from_skew(theta));
    }
    if 2 * m > n {
        return Err(Error::Invalid(format!("iterate {m} exceeds dimension {n}")));
    }
    let mut memo = PfMemo::new(theta);
    for s in 1..=m {
        if memo.minor(&MinorIndex::leading(2 * s))?.is_zero() {
            return Err(Error::SingularLeadingMinor { s });
        }
    }
    let lead = MinorIndex::leading(2 * m);
    let den = memo.minor(&lead)?;
    RatioMatrix::try_from_fn(n - 2 * m, |j, k| {
        let mut v = lead.as_slice().to_vec();
        v.push(2 * m + j);
        v.push(2 * m + k);
        RatioScalar::new(memo.minor(&MinorIndex::new(v)?)?, den.clone())
    })
}

/// Iterates [`schur_f`] then [`schur_f_ratio`] `m` times.
pub fn f_power_iterated(theta: &SkewMatrix, m: usize) -> Result<RatioMatrix> {
    let mut cur = RatioMatrix::from_skew(theta);
    for s in 1..=m {
        cur = match schur_f_ratio(&cur) {
            Ok(c) => c,
            Err(Error::SingularBlock) => return Err(Error::SingularLeadingMinor { s }),
            Err(e) => return Err(e),
        };
    }
    Ok(cur)
}

/// One cleared identity `lhs == rhs` for the minor `minor` of `F(theta)`.
#[derive(Clone, Debug, Serialize)]
pub struct ClearedIdentity {
    pub minor: MinorIndex,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl ClearedIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub pf_theta: Scalar,
    pub pf_block: Scalar,
    /// Full-matrix identity, then one per nonempty minor of `F(theta)`.
    pub identities: Vec<ClearedIdentity>,
}

impl FactorizationReport {
    pub fn holds(&self) -> bool {
        self.identities.iter().all(ClearedIdentity::holds)
    }
}

/// Checks `pf(theta_I) = theta_12 * pf(F(theta)_I')` for `I = (1,2,I'+2)`,
/// cleared of the `theta_12` denominators: `pf(theta_I) * t^q = t * pf(N_I')`
/// where `N` holds the numerators and `|I'| = 2q`.
pub fn pf_factorization_check(theta: &SkewMatrix) -> Result<FactorizationReport> {
    let n = theta.n();
    if n % 2 != 0 {
        return Err(Error::OddDimension(n));
    }
    let f = schur_f(theta)?;
    let t12 = theta.get(1, 2).clone();
    let numerators = SkewMatrix::from_fn(n - 2, |j, k| f.get(j, k).num.clone());
    let mut big = PfMemo::new(theta);
    let mut small = PfMemo::new(&numerators);
    let mut identities = Vec::new();
    let mut minors = enumerate_minors(n - 2);
    // the full minor is listed last; report it first
    minors.retain(|m| !m.is_empty());
    if n == 2 {
        minors.push(MinorIndex::empty());
    } else {
        minors.rotate_right(1);
    }
    for sub in minors {
        let q = sub.len() / 2;
        let mut lifted = vec![1, 2];
        lifted.extend(sub.as_slice().iter().map(|k| k + 2));
        let lhs = big.minor(&MinorIndex::new(lifted)?)? * t12.pow(q as u32);
        let rhs = &t12 * &small.minor(&sub)?;
        identities.push(ClearedIdentity { minor: sub, lhs, rhs });
    }
    Ok(FactorizationReport {
        pf_theta: pfaffian(theta)?,
        pf_block: t12,
        identities,
    })
}

/// Element `[[A, B], [C, D]]` of SO(n,n|Z).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoElement {
    pub a: IntMatrix,
    pub b: IntMatrix,
    pub c: IntMatrix,
    pub d: IntMatrix,
}

impl SoElement {
    pub fn new(a: IntMatrix, b: IntMatrix, c: IntMatrix, d: IntMatrix) -> Result<Self> {
        let n = a.rows();
        for m in [&a, &b, &c, &d] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimMismatch("blocks must all be n x n".into()));
            }
        }
        let g = Self { a, b, c, d };
        if !g.satisfies_relations() {
            return Err(Error::Invalid("blocks violate the SO(n,n) relations".into()));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// `A^t C + C^t A = 0`, `B^t D + D^t B = 0`, `A^t D + C^t B = 1`.
    pub fn satisfies_relations(&self) -> bool {
        let n = self.n();
        let sym = |x: &IntMatrix, y: &IntMatrix| -> IntMatrix {
            let p = x.transpose().mul(y).unwrap();
            let q = y.transpose().mul(x).unwrap();
            add(&p, &q)
        };
        let zero = IntMatrix::zeros(n, n);
        let cross = add(
            &self.a.transpose().mul(&self.d).unwrap(),
            &self.c.transpose().mul(&self.b).unwrap(),
        );
        sym(&self.a, &self.c) == zero && sym(&self.b, &self.d) == zero && cross.is_identity()
    }

    /// Block product `self * other`.
    pub fn compose(&self, o: &Self) -> Result<Self> {
        let m = |x: &IntMatrix, y: &IntMatrix| x.mul(y);
        Ok(Self {
            a: add(&m(&self.a, &o.a)?, &m(&self.b, &o.c)?),
            b: add(&m(&self.a, &o.b)?, &m(&self.b, &o.d)?),
            c: add(&m(&self.c, &o.a)?, &m(&self.d, &o.c)?),
            d: add(&m(&self.c, &o.b)?, &m(&self.d, &o.d)?),
        })
    }

    /// `[[R, 0], [0, (R^-1)^t]]` for unimodular `R`.
    pub fn rho(r: &IntMatrix) -> Result<Self> {
        let inv = unimodular_inverse(r)?;
        let n = r.rows();
        Self::new(r.clone(), IntMatrix::zeros(n, n), IntMatrix::zeros(n, n), inv.transpose())
    }

    /// `[[1, N], [0, 1]]` for integer skew `N`.
    pub fn mu(nm: &IntMatrix) -> Result<Self> {
        let n = nm.rows();
        Self::new(
            IntMatrix::identity(n),
            nm.clone(),
            IntMatrix::zeros(n, n),
            IntMatrix::identity(n),
        )
    }

    /// Partial inversion on the first `2p` coordinates.
    pub fn sigma(n: usize, p: usize) -> Result<Self> {
        if 2 * p > n {
            return Err(Error::Invalid(format!("2p = {} exceeds n = {n}", 2 * p)));
        }
        let diag = |lead: bool| {
            let mut m = IntMatrix::zeros(n, n);
            for i in 0..n {
                if (i < 2 * p) == lead {
                    m[(i, i)] = BigInt::one();
                }
            }
            m
        };
        Self::new(diag(false), diag(true), diag(true), diag(false))
    }
}

fn add(x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    let mut out = x.clone();
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            out[(i, j)] += &y[(i, j)];
        }
    }
    out
}

fn unimodular_inverse(r: &IntMatrix) -> Result<IntMatrix> {
    if !r.is_unimodular() {
        return Err(Error::Invalid("matrix is not unimodular".into()));
    }
    let n = r.rows();
    let rows: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| Scalar::from_rational(Rational::from_integer(r[(i, j)].clone()))).collect())
        .collect();
    let id: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| Scalar::from_int((i == j) as i64)).collect())
        .collect();
    // X R = I  <=>  R^t X^t = I
    let x = right_divide(&id, &rows)?;
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = x[i][j].as_rational().expect("rational input");
            if !v.is_integer() {
                return Err(Error::Invalid("inverse is not integral".into()));
            }
            out[(i, j)] = v.to_integer();
        }
    }
    Ok(out)
}

fn int_scalar(x: &BigInt) -> Scalar {
    Scalar::from_rational(Rational::from_integer(x.clone()))
}

fn mat_mul_int_skew(m: &IntMatrix, theta: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let n = m.rows();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .filter(|&k| !m[(i, k)].is_zero())
                        .map(|k| theta[k][j].scale(&Rational::from_integer(m[(i, k)].clone())))
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// Solves `Z Y = X` for `Z`, dividing only by rational pivots.
fn right_divide(x: &[Vec<Scalar>], y: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let n = y.len();
    // work on Y^t Z^t = X^t with augmented columns
    let mut aug: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut row: Vec<Scalar> = (0..n).map(|j| y[j][i].clone()).collect();
            row.extend((0..x.len()).map(|j| x[j][i].clone()));
            row
        })
        .collect();
    let width = n + x.len();
    for col in 0..n {
        let candidates: Vec<usize> = (col..n).filter(|&r| !aug[r][col].is_zero()).collect();
        if candidates.is_empty() {
            return Err(Error::UndefinedAction);
        }
        let Some(&p) = candidates.iter().find(|&&r| aug[r][col].is_rational()) else {
            return Err(Error::SymbolicInversion);
        };
        aug.swap(col, p);
        let inv = Rational::one() / aug[col][col].as_rational().unwrap();
        for c in col..width {
            aug[col][c] = aug[col][c].scale(&inv);
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for c in col..width {
                    let d = &f * &aug[col][c];
                    aug[r][c] = &aug[r][c] - &d;
                }
            }
        }
    }
    // row r of aug now holds row r of Z^t, i.e. column r of Z
    Ok((0..x.len())
        .map(|i| (0..n).map(|j| aug[j][n + i].clone()).collect())
        .collect())
}

/// `g theta = (A theta + B)(C theta + D)^-1`.
pub fn so_nn_act(g: &SoElement, theta: &SkewMatrix) -> Result<SkewMatrix> {
    let n = g.n();
    if theta.n() != n {
        return Err(Error::DimMismatch(format!("element is {n}, matrix is {}", theta.n())));
    }
    let t = theta.to_rows();
    let mut x = mat_mul_int_skew(&g.a, &t);
    let mut y = mat_mul_int_skew(&g.c, &t);
    for i in 0..n {
        for j in 0..n {
            x[i][j] = &x[i][j] + &int_scalar(&g.b[(i, j)]);
            y[i][j] = &y[i][j] + &int_scalar(&g.d[(i, j)]);
        }
    }
    let z = right_divide(&x, &y)?;
    SkewMatrix::from_rows(&z).map_err(|_| Error::Invalid("action produced a non-skew matrix".into()))
}

/// The action after substituting a rational point for `a`.
pub fn so_nn_act_at(g: &SoElement, theta: &SkewMatrix, x: &Rational) -> Result<SkewMatrix> {
    so_nn_act(g, &theta.eval_rational(x))
}

/// Integer skew matrix as an [`IntMatrix`], if every entry is an integer.
pub fn integer_part(theta: &SkewMatrix) -> Option<IntMatrix> {
    let n = theta.n();
    let mut m = IntMatrix::zeros(n, n);
    for (i, j, v) in theta.upper() {
        let r = v.as_rational()?;
        if !r.is_integer() {
            return None;
        }
        m[(i - 1, j - 1)] = r.to_integer();
        m[(j - 1, i - 1)] = -r.to_integer();
    }
    Some(m)
}
