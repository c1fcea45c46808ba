//! Bernstein certificates for the segment `(1-t)A + tZ` and integer translates
//! that make every certificate coefficient at least 1.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{int, Rational, Scalar};
use crate::skewpf::{enumerate_minors, z_matrix, MinorIndex, PfMemo, SkewMatrix};

/// Rounds of increment doubling before giving up.
pub const MAX_ROUNDS: usize = 10;

/// Coefficients `c_r` of `t^(m-r) (1-t)^r` in `pf(((1-t)A + tZ)_J)`, `|J| = 2m`,
/// listed from `r = m` down to `r = 0`.
pub fn bernstein_coeffs(a: &SkewMatrix, j: &MinorIndex) -> Result<Vec<(usize, Scalar)>> {
    j.check_within(a.n())?;
    if j.is_empty() {
        return Err(Error::Invalid("bernstein coefficients need |J| >= 2".into()));
    }
    let mut memo = PfMemo::new(a);
    Ok(coeffs_with(&mut memo, j))
}

fn coeffs_with(memo: &mut PfMemo<'_>, j: &MinorIndex) -> Vec<(usize, Scalar)> {
    let js = j.as_slice();
    let m = js.len() / 2;
    let mut c = vec![Scalar::zero(); m + 1];
    // subsets of positions within J
    for mask in 0u64..(1 << js.len()) {
        let k = mask.count_ones() as usize;
        if k % 2 != 0 {
            continue;
        }
        let r = k / 2;
        let mut sigma = 0usize;
        let mut sub = 0u64;
        for (p, &idx) in js.iter().enumerate() {
            if mask >> p & 1 == 1 {
                sigma += p + 1;
                sub |= 1 << (idx - 1);
            }
        }
        let v = memo.pf(sub);
        if v.is_zero() {
            continue;
        }
        c[r] = if (sigma + r) % 2 == 0 { &c[r] + &v } else { &c[r] - &v };
    }
    c.into_iter().enumerate().rev().collect()
}

/// Full certificate over every nonempty `J` and every `r`.
#[derive(Clone, Debug, Serialize)]
pub struct BernsteinCert {
    pub coeffs: Vec<CertEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertEntry {
    #[serde(rename = "J")]
    pub minor: MinorIndex,
    pub r: usize,
    pub value: Scalar,
}

impl BernsteinCert {
    pub fn build(a: &SkewMatrix) -> Self {
        let mut memo = PfMemo::new(a);
        let mut coeffs = Vec::new();
        for j in enumerate_minors(a.n()).into_iter().filter(|j| !j.is_empty()) {
            for (r, value) in coeffs_with(&mut memo, &j) {
                coeffs.push(CertEntry {
                    minor: j.clone(),
                    r,
                    value,
                });
            }
        }
        Self { coeffs }
    }

    fn all(&self, pred: impl Fn(&Rational) -> bool) -> bool {
        self.coeffs
            .iter()
            .all(|e| e.value.as_rational().is_some_and(&pred))
    }

    /// Every coefficient is a rational > 0.
    pub fn all_positive(&self) -> bool {
        self.all(|r| r.is_positive())
    }

    /// Every coefficient is a rational >= 1.
    pub fn all_at_least_one(&self) -> bool {
        self.all(|r| *r >= Rational::one())
    }
}

fn require_rational(a: &SkewMatrix) -> Result<()> {
    if !a.is_rational() {
        return Err(Error::Invalid("matrix must be rational".into()));
    }
    Ok(())
}

fn minors_positive(a: &SkewMatrix) -> bool {
    let mut memo = PfMemo::new(a);
    enumerate_minors(a.n())
        .iter()
        .skip(1)
        .all(|m| memo.pf(m.mask()).as_rational().is_some_and(|r| r.is_positive()))
}

/// Smallest `k >= 0` with every nonempty minor of `A + kZ` positive.
pub fn make_minors_positive(a: &SkewMatrix) -> Result<(u64, SkewMatrix)> {
    require_rational(a)?;
    let z = z_matrix(a.n());
    let mut cur = a.clone();
    let mut k = 0u64;
    while !minors_positive(&cur) {
        cur = cur.add(&z)?;
        k += 1;
    }
    Ok((k, cur))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Increment {
    pub i: usize,
    pub j: usize,
    #[serde(serialize_with = "ser_big")]
    pub delta: BigInt,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    use num_traits::ToPrimitive;
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslateResult {
    #[serde(skip)]
    pub translate: SkewMatrix,
    pub increments: Vec<Increment>,
    pub certificate: BernsteinCert,
    #[serde(skip)]
    pub rounds: usize,
}

struct Schedule {
    n: usize,
    a: SkewMatrix,
    added: Vec<Vec<BigInt>>,
}

impl Schedule {
    fn bump(&mut self, i: usize, j: usize, delta: &BigInt) {
        if delta.is_zero() {
            return;
        }
        let v = self.a.get(i, j) + &Scalar::from_rational(Rational::from_integer(delta.clone()));
        self.a.set(i, j, v);
        self.added[i - 1][j - 1] += delta;
    }

    /// Smallest `delta >= 0` lifting every `c_{J,r}`, `r >= 1`, to at least 1
    /// over the `J` of length `len` that start with `(l1, l2)`.
    fn fix(&mut self, l1: usize, l2: usize, len: usize) {
        let targets: Vec<MinorIndex> = enumerate_minors(self.n)
            .into_iter()
            .filter(|j| j.len() == len && j.as_slice()[..2] == [l1, l2])
            .collect();
        if targets.is_empty() {
            return;
        }
        let mut shifted = self.a.clone();
        shifted.set(l1, l2, self.a.get(l1, l2) + &Scalar::one());
        let mut base = PfMemo::new(&self.a);
        let mut up = PfMemo::new(&shifted);
        let mut delta = BigInt::zero();
        for j in &targets {
            let c0 = coeffs_with(&mut base, j);
            let c1 = coeffs_with(&mut up, j);
            for ((r, v0), (_, v1)) in c0.iter().zip(&c1) {
                if *r == 0 {
                    continue;
                }
                let v0 = v0.as_rational().expect("rational");
                if *v0 >= Rational::one() {
                    continue;
                }
                let slope = v1.as_rational().expect("rational") - v0;
                if slope.is_positive() {
                    let need = ((Rational::one() - v0) / slope).ceil().to_integer();
                    delta = delta.max(need);
                }
            }
        }
        self.bump(l1, l2, &delta);
    }

    fn run(&mut self) {
        let n = self.n;
        // length-2 coefficients are the entries themselves
        for i in 1..=n {
            for j in i + 1..=n {
                let v = self.a.get(i, j).as_rational().expect("rational").clone();
                if v < Rational::one() {
                    let d = (Rational::one() - v).ceil().to_integer();
                    self.bump(i, j, &d);
                }
            }
        }
        for m in 2..=n / 2 {
            let (mut l1, mut l2) = (n - 2 * m + 1, n - 2 * m + 2);
            let mut first = true;
            loop {
                if !first {
                    for len in (4..=2 * m - 2).rev().step_by(2) {
                        self.fix(l1, l2, len);
                    }
                }
                self.fix(l1, l2, 2 * m);
                first = false;
                if (l1, l2) == (1, 2) {
                    break;
                }
                if l1 > 1 {
                    l1 -= 1;
                } else {
                    (l1, l2) = (l2 - 2, l2 - 1);
                }
            }
        }
    }
}

/// Integer translate of `a` whose Bernstein coefficients are all at least 1.
pub fn translate_positive_path(a: &SkewMatrix) -> Result<TranslateResult> {
    require_rational(a)?;
    let n = a.n();
    let mut total = vec![vec![BigInt::zero(); n]; n];
    let mut start = a.clone();
    for round in 1..=MAX_ROUNDS {
        let mut s = Schedule {
            n,
            a: start.clone(),
            added: vec![vec![BigInt::zero(); n]; n],
        };
        s.run();
        for i in 0..n {
            for j in 0..n {
                total[i][j] += &s.added[i][j];
            }
        }
        let cert = BernsteinCert::build(&s.a);
        if cert.all_at_least_one() {
            let increments = (1..=n)
                .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
                .filter(|&(i, j)| !total[i - 1][j - 1].is_zero())
                .map(|(i, j)| Increment {
                    i,
                    j,
                    delta: total[i - 1][j - 1].clone(),
                })
                .collect();
            return Ok(TranslateResult {
                translate: s.a,
                increments,
                certificate: cert,
                rounds: round,
            });
        }
        // double everything added so far and rerun on top
        let mut next = s.a.clone();
        for i in 1..=n {
            for j in i + 1..=n {
                let extra = total[i - 1][j - 1].clone();
                if !extra.is_zero() {
                    let v = next.get(i, j) + &Scalar::from_rational(Rational::from_integer(extra.clone()));
                    next.set(i, j, v);
                    total[i - 1][j - 1] += extra;
                }
            }
        }
        start = next;
    }
    Err(Error::ScheduleIncomplete { rounds: MAX_ROUNDS })
}

/// `(1-t)A + tZ`.
pub fn segment_point(a: &SkewMatrix, t: &Rational) -> SkewMatrix {
    let one_minus = Rational::one() - t;
    SkewMatrix::from_fn(a.n(), |i, j| {
        &a.get(i, j).scale(&one_minus) + &Scalar::from_rational(t.clone())
    })
}

/// Checks every nonempty minor of `(1-t)A + tZ` is positive at `t = k/steps`.
pub fn grid_scan(a: &SkewMatrix, steps: u32) -> bool {
    (0..=steps).all(|k| minors_positive(&segment_point(a, &Rational::new(k.into(), steps.into()))))
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityPath {
    pub first: TranslateResult,
    pub second: TranslateResult,
    pub first_shift: u64,
    pub second_shift: u64,
    /// Every nonempty minor at the glue point equals 1.
    pub glue_minors_one: bool,
}

/// Certified path `theta_tr -> Z -> psi_tr` with positive minors throughout.
pub fn build_positivity_path(theta: &SkewMatrix, psi: &SkewMatrix) -> Result<PositivityPath> {
    if theta.n() != psi.n() {
        return Err(Error::DimMismatch(format!("{} vs {}", theta.n(), psi.n())));
    }
    let (k1, t1) = make_minors_positive(theta)?;
    let (k2, t2) = make_minors_positive(psi)?;
    let first = translate_positive_path(&t1)?;
    let second = translate_positive_path(&t2)?;
    let glue_a = segment_point(&first.translate, &int(1));
    let glue_b = segment_point(&second.translate, &int(1));
    let all_one = |m: &SkewMatrix| {
        let mut memo = PfMemo::new(m);
        enumerate_minors(m.n())
            .iter()
            .all(|j| memo.pf(j.mask()) == Scalar::one())
    };
    let glue_minors_one = glue_a == glue_b && all_one(&glue_a);
    Ok(PositivityPath {
        first,
        second,
        first_shift: k1,
        second_shift: k2,
        glue_minors_one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn sym4() -> SkewMatrix {
        let mut k = 0;
        SkewMatrix::from_fn(4, |_, _| {
            k += 1;
            Scalar::alpha_pow(1 << (k - 1))
        })
    }

    #[test]
    fn coeffs_two() {
        let a = sym4();
        let j = MinorIndex::new(vec![1, 2]).unwrap();
        let c = bernstein_coeffs(&a, &j).unwrap();
        assert_eq!(c, vec![(1, a.get(1, 2).clone()), (0, Scalar::one())]);
    }

    #[test]
    fn coeffs_four() {
        let a = sym4();
        let g = |i, j| a.get(i, j).clone();
        let c = bernstein_coeffs(&a, &MinorIndex::leading(4)).unwrap();
        let mid = g(1, 2) + g(3, 4) - g(1, 3) - g(2, 4) + g(1, 4) + g(2, 3);
        let pf = g(1, 2) * g(3, 4) - g(1, 3) * g(2, 4) + g(1, 4) * g(2, 3);
        assert_eq!(c, vec![(2, pf), (1, mid), (0, Scalar::one())]);
    }

    #[test]
    fn minors_positive_neg_z() {
        let a = z_matrix(4).scale(&rat(-1, 1));
        assert_eq!(make_minors_positive(&a).unwrap().0, 2);
        let big = z_matrix(4).scale(&rat(9, 1));
        assert_eq!(make_minors_positive(&big).unwrap().0, 0);
    }

    #[test]
    fn translate_single_bump() {
        // positive minors, but the middle coefficient is negative
        let a = SkewMatrix::from_rows(&[
            vec![0, 1, 1, 6].into_iter().map(Scalar::from_int).collect(),
            vec![-1, 0, 6, 14].into_iter().map(Scalar::from_int).collect(),
            vec![-1, -6, 0, 1].into_iter().map(Scalar::from_int).collect(),
            vec![-6, -14, -1, 0].into_iter().map(Scalar::from_int).collect(),
        ])
        .unwrap();
        assert!(minors_positive(&a));
        let res = translate_positive_path(&a).unwrap();
        assert_eq!(
            res.increments,
            vec![Increment {
                i: 1,
                j: 2,
                delta: BigInt::from(2)
            }]
        );
        assert!(res.certificate.all_at_least_one());
        assert!(grid_scan(&res.translate, 10));
    }

    #[test]
    fn translate_noop() {
        let res = translate_positive_path(&z_matrix(6)).unwrap();
        assert!(res.increments.is_empty());
    }

    #[test]
    fn path_trivial() {
        let z = z_matrix(4);
        let p = build_positivity_path(&z, &z).unwrap();
        assert!(p.glue_minors_one);
        assert!(p.first.increments.is_empty() && p.second.increments.is_empty());
    }
}
