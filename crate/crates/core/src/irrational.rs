//! The super-increasing family `Theta(n)` and certificates for total
//! irrationality, non-degeneracy and strong total irrationality.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{
    certify_sign, rational_independent, rational_rank, AlphaEnclosure, IndependenceCertificate,
    RatInterval, Rational, Scalar, DEFAULT_PRECISION_CAP,
};
use crate::intmat::{integer_kernel, IntMatrix};
use crate::skewpf::{all_minors, enumerate_minors, MinorIndex, PfMemo, SkewMatrix};

/// Environment variable overriding the interval precision cap.
pub const PRECISION_ENV: &str = "NCTK_PRECISION_BITS";

/// Precision cap from `NCTK_PRECISION_BITS`, or the default.
pub fn precision_cap() -> u64 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&b: &u64| b >= 32)
        .unwrap_or(DEFAULT_PRECISION_CAP)
}

/// `s_1 = 1` and each term exceeds the sum of all earlier ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuperIncreasingSeq(Vec<u64>);

impl SuperIncreasingSeq {
    pub fn new(s: Vec<u64>) -> Result<Self> {
        if s.first().is_some_and(|&x| x != 1) {
            return Err(Error::BadSequence("first term must be 1".into()));
        }
        let mut sum: u64 = 0;
        for (k, &x) in s.iter().enumerate() {
            if k > 0 && x <= sum {
                return Err(Error::BadSequence(format!(
                    "term {} = {x} does not exceed the sum {sum} of earlier terms",
                    k + 1
                )));
            }
            sum = sum
                .checked_add(x)
                .ok_or_else(|| Error::BadSequence("terms overflow".into()))?;
        }
        Ok(Self(s))
    }

    /// `1, 2, 4, ...` with `len` terms.
    pub fn powers_of_two(len: usize) -> Self {
        assert!(len <= 63, "powers of two beyond 2^62 overflow");
        Self((0..len).map(|k| 1u64 << k).collect())
    }

    /// Just enough terms of the powers of two for dimension `n`.
    pub fn default_for(n: usize) -> Self {
        Self::powers_of_two(n * n.saturating_sub(1) / 2)
    }

    pub fn terms(&self) -> &[u64] {
        &self.0
    }
}

/// `Theta(n)`: column `j` above the diagonal holds `a^s_{p+i}`, `p = (j-1)(j-2)/2`.
pub fn theta_supergen(n: usize, s: &SuperIncreasingSeq) -> Result<SkewMatrix> {
    let need = n * n.saturating_sub(1) / 2;
    if s.0.len() < need {
        return Err(Error::SeqTooShort {
            have: s.0.len(),
            need,
        });
    }
    Ok(SkewMatrix::from_fn(n, |i, j| {
        let p = (j - 1) * (j - 2) / 2;
        Scalar::alpha_pow(s.0[p + i - 1])
    }))
}

/// Signed monomials of `pf(Theta(n))` in the order they appear.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    pub n: usize,
    /// `(sign, exponent)` in descending exponent order.
    pub terms: Vec<(i8, u64)>,
    pub expected_terms: u64,
    /// Smallest exponent of `pf(Theta(n))` exceeds the largest of `pf(Theta(n-2))`.
    pub tail_above_previous: Option<bool>,
    pub failure: Option<String>,
}

impl ExpansionReport {
    pub fn passes(&self) -> bool {
        self.failure.is_none()
    }
}

fn double_factorial(k: usize) -> u64 {
    (1..=k as u64).rev().step_by(2).product()
}

fn signed_terms(p: &Scalar) -> std::result::Result<Vec<(i8, u64)>, String> {
    let poly = p.to_poly();
    let mut out = Vec::new();
    for (e, c) in poly.terms().rev() {
        let sign = if c.is_one() {
            1
        } else if (-c).is_one() {
            -1
        } else {
            return Err(format!("coefficient {c} of a^{e} is not +-1"));
        };
        out.push((sign, e));
    }
    Ok(out)
}

/// Checks the alternating, strictly decreasing shape of `pf(Theta(n))`.
pub fn pf_expansion_check(theta: &SkewMatrix) -> Result<ExpansionReport> {
    let n = theta.n();
    if n % 2 != 0 {
        return Err(Error::OddDimension(n));
    }
    let mut memo = PfMemo::new(theta);
    let pf = memo.minor(&MinorIndex::leading(n))?;
    let expected_terms = double_factorial(n.saturating_sub(1));
    let mut report = ExpansionReport {
        n,
        terms: Vec::new(),
        expected_terms,
        tail_above_previous: None,
        failure: None,
    };
    let terms = match signed_terms(&pf) {
        Ok(t) => t,
        Err(msg) => {
            report.failure = Some(msg);
            return Ok(report);
        }
    };
    report.terms = terms.clone();
    if terms.first().map(|t| t.0) != Some(1) {
        report.failure = Some("leading term is not positive".into());
        return Ok(report);
    }
    for (k, w) in terms.windows(2).enumerate() {
        if w[0].0 == w[1].0 {
            report.failure = Some(format!(
                "terms {} and {} (a^{}, a^{}) have the same sign",
                k + 1,
                k + 2,
                w[0].1,
                w[1].1
            ));
            return Ok(report);
        }
    }
    if terms.len() as u64 != expected_terms {
        report.failure = Some(format!("{} terms, expected {expected_terms}", terms.len()));
        return Ok(report);
    }
    if n >= 4 {
        let prev = memo.minor(&MinorIndex::leading(n - 2))?;
        let prev_max = prev.to_poly().max_exponent();
        let tail = terms.last().map(|t| t.1);
        let ok = matches!((tail, prev_max), (Some(t), Some(p)) if t > p);
        report.tail_above_previous = Some(ok);
        if !ok {
            report.failure = Some(format!(
                "smallest exponent {tail:?} does not exceed previous largest {prev_max:?}"
            ));
        }
    }
    Ok(report)
}

/// Verdict on rational independence of all pfaffian minors.
#[derive(Clone, Debug, Serialize)]
pub struct TotalIrrationality {
    pub totally_irrational: bool,
    pub minors: Vec<(MinorIndex, Scalar)>,
    pub certificate: IndependenceCertificate,
}

pub fn is_totally_irrational(theta: &SkewMatrix) -> TotalIrrationality {
    let minors = all_minors(theta);
    let values: Vec<Scalar> = minors.iter().map(|(_, v)| v.clone()).collect();
    let (ok, certificate) = rational_independent(&values);
    TotalIrrationality {
        totally_irrational: ok,
        minors,
        certificate,
    }
}

/// Verdict on non-degeneracy with a witness `x != 0`, `theta x` integral.
#[derive(Clone, Debug, Serialize)]
pub struct Nondegeneracy {
    pub nondegenerate: bool,
    /// Rank over Q of the stacked coefficient matrices of the non-constant monomials.
    pub symbolic_rank: usize,
    #[serde(serialize_with = "ser_witness")]
    pub witness: Option<Vec<BigInt>>,
}

fn ser_witness<S: serde::Serializer>(
    w: &Option<Vec<BigInt>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match w {
        None => s.serialize_none(),
        Some(v) => s.collect_seq(v.iter().map(|x| x.to_string())),
    }
}

/// Decides whether `theta x` is integral only for `x = 0`.
///
/// Writing `theta = theta_0 + sum_k a^e_k M_k`, integrality of `theta x` forces
/// `M_k x = 0` for every `k`. If the stacked `M_k` have a nontrivial integer
/// kernel vector `b`, then `D b` is a witness where `D` clears the
/// denominators of `theta_0 b`.
pub fn is_nondegenerate(theta: &SkewMatrix) -> Nondegeneracy {
    let n = theta.n();
    let rows = theta.to_rows();
    let exps: std::collections::BTreeSet<u64> = rows
        .iter()
        .flatten()
        .flat_map(|s| s.exponents())
        .filter(|&e| e > 0)
        .collect();
    // stacked coefficient matrix, cleared row by row to integers
    let mut stacked: Vec<Vec<Rational>> = Vec::new();
    for e in &exps {
        for row in &rows {
            stacked.push(row.iter().map(|s| s.coeff(*e)).collect());
        }
    }
    let symbolic_rank = rational_rank(&mut stacked.clone()).0;
    if symbolic_rank == n {
        return Nondegeneracy {
            nondegenerate: true,
            symbolic_rank,
            witness: None,
        };
    }
    let kernel_vec: Vec<BigInt> = if stacked.is_empty() {
        let mut e1 = vec![BigInt::zero(); n];
        if n > 0 {
            e1[0] = BigInt::one();
        }
        e1
    } else {
        let int_rows: Vec<Vec<BigInt>> = stacked
            .iter()
            .map(|r| {
                let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                r.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
            })
            .collect();
        let m = IntMatrix::from_rows(&int_rows).expect("rectangular");
        integer_kernel(&m).into_iter().next().expect("rank deficient")
    };
    // clear denominators of theta_0 * b
    let mut d = BigInt::one();
    for row in &rows {
        let v: Rational = row
            .iter()
            .zip(&kernel_vec)
            .map(|(s, b)| s.coeff(0) * Rational::from_integer(b.clone()))
            .sum();
        d = d.lcm(v.denom());
    }
    let witness: Vec<BigInt> = kernel_vec.iter().map(|b| b * &d).collect();
    Nondegeneracy {
        nondegenerate: false,
        symbolic_rank,
        witness: Some(witness),
    }
}

/// One ratio check `pf(theta_I on its first 2j+2) / pf(first 2j)` in (1/2, 1).
#[derive(Clone, Debug, Serialize)]
pub struct RatioCheck {
    #[serde(rename = "I")]
    pub minor: MinorIndex,
    pub j: usize,
    pub ratio_interval: [String; 2],
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StiCertificate {
    pub totally_irrational: bool,
    pub checks: Vec<RatioCheck>,
    /// Every denominator `pf(first 2j)` was certified nonzero on the enclosure.
    pub denominators_nonzero: bool,
    pub independence: IndependenceCertificate,
}

impl StiCertificate {
    pub fn passes(&self) -> bool {
        self.totally_irrational && self.denominators_nonzero && self.checks.iter().all(|c| c.pass)
    }
}

fn decide(p: &Scalar, alpha: &AlphaEnclosure, cap: u64) -> Result<(Sign, RatInterval)> {
    certify_sign(p, alpha, cap).map_err(|iv| Error::PrecisionExhausted {
        lo: crate::exactnum::rational_to_string(&iv.lo),
        hi: crate::exactnum::rational_to_string(&iv.hi),
    })
}

fn quotient_interval(num: &RatInterval, den: &RatInterval) -> [String; 2] {
    let cands = [
        &num.lo / &den.lo,
        &num.lo / &den.hi,
        &num.hi / &den.lo,
        &num.hi / &den.hi,
    ];
    let lo = cands.iter().min().unwrap();
    let hi = cands.iter().max().unwrap();
    [short_decimal(lo, false), short_decimal(hi, true)]
}

/// Outward-rounded 40-digit decimal rendering of a rational.
fn short_decimal(r: &Rational, up: bool) -> String {
    let scale = num_traits::pow(BigInt::from(10), 40);
    let scaled = r * Rational::from_integer(scale.clone());
    let v = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let neg = v.is_negative();
    let digits = v.abs().to_string();
    let padded = format!("{digits:0>41}");
    let (ip, fp) = padded.split_at(padded.len() - 40);
    let fp = fp.trim_end_matches('0');
    let body = if fp.is_empty() { ip.to_string() } else { format!("{ip}.{fp}") };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Certifies every ratio of consecutive leading minors of every `theta_I` lies in (1/2, 1).
pub fn is_strongly_totally_irrational(
    theta: &SkewMatrix,
    alpha: &AlphaEnclosure,
    cap: u64,
) -> Result<StiCertificate> {
    let ti = is_totally_irrational(theta);
    let values: std::collections::HashMap<MinorIndex, Scalar> = ti.minors.iter().cloned().collect();
    let mut jobs = Vec::new();
    for idx in enumerate_minors(theta.n()).into_iter().filter(|m| !m.is_empty()) {
        for j in 0..idx.len() / 2 {
            jobs.push((idx.clone(), j));
        }
    }
    let results: Vec<Result<(RatioCheck, bool)>> = jobs
        .into_par_iter()
        .map(|(idx, j)| {
            let s = idx.as_slice();
            let num = &values[&MinorIndex::new(s[..2 * j + 2].to_vec())?];
            let den = &values[&MinorIndex::new(s[..2 * j].to_vec())?];
            let (den_sign, den_iv) = decide(den, alpha, cap)?;
            if den_sign == Sign::NoSign {
                return Ok((
                    RatioCheck {
                        minor: idx,
                        j,
                        ratio_interval: ["nan".into(), "nan".into()],
                        pass: false,
                    },
                    false,
                ));
            }
            let two = Scalar::from_int(2);
            let (lower, _) = decide(&(&two * num - den), alpha, cap)?;
            let (upper, _) = decide(&(den - num), alpha, cap)?;
            let pass = lower == den_sign && upper == den_sign;
            let (_, num_iv) = certify_sign(num, alpha, cap).unwrap_or_else(|iv| (Sign::NoSign, iv));
            Ok((
                RatioCheck {
                    minor: idx,
                    j,
                    ratio_interval: quotient_interval(&num_iv, &den_iv),
                    pass,
                },
                true,
            ))
        })
        .collect();
    let mut checks = Vec::with_capacity(results.len());
    let mut denominators_nonzero = true;
    for r in results {
        let (c, nz) = r?;
        denominators_nonzero &= nz;
        checks.push(c);
    }
    Ok(StiCertificate {
        totally_irrational: ti.totally_irrational,
        checks,
        denominators_nonzero,
        independence: ti.certificate,
    })
}

/// Interval certificate of `1/2 < pf(Theta_n) < pf(Theta_{n-2}) < 1` on the leading minors.
#[derive(Clone, Debug, Serialize)]
pub struct ChainCertificate {
    pub above_half: bool,
    pub decreasing: bool,
    pub below_one: bool,
}

impl ChainCertificate {
    pub fn passes(&self) -> bool {
        self.above_half && self.decreasing && self.below_one
    }
}

pub fn certify_pf_chain(theta: &SkewMatrix, alpha: &AlphaEnclosure, cap: u64) -> Result<ChainCertificate> {
    let n = theta.n();
    if n % 2 != 0 || n < 2 {
        return Err(Error::OddDimension(n));
    }
    let mut memo = PfMemo::new(theta);
    let top = memo.minor(&MinorIndex::leading(n))?;
    let prev = memo.minor(&MinorIndex::leading(n - 2))?;
    let half = Scalar::from_rational(Rational::new(BigInt::one(), BigInt::from(2)));
    let pos = |p: Scalar| -> Result<bool> { Ok(decide(&p, alpha, cap)?.0 == Sign::Plus) };
    Ok(ChainCertificate {
        above_half: pos(&top - &half)?,
        decreasing: pos(&prev - &top)?,
        below_one: pos(&Scalar::one() - &prev)?,
    })
}

/// Generators `pf(theta_I)` of the trace range, halved for the flip orbifold.
#[derive(Clone, Debug, Serialize)]
pub struct TraceLattice {
    pub generators: Vec<(MinorIndex, Scalar)>,
    pub halved: bool,
}

pub fn trace_range(theta: &SkewMatrix, crossed: bool) -> TraceLattice {
    TraceLattice {
        generators: all_minors(theta),
        halved: crossed,
    }
}
