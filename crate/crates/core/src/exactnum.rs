//! Exact scalars: rationals and sparse polynomials in a formal transcendental `a`.
//!
//! Every entry of a deformation matrix, every pfaffian and every trace value in
//! this crate is a [`Scalar`]. The symbol `a` is never given a numeric value
//! during algebra; distinct monomials `a^e` are treated as linearly independent
//! over the rationals, which is exactly what a transcendental choice of `a`
//! guarantees. Numeric statements about `a` go through [`AlphaEnclosure`] and
//! [`eval_interval`], which produce certified rational enclosures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default cap for adaptive precision doubling.
pub const DEFAULT_PRECISION_CAP: u64 = 4096;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Sparse polynomial `sum c_e a^e` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AlphaPoly {
    terms: BTreeMap<u64, Rational>,
}

impl AlphaPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: Rational, exp: u64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (u64, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exp: u64, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: u64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exponent(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == 0)
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.checked_add(*eb).expect("alpha exponent overflow");
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

/// An exact number: a rational, or a non-constant polynomial in `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(Rational),
    Poly(AlphaPoly),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rational(int(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::Rational(r)
    }

    /// `coeff * a^exp`.
    pub fn alpha_pow(exp: u64) -> Self {
        Self::from_poly(AlphaPoly::monomial(Rational::one(), exp))
    }

    pub fn monomial(coeff: Rational, exp: u64) -> Self {
        Self::from_poly(AlphaPoly::monomial(coeff, exp))
    }

    /// Normalizes: constant polynomials collapse to `Rational`.
    pub fn from_poly(p: AlphaPoly) -> Self {
        if p.is_constant() {
            Scalar::Rational(p.coeff(0))
        } else {
            Scalar::Poly(p)
        }
    }

    pub fn to_poly(&self) -> AlphaPoly {
        match self {
            Scalar::Rational(r) => AlphaPoly::monomial(r.clone(), 0),
            Scalar::Poly(p) => p.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Poly(_) => None,
        }
    }

    /// Coefficient of `a^exp` (the constant term for `exp = 0`).
    pub fn coeff(&self, exp: u64) -> Rational {
        match self {
            Scalar::Rational(r) if exp == 0 => r.clone(),
            Scalar::Rational(_) => Rational::zero(),
            Scalar::Poly(p) => p.coeff(exp),
        }
    }

    /// Exponents carrying a nonzero coefficient.
    pub fn exponents(&self) -> Vec<u64> {
        match self {
            Scalar::Rational(r) if r.is_zero() => vec![],
            Scalar::Rational(_) => vec![0],
            Scalar::Poly(p) => p.terms().map(|(e, _)| e).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        match self {
            Scalar::Rational(x) => Scalar::Rational(x * r),
            Scalar::Poly(p) => {
                Self::from_poly(AlphaPoly::from_terms(p.terms().map(|(e, c)| (e, c * r))))
            }
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact value at a rational point `a = x`.
    pub fn eval_rational(&self, x: &Rational) -> Rational {
        match self {
            Scalar::Rational(r) => r.clone(),
            Scalar::Poly(p) => {
                let mut acc = Rational::zero();
                for (e, c) in p.terms() {
                    let e = i32::try_from(e).expect("exponent too large for exact evaluation");
                    acc += c * num_traits::pow::Pow::pow(x, e);
                }
                acc
            }
        }
    }

    /// Evaluates to a double. Lossy; for diagnostics and numeric layers only.
    pub fn to_f64(&self, alpha: f64) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Poly(p) => p
                .terms()
                .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * alpha.powf(e as f64))
                .sum(),
        }
    }

    fn combine(&self, other: &Self, sign: i8) -> Self {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => {
                Scalar::Rational(if sign > 0 { a + b } else { a - b })
            }
            _ => {
                let mut p = self.to_poly();
                for (e, c) in other.to_poly().terms() {
                    p.add_term(e, if sign > 0 { c.clone() } else { -c });
                }
                Self::from_poly(p)
            }
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rational(r)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.combine(rhs, 1)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.combine(rhs, -1)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Rational(a), s) | (s, Scalar::Rational(a)) => s.scale(a),
            (Scalar::Poly(a), Scalar::Poly(b)) => Scalar::from_poly(a.mul(b)),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_string(r: &Rational) -> String {
    fmt_rational(r)
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            if let Some((ip, fp)) = s.split_once('.') {
                // decimal literal, e.g. 0.999
                let neg = ip.trim_start().starts_with('-');
                let ip = ip.trim().trim_start_matches(['-', '+']);
                let ip: BigInt = if ip.is_empty() {
                    BigInt::zero()
                } else {
                    ip.parse().map_err(|_| bad())?
                };
                if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let fpv: BigInt = fp.parse().map_err(|_| bad())?;
                let den = num_traits::pow(BigInt::from(10), fp.len());
                let v = Rational::new(ip * &den + fpv, den);
                return Ok(if neg { -v } else { v });
            }
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Text form: rationals as `p/q` or `p`; polynomials as `c*a^e` terms in
/// descending exponent order, e.g. `1*a^33-1*a^18+1*a^12`. A constant term is
/// written as a bare rational.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => f.write_str(&fmt_rational(r)),
            Scalar::Poly(p) => {
                let mut first = true;
                for (e, c) in p.terms().rev() {
                    let body = if e == 0 {
                        fmt_rational(&c.abs())
                    } else {
                        format!("{}*a^{}", fmt_rational(&c.abs()), e)
                    };
                    if c.is_negative() {
                        f.write_str("-")?;
                    } else if !first {
                        f.write_str("+")?;
                    }
                    f.write_str(&body)?;
                    first = false;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        // split into signed terms; a sign directly after '^', '/' or '*' belongs to a number
        let bytes = s.as_bytes();
        let mut terms = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'^' | b'/' | b'*') {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut poly = AlphaPoly::zero();
        for t in terms {
            let (neg, body) = match t.as_bytes()[0] {
                b'-' => (true, &t[1..]),
                b'+' => (false, &t[1..]),
                _ => (false, t),
            };
            let (coeff, exp) = parse_term(body)?;
            poly.add_term(exp, if neg { -coeff } else { coeff });
        }
        Ok(Scalar::from_poly(poly))
    }
}

fn parse_term(body: &str) -> Result<(Rational, u64)> {
    let bad = || Error::Parse(format!("invalid scalar term `{body}`"));
    if body.is_empty() {
        return Err(bad());
    }
    let (coeff_part, mono) = match body.split_once('*') {
        Some((c, m)) => (Some(c), Some(m)),
        None if body.starts_with('a') => (None, Some(body)),
        None => (Some(body), None),
    };
    let coeff = match coeff_part {
        Some(c) => parse_rational(c)?,
        None => Rational::one(),
    };
    let exp = match mono {
        None => 0,
        Some("a") => 1,
        Some(m) => {
            let e = m.strip_prefix("a^").ok_or_else(bad)?;
            e.parse::<u64>().map_err(|_| bad())?
        }
    };
    Ok((coeff, exp))
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        let s = match Raw::deserialize(d)? {
            Raw::Text(s) => s,
            Raw::Int(v) => v.to_string(),
            Raw::Float(v) => v.to_string(),
        };
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Certified interval evaluation

/// Closed interval `[lo, hi]` known to contain the chosen transcendental `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaEnclosure {
    lo: Rational,
    hi: Rational,
}

impl AlphaEnclosure {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if !(lo.is_positive() && lo <= hi && hi < Rational::one()) {
            return Err(Error::BadEnclosure(format!(
                "need 0 < lo <= hi < 1, got [{}, {}]",
                fmt_rational(&lo),
                fmt_rational(&hi)
            )));
        }
        Ok(Self { lo, hi })
    }

    /// `center +- 10^-digits`.
    pub fn around(center: Rational, digits: u32) -> Result<Self> {
        let r = Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), digits as usize));
        Self::new(&center - &r, &center + &r)
    }

    pub fn point(x: Rational) -> Result<Self> {
        Self::new(x.clone(), x)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }
}

/// Closed rational interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatInterval {
    #[serde(serialize_with = "ser_rat")]
    pub lo: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub hi: Rational,
}

fn ser_rat<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

impl RatInterval {
    pub fn point(x: Rational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Strictly positive / strictly negative / undecided.
    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Plus)
        } else if self.hi.is_negative() {
            Some(Sign::Minus)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Sign::NoSign)
        } else {
            None
        }
    }

    fn add(&self, o: &Self, prec: u64) -> Self {
        Self {
            lo: round(&self.lo + &o.lo, prec, false),
            hi: round(&self.hi + &o.hi, prec, true),
        }
    }

    fn mul(&self, o: &Self, prec: u64) -> Self {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Self {
            lo: round(lo, prec, false),
            hi: round(hi, prec, true),
        }
    }
}

fn bit_size(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Rounds `r` down (or up) to a dyadic rational with about `prec` significant
/// bits, leaving small values exact.
fn round(r: Rational, prec: u64, up: bool) -> Rational {
    if bit_size(&r) <= 2 * prec {
        return r;
    }
    let (num, den) = (r.numer(), r.denom());
    // choose k so that num * 2^k / den has roughly `prec` bits
    let k = prec as i64 - (num.bits() as i64 - den.bits() as i64);
    let scaled_num = if k >= 0 { num << (k as usize) } else { num.clone() };
    let scaled_den = if k >= 0 { den.clone() } else { den << ((-k) as usize) };
    let (q, rem) = scaled_num.div_mod_floor(&scaled_den);
    let m = if up && !rem.is_zero() { q + 1 } else { q };
    if k >= 0 {
        Rational::new(m, BigInt::one() << (k as usize))
    } else {
        Rational::from_integer(m << ((-k) as usize))
    }
}

fn pow_directed(x: &Rational, e: u64, prec: u64, up: bool) -> Rational {
    // x > 0, so products are monotone and one-sided rounding stays sound
    let mut base = x.clone();
    let mut acc = Rational::one();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = round(&acc * &base, prec, up);
        }
        e >>= 1;
        if e > 0 {
            base = round(&base * &base, prec, up);
        }
    }
    acc
}

/// Certified enclosure of `p(a)` for every `a` in the enclosure.
pub fn eval_interval(p: &Scalar, alpha: &AlphaEnclosure, precision_bits: u64) -> RatInterval {
    let prec = precision_bits.max(32);
    match p {
        Scalar::Rational(r) => RatInterval::point(r.clone()),
        Scalar::Poly(poly) => {
            let mut acc = RatInterval::point(Rational::zero());
            for (e, c) in poly.terms() {
                let pw = RatInterval {
                    lo: pow_directed(&alpha.lo, e, prec, false),
                    hi: pow_directed(&alpha.hi, e, prec, true),
                };
                let term = RatInterval::point(c.clone()).mul(&pw, prec);
                acc = acc.add(&term, prec);
            }
            acc
        }
    }
}

/// Doubles precision from 64 bits until the sign of `p` on the enclosure is
/// decided, or `cap` bits are exhausted. Returns the deciding interval.
pub fn certify_sign(
    p: &Scalar,
    alpha: &AlphaEnclosure,
    cap: u64,
) -> std::result::Result<(Sign, RatInterval), RatInterval> {
    let mut prec = 64u64.min(cap.max(32));
    loop {
        let iv = eval_interval(p, alpha, prec);
        if let Some(s) = iv.sign() {
            return Ok((s, iv));
        }
        if prec >= cap {
            return Err(iv);
        }
        prec = (prec * 2).min(cap);
    }
}

// ---------------------------------------------------------------------------
// Rational independence

/// Transcript of a rank computation over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceCertificate {
    /// Joint monomial basis (ascending exponents; 0 is the constant term).
    pub exponents: Vec<u64>,
    pub rank: usize,
    pub count: usize,
    /// Column (index into `exponents`) chosen as pivot for each eliminated row.
    pub pivot_columns: Vec<usize>,
    pub assumption: &'static str,
}

pub const TRANSCENDENCE_ASSUMPTION: &str =
    "a is assumed transcendental: distinct monomials a^e are linearly independent over Q";

/// Rank of a rational matrix by Gaussian elimination; returns rank and pivot columns.
pub(crate) fn rational_rank(rows: &mut [Vec<Rational>]) -> (usize, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let piv = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = &rows[r][col] / &piv;
                for c in col..ncols {
                    let d = &f * &rows[rank][c];
                    rows[r][c] -= d;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    (rank, pivots)
}

/// Decides whether the scalars are linearly independent over Q.
pub fn rational_independent(ps: &[Scalar]) -> (bool, IndependenceCertificate) {
    let exps: BTreeSet<u64> = ps.iter().flat_map(|p| p.exponents()).collect();
    let exponents: Vec<u64> = exps.into_iter().collect();
    let mut rows: Vec<Vec<Rational>> = ps
        .iter()
        .map(|p| exponents.iter().map(|e| p.coeff(*e)).collect())
        .collect();
    let (rank, pivot_columns) = rational_rank(&mut rows);
    let cert = IndependenceCertificate {
        exponents,
        rank,
        count: ps.len(),
        pivot_columns,
        assumption: TRANSCENDENCE_ASSUMPTION,
    };
    (rank == ps.len(), cert)
}
