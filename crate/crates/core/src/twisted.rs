//! Twisted group algebra of `Z^n`, the flip crossed product and the
//! bump-function projection of the two-torus.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::skewpf::SkewMatrix;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
const MAX_SUBDIVISIONS: usize = 4000;

/// Real skew form used for phases.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSkew(Vec<Vec<f64>>);

impl RealSkew {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimMismatch(format!("row {} has {} entries", i + 1, r.len())));
            }
            for j in 0..n {
                if r[j] != -rows[j][i] {
                    return Err(Error::Invalid(format!("not skew at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        Ok(Self(rows))
    }

    /// Two-dimensional form with off-diagonal entry `t`.
    pub fn two(t: f64) -> Self {
        Self(vec![vec![0.0, t], vec![-t, 0.0]])
    }

    pub fn from_skew(theta: &SkewMatrix, alpha: f64) -> Self {
        Self(theta.to_f64(alpha))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// 1-based entry.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i - 1][j - 1]
    }

    /// `y^t theta x`.
    fn pairing(&self, x: &[i64], y: &[i64]) -> f64 {
        let mut acc = 0.0;
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0 {
                continue;
            }
            for (j, &xj) in x.iter().enumerate() {
                if xj != 0 {
                    acc += yi as f64 * self.0[i][j] * xj as f64;
                }
            }
        }
        acc
    }
}

/// `e(t) = exp(2 pi i t)`.
pub fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// Finitely supported function on `Z^n`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CoeffArray {
    n: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl CoeffArray {
    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: BTreeMap::new() }
    }

    pub fn unit(n: usize) -> Self {
        Self::delta(vec![0; n])
    }

    pub fn delta(m: Vec<i64>) -> Self {
        let mut a = Self::zero(m.len());
        a.coeffs.insert(m, Complex64::new(1.0, 0.0));
        a
    }

    /// Generator `U_i`, 1-based.
    pub fn generator(n: usize, i: usize) -> Self {
        let mut m = vec![0; n];
        m[i - 1] = 1;
        Self::delta(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, m: &[i64]) -> Complex64 {
        self.coeffs.get(m).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn add_at(&mut self, m: Vec<i64>, v: Complex64) -> Result<()> {
        if m.len() != self.n {
            return Err(Error::DimMismatch(format!("index of length {} in dimension {}", m.len(), self.n)));
        }
        let slot = self.coeffs.entry(m).or_default();
        *slot += v;
        if *slot == Complex64::default() {
            self.coeffs.retain(|_, v| *v != Complex64::default());
        }
        Ok(())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimMismatch(format!("{} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, v) in &other.coeffs {
            *out.coeffs.entry(m.clone()).or_default() += v;
        }
        out.coeffs.retain(|_, v| *v != Complex64::default());
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(m, v)| (m.clone(), v * c))
            .filter(|(_, v)| *v != Complex64::default())
            .collect();
        Self { n: self.n, coeffs }
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm()).fold(0.0, |a, b| a + b)
    }

    /// Embeds a two-dimensional array into coordinates `(1, 2)` of `Z^n`
    /// with the remaining coordinates fixed.
    pub fn embed(&self, n: usize, rest: &[(usize, i64)]) -> Result<Self> {
        if self.n != 2 || n < 2 {
            return Err(Error::DimMismatch("embedding needs a planar source".into()));
        }
        let mut out = Self::zero(n);
        for (m, v) in &self.coeffs {
            let mut k = vec![0; n];
            k[0] = m[0];
            k[1] = m[1];
            for &(i, x) in rest {
                k[i - 1] = x;
            }
            out.add_at(k, *v)?;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct CoeffWire {
    n: usize,
    coeffs: Vec<CoeffEntry>,
}

#[derive(Serialize, Deserialize)]
struct CoeffEntry {
    m: Vec<i64>,
    re: f64,
    im: f64,
}

impl Serialize for CoeffArray {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffWire {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, v)| CoeffEntry { m: m.clone(), re: v.re, im: v.im })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoeffArray {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = CoeffWire::deserialize(d)?;
        let mut out = CoeffArray::zero(w.n);
        for c in w.coeffs {
            if out.coeffs.contains_key(&c.m) {
                return Err(D::Error::custom(format!("duplicate index {:?}", c.m)));
            }
            out.add_at(c.m, Complex64::new(c.re, c.im)).map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}

/// `(a*b)(m) = sum_k a(k) b(m-k) e(-(m-k)^t theta k / 2)`.
pub fn twisted_convolve(a: &CoeffArray, b: &CoeffArray, theta: &RealSkew) -> Result<CoeffArray> {
    a.check_dim(b)?;
    if theta.n() != a.n {
        return Err(Error::DimMismatch(format!("form of size {} on Z^{}", theta.n(), a.n)));
    }
    let mut out: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    for (x, u) in &a.coeffs {
        for (y, v) in &b.coeffs {
            let m: Vec<i64> = x.iter().zip(y).map(|(p, q)| p + q).collect();
            let w = Complex64::from_polar(1.0, -PI * theta.pairing(x, y));
            *out.entry(m).or_default() += u * v * w;
        }
    }
    out.retain(|_, v| *v != Complex64::default());
    Ok(CoeffArray { n: a.n, coeffs: out })
}

pub fn star(a: &CoeffArray) -> CoeffArray {
    let coeffs = a
        .coeffs
        .iter()
        .map(|(m, v)| (m.iter().map(|x| -x).collect(), v.conj()))
        .collect();
    CoeffArray { n: a.n, coeffs }
}

/// Flip `U_i -> U_i^{-1}`.
pub fn flip(a: &CoeffArray) -> CoeffArray {
    let coeffs = a
        .coeffs
        .iter()
        .map(|(m, v)| (m.iter().map(|x| -x).collect(), *v))
        .collect();
    CoeffArray { n: a.n, coeffs }
}

pub fn trace(a: &CoeffArray) -> Complex64 {
    a.get(&vec![0; a.n])
}

pub fn star_flip_trace(a: &CoeffArray) -> (CoeffArray, CoeffArray, Complex64) {
    (star(a), flip(a), trace(a))
}

/// `a + bW` in the flip crossed product.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossedElem {
    pub a: CoeffArray,
    pub b: CoeffArray,
}

impl CrossedElem {
    pub fn new(a: CoeffArray, b: CoeffArray) -> Result<Self> {
        a.check_dim(&b)?;
        Ok(Self { a, b })
    }

    pub fn unit(n: usize) -> Self {
        Self { a: CoeffArray::unit(n), b: CoeffArray::zero(n) }
    }

    /// The flip unitary `W`.
    pub fn w(n: usize) -> Self {
        Self { a: CoeffArray::zero(n), b: CoeffArray::unit(n) }
    }

    pub fn n(&self) -> usize {
        self.a.n
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { a: self.a.add(&other.a)?, b: self.b.add(&other.b)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { a: self.a.sub(&other.a)?, b: self.b.sub(&other.b)? })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { a: self.a.scale(c), b: self.b.scale(c) }
    }

    /// `(a + bW)* = a* + flip(b*) W`.
    pub fn adjoint(&self) -> Self {
        Self { a: star(&self.a), b: flip(&star(&self.b)) }
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.a)
    }

    pub fn l1_norm(&self) -> f64 {
        self.a.l1_norm() + self.b.l1_norm()
    }
}

pub fn crossed_multiply(x: &CrossedElem, y: &CrossedElem, theta: &RealSkew) -> Result<CrossedElem> {
    x.a.check_dim(&y.a)?;
    let conv = |p: &CoeffArray, q: &CoeffArray| twisted_convolve(p, q, theta);
    let a = conv(&x.a, &y.a)?.add(&conv(&x.b, &flip(&y.b))?)?;
    let b = conv(&x.a, &y.b)?.add(&conv(&x.b, &flip(&y.a))?)?;
    Ok(CrossedElem { a, b })
}

/// Ordered product `U_{j_1} ... U_{j_k}`.
pub fn monomial(n: usize, j: &[usize], theta: &RealSkew) -> Result<CoeffArray> {
    let mut acc = CoeffArray::unit(n);
    for &i in j {
        if i == 0 || i > n {
            return Err(Error::BadIndex { index: i, n });
        }
        acc = twisted_convolve(&acc, &CoeffArray::generator(n, i), theta)?;
    }
    Ok(acc)
}

/// Phase making `e(r_J) U_J W` self-adjoint.
pub fn flip_phase(j: &[usize], theta: &RealSkew) -> f64 {
    let mut acc = 0.0;
    for (a, &x) in j.iter().enumerate() {
        for &y in &j[a + 1..] {
            acc += theta.get(x, y);
        }
    }
    -acc / 2.0
}

/// `W_J = e(r_J) U_J W`.
pub fn w_j(n: usize, j: &[usize], theta: &RealSkew) -> Result<CrossedElem> {
    let u = monomial(n, j, theta)?.scale(e(flip_phase(j, theta)));
    Ok(CrossedElem { a: CoeffArray::zero(n), b: u })
}

/// `sum_l theta_{i j_l}`; `e(-r/2) U_i` is inverted by conjugation with `W_J`.
pub fn tilde_phase(i: usize, j: &[usize], theta: &RealSkew) -> f64 {
    j.iter().map(|&l| theta.get(i, l)).sum()
}

pub fn tilde_generator(n: usize, i: usize, j: &[usize], theta: &RealSkew) -> CoeffArray {
    CoeffArray::generator(n, i).scale(e(-tilde_phase(i, j, theta) / 2.0))
}

/// `(1 + W_J) / 2`.
pub fn p_flip(n: usize, j: &[usize], theta: &RealSkew) -> Result<CrossedElem> {
    Ok(CrossedElem::unit(n).add(&w_j(n, j, theta)?)?.scale(Complex64::new(0.5, 0.0)))
}

/// `(p / 2)(1 + W_J)` for a flip-invariant projection `p`.
pub fn p_extended(p: &CoeffArray, j: &[usize], theta: &RealSkew) -> Result<CrossedElem> {
    let half = CrossedElem { a: p.clone(), b: CoeffArray::zero(p.n) };
    crossed_multiply(&half, &p_flip(p.n, j, theta)?, theta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Defect {
    pub idempotent: f64,
    pub adjoint: f64,
}

/// `l1` norms of `x*x - x` and `x* - x`.
pub fn projection_defect(x: &CoeffArray, theta: &RealSkew) -> Result<Defect> {
    Ok(Defect {
        idempotent: twisted_convolve(x, x, theta)?.sub(x)?.l1_norm(),
        adjoint: star(x).sub(x)?.l1_norm(),
    })
}

pub fn crossed_defect(x: &CrossedElem, theta: &RealSkew) -> Result<Defect> {
    Ok(Defect {
        idempotent: crossed_multiply(x, x, theta)?.sub(x)?.l1_norm(),
        adjoint: x.adjoint().sub(x)?.l1_norm(),
    })
}

/// Transition profile on the flank of the bump.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpProfile {
    /// `3u^2 - 2u^3`.
    Cubic,
    /// `sin^2(pi/2 * I_u(7, 7))`; smooth enough for fast coefficient decay.
    #[default]
    BetaSine7,
}

impl BumpProfile {
    /// Satisfies `s(u) + s(1 - u) = 1`.
    pub fn eval(self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            Self::Cubic => u * u * (3.0 - 2.0 * u),
            Self::BetaSine7 => {
                let g = reg_beta_7(u);
                let s = (0.5 * PI * g).sin();
                s * s
            }
        }
    }
}

/// Regularized incomplete beta `I_u(7, 7)`.
fn reg_beta_7(u: f64) -> f64 {
    const BINOM13: [f64; 14] = [
        1.0, 13.0, 78.0, 286.0, 715.0, 1287.0, 1716.0, 1716.0, 1287.0, 715.0, 286.0, 78.0, 13.0, 1.0,
    ];
    let v = 1.0 - u;
    (7..=13).map(|j| BINOM13[j] * u.powi(j as i32) * v.powi(13 - j as i32)).sum()
}

/// Even bump on `[-1/2, 1/2]`, equal to 1 on `[1/2 - t, t - 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpPhi {
    pub theta12: f64,
    pub profile: BumpProfile,
}

pub fn rieffel_bump(theta12: f64) -> Result<BumpPhi> {
    BumpPhi::new(theta12, BumpProfile::default())
}

impl BumpPhi {
    pub fn new(theta12: f64, profile: BumpProfile) -> Result<Self> {
        if !(theta12 > 0.5 && theta12 < 1.0) {
            return Err(Error::BadTheta(theta12));
        }
        Ok(Self { theta12, profile })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax >= 0.5 {
            0.0
        } else if ax <= self.theta12 - 0.5 {
            1.0
        } else {
            self.profile.eval((0.5 - ax) / (1.0 - self.theta12))
        }
    }

    pub fn sqrt(&self, x: f64) -> f64 {
        self.eval(x).sqrt()
    }

    /// Points where the shifted bump `x -> phi(x + shift)` changes regime.
    fn kinks(&self, shift: f64) -> [f64; 4] {
        let p = self.theta12 - 0.5;
        [-0.5 - shift, -p - shift, p - shift, 0.5 - shift]
    }

    /// `int phi`.
    pub fn integral(&self, tol: f64) -> Result<f64> {
        let pts = self.kinks(0.0);
        Ok(integrate(|x| Complex64::new(self.eval(x), 0.0), -0.5, 0.5, &pts, tol)?.re)
    }
}

// 7-point Gauss / 15-point Kronrod
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss-Kronrod on `[lo, hi]`, split first at the interior `breaks`.
pub fn integrate(f: impl Fn(f64) -> Complex64, lo: f64, hi: f64, breaks: &[f64], tol: f64) -> Result<Complex64> {
    if hi <= lo {
        return Ok(Complex64::default());
    }
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&p| p > lo && p < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut parts: Vec<(f64, f64, Complex64, f64)> = cuts
        .windows(2)
        .map(|w| {
            let (v, err) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, err)
        })
        .collect();
    loop {
        let total: Complex64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= tol || err <= 64.0 * f64::EPSILON * total.norm() {
            return Ok(total);
        }
        if parts.len() >= MAX_SUBDIVISIONS {
            return Err(Error::QuadFail(format!("error estimate {err:e} above {tol:e}")));
        }
        let worst = (0..parts.len())
            .max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3))
            .expect("nonempty");
        let (a, b, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return Err(Error::QuadFail("interval collapsed".into()));
        }
        let (v1, e1) = gk15(&f, a, mid);
        let (v2, e2) = gk15(&f, mid, b);
        parts.push((a, mid, v1, e1));
        parts.push((mid, b, v2, e2));
    }
}

/// Support window of `sqrt(phi(x + shift)) sqrt(phi(x))`.
fn overlap(shift: f64) -> (f64, f64) {
    ((-0.5f64).max(-0.5 - shift), 0.5f64.min(0.5 - shift))
}

/// Coefficients of the projection of trace `theta12` on the two-torus.
pub fn rieffel_projection(theta12: f64, m2_max: u32, tol: f64) -> Result<CoeffArray> {
    rieffel_projection_with(&rieffel_bump(theta12)?, m2_max, tol)
}

pub fn rieffel_projection_with(phi: &BumpPhi, m2_max: u32, tol: f64) -> Result<CoeffArray> {
    check_m2(m2_max)?;
    let th = phi.theta12;
    let idx = index_grid(m2_max, &[-1, 0, 1]);
    let vals: Vec<Result<(Vec<i64>, Complex64)>> = idx
        .par_iter()
        .map(|&(m1, m2)| {
            let shift = th * m1 as f64;
            let (lo, hi) = overlap(shift);
            let mut pts = phi.kinks(0.0).to_vec();
            pts.extend(phi.kinks(shift));
            let freq = m2 as f64;
            let v = integrate(
                |x| Complex64::from_polar(phi.sqrt(x + shift) * phi.sqrt(x), -2.0 * PI * x * freq),
                lo,
                hi,
                &pts,
                tol,
            )?;
            Ok((vec![m1, m2], Complex64::from_polar(1.0, -PI * th * (m1 * m2) as f64) * v))
        })
        .collect();
    collect_coeffs(2, vals)
}

/// Largest coefficient magnitude on the truncation edge `|m_2| = m2_max`.
pub fn tail_bound(a: &CoeffArray, m2_max: u32) -> f64 {
    let edge = m2_max as i64;
    a.iter()
        .filter(|(m, _)| m.len() >= 2 && m[1].abs() == edge)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max)
}

fn check_m2(m2_max: u32) -> Result<()> {
    if m2_max < 10 {
        return Err(Error::Invalid(format!("m2_max must be at least 10, got {m2_max}")));
    }
    Ok(())
}

fn index_grid(m2_max: u32, m1s: &[i64]) -> Vec<(i64, i64)> {
    let m = m2_max as i64;
    m1s.iter().flat_map(|&a| (-m..=m).map(move |b| (a, b))).collect()
}

fn collect_coeffs(n: usize, vals: Vec<Result<(Vec<i64>, Complex64)>>) -> Result<CoeffArray> {
    let mut out = CoeffArray::zero(n);
    for v in vals {
        let (m, c) = v?;
        if c != Complex64::default() {
            out.add_at(m, c)?;
        }
    }
    Ok(out)
}

/// Coefficients of `<f, V_k f>` on the slice `m_k = 1`, other coordinates
/// outside `{1, 2, k}` zero.
pub fn heisenberg_vk_coeffs(theta: &RealSkew, k: usize, m2_max: u32, tol: f64) -> Result<CoeffArray> {
    let n = theta.n();
    if n < 3 || k < 3 || k > n {
        return Err(Error::BadIndex { index: k, n });
    }
    check_m2(m2_max)?;
    let phi = rieffel_bump(theta.get(1, 2))?;
    let th = phi.theta12;
    let (t1, t2) = (theta.get(1, k), theta.get(2, k));
    let m1s: Vec<i64> = (-3..=3).filter(|&m1| (th * m1 as f64 - t2).abs() < 1.0).collect();
    let idx = index_grid(m2_max, &m1s);
    let global = e(t1 * t2 / (2.0 * th));
    let vals: Vec<Result<(Vec<i64>, Complex64)>> = idx
        .par_iter()
        .map(|&(m1, m2)| {
            let (a, b) = (m1 as f64, m2 as f64);
            let shift = th * a - t2;
            let (lo, hi) = overlap(shift);
            let mut pts = phi.kinks(0.0).to_vec();
            pts.extend(phi.kinks(shift));
            let v = integrate(
                |x| {
                    let arg = -2.0 * PI * (x * b + (x + th * a) * t1 / th);
                    Complex64::from_polar(phi.sqrt(x + shift) * phi.sqrt(x), arg)
                },
                lo,
                hi,
                &pts,
                tol,
            )?;
            let pre = e((-th * a * b + t1 * a + t2 * b) / 2.0) * global;
            let mut m = vec![0; n];
            m[0] = m1;
            m[1] = m2;
            m[k - 1] = 1;
            Ok((m, pre * v))
        })
        .collect();
    collect_coeffs(n, vals)
}
