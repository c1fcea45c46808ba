#![allow(dead_code)]

use nctk::exactnum::{rat, Rational, Scalar};
use nctk::SkewMatrix;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_int_skew(r: &mut ChaCha8Rng, n: usize, bound: i64) -> SkewMatrix {
    SkewMatrix::from_fn(n, |_, _| Scalar::from_int(r.gen_range(-bound..=bound)))
}

pub fn random_rational(r: &mut ChaCha8Rng, bound: i64, max_den: i64) -> Rational {
    rat(r.gen_range(-bound..=bound), r.gen_range(1..=max_den))
}

pub fn random_rat_skew(r: &mut ChaCha8Rng, n: usize, bound: i64, max_den: i64) -> SkewMatrix {
    SkewMatrix::from_fn(n, |_, _| Scalar::from_rational(random_rational(r, bound, max_den)))
}

/// Rational determinant by plain Gaussian elimination.
pub fn det_gauss(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            let f = &a[r][c] / &piv;
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let v = &f * &a[c][k];
                a[r][k] -= v;
            }
        }
    }
    det
}

/// Pfaffian by expansion along the first row, over rationals.
pub fn pf_expand(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    let mut acc = Rational::zero();
    for j in 1..n {
        if m[0][j].is_zero() {
            continue;
        }
        let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let sub: Vec<Vec<Rational>> = keep
            .iter()
            .map(|&r| keep.iter().map(|&c| m[r][c].clone()).collect())
            .collect();
        let term = &m[0][j] * pf_expand(&sub);
        if j % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

pub fn rational_rows(a: &SkewMatrix) -> Vec<Vec<Rational>> {
    a.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|s| s.as_rational().expect("rational").clone()).collect())
        .collect()
}

/// Rows and columns `idx` (1-based) of a rational matrix.
pub fn submatrix(m: &[Vec<Rational>], idx: &[usize]) -> Vec<Vec<Rational>> {
    idx.iter()
        .map(|&r| idx.iter().map(|&c| m[r - 1][c - 1].clone()).collect())
        .collect()
}
