mod common;

use std::collections::BTreeSet;

use common::*;
use nctk::exactnum::{
    eval_interval, rat, rational_independent, AlphaEnclosure, AlphaPoly, Rational, Scalar,
};
use nctk::intmat::IntMatrix;
use nctk::irrational::{
    is_nondegenerate, is_totally_irrational, theta_supergen, SuperIncreasingSeq,
};
use nctk::ktheory::{
    apply_traces, crossed_iso_map, doubled_traces, enumerate_generators, i2star_expand,
};
use nctk::pathfield::{bernstein_coeffs, make_minors_positive, segment_point, translate_positive_path};
use nctk::schur::{f_power_closed, f_power_iterated, pf_factorization_check, SoElement};
use nctk::skewpf::{
    determinant, enumerate_minors, pfaffian, pfaffian_minor, pfaffian_perm, pfaffian_sum_sides,
    z_matrix,
};
use nctk::twisted::{flip, trace, twisted_convolve, CoeffArray, RealSkew};
use nctk::{MinorIndex, SkewMatrix};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((0u64..6, small_rational()), 0..4)
        .prop_map(|terms| Scalar::from_poly(AlphaPoly::from_terms(terms)))
}

fn int_skew(n: usize) -> impl Strategy<Value = SkewMatrix> {
    prop::collection::vec(-9i64..=9, n * (n - 1) / 2).prop_map(move |v| {
        let mut it = v.into_iter();
        SkewMatrix::from_fn(n, |_, _| Scalar::from_int(it.next().unwrap()))
    })
}

fn rat_skew(n: usize) -> impl Strategy<Value = SkewMatrix> {
    prop::collection::vec(small_rational(), n * (n - 1) / 2).prop_map(move |v| {
        let mut it = v.into_iter();
        SkewMatrix::from_fn(n, |_, _| Scalar::from_rational(it.next().unwrap()))
    })
}

fn even_dim() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 4, 6, 8])
}

fn theta(n: usize) -> SkewMatrix {
    theta_supergen(n, &SuperIncreasingSeq::default_for(n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalar_ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn interval_evaluation_is_sound(p in scalar(), num in 100i64..900, k in 0u32..50) {
        let center = rat(num, 1000);
        let enc = AlphaEnclosure::around(center.clone(), 6).unwrap();
        let probe = &center + &rat(k as i64 - 25, 100_000_000);
        let iv = eval_interval(&p, &enc, 64);
        prop_assert!(iv.contains(&p.eval_rational(&probe)));
    }

    #[test]
    fn independence_of_one_and_p(p in scalar()) {
        let (indep, _) = rational_independent(&[Scalar::one(), p.clone()]);
        prop_assert_eq!(indep, !p.is_rational());
    }

    #[test]
    fn pfaffian_matches_oracles(a in even_dim().prop_flat_map(int_skew)) {
        let pf = pfaffian(&a).unwrap();
        prop_assert_eq!(&pf, &pfaffian_perm(&a).unwrap());
        prop_assert_eq!(&pf * &pf, determinant(&a.to_rows()));
        prop_assert_eq!(pf.as_rational().unwrap(), &pf_expand(&rational_rows(&a)));
    }

    #[test]
    fn summation_sides_agree(
        (a, b) in prop::sample::select(vec![2usize, 4, 6]).prop_flat_map(|n| (rat_skew(n), rat_skew(n)))
    ) {
        let (lhs, rhs) = pfaffian_sum_sides(&a, &b).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn closed_form_matches_iteration(a in prop::sample::select(vec![4usize, 6, 8]).prop_flat_map(rat_skew)) {
        let n = a.n();
        let nonzero = (1..=n / 2)
            .all(|k| !pfaffian_minor(&a, &MinorIndex::leading(2 * k)).unwrap().is_zero());
        prop_assume!(nonzero);
        for m in 1..n / 2 {
            prop_assert_eq!(f_power_closed(&a, m).unwrap(), f_power_iterated(&a, m).unwrap());
        }
        prop_assert!(pf_factorization_check(&a).unwrap().holds());
    }

    #[test]
    fn so_products_keep_relations(shift in prop::collection::vec(-3i64..=3, 6), swap in 0usize..3, p in 0usize..=2) {
        let n = 4;
        let mut nm = IntMatrix::zeros(n, n);
        let mut it = shift.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = it.next().unwrap();
                nm[(i, j)] = BigInt::from(v);
                nm[(j, i)] = BigInt::from(-v);
            }
        }
        let mut r = IntMatrix::identity(n);
        r[(swap, swap + 1)] = BigInt::one();
        let g = SoElement::mu(&nm).unwrap()
            .compose(&SoElement::rho(&r).unwrap()).unwrap()
            .compose(&SoElement::sigma(n, p).unwrap()).unwrap();
        prop_assert!(g.satisfies_relations());
    }

    #[test]
    fn bernstein_reconstructs_minors(a in prop::sample::select(vec![2usize, 4, 6]).prop_flat_map(rat_skew)) {
        let n = a.n();
        for j in enumerate_minors(n).into_iter().skip(1) {
            let m = j.len() / 2;
            let coeffs = bernstein_coeffs(&a, &j).unwrap();
            // agreement at m + 1 points pins down the degree-m polynomial
            for k in 0..=m {
                let t = rat(k as i64, m as i64);
                let rows = rational_rows(&segment_point(&a, &t));
                let direct = pf_expand(&submatrix(&rows, j.as_slice()));
                let mut via = Rational::zero();
                for (r, c) in &coeffs {
                    let pw = |x: &Rational, e: usize| (0..e).fold(Rational::one(), |acc, _| acc * x);
                    via += c.as_rational().unwrap() * pw(&t, m - r) * pw(&(Rational::one() - &t), *r);
                }
                prop_assert_eq!(direct, via);
            }
        }
    }

    #[test]
    fn translates_differ_by_integers(a in prop::sample::select(vec![4usize, 6]).prop_flat_map(rat_skew)) {
        let (_, pos) = make_minors_positive(&a).unwrap();
        let res = translate_positive_path(&pos).unwrap();
        let diff = res.translate.sub(&pos).unwrap();
        for (i, j, v) in diff.upper() {
            let v = v.as_rational().unwrap();
            prop_assert!(v.is_integer() && *v >= Rational::zero());
            let listed = res.increments.iter().find(|inc| (inc.i, inc.j) == (i, j));
            match listed {
                Some(inc) => prop_assert_eq!(Rational::from_integer(inc.delta.clone()), v.clone()),
                None => prop_assert!(v.is_zero()),
            }
        }
        prop_assert!(res.certificate.all_at_least_one());
    }

    #[test]
    fn crossed_map_trace_identity(col in prop::collection::vec(-3i64..=3, 7), diag in prop::collection::vec(-2i64..=2, 6)) {
        // upper unitriangular C with unit first column
        let n = 4;
        let size = 8;
        let mut c = IntMatrix::identity(size);
        let mut it = col.into_iter().chain(diag);
        for j in 1..size {
            for i in 0..j.min(2) {
                c[(i, j)] = BigInt::from(it.next().unwrap_or(0));
            }
        }
        let target: Vec<Scalar> = enumerate_minors(n)
            .iter()
            .map(|m| pfaffian_minor(&theta(n), m).unwrap())
            .collect();
        let source = apply_traces(&target, &c);
        let f = crossed_iso_map(&c, n).unwrap();
        prop_assert!(f.is_unimodular());
        prop_assert_eq!(
            apply_traces(&doubled_traces(&target, n).unwrap(), &f),
            doubled_traces(&source, n).unwrap()
        );
    }

    #[test]
    fn twisted_associativity_and_trace(
        th in prop::collection::vec(-1.0f64..1.0, 3),
        pts in prop::collection::vec((prop::collection::vec(-2i64..=2, 3), -1.0f64..1.0, -1.0f64..1.0), 9)
    ) {
        let rows = vec![
            vec![0.0, th[0], th[1]],
            vec![-th[0], 0.0, th[2]],
            vec![-th[1], -th[2], 0.0],
        ];
        let theta = RealSkew::new(rows).unwrap();
        let mut arrays = vec![CoeffArray::zero(3), CoeffArray::zero(3), CoeffArray::zero(3)];
        for (k, (m, re, im)) in pts.into_iter().enumerate() {
            arrays[k % 3].add_at(m, Complex64::new(re, im)).unwrap();
        }
        let [a, b, c] = &arrays[..] else { unreachable!() };
        let conv = |x: &CoeffArray, y: &CoeffArray| twisted_convolve(x, y, &theta).unwrap();
        let left = conv(&conv(a, b), c);
        let right = conv(a, &conv(b, c));
        prop_assert!(left.sub(&right).unwrap().l1_norm() < 1e-12);
        prop_assert!((trace(&conv(a, b)) - trace(&conv(b, a))).norm() < 1e-12);
        prop_assert_eq!(flip(&flip(a)), a.clone());
        let hom = flip(&conv(a, b)).sub(&conv(&flip(a), &flip(b))).unwrap();
        prop_assert!(hom.l1_norm() < 1e-12);
    }

    #[test]
    fn generator_relation(t in -2.0f64..2.0, j in 1usize..=3, k in 1usize..=3) {
        prop_assume!(j != k);
        let mut rows = vec![vec![0.0; 3]; 3];
        rows[j - 1][k - 1] = t;
        rows[k - 1][j - 1] = -t;
        rows[0][1] += 0.3;
        rows[1][0] -= 0.3;
        let theta = RealSkew::new(rows).unwrap();
        let uj = CoeffArray::generator(3, j);
        let uk = CoeffArray::generator(3, k);
        let jk = twisted_convolve(&uj, &uk, &theta).unwrap();
        let kj = twisted_convolve(&uk, &uj, &theta).unwrap()
            .scale(nctk::twisted::e(theta.get(j, k)));
        prop_assert!(jk.sub(&kj).unwrap().l1_norm() < 1e-14);
    }
}

#[test]
fn z_pfaffians_are_one() {
    for k in 0..=5 {
        assert_eq!(pfaffian(&z_matrix(2 * k)).unwrap(), Scalar::one());
    }
}

#[test]
fn minors_are_distinct() {
    for n in 0..=12usize {
        let m = enumerate_minors(n);
        assert_eq!(m.len(), 1usize << n.saturating_sub(1));
        assert_eq!(m.iter().collect::<BTreeSet<_>>().len(), m.len());
    }
}

#[test]
fn generator_count_matches_brute_force() {
    for n in 2..=12usize {
        let mut brute = 0;
        for imask in 0u32..1 << n {
            if imask.count_ones() % 2 == 1 {
                continue;
            }
            let last = (0..n).rev().find(|&b| imask >> b & 1 == 1).map_or(0, |b| b + 1);
            let tail = n - last;
            // subsets of the tail with at most two elements
            brute += 1 + tail + tail * tail.saturating_sub(1) / 2;
        }
        assert_eq!(enumerate_generators(n).len(), brute, "n={n}");
    }
}

#[test]
fn submatrices_of_theta_are_theta() {
    let n = 6;
    let s = SuperIncreasingSeq::default_for(n);
    let big = theta_supergen(n, &s).unwrap();
    for idx in enumerate_minors(n).into_iter().filter(|m| m.len() >= 4) {
        let v = idx.as_slice();
        let mut sub = Vec::new();
        for b in 1..v.len() {
            for a in 0..b {
                let (i, j) = (v[a], v[b]);
                sub.push(s.terms()[(j - 1) * (j - 2) / 2 + i - 1]);
            }
        }
        // same column layout over the picked subsequence (it need not start at 1)
        let small = SkewMatrix::from_fn(v.len(), |i, j| Scalar::alpha_pow(sub[(j - 1) * (j - 2) / 2 + i - 1]));
        assert_eq!(big.restrict(&idx).unwrap(), small);
    }
}

#[test]
fn totally_irrational_implies_nondegenerate() {
    for n in 2..=6 {
        let t = theta(n);
        assert!(is_totally_irrational(&t).totally_irrational);
        assert!(is_nondegenerate(&t).nondegenerate);
    }
    let mut r = rng(11);
    for _ in 0..20 {
        let n = 4;
        let t = random_int_skew(&mut r, n, 3)
            .add(&SkewMatrix::from_fn(n, |i, j| Scalar::alpha_pow(1u64 << (i + 2 * j))))
            .unwrap();
        if is_totally_irrational(&t).totally_irrational {
            assert!(is_nondegenerate(&t).nondegenerate);
        }
    }
}

#[test]
fn i2star_reproduces_minor_trace() {
    for n in 2..=6usize {
        let t = theta(n);
        let pf: Vec<Scalar> = enumerate_minors(n).iter().map(|m| pfaffian_minor(&t, m).unwrap()).collect();
        let doubled = doubled_traces(&pf, n).unwrap();
        for (k, minor) in enumerate_minors(n).iter().enumerate() {
            let v = i2star_expand(minor, n).unwrap();
            let total: Scalar = v
                .iter()
                .zip(&doubled)
                .filter(|(c, _)| **c != 0)
                .map(|(c, d)| d.scale(&rat(*c, 2)))
                .sum();
            assert_eq!(total, pf[k], "n={n} minor {minor}");
        }
    }
}
