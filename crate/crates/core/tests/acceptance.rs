mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use nctk::exactnum::{int, rat, AlphaEnclosure, Rational, Scalar};
use nctk::intmat::{smith_normal_form, IntMatrix};
use nctk::irrational::{
    certify_pf_chain, is_strongly_totally_irrational, is_totally_irrational, pf_expansion_check,
    theta_supergen, SuperIncreasingSeq,
};
use nctk::ktheory::{
    apply_traces, crossed_iso_map, doubled_traces, enumerate_generators, iso_decide, k_groups,
    natsume_matrix, GeneratorLabel, Verdict,
};
use nctk::pathfield::{
    bernstein_coeffs, build_positivity_path, grid_scan, make_minors_positive, segment_point,
    translate_positive_path,
};
use nctk::schur::{f_power_closed, f_power_iterated, pf_factorization_check, schur_f};
use nctk::skewpf::{
    determinant, enumerate_minors, pfaffian, pfaffian_minor, pfaffian_perm, pfaffian_sum_sides,
    summation_sign, z_matrix,
};
use nctk::twisted::{
    crossed_defect, flip, p_extended, p_flip, projection_defect, rieffel_projection, trace,
    RealSkew,
};
use nctk::{MinorIndex, SkewMatrix};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

type Outcome = Result<(), String>;

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn theta(n: usize) -> SkewMatrix {
    theta_supergen(n, &SuperIncreasingSeq::default_for(n)).unwrap()
}

fn minor(v: &[usize]) -> MinorIndex {
    MinorIndex::new(v.to_vec()).unwrap()
}

fn pfaffian_oracle() -> Outcome {
    let mut r = rng(1);
    for n in [2, 4, 6, 8] {
        for k in 0..200 {
            let a = random_int_skew(&mut r, n, 9);
            let pf = pfaffian(&a).unwrap();
            check!(pf == pfaffian_perm(&a).unwrap(), "n={n} #{k}: pfaffian differs from matching sum");
            let det = determinant(&a.to_rows());
            check!(&pf * &pf == det, "n={n} #{k}: pf^2 != det");
            let gauss = det_gauss(&rational_rows(&a));
            check!(det.as_rational() == Some(&gauss), "n={n} #{k}: det differs from elimination");
        }
    }
    Ok(())
}

fn summation_identity() -> Outcome {
    let mut r = rng(2);
    for n in [2, 4, 6] {
        for k in 0..100 {
            let a = random_rat_skew(&mut r, n, 6, 5);
            let b = random_rat_skew(&mut r, n, 6, 5);
            let (lhs, rhs) = pfaffian_sum_sides(&a, &b).unwrap();
            check!(lhs == rhs, "n={n} #{k}: sides differ");
            let sum = a.add(&b).unwrap();
            check!(
                lhs.as_rational() == Some(&pf_expand(&rational_rows(&sum))),
                "n={n} #{k}: left side differs from row expansion"
            );
        }
    }
    // symbolic n = 4 with B = Z: the |I| = 2 part is the linear coefficient
    let a = theta(4);
    let z = z_matrix(4);
    let (lhs, rhs) = pfaffian_sum_sides(&a, &z).unwrap();
    check!(lhs == rhs, "symbolic n=4: sides differ");
    let mut linear = Scalar::zero();
    for idx in enumerate_minors(4).into_iter().filter(|m| m.len() == 2) {
        let comp = MinorIndex::new(idx.complement(4)).unwrap();
        let term = pfaffian_minor(&a, &idx).unwrap() * pfaffian_minor(&z, &comp).unwrap();
        linear = if summation_sign(&idx) > 0 { linear + term } else { linear - term };
    }
    let g = |i, j| a.get(i, j).clone();
    let expected = g(1, 2) + g(3, 4) - g(1, 3) - g(2, 4) + g(1, 4) + g(2, 3);
    check!(linear == expected, "symbolic n=4 coefficient is {linear}");
    Ok(())
}

fn leading_minors_nonzero(a: &SkewMatrix) -> bool {
    (1..=a.n() / 2).all(|k| !pfaffian_minor(a, &MinorIndex::leading(2 * k)).unwrap().is_zero())
}

fn schur_factorization() -> Outcome {
    let mut r = rng(3);
    for n in [4, 6, 8] {
        let mut done = 0;
        while done < 100 {
            let a = random_rat_skew(&mut r, n, 7, 4);
            if !leading_minors_nonzero(&a) {
                continue;
            }
            done += 1;
            let rep = pf_factorization_check(&a).unwrap();
            check!(rep.holds(), "n={n} #{done}: cleared minor identity fails");
            // independent: pf(theta) = theta_12 * pf(F(theta)) over rationals
            let f = schur_f(&a).unwrap().eval_rational(&Rational::zero()).unwrap();
            let pf = pfaffian(&a).unwrap();
            let t12 = a.get(1, 2).as_rational().unwrap().clone();
            check!(
                pf.as_rational() == Some(&(t12 * pf_expand(&f))),
                "n={n} #{done}: pf(theta) != theta_12 pf(F)"
            );
            for m in 1..n / 2 {
                check!(
                    f_power_closed(&a, m).unwrap() == f_power_iterated(&a, m).unwrap(),
                    "n={n} #{done}: closed and iterated F^{m} differ"
                );
            }
        }
    }
    Ok(())
}

fn label(i: &[usize], j: &[usize]) -> GeneratorLabel {
    GeneratorLabel { minor: minor(i), flip: j.to_vec() }
}

fn counting() -> Outcome {
    for n in 2..=12usize {
        let minors = enumerate_minors(n).len();
        check!(minors == 1 << (n - 1), "n={n}: |Minor| = {minors}");
        let gens = enumerate_generators(n).len();
        check!(gens == 3 * (1 << (n - 1)) - 1, "n={n}: |P_n| = {gens}");
    }
    let two = enumerate_generators(2);
    let expected = vec![
        label(&[], &[]),
        label(&[], &[1]),
        label(&[], &[2]),
        label(&[], &[1, 2]),
        label(&[1, 2], &[]),
    ];
    check!(two == expected, "n=2 labels: {two:?}");
    let three: BTreeSet<_> = enumerate_generators(3).into_iter().collect();
    let expected: BTreeSet<_> = [
        label(&[], &[]),
        label(&[], &[1]),
        label(&[], &[2]),
        label(&[], &[1, 2]),
        label(&[1, 2], &[]),
        label(&[], &[3]),
        label(&[], &[1, 3]),
        label(&[], &[2, 3]),
        label(&[1, 2], &[3]),
        label(&[1, 3], &[]),
        label(&[2, 3], &[]),
    ]
    .into_iter()
    .collect();
    check!(three == expected, "n=3 labels: {three:?}");
    Ok(())
}

fn k_ranks() -> Outcome {
    for n in 2..=8usize {
        let m = natsume_matrix(n).unwrap();
        let snf = smith_normal_form(&m);
        check!(snf.verify(&m), "n={n}: smith form does not reproduce the matrix");
        let f = snf.invariant_factors();
        check!(f.len() == m.cols() && f.iter().all(|x| x.is_one()), "n={n}: invariant factors {f:?}");
        let k = k_groups(n).unwrap();
        check!(
            (k.k0_rank, k.k1_rank) == (3 << (n - 1), 0),
            "n={n}: ranks ({}, {})",
            k.k0_rank,
            k.k1_rank
        );
    }
    let col = natsume_matrix(2).unwrap().column(0);
    let want: Vec<BigInt> = [1, 0, 0, -1, 0, 0].into_iter().map(BigInt::from).collect();
    check!(col == want, "n=2 column {col:?}");
    Ok(())
}

fn irrationality() -> Outcome {
    for n in [2, 4, 6, 8] {
        let rep = pf_expansion_check(&theta(n)).unwrap();
        check!(rep.passes(), "n={n}: expansion {:?}", rep.failure);
        let dbl: u64 = (1..n as u64).step_by(2).product();
        check!(rep.terms.len() as u64 == dbl, "n={n}: {} terms", rep.terms.len());
        check!(
            rep.terms.windows(2).all(|w| w[0].1 > w[1].1 && w[0].0 == -w[1].0),
            "n={n}: terms not alternating and decreasing"
        );
    }
    let enc = AlphaEnclosure::around(rat(999, 1000), 30).unwrap();
    let cap = 4096;
    let chain = certify_pf_chain(&theta(4), &enc, cap).map_err(|e| e.to_string())?;
    check!(chain.passes(), "chain {chain:?}");
    let sti = is_strongly_totally_irrational(&theta(4), &enc, cap).map_err(|e| e.to_string())?;
    check!(sti.passes(), "STI(Theta(4)) fails");
    for n in 2..=8 {
        check!(is_totally_irrational(&theta(n)).totally_irrational, "TI(Theta({n})) fails");
    }
    Ok(())
}

fn minors_positive_oracle(a: &SkewMatrix) -> bool {
    let rows = rational_rows(a);
    enumerate_minors(a.n())
        .iter()
        .skip(1)
        .all(|m| pf_expand(&submatrix(&rows, m.as_slice())) > Rational::zero())
}

fn translates() -> Outcome {
    let mut r = rng(7);
    for n in [4, 6] {
        for k in 0..50 {
            let a = random_rat_skew(&mut r, n, 5, 3);
            let (_, pos) = make_minors_positive(&a).unwrap();
            check!(minors_positive_oracle(&pos), "n={n} #{k}: shifted minors not positive");
            let res = translate_positive_path(&pos).map_err(|e| format!("n={n} #{k}: {e}"))?;
            check!(res.certificate.all_at_least_one(), "n={n} #{k}: coefficient below 1");
            check!(grid_scan(&res.translate, 10), "n={n} #{k}: grid scan fails");
            for step in 0..=10 {
                let p = segment_point(&res.translate, &rat(step, 10));
                check!(minors_positive_oracle(&p), "n={n} #{k}: oracle scan fails at t={step}/10");
            }
            // Bernstein form evaluated at t = 1/3 matches the pfaffian
            let t = rat(1, 3);
            let rows = rational_rows(&segment_point(&res.translate, &t));
            for j in enumerate_minors(n).into_iter().skip(1) {
                let m = j.len() / 2;
                let direct = pf_expand(&submatrix(&rows, j.as_slice()));
                let mut via = Rational::zero();
                for (rr, c) in bernstein_coeffs(&res.translate, &j).unwrap() {
                    let pw = |x: &Rational, e: usize| (0..e).fold(Rational::one(), |acc, _| acc * x);
                    via += c.as_rational().unwrap() * pw(&t, m - rr) * pw(&(Rational::one() - &t), rr);
                }
                check!(direct == via, "n={n} #{k}: Bernstein expansion differs on {j}");
            }
        }
    }
    let mut r = rng(8);
    let a = random_rat_skew(&mut r, 4, 5, 3);
    let psi = theta(4).eval_rational(&rat(999, 1000));
    let path = build_positivity_path(&a, &psi).map_err(|e| e.to_string())?;
    check!(path.glue_minors_one, "glue-point minors are not all 1");
    let b = random_rat_skew(&mut r, 6, 5, 3);
    let c = random_rat_skew(&mut r, 6, 5, 3);
    let path = build_positivity_path(&b, &c).map_err(|e| e.to_string())?;
    check!(path.glue_minors_one, "n=6 glue-point minors are not all 1");
    Ok(())
}

fn rieffel() -> Outcome {
    let th = RealSkew::two(0.75);
    let e = rieffel_projection(0.75, 40, 1e-10).map_err(|e| e.to_string())?;
    let tr = trace(&e);
    check!((tr.re - 0.75).abs() < 1e-8 && tr.im.abs() < 1e-8, "Tr(e) = {tr}");
    let d = projection_defect(&e, &th).unwrap();
    check!(d.idempotent < 1e-6, "idempotency defect {:e}", d.idempotent);
    check!(d.adjoint < 1e-8, "adjoint defect {:e}", d.adjoint);
    let fl = flip(&e).sub(&e).unwrap().l1_norm();
    check!(fl < 1e-8, "flip defect {fl:e}");
    let p = p_extended(&e, &[], &th).unwrap();
    let dp = crossed_defect(&p, &th).unwrap();
    check!(dp.idempotent < 1e-6, "P_(12),() defect {:e}", dp.idempotent);
    let tp = p.trace();
    check!((tp.re - 0.375).abs() < 1e-8, "crossed trace {tp}");
    for j in [&[][..], &[1], &[2], &[1, 2]] {
        let q = p_flip(2, j, &th).unwrap();
        let dq = crossed_defect(&q, &th).unwrap();
        check!(
            dq.idempotent < 1e-12 && dq.adjoint < 1e-12,
            "P_(),{j:?} defects {:e} / {:e}",
            dq.idempotent,
            dq.adjoint
        );
    }
    Ok(())
}

fn random_unimodular(r: &mut impl Rng, size: usize) -> IntMatrix {
    // fixes the first basis vector; elementary column operations elsewhere
    let mut m = IntMatrix::identity(size);
    for _ in 0..3 * size {
        let dst = r.gen_range(1..size);
        let src = r.gen_range(0..size);
        if src == dst {
            continue;
        }
        let k = BigInt::from(r.gen_range(-2i64..=2));
        for row in 0..size {
            let v = &m[(row, src)] * &k;
            m[(row, dst)] += v;
        }
    }
    m
}

fn iso_machinery() -> Outcome {
    for n in 2..=4 {
        let size = enumerate_minors(n).len();
        let f = crossed_iso_map(&IntMatrix::identity(size), n).unwrap();
        check!(f.is_identity(), "n={n}: identity does not map to identity");
    }
    let mut r = rng(9);
    for n in [3, 4] {
        let size = enumerate_minors(n).len();
        let target: Vec<Scalar> = enumerate_minors(n)
            .iter()
            .map(|m| pfaffian_minor(&theta(n), m).unwrap())
            .collect();
        for k in 0..20 {
            let c = random_unimodular(&mut r, size);
            check!(c.is_unimodular(), "n={n} #{k}: generator produced a non-unimodular C");
            // trace compatibility defines the source traces
            let source = apply_traces(&target, &c);
            let f = crossed_iso_map(&c, n).map_err(|e| e.to_string())?;
            check!(f.is_unimodular(), "n={n} #{k}: f' not unimodular");
            let lhs = apply_traces(&doubled_traces(&target, n).unwrap(), &f);
            let rhs = doubled_traces(&source, n).unwrap();
            check!(lhs == rhs, "n={n} #{k}: trace identity fails");
        }
    }
    let t4 = theta(4);
    let shift = SkewMatrix::from_i64(&[&[0, 1, -2, 0], &[-1, 0, 3, 1], &[2, -3, 0, -1], &[0, -1, 1, 0]]).unwrap();
    let d = iso_decide(&t4, &t4.add(&shift).unwrap()).unwrap();
    check!(d.verdict == Verdict::Equal, "Theta(4) vs translate: {:?}", d.verdict);
    let a = SkewMatrix::from_fn(2, |_, _| Scalar::alpha_pow(1));
    let b = a.scale(&int(2));
    let d = iso_decide(&a, &b).unwrap();
    check!(d.verdict == Verdict::NotEqual, "{{1,a}} vs {{1,2a}}: {:?}", d.verdict);
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("pfaffian oracle equivalence", pfaffian_oracle, 30),
        ("summation identity", summation_identity, 30),
        ("schur factorization", schur_factorization, 60),
        ("label counting", counting, 5),
        ("k-theory ranks", k_ranks, 60),
        ("irrationality certificates", irrationality, 120),
        ("positive translates", translates, 120),
        ("rieffel numerics", rieffel, 120),
        ("iso machinery", iso_machinery, 30),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if took > Duration::from_secs(*limit) {
                Err(format!("took {:.1}s, limit {limit}s", took.as_secs_f64()))
            } else {
                Ok(())
            }
        });
        match outcome {
            Ok(()) => println!("criterion {} ({name}): PASS in {:.2}s", k + 1, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL in {:.2}s: {why}", k + 1, took.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
