//! K_0 generator labels of the flip orbifold, the i_2* expansion, the
//! Natsume matrix, K-group ranks and the isomorphism machinery.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{rat, Rational, Scalar};
use crate::intmat::{hermite_normal_form, smith_normal_form, IntMatrix};
use crate::irrational::{is_totally_irrational, trace_range};
use crate::skewpf::{enumerate_minors, MinorIndex, SkewMatrix};

/// `(I, J)` with `J` an increasing subsequence of the complement tail of `I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorLabel {
    #[serde(rename = "I")]
    pub minor: MinorIndex,
    #[serde(rename = "J")]
    pub flip: Vec<usize>,
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j: Vec<String> = self.flip.iter().map(|k| k.to_string()).collect();
        write!(f, "({}, ({}))", self.minor, j.join(","))
    }
}

/// Basis element of K_0 of the flip orbifold: the unit class or a labelled projection.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    Unit,
    Gen(GeneratorLabel),
}

impl Serialize for BasisLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BasisLabel::Unit => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("unit", &true)?;
                m.end()
            }
            BasisLabel::Gen(g) => g.serialize(s),
        }
    }
}

/// Tail `(i_2p + 1, ..., n)` of a nonempty `I`, or all of `1..=n`.
pub fn complement_tail(minor: &MinorIndex, n: usize) -> Vec<usize> {
    let start = minor.as_slice().last().map_or(1, |l| l + 1);
    (start..=n).collect()
}

/// `r_J = -(1/2) * sum_{l<m} theta_{j_l j_m}`.
pub fn r_phase(j: &[usize], theta: &SkewMatrix) -> Result<Scalar> {
    if j.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid(format!("{j:?} is not strictly increasing")));
    }
    if let Some(&l) = j.last() {
        if l > theta.n() || j[0] == 0 {
            return Err(Error::BadIndex { index: l, n: theta.n() });
        }
    }
    let mut acc = Scalar::zero();
    for (a, &x) in j.iter().enumerate() {
        for &y in &j[a + 1..] {
            acc = acc + theta.get(x, y);
        }
    }
    Ok(acc.scale(&rat(-1, 2)))
}

/// All labels `(I, J)`, `|J| <= 2`, ordered by `(|I|, I, |J|, J)`.
pub fn enumerate_generators(n: usize) -> Vec<GeneratorLabel> {
    let mut out = Vec::new();
    for minor in enumerate_minors(n) {
        let tail = complement_tail(&minor, n);
        let mut push = |flip: Vec<usize>| {
            out.push(GeneratorLabel {
                minor: minor.clone(),
                flip,
            })
        };
        push(vec![]);
        for &a in &tail {
            push(vec![a]);
        }
        for (x, &a) in tail.iter().enumerate() {
            for &b in &tail[x + 1..] {
                push(vec![a, b]);
            }
        }
    }
    out
}

/// `[1]` followed by [`enumerate_generators`].
pub fn basis(n: usize) -> Vec<BasisLabel> {
    std::iter::once(BasisLabel::Unit)
        .chain(enumerate_generators(n).into_iter().map(BasisLabel::Gen))
        .collect()
}

/// Position lookup for the basis of dimension `n`.
pub struct BasisIndex {
    labels: Vec<BasisLabel>,
    pos: HashMap<BasisLabel, usize>,
}

impl BasisIndex {
    pub fn new(n: usize) -> Self {
        let labels = basis(n);
        let pos = labels.iter().cloned().enumerate().map(|(k, l)| (l, k)).collect();
        Self { labels, pos }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn unit(&self) -> usize {
        0
    }

    pub fn of(&self, minor: &MinorIndex, flip: &[usize]) -> usize {
        let key = BasisLabel::Gen(GeneratorLabel {
            minor: minor.clone(),
            flip: flip.to_vec(),
        });
        *self
            .pos
            .get(&key)
            .unwrap_or_else(|| panic!("{key:?} is not a basis label"))
    }
}

/// Coordinates over `[1]` and the generator labels.
pub type K0Vector = Vec<i64>;

/// `i_2*[P_I] = 2(I,()) - (I'',()) + (I'',(a)) - (I'',(b)) + (I'',(a,b))`.
pub fn i2star_expand(minor: &MinorIndex, n: usize) -> Result<K0Vector> {
    minor.check_within(n)?;
    i2star_in(minor, &BasisIndex::new(n))
}

fn i2star_in(minor: &MinorIndex, idx: &BasisIndex) -> Result<K0Vector> {
    let mut v = vec![0i64; idx.len()];
    if minor.is_empty() {
        v[idx.unit()] = 1;
        return Ok(v);
    }
    let s = minor.as_slice();
    let (a, b) = (s[s.len() - 2], s[s.len() - 1]);
    let short = minor.truncated();
    v[idx.of(minor, &[])] += 2;
    v[idx.of(&short, &[])] -= 1;
    v[idx.of(&short, &[a])] += 1;
    v[idx.of(&short, &[b])] -= 1;
    v[idx.of(&short, &[a, b])] += 1;
    Ok(v)
}

/// Matrix of `i_1* - i_2*` out of K_0 of the `(n-1)`-dimensional torus.
pub fn natsume_matrix(n: usize) -> Result<IntMatrix> {
    if n < 2 {
        return Err(Error::Invalid(format!("dimension {n} is below 2")));
    }
    let idx = BasisIndex::new(n - 1);
    let half = idx.len();
    let cols: Vec<Vec<BigInt>> = enumerate_minors(n - 1)
        .iter()
        .map(|m| {
            let v = i2star_in(m, &idx)?;
            Ok(v.iter()
                .map(|&x| BigInt::from(x))
                .chain(v.iter().map(|&x| BigInt::from(-x)))
                .collect())
        })
        .collect::<Result<_>>()?;
    IntMatrix::from_columns(2 * half, &cols)
}

#[derive(Clone, Debug, Serialize)]
pub struct KGroups {
    pub k0_rank: usize,
    pub k1_rank: usize,
    /// Invariant factors of the Natsume matrix at each step `2..=n`.
    #[serde(serialize_with = "ser_factors")]
    pub invariant_factors: Vec<(usize, Vec<BigInt>)>,
    pub basis: Vec<BasisLabel>,
}

fn ser_factors<S: serde::Serializer>(
    v: &[(usize, Vec<BigInt>)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut m = s.serialize_map(Some(v.len()))?;
    for (n, f) in v {
        let f: Vec<String> = f.iter().map(|x| x.to_string()).collect();
        m.serialize_entry(&n.to_string(), &f)?;
    }
    m.end()
}

/// Ranks by induction along the Natsume sequence; every Smith form is re-verified.
pub fn k_groups(n: usize) -> Result<KGroups> {
    if n < 2 {
        return Err(Error::Invalid(format!("dimension {n} is below 2")));
    }
    let mut k1 = 0usize;
    let mut k0 = 0usize;
    let mut factors = Vec::new();
    for m in 2..=n {
        let mat = natsume_matrix(m)?;
        let snf = smith_normal_form(&mat);
        if !snf.verify(&mat) {
            return Err(Error::Invalid(format!("Smith form check failed at n = {m}")));
        }
        let inv = snf.invariant_factors();
        if inv.iter().any(|d| !d.is_one()) {
            return Err(Error::Invalid(format!("torsion in the cokernel at n = {m}")));
        }
        let rank = inv.len();
        let nullity = mat.cols() - rank;
        // K_1 of the (m-1)-torus has rank 2^(m-2)
        k0 = (mat.rows() - rank) + (1usize << (m - 2));
        k1 = nullity + 2 * k1;
        factors.push((m, inv));
    }
    Ok(KGroups {
        k0_rank: k0,
        k1_rank: k1,
        invariant_factors: factors,
        basis: basis(n),
    })
}

/// Matrix of `f'` on the flip-orbifold basis induced by `f` with matrix `c`
/// on the K_0 basis indexed by `Minor(n)` (rows are targets, columns sources).
pub fn crossed_iso_map(c: &IntMatrix, n: usize) -> Result<IntMatrix> {
    let minors = enumerate_minors(n);
    let m = minors.len();
    if c.rows() != m || c.cols() != m {
        return Err(Error::DimMismatch(format!(
            "need a {m}x{m} matrix, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    if !c[(0, 0)].is_one() || (1..m).any(|r| !c[(r, 0)].is_zero()) {
        return Err(Error::BadIsoMatrix("column of [1] is not the unit vector".into()));
    }
    let idx = BasisIndex::new(n);
    let size = idx.len();
    let mut out = IntMatrix::zeros(size, size);
    out[(idx.unit(), idx.unit())] = BigInt::one();
    for (col, label) in idx.labels().iter().enumerate().skip(1) {
        let BasisLabel::Gen(g) = label else { unreachable!() };
        if g.minor.is_empty() {
            out[(col, col)] = BigInt::one();
            continue;
        }
        let src = minors.iter().position(|x| *x == g.minor).expect("minor");
        for (row, target) in minors.iter().enumerate().skip(1) {
            if row != src {
                out[(idx.of(target, &[]), col)] += &c[(row, src)];
            }
        }
        out[(col, col)] += BigInt::one();
        out[(idx.of(&g.minor, &[]), col)] += &c[(src, src)] - BigInt::one();
        let unit_coeff = &c[(0, src)];
        out[(idx.unit(), col)] += unit_coeff;
        out[(idx.of(&MinorIndex::empty(), &[]), col)] -= unit_coeff;
    }
    Ok(out)
}

/// Twice the orbifold trace of each basis element: `2` on `[1]`, `pf_I` on `(I, J)`.
pub fn doubled_traces(pf: &[Scalar], n: usize) -> Result<Vec<Scalar>> {
    let minors = enumerate_minors(n);
    if pf.len() != minors.len() {
        return Err(Error::DimMismatch(format!(
            "{} pfaffian values for {} minors",
            pf.len(),
            minors.len()
        )));
    }
    let pos: HashMap<&MinorIndex, usize> = minors.iter().enumerate().map(|(k, m)| (m, k)).collect();
    Ok(basis(n)
        .iter()
        .map(|l| match l {
            BasisLabel::Unit => Scalar::from_int(2),
            BasisLabel::Gen(g) => pf[pos[&g.minor]].clone(),
        })
        .collect())
}

/// `(row vector) * M` over scalars.
pub fn apply_traces(traces: &[Scalar], m: &IntMatrix) -> Vec<Scalar> {
    (0..m.cols())
        .map(|j| {
            (0..m.rows())
                .filter(|&i| !m[(i, j)].is_zero())
                .map(|i| traces[i].scale(&Rational::from_integer(m[(i, j)].clone())))
                .sum()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Equal,
    NotEqual,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoDecision {
    pub verdict: Verdict,
    pub lattices_equal: bool,
    pub first_totally_irrational: bool,
    pub second_totally_irrational: bool,
    /// Joint monomial exponents indexing the lattice coordinates.
    pub exponents: Vec<u64>,
    #[serde(serialize_with = "ser_int_rows")]
    pub hnf_first: Vec<Vec<BigInt>>,
    #[serde(serialize_with = "ser_int_rows")]
    pub hnf_second: Vec<Vec<BigInt>>,
}

fn ser_int_rows<S: serde::Serializer>(
    v: &[Vec<BigInt>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = v
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect();
    rows.serialize(s)
}

/// Canonical bases of the Z-spans of two lists of scalars, over a joint
/// integer coordinate system.
pub fn lattice_bases(a: &[Scalar], b: &[Scalar]) -> (Vec<u64>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let exps: BTreeSet<u64> = a.iter().chain(b).flat_map(|s| s.exponents()).collect();
    let exps: Vec<u64> = exps.into_iter().collect();
    let mut den = BigInt::one();
    for s in a.iter().chain(b) {
        for e in &exps {
            den = den.lcm(s.coeff(*e).denom());
        }
    }
    let to_rows = |xs: &[Scalar]| -> Vec<Vec<BigInt>> {
        xs.iter()
            .map(|s| {
                exps.iter()
                    .map(|e| (s.coeff(*e) * Rational::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect()
    };
    let hnf = |rows: Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
        if rows.is_empty() || exps.is_empty() {
            return Vec::new();
        }
        hermite_normal_form(&IntMatrix::from_rows(&rows).expect("rectangular")).basis()
    };
    let ha = hnf(to_rows(a));
    let hb = hnf(to_rows(b));
    (exps, ha, hb)
}

/// Compares trace ranges; equality decides isomorphism when either side is totally irrational.
pub fn iso_decide(theta1: &SkewMatrix, theta2: &SkewMatrix) -> Result<IsoDecision> {
    if theta1.n() != theta2.n() {
        return Err(Error::DimMismatch(format!("{} vs {}", theta1.n(), theta2.n())));
    }
    let g1: Vec<Scalar> = trace_range(theta1, true).generators.into_iter().map(|g| g.1).collect();
    let g2: Vec<Scalar> = trace_range(theta2, true).generators.into_iter().map(|g| g.1).collect();
    let ti1 = is_totally_irrational(theta1).totally_irrational;
    let ti2 = is_totally_irrational(theta2).totally_irrational;
    let (exponents, h1, h2) = lattice_bases(&g1, &g2);
    let equal = h1 == h2;
    let verdict = match (ti1 || ti2, equal) {
        (false, _) => Verdict::Inconclusive,
        (true, true) => Verdict::Equal,
        (true, false) => Verdict::NotEqual,
    };
    Ok(IsoDecision {
        verdict,
        lattices_equal: equal,
        first_totally_irrational: ti1,
        second_totally_irrational: ti2,
        exponents,
        hnf_first: h1,
        hnf_second: h2,
    })
}
