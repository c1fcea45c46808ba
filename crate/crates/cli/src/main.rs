use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use nctk::exactnum::{parse_rational, AlphaEnclosure, Scalar};
use nctk::intmat::{smith_normal_form, IntMatrix};
use nctk::irrational::{
    is_nondegenerate, is_strongly_totally_irrational, is_totally_irrational, precision_cap,
    theta_supergen, trace_range, SuperIncreasingSeq,
};
use nctk::ktheory::{basis, crossed_iso_map, i2star_expand, iso_decide, k_groups, natsume_matrix, Verdict};
use nctk::pathfield::{bernstein_coeffs, build_positivity_path, make_minors_positive, translate_positive_path, BernsteinCert};
use nctk::schur::schur_f;
use nctk::skewpf::{enumerate_minors, pfaffian};
use nctk::twisted::{
    crossed_defect, flip, p_extended, p_flip, projection_defect, rieffel_projection_with, tail_bound,
    trace, BumpPhi, BumpProfile, RealSkew,
};
use nctk::{MinorIndex, SkewMatrix};

#[derive(Parser)]
#[command(name = "nct-k", version, about = "Exact invariants of noncommutative tori and their flip orbifolds")]
struct Cli {
    /// Seed for randomly generated inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MatrixInput {
    /// Skew matrix JSON file.
    #[arg(long, conflicts_with = "random")]
    matrix: Option<PathBuf>,
    /// Use a random integer skew matrix of this size instead.
    #[arg(long)]
    random: Option<usize>,
    /// Entry bound for --random.
    #[arg(long, default_value_t = 5)]
    bound: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Pfaffian of a skew matrix.
    Pf(MatrixInput),
    /// Even-length index tuples of 1..=n.
    Minors {
        #[arg(long)]
        n: usize,
    },
    /// Pfaffian Schur complement as numerator/denominator pairs.
    SchurF(MatrixInput),
    /// The super-increasing exponent family.
    ThetaGen {
        #[arg(long)]
        n: usize,
        /// Comma-separated exponents; powers of two by default.
        #[arg(long)]
        seq: Option<String>,
    },
    /// Rational independence of all pfaffian minors.
    CheckTi(MatrixInput),
    /// Non-degeneracy of the matrix.
    CheckNd(MatrixInput),
    /// Interval certificate of strong total irrationality.
    CheckSti {
        #[command(flatten)]
        input: MatrixInput,
        /// Decimal centre of the enclosure for the formal symbol.
        #[arg(long, default_value = "0.999")]
        alpha: String,
        /// Enclosure radius is 10^-digits.
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Generators of the trace range.
    TraceRange {
        #[command(flatten)]
        input: MatrixInput,
        /// Halve for the flip orbifold.
        #[arg(long)]
        crossed: bool,
    },
    /// Ordered K_0 basis of the flip orbifold.
    K0Basis {
        #[arg(long)]
        n: usize,
    },
    /// Expansion of i_2*[P_I] in the K_0 basis.
    I2star {
        #[arg(long)]
        n: usize,
        /// Comma-separated minor; empty for the unit.
        #[arg(long, default_value = "")]
        minor: String,
    },
    /// Matrix of the connecting map at dimension n.
    Natsume {
        #[arg(long)]
        n: usize,
    },
    /// Ranks of K_0 and K_1 of the flip orbifold.
    KGroups {
        #[arg(long)]
        n: usize,
        /// Include invariant factors and basis.
        #[arg(long)]
        verbose: bool,
    },
    /// Decide isomorphism of two flip orbifolds via trace ranges.
    IsoDecide {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
    },
    /// Lift a K_0 map to the flip orbifold.
    IsoMap {
        #[arg(long)]
        n: usize,
        /// Integer matrix JSON (nested arrays, rows are targets).
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Bernstein coefficients along the segment to Z.
    Bernstein {
        #[command(flatten)]
        input: MatrixInput,
        /// Comma-separated minor; all minors when omitted.
        #[arg(long)]
        minor: Option<String>,
    },
    /// Integer translate with all Bernstein coefficients at least 1.
    Translate {
        #[command(flatten)]
        input: MatrixInput,
        /// Shift by multiples of Z until every minor is positive first.
        #[arg(long)]
        make_positive: bool,
    },
    /// Glue two certified segments through Z.
    Path {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
    },
    /// Numerical checks on the bump-function projection.
    RieffelVerify {
        #[arg(long, default_value_t = 0.75)]
        theta: f64,
        #[arg(long, default_value_t = 40)]
        m2_max: u32,
        #[arg(long, default_value_t = 1e-10)]
        quad_tol: f64,
        #[arg(long, value_enum, default_value = "beta-sine7")]
        profile: Profile,
        /// Write the projection coefficients here.
        #[arg(long)]
        coeffs_out: Option<PathBuf>,
    },
    /// Smith normal form of an integer matrix.
    Snf {
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Profile {
    Cubic,
    BetaSine7,
}

enum Status {
    Pass,
    Negative,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        anyhow::anyhow!("{}: field `{field}`: {}", path.display(), e.inner())
    })
}

fn random_skew(n: usize, bound: i64, seed: u64) -> SkewMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SkewMatrix::from_fn(n, |_, _| Scalar::from_int(rng.gen_range(-bound..=bound)))
}

impl MatrixInput {
    fn load(&self, seed: u64) -> Result<SkewMatrix> {
        match (&self.matrix, self.random) {
            (Some(p), _) => read_json(p),
            (None, Some(n)) => Ok(random_skew(n, self.bound, seed)),
            (None, None) => bail!("one of --matrix or --random is required"),
        }
    }
}

fn parse_minor(s: &str) -> Result<MinorIndex> {
    let v = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().with_context(|| format!("bad index `{t}`")))
        .collect::<Result<Vec<_>>>()?;
    Ok(MinorIndex::new(v)?)
}

fn big(x: &BigInt) -> Value {
    i64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

fn run(cli: Cli) -> Result<(Value, Status)> {
    let seed = cli.seed;
    let pass = |v: Value| Ok((v, Status::Pass));
    let verdict = |v: Value, ok: bool| Ok((v, if ok { Status::Pass } else { Status::Negative }));
    match cli.command {
        Command::Pf(input) => pass(json!(pfaffian(&input.load(seed)?)?)),
        Command::Minors { n } => pass(json!(enumerate_minors(n))),
        Command::SchurF(input) => {
            let f = schur_f(&input.load(seed)?)?;
            let mut entries = Vec::new();
            for i in 1..=f.n() {
                for j in i + 1..=f.n() {
                    let e = f.get(i, j);
                    entries.push(json!({"i": i, "j": j, "num": e.num, "den": e.den}));
                }
            }
            pass(json!({"n": f.n(), "entries": entries}))
        }
        Command::ThetaGen { n, seq } => {
            let s = match seq {
                Some(text) => SuperIncreasingSeq::new(
                    text.split(',')
                        .map(|t| t.trim().parse::<u64>().with_context(|| format!("bad exponent `{t}`")))
                        .collect::<Result<_>>()?,
                )?,
                None => SuperIncreasingSeq::default_for(n),
            };
            pass(json!(theta_supergen(n, &s)?))
        }
        Command::CheckTi(input) => {
            let r = is_totally_irrational(&input.load(seed)?);
            let ok = r.totally_irrational;
            verdict(json!(r), ok)
        }
        Command::CheckNd(input) => {
            let r = is_nondegenerate(&input.load(seed)?);
            let ok = r.nondegenerate;
            verdict(json!(r), ok)
        }
        Command::CheckSti { input, alpha, digits } => {
            let enc = AlphaEnclosure::around(parse_rational(&alpha)?, digits)?;
            let cert = is_strongly_totally_irrational(&input.load(seed)?, &enc, precision_cap())?;
            let ok = cert.passes();
            verdict(json!(cert), ok)
        }
        Command::TraceRange { input, crossed } => pass(json!(trace_range(&input.load(seed)?, crossed))),
        Command::K0Basis { n } => pass(json!(basis(n))),
        Command::I2star { n, minor } => pass(json!(i2star_expand(&parse_minor(&minor)?, n)?)),
        Command::Natsume { n } => pass(json!(natsume_matrix(n)?)),
        Command::KGroups { n, verbose } => {
            let k = k_groups(n)?;
            if verbose {
                pass(json!(k))
            } else {
                pass(json!({"k0_rank": k.k0_rank, "k1_rank": k.k1_rank}))
            }
        }
        Command::IsoDecide { first, second } => {
            let d = iso_decide(&read_json(&first)?, &read_json(&second)?)?;
            let ok = d.verdict != Verdict::NotEqual;
            verdict(json!(d), ok)
        }
        Command::IsoMap { n, matrix } => {
            let c: IntMatrix = read_json(&matrix)?;
            pass(json!(crossed_iso_map(&c, n)?))
        }
        Command::Bernstein { input, minor } => {
            let a = input.load(seed)?;
            match minor {
                Some(m) => {
                    let coeffs: Vec<Value> = bernstein_coeffs(&a, &parse_minor(&m)?)?
                        .into_iter()
                        .map(|(r, v)| json!({"r": r, "value": v}))
                        .collect();
                    pass(json!(coeffs))
                }
                None => {
                    let cert = BernsteinCert::build(&a);
                    let mut v = json!(cert);
                    v["all_positive"] = json!(cert.all_positive());
                    pass(v)
                }
            }
        }
        Command::Translate { input, make_positive } => {
            let mut a = input.load(seed)?;
            let mut shift = None;
            if make_positive {
                let (k, shifted) = make_minors_positive(&a)?;
                shift = Some(k);
                a = shifted;
            }
            let res = translate_positive_path(&a)?;
            let mut v = json!(res);
            if let Some(k) = shift {
                v["shift"] = json!(k);
            }
            pass(v)
        }
        Command::Path { first, second } => {
            let p = build_positivity_path(&read_json(&first)?, &read_json(&second)?)?;
            let ok = p.glue_minors_one;
            verdict(json!(p), ok)
        }
        Command::RieffelVerify { theta, m2_max, quad_tol, profile, coeffs_out } => {
            let profile = match profile {
                Profile::Cubic => BumpProfile::Cubic,
                Profile::BetaSine7 => BumpProfile::BetaSine7,
            };
            rieffel_report(theta, m2_max, quad_tol, profile, coeffs_out.as_deref())
        }
        Command::Snf { matrix } => {
            let m: IntMatrix = read_json(&matrix)?;
            let snf = smith_normal_form(&m);
            let factors: Vec<Value> = snf.invariant_factors().iter().map(big).collect();
            pass(json!({
                "invariant_factors": factors,
                "rank": snf.rank(),
                "u": snf.u,
                "s": snf.s,
                "v": snf.v,
            }))
        }
    }
}

fn rieffel_report(
    theta: f64,
    m2_max: u32,
    quad_tol: f64,
    profile: BumpProfile,
    coeffs_out: Option<&Path>,
) -> Result<(Value, Status)> {
    let phi = BumpPhi::new(theta, profile)?;
    let form = RealSkew::two(theta);
    let e = rieffel_projection_with(&phi, m2_max, quad_tol)?;
    if let Some(path) = coeffs_out {
        fs::write(path, serde_json::to_string(&e)?).with_context(|| format!("writing {}", path.display()))?;
    }
    let tr = trace(&e);
    let d = projection_defect(&e, &form)?;
    let flip_defect = flip(&e).sub(&e)?.l1_norm();
    let p = p_extended(&e, &[], &form)?;
    let dp = crossed_defect(&p, &form)?;
    let crossed_trace = p.trace();
    let mut flips = Vec::new();
    let mut flips_ok = true;
    for j in [&[][..], &[1], &[2], &[1, 2]] {
        let dq = crossed_defect(&p_flip(2, j, &form)?, &form)?;
        flips_ok &= dq.idempotent < 1e-12 && dq.adjoint < 1e-12;
        flips.push(json!({"J": j, "idempotent": dq.idempotent, "adjoint": dq.adjoint}));
    }
    let ok = (tr.re - theta).abs() < 1e-8
        && tr.im.abs() < 1e-8
        && d.idempotent < 1e-6
        && d.adjoint < 1e-8
        && flip_defect < 1e-8
        && dp.idempotent < 1e-6
        && (crossed_trace.re - theta / 2.0).abs() < 1e-8
        && flips_ok;
    let report = json!({
        "theta12": theta,
        "m2_max": m2_max,
        "quad_tol": quad_tol,
        "profile": profile,
        "coefficients": e.len(),
        "trace": {"re": tr.re, "im": tr.im},
        "idempotent_defect": d.idempotent,
        "adjoint_defect": d.adjoint,
        "flip_defect": flip_defect,
        "tail_bound": tail_bound(&e, m2_max),
        "crossed": {
            "idempotent_defect": dp.idempotent,
            "adjoint_defect": dp.adjoint,
            "trace": {"re": crossed_trace.re, "im": crossed_trace.im},
        },
        "flip_projections": flips,
        "pass": ok,
    });
    Ok((report, if ok { Status::Pass } else { Status::Negative }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((value, status)) => {
            println!("{value}");
            match status {
                Status::Pass => ExitCode::SUCCESS,
                Status::Negative => ExitCode::from(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
