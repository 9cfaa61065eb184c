//! `relgen`: experiment driver over the relgen library.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage error,
//! 3 group order above `--cap`, 4 invalid input, 5 internal error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use relgen::classical::{ClassicalGroup, GroupDescriptor, GroupTable, DEFAULT_CAP};
use relgen::ctypes::{ct_compare, ConvergenceType, OrderIdeal};
use relgen::genball::{check_relative_bound, covering_rows, fit_constants, relative_k, relative_rows};
use relgen::gf::{prime_power, Field};
use relgen::lengths::{hamming_length, table_rank_length};
use relgen::linalg::Subspace;
use relgen::obstruction::{build_example, verify_obstruction};
use relgen::perm::Permutation;
use relgen::Error;

#[derive(Parser)]
#[command(name = "relgen", version, about = "Class products and length functions in small classical and alternating groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every sampling command (required there).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest group order that will be enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u128,
    /// Give up on a relative exponent above this.
    #[arg(long, global = true)]
    max_k: Option<usize>,
    #[arg(long, global = true, default_value_t = 500)]
    samples: usize,
    /// Pairs need l(h1) <= 1 - epsilon.
    #[arg(long, global = true, default_value = "1/8")]
    epsilon: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Presentation of GF(q).
    FieldInfo { q: u64 },
    /// Order and class statistics of a group such as "Sp(4,3)" or "A(6)".
    Group { descriptor: String },
    /// Covering number of every non-central class.
    Covering { descriptors: Vec<String> },
    /// Relative exponents: one pair of element ids, or all admissible class pairs.
    Relative {
        descriptor: String,
        #[arg(long, requires = "h2")]
        h1: Option<u32>,
        #[arg(long, requires = "h1")]
        h2: Option<u32>,
        /// Use h1^H together with (h1^-1)^H.
        #[arg(long)]
        symmetric: bool,
    },
    /// Least k with s in (t^{A_n})^{*k}, permutations in cycle notation.
    AltRelative {
        n: usize,
        #[arg(long, requires = "t")]
        s: Option<String>,
        #[arg(long, requires = "s")]
        t: Option<String>,
    },
    /// Fit the constants on some groups and optionally re-check others.
    Fit {
        descriptors: Vec<String>,
        #[arg(long, num_args = 1..)]
        validate: Vec<String>,
    },
    /// Sampled check of the two-element obstruction in SL_q(q).
    Obstruction {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        kmax: usize,
    },
    /// Build and verify geometric witnesses.
    #[command(subcommand)]
    Witness(Witness),
    /// Convergence types.
    #[command(subcommand)]
    Ctype(Ctype),
}

#[derive(Subcommand)]
enum Witness {
    /// Element swapping a random non-singular U with a copy inside U^perp.
    Swap {
        descriptor: String,
        #[arg(long)]
        dim: usize,
    },
    /// Diagonal witness for every quasiscalar, or just `--lambda`.
    Quasiscalar {
        descriptor: String,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Non-singular subspace inside a random subspace of dimension `dim`.
    Nonsingular {
        descriptor: String,
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Subcommand)]
enum Ctype {
    /// Compare two types written as C*n^-A[*log^B] (or 0).
    Cmp { r: String, s: String },
    /// Membership in I0 or I1.
    Ideal { ideal: String, r: String },
}

enum Fail {
    Usage(String),
    Verify(Value),
    Core(Error),
    Io(io::Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail::Io(e)
    }
}

impl From<csv::Error> for Fail {
    fn from(e: csv::Error) -> Self {
        Fail::Io(io::Error::other(e))
    }
}

type Out = Result<Report, Fail>;

enum Report {
    Json(Value),
    Csv(Vec<u8>),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::Internal(_) => 5,
        _ => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    let (report, code) = match result {
        Ok(r) => (Some(r), 0),
        Err(Fail::Verify(v)) => (Some(Report::Json(v)), 1),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            (None, 2)
        }
        Err(Fail::Core(e)) => {
            eprintln!("error: {e}");
            (None, exit_code(&e))
        }
        Err(Fail::Io(e)) => {
            eprintln!("error: {e}");
            (None, 5)
        }
    };
    if let Some(r) = report {
        if let Err(e) = emit(&cli.global, r) {
            eprintln!("error: {e}");
            return ExitCode::from(5);
        }
    }
    ExitCode::from(code)
}

fn emit(g: &Global, r: Report) -> io::Result<()> {
    let bytes = match r {
        Report::Json(v) => {
            let mut s = serde_json::to_string_pretty(&v).map_err(io::Error::other)?;
            s.push('\n');
            s.into_bytes()
        }
        Report::Csv(b) => b,
    };
    match &g.out {
        Some(p) => File::create(p)?.write_all(&bytes),
        None => io::stdout().write_all(&bytes),
    }
}

fn with_schema(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), json!(1));
    }
    v
}

fn verdict(v: Value, pass: bool) -> Out {
    let v = with_schema(v);
    if pass {
        Ok(Report::Json(v))
    } else {
        Err(Fail::Verify(v))
    }
}

fn descriptor(s: &str) -> Result<GroupDescriptor, Fail> {
    Ok(s.parse::<GroupDescriptor>()?)
}

fn seed(g: &Global) -> Result<u64, Fail> {
    g.seed.ok_or_else(|| Fail::Usage("this command samples and needs --seed".into()))
}

fn epsilon(g: &Global) -> Result<Ratio<u64>, Fail> {
    g.epsilon
        .parse::<Ratio<u64>>()
        .map_err(|_| Fail::Usage(format!("bad --epsilon {:?}", g.epsilon)))
}

fn json_only(g: &Global) -> Result<(), Fail> {
    if g.format == Format::Csv {
        return Err(Fail::Usage("csv output exists only for covering, relative and alt-relative".into()));
    }
    Ok(())
}

fn csv_of<T: Serialize>(rows: &[T]) -> Result<Report, Fail> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(Report::Csv(w.into_inner().map_err(|e| io::Error::other(e.to_string()))?))
}

fn run(cli: &Cli) -> Out {
    let g = &cli.global;
    match &cli.command {
        Command::FieldInfo { q } => field_info(g, *q),
        Command::Group { descriptor: d } => group(g, d),
        Command::Covering { descriptors } => covering(g, descriptors),
        Command::Relative {
            descriptor: d,
            h1,
            h2,
            symmetric,
        } => relative(g, d, h1.zip(*h2), *symmetric),
        Command::AltRelative { n, s, t } => alt_relative(g, *n, s.as_deref().zip(t.as_deref())),
        Command::Fit { descriptors, validate } => fit(g, descriptors, validate),
        Command::Obstruction { q, a, b, kmax } => {
            json_only(g)?;
            let inst = build_example(*q, *a, *b)?;
            let report = verify_obstruction(&inst, *kmax, g.samples, seed(g)?)?;
            let pass = report.pass;
            verdict(serde_json::to_value(report).expect("serializable"), pass)
        }
        Command::Witness(w) => witness(g, w),
        Command::Ctype(c) => ctype(g, c),
    }
}

fn field_info(g: &Global, q: u64) -> Out {
    json_only(g)?;
    let (p, k) = prime_power(q)?;
    let f = Field::new(p as u64, k)?;
    Ok(Report::Json(with_schema(json!({
        "q": q,
        "p": p,
        "k": k,
        "modulus": f.modulus(),
        "primitive_element": f.format(f.primitive_element()),
        "least_non_square": f.least_non_square().map(|x| f.format(x)),
    }))))
}

fn group(g: &Global, d: &str) -> Out {
    json_only(g)?;
    let d = descriptor(d)?;
    d.validate()?;
    let mut v = json!({ "descriptor": d.to_string(), "order": d.order().to_string() });
    match GroupTable::enumerate(&d, g.cap) {
        Ok(t) => {
            let sizes: Vec<u64> = (0..t.num_classes()).map(|c| t.class_size(c)).collect();
            v["enumerated"] = json!(true);
            v["classes"] = json!(t.num_classes());
            v["class_sizes"] = json!(sizes);
        }
        Err(Error::CapExceeded { .. }) => {
            v["enumerated"] = json!(false);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(Report::Json(with_schema(v)))
}

fn table(g: &Global, d: &str) -> Result<GroupTable, Fail> {
    Ok(GroupTable::enumerate(&descriptor(d)?, g.cap)?)
}

#[derive(Serialize)]
struct CoveringCsv {
    group: String,
    element: u32,
    class_size: u64,
    l_pr: String,
    k: usize,
}

fn covering(g: &Global, ds: &[String]) -> Out {
    if ds.is_empty() {
        return Err(Fail::Usage("covering needs at least one descriptor".into()));
    }
    let mut rows = Vec::new();
    for d in ds {
        rows.extend(covering_rows(&table(g, d)?)?);
    }
    if g.format == Format::Csv {
        let flat: Vec<CoveringCsv> = rows
            .iter()
            .map(|r| CoveringCsv {
                group: r.group.clone(),
                element: r.rep,
                class_size: r.class_size,
                l_pr: r.length.to_string(),
                k: r.k,
            })
            .collect();
        return csv_of(&flat);
    }
    let c_hat = rows
        .iter()
        .map(|r| r.length.ratio() * Ratio::from_integer(r.k as u64))
        .max();
    Ok(Report::Json(with_schema(json!({
        "rows": rows,
        "c_hat": c_hat.map(|c| c.to_string()),
    }))))
}

#[derive(Serialize)]
struct RelativeCsv {
    group: String,
    h1: u32,
    h2: u32,
    l1: String,
    l2: String,
    k: Option<usize>,
}

fn relative(g: &Global, d: &str, pair: Option<(u32, u32)>, symmetric: bool) -> Out {
    let t = table(g, d)?;
    let rows: Vec<RelativeCsv> = match pair {
        Some((h1, h2)) => {
            for h in [h1, h2] {
                if h as usize >= t.len() {
                    return Err(Error::OutOfRange(format!("element {h} of {}", t.label())).into());
                }
            }
            vec![RelativeCsv {
                group: t.label().to_string(),
                h1,
                h2,
                l1: table_rank_length(&t, h1).to_string(),
                l2: table_rank_length(&t, h2).to_string(),
                k: relative_k(&t, h1, h2, symmetric, g.max_k),
            }]
        }
        None => relative_rows(&t, epsilon(g)?)
            .into_iter()
            .map(|r| RelativeCsv {
                group: r.group,
                h1: t.class_rep(r.class1),
                h2: t.class_rep(r.class2),
                l1: r.length1.to_string(),
                l2: r.length2.to_string(),
                k: r.k.filter(|&k| g.max_k.map_or(true, |m| k <= m)),
            })
            .collect(),
    };
    if g.format == Format::Csv {
        return csv_of(&rows);
    }
    Ok(Report::Json(with_schema(json!({ "rows": rows }))))
}

fn alt_relative(g: &Global, n: usize, pair: Option<(&str, &str)>) -> Out {
    let t = table(g, &format!("A({n})"))?;
    let Some((s, tt)) = pair else {
        return relative(g, &format!("A({n})"), None, false);
    };
    let parse = |x: &str| -> Result<u32, Fail> {
        let p = Permutation::parse(n, x)?;
        if !p.is_even() {
            return Err(Error::OddPermutation.into());
        }
        Ok(t.index_of_perm(&p).expect("even permutation is in A_n"))
    };
    let (si, ti) = (parse(s)?, parse(tt)?);
    if t.is_central(ti) {
        return Err(Error::Central.into());
    }
    let k = relative_k(&t, ti, si, false, g.max_k);
    let row = RelativeCsv {
        group: t.label().to_string(),
        h1: ti,
        h2: si,
        l1: hamming_length(&t.perm(ti).expect("perm")).to_string(),
        l2: hamming_length(&t.perm(si).expect("perm")).to_string(),
        k,
    };
    if g.format == Format::Csv {
        return csv_of(&[row]);
    }
    Ok(Report::Json(with_schema(json!({ "s": s, "t": tt, "row": row }))))
}

fn fit(g: &Global, ds: &[String], validate: &[String]) -> Out {
    json_only(g)?;
    if ds.is_empty() {
        return Err(Fail::Usage("fit needs at least one training descriptor".into()));
    }
    let tables: Vec<GroupTable> = ds.iter().map(|d| table(g, d)).collect::<Result<_, _>>()?;
    let refs: Vec<&GroupTable> = tables.iter().collect();
    let report = fit_constants(&refs, epsilon(g)?)?;
    let mut checks = Vec::new();
    let mut pass = true;
    for d in validate {
        let t = table(g, d)?;
        let v = check_relative_bound(&t, &report)?;
        pass &= v.is_empty();
        checks.push(json!({ "group": t.label(), "violations": v.len(), "first": v.first() }));
    }
    verdict(json!({ "fit": report, "validation": checks }), pass)
}

fn check(name: &str, pass: bool) -> Value {
    json!({ "name": name, "pass": pass })
}

fn all_pass(checks: &[Value]) -> bool {
    checks.iter().all(|c| c["pass"] == json!(true))
}

fn witness(g: &Global, w: &Witness) -> Out {
    json_only(g)?;
    match w {
        Witness::Swap { descriptor: d, dim } => {
            let d = descriptor(d)?;
            let grp = ClassicalGroup::new(&d)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed(g)?);
            let u = grp.random_nonsingular(&mut rng, *dim)?;
            let s = grp.swap_element(&u)?;
            let perp = grp.space().perp(&u)?;
            let checks = vec![
                check("member", grp.contains(&s.h)?),
                check("h(U) = W1", u.image(&s.h) == s.w1),
                check("h(W1) = U", s.w1.image(&s.h) == u),
                check("h fixes W2", s.w2.basis().iter().all(|z| &s.h.apply(z) == z)),
                check("U^perp = W1 + W2", s.w1.sum(&s.w2) == perp && s.w1.intersect(&s.w2).is_zero()),
            ];
            let pass = all_pass(&checks);
            verdict(
                json!({
                    "descriptor": d.to_string(),
                    "lemma": "swap",
                    "checks": checks,
                    "u": basis_text(&u),
                    "h": s.h.to_text(),
                }),
                pass,
            )
        }
        Witness::Quasiscalar { descriptor: d, lambda } => {
            let d = descriptor(d)?;
            let grp = ClassicalGroup::new(&d)?;
            let f = grp.field().clone();
            let lambdas = match lambda {
                Some(s) => vec![f.parse(s)?],
                None => grp.quasiscalars(),
            };
            let n = grp.dim();
            let mut items = Vec::new();
            let mut pass = true;
            for l in lambdas {
                let h = grp.quasiscalar_witness(l)?;
                let hits = (0..n).filter(|&i| h.get(i, i) == l).count();
                let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || h.get(i, j).is_zero()));
                let checks = vec![
                    check("member", grp.contains(&h)?),
                    check("diagonal", diagonal),
                    check("at most two entries differ from lambda", hits + 2 >= n),
                ];
                pass &= all_pass(&checks);
                items.push(json!({ "lambda": f.format(l), "checks": checks, "h": h.to_text() }));
            }
            verdict(
                json!({ "descriptor": d.to_string(), "lemma": "quasiscalar", "witnesses": items }),
                pass,
            )
        }
        Witness::Nonsingular { descriptor: d, dim } => {
            let d = descriptor(d)?;
            let grp = ClassicalGroup::new(&d)?;
            let n = grp.dim();
            let mut rng = ChaCha8Rng::seed_from_u64(seed(g)?);
            let u = grp.random_subspace(&mut rng, *dim)?;
            let w = grp.space().extract_nonsingular(&u)?;
            let bound = (2 * *dim).saturating_sub(n);
            let checks = vec![
                check("W inside U", u.contains_subspace(&w)),
                check("W non-singular", grp.space().is_nonsingular(&w)?),
                check("dim W >= 2l - n", w.dim() >= bound),
            ];
            let pass = all_pass(&checks);
            verdict(
                json!({
                    "descriptor": d.to_string(),
                    "lemma": "nonsingular",
                    "checks": checks,
                    "dim_u": u.dim(),
                    "dim_w": w.dim(),
                    "u": basis_text(&u),
                    "w": basis_text(&w),
                }),
                pass,
            )
        }
    }
}

/// Basis vectors as the rows of a matrix in text format.
fn basis_text(u: &Subspace) -> String {
    match relgen::linalg::Matrix::from_rows(u.field(), u.basis()) {
        Ok(m) => m.to_text(),
        Err(_) => String::new(),
    }
}

fn ctype(g: &Global, c: &Ctype) -> Out {
    json_only(g)?;
    match c {
        Ctype::Cmp { r, s } => {
            let (a, b): (ConvergenceType, ConvergenceType) = (r.parse()?, s.parse()?);
            let verdict = match ct_compare(&a, &b) {
                std::cmp::Ordering::Less => "less",
                std::cmp::Ordering::Equal => "equivalent",
                std::cmp::Ordering::Greater => "greater",
            };
            Ok(Report::Json(with_schema(json!({
                "r": a.to_string(),
                "s": b.to_string(),
                "verdict": verdict,
            }))))
        }
        Ctype::Ideal { ideal, r } => {
            let i = match ideal.to_ascii_uppercase().as_str() {
                "I0" => OrderIdeal::i0(),
                "I1" => OrderIdeal::i1(),
                _ => return Err(Fail::Usage(format!("unknown ideal {ideal:?}, expected I0 or I1"))),
            };
            let t: ConvergenceType = r.parse()?;
            Ok(Report::Json(with_schema(json!({
                "ideal": ideal.to_ascii_uppercase(),
                "r": t.to_string(),
                "member": i.contains(&t),
            }))))
        }
    }
}
