//! The `locsol` command line.
//!
//! Every subcommand prints a parameter header followed by a table, or with
//! `--json` a single `locsol-report v1` object. Exact values are always
//! written out next to their decimal renderings.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use locsol_core::assembly::{rational_json, rho_interval, GlobalReport, RealPart};
use locsol_core::exactmath::{rational_directed_decimal, rational_round_decimal, DEFAULT_PRECISION};
use locsol_core::fpcount::{
    count_gbq_types, count_quartic_patterns, gbq_type_formulas, quartic_pattern_formulas, CountTable,
    GBQ_ENUMERATION_CAP, QUARTIC_ENUMERATION_CAP,
};
use locsol_core::padic::{decide, monte_carlo_local_with_workers, verify_witness, GBQInt, VerdictKind, DEFAULT_SAMPLE_DIGITS};
use locsol_core::primes::is_prime;
use locsol_core::realvol::{monte_carlo_real_with_workers, run_bounds_with, BoundsConfig, BoundsReport, Method};
use locsol_core::recursion::{closed_forms, local_density, solve_recursion, solve_recursion_symbolic};
use locsol_core::{Error, ModelKind, Rational};

pub const SCHEMA: &str = "locsol-report v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Largest accepted bisection depth.
const MAX_DEPTH: u32 = 60;
const MAX_DECIMALS: usize = 60;

#[derive(Parser, Debug)]
#[command(name = "locsol", version, about = "Local and global solubility densities of genus one curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Emit one JSON object instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Decimal places in renderings.
    #[arg(long, global = true, default_value_t = 6)]
    decimals: usize,
}

#[derive(Args, Debug, Clone)]
struct Workers {
    /// Worker threads (0 = all cores). Falls back to LOCSOL_WORKERS.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The local density at a prime.
    #[command(name = "r-of-p")]
    ROfP {
        p: u64,
        #[arg(long, default_value = "gbq")]
        model: ModelKind,
        #[command(flatten)]
        out: Output,
    },
    /// Every probability of the recursion at `p`, or as functions of `p`.
    Recursion {
        p: Option<u64>,
        #[arg(long, conflicts_with = "p")]
        symbolic: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Counts of factorization types (gbq) or root patterns (quartic) over F_p.
    #[command(name = "fp-counts")]
    FpCounts {
        p: u64,
        #[arg(long, default_value = "gbq")]
        model: ModelKind,
        /// Use the closed formulas even where enumeration is available.
        #[arg(long)]
        formulas: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Decide solubility over Q_p of z^2 + h z = f.
    #[command(name = "padic-decide")]
    PadicDecide {
        p: u64,
        /// Coefficients l,m,n of h (default 0).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        h: Option<Vec<BigInt>>,
        /// Coefficients a,b,c,d,e of f.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        f: Vec<BigInt>,
        #[arg(long, default_value_t = locsol_core::padic::DEFAULT_MAX_DEPTH)]
        depth: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Monte Carlo estimate of a local density.
    #[command(name = "padic-mc")]
    PadicMc {
        p: u64,
        #[arg(long, default_value = "gbq")]
        model: ModelKind,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// p-adic digits sampled per coefficient.
        #[arg(long, default_value_t = DEFAULT_SAMPLE_DIGITS)]
        digits: u32,
        #[command(flatten)]
        workers: Workers,
        #[command(flatten)]
        out: Output,
    },
    /// Rigorous bounds for rho(inf) by box subdivision.
    #[command(name = "real-bounds")]
    RealBounds {
        /// One depth or a comma separated list.
        #[arg(long, value_delimiter = ',', default_value = "20")]
        depth: Vec<u32>,
        #[arg(long, default_value = "scaled4d")]
        method: Method,
        /// Write progress here.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue from this checkpoint.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Bound on the pending work queue.
        #[arg(long, default_value_t = locsol_core::realvol::DEFAULT_MAX_PENDING)]
        max_pending: usize,
        #[command(flatten)]
        workers: Workers,
        #[command(flatten)]
        out: Output,
    },
    /// Monte Carlo estimate of rho(inf) or rho'(inf).
    #[command(name = "real-mc")]
    RealMc {
        #[arg(long, default_value = "quartic")]
        model: ModelKind,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        workers: Workers,
        #[command(flatten)]
        out: Output,
    },
    /// The global density: real factor times the Euler product.
    Rho {
        #[arg(long, default_value = "quartic")]
        model: ModelKind,
        /// Largest prime in the finite product.
        #[arg(long, default_value_t = 10_000)]
        pmax: u64,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u32,
        /// Real factor from a box subdivision at this depth.
        #[arg(long, conflicts_with_all = ["real_lower", "real_mc_n"])]
        real_depth: Option<u32>,
        #[arg(long, default_value = "scaled4d")]
        method: Method,
        /// Real factor given directly (with --real-upper).
        #[arg(long, requires = "real_upper")]
        real_lower: Option<String>,
        #[arg(long, requires = "real_lower")]
        real_upper: Option<String>,
        /// Treat the given real factor as a proven enclosure.
        #[arg(long, requires = "real_lower")]
        trusted: bool,
        /// Real factor from this many Monte Carlo samples.
        #[arg(long, conflicts_with = "real_lower")]
        real_mc_n: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        workers: Workers,
        #[command(flatten)]
        out: Output,
    },
}

/// A failure mapped to an exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Capability(_) | Error::Checkpoint(_) => EXIT_USAGE,
            Error::Resource { .. } | Error::Io(_) | Error::Internal(_) => EXIT_RESOURCE,
        };
        let message = match &e {
            Error::Resource { checkpoint: Some(p), .. } => format!("{e} (partial checkpoint at {})", p.display()),
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type Outcome = Result<Report, Failure>;

/// What a subcommand produced: a text rendering and a JSON result.
struct Report {
    command: &'static str,
    params: Vec<(&'static str, Value)>,
    text: String,
    result: Value,
}

impl Report {
    fn render(&self, json_mode: bool) -> String {
        if json_mode {
            let mut params = Map::new();
            for (k, v) in &self.params {
                params.insert((*k).to_string(), v.clone());
            }
            let doc = json!({ "schema": SCHEMA, "command": self.command, "params": params, "result": self.result });
            let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
            s.push('\n');
            s
        } else {
            let header: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k}={s}"),
                    other => format!("{k}={other}"),
                })
                .collect();
            format!("# locsol {} {}\n{}", self.command, header.join(" "), self.text)
        }
    }
}

fn workers(w: &Workers) -> Result<usize, Failure> {
    if let Some(n) = w.workers {
        return Ok(n);
    }
    match std::env::var("LOCSOL_WORKERS") {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("LOCSOL_WORKERS=`{v}` is not a worker count"))),
        Err(_) => Ok(0),
    }
}

fn prime(p: u64) -> Result<u64, Failure> {
    if is_prime(p) {
        Ok(p)
    } else {
        Err(usage(format!("{p} is not prime")))
    }
}

fn parse_rational(s: &str) -> Result<Rational, Failure> {
    let bad = || usage(format!("`{s}` is not a number (use a decimal or p/q)"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (int, frac) = s.trim().split_once('.').unwrap_or((s.trim(), ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(Rational::new(digits, num_traits::pow(BigInt::from(10), frac.len())))
}

fn exact(q: &Rational, decimals: usize) -> Value {
    rational_json(q, decimals)
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().enumerate().map(|(i, s)| format!("{s:<w$}", w = widths[i])).collect();
        out += cells.join("  ").trim_end();
        out.push('\n');
    }
    out
}

fn r_of_p(p: u64, model: ModelKind, d: usize) -> Outcome {
    let r = local_density(prime(p)?, model)?;
    Ok(Report {
        command: "r-of-p",
        params: vec![("p", json!(p)), ("model", json!(model.as_str())), ("decimals", json!(d))],
        text: format!("{} ≈ {}\n", r, rational_round_decimal(&r, d)),
        result: json!({ "density": exact(&r, d) }),
    })
}

fn recursion(p: Option<u64>, symbolic: bool, d: usize) -> Outcome {
    if symbolic {
        let rep = solve_recursion_symbolic()?;
        let mut rows = vec![vec!["field".to_string(), "value in p".to_string()]];
        let mut result = Map::new();
        for (name, v) in rep.fields() {
            rows.push(vec![name.clone(), v.to_string()]);
            result.insert(name, json!(v.to_string()));
        }
        return Ok(Report {
            command: "recursion",
            params: vec![("symbolic", json!(true))],
            text: table(&rows),
            result: Value::Object(result),
        });
    }
    let p = prime(p.ok_or_else(|| usage("give a prime p or --symbolic"))?)?;
    let rep = solve_recursion(p)?;
    let agrees = rep == closed_forms(p)?;
    let mut rows = vec![vec!["field".to_string(), "exact".to_string(), "decimal".to_string()]];
    let mut fields = Map::new();
    for (name, v) in rep.fields() {
        rows.push(vec![name.clone(), v.to_string(), rational_round_decimal(v, d)]);
        fields.insert(name, exact(v, d));
    }
    let mut text = table(&rows);
    text += &format!("closed forms agree: {agrees}\n");
    Ok(Report {
        command: "recursion",
        params: vec![("p", json!(p)), ("decimals", json!(d))],
        text,
        result: json!({ "fields": fields, "closed_forms_agree": agrees }),
    })
}

fn fp_counts(p: u64, model: ModelKind, formulas: bool) -> Outcome {
    let p = prime(p)?;
    let (columns, all, restricted, source): (&[&str; 2], CountTable, CountTable, &str) = match model {
        ModelKind::GeneralizedBQ => {
            let enumerate = !formulas && p <= GBQ_ENUMERATION_CAP;
            let get = |star| if enumerate { count_gbq_types(p, star) } else { gbq_type_formulas(p, star) };
            (&["all", "(*)"], get(false)?, get(true)?, if enumerate { "enumeration" } else { "formula" })
        }
        ModelKind::PlainBQ => {
            let enumerate = !formulas && p <= QUARTIC_ENUMERATION_CAP;
            let get = |monic| if enumerate { count_quartic_patterns(p, monic) } else { quartic_pattern_formulas(p, monic) };
            (&["up to scaling", "monic"], get(false)?, get(true)?, if enumerate { "enumeration" } else { "formula" })
        }
    };
    let mut rows = vec![vec!["class".to_string(), columns[0].to_string(), columns[1].to_string()]];
    let mut classes = Vec::new();
    for (i, label) in all.labels.iter().enumerate() {
        rows.push(vec![label.to_string(), all.counts[i].to_string(), restricted.counts[i].to_string()]);
        classes.push(json!({ "class": label, columns[0]: all.counts[i].to_string(), columns[1]: restricted.counts[i].to_string() }));
    }
    rows.push(vec!["total".to_string(), all.total.to_string(), restricted.total.to_string()]);
    Ok(Report {
        command: "fp-counts",
        params: vec![("p", json!(p)), ("model", json!(model.as_str())), ("source", json!(source))],
        text: table(&rows),
        result: json!({
            "classes": classes,
            "totals": { columns[0]: all.total.to_string(), columns[1]: restricted.total.to_string() },
        }),
    })
}

fn padic_decide(p: u64, h: Option<Vec<BigInt>>, f: Vec<BigInt>, depth: u32) -> Outcome {
    let p = prime(p)?;
    let h = h.unwrap_or_else(|| vec![BigInt::from(0); 3]);
    let h: [BigInt; 3] = h.try_into().map_err(|_| usage("--h takes three coefficients l,m,n"))?;
    let f: [BigInt; 5] = f.try_into().map_err(|_| usage("--f takes five coefficients a,b,c,d,e"))?;
    let join = |v: &[BigInt]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let params = vec![("p", json!(p)), ("h", json!(join(&h))), ("f", json!(join(&f))), ("depth", json!(depth))];
    let q = GBQInt { h, f };
    let v = decide(p, &q, depth)?;
    let kind = match v.kind {
        VerdictKind::Soluble => "soluble",
        VerdictKind::Insoluble => "insoluble",
        VerdictKind::Undecided => "undecided",
    };
    let mut text = format!("verdict     {kind}\ndepth used  {}\n", v.depth_used);
    let mut witness = Value::Null;
    if let Some(w) = &v.witness {
        let ok = verify_witness(p, &q, w)?;
        text += &format!(
            "witness     (x : y : z) = ({} : {} : {}), lift in {:?}, verified {ok}\n",
            w.x, w.y, w.z, w.var
        );
        witness = json!({
            "x": w.x.to_string(), "y": w.y.to_string(), "z": w.z.to_string(),
            "chart": format!("{:?}", w.chart), "lift_var": format!("{:?}", w.var),
            "modulus_exp": w.modulus_exp, "verified": ok,
        });
    }
    Ok(Report {
        command: "padic-decide",
        params,
        text,
        result: json!({ "verdict": kind, "depth_used": v.depth_used, "witness": witness }),
    })
}

fn padic_mc(p: u64, model: ModelKind, n: u64, seed: u64, digits: u32, w: usize, d: usize) -> Outcome {
    let p = prime(p)?;
    let r = monte_carlo_local_with_workers(p, model, n, seed, digits, w)?;
    let target = local_density(p, model)?;
    let frac = r.soluble_frac();
    let t = locsol_core::exactmath::rational_to_f64(&target);
    let sigma = (t * (1.0 - t) / n as f64).sqrt();
    let z = (locsol_core::exactmath::rational_to_f64(&frac) - t) / sigma;
    let rows = vec![
        vec!["soluble".to_string(), r.soluble.to_string(), rational_round_decimal(&frac, d)],
        vec!["insoluble".to_string(), r.insoluble.to_string(), rational_round_decimal(&r.insoluble_frac(), d)],
        vec!["undecided".to_string(), r.undecided.to_string(), rational_round_decimal(&r.undecided_frac(), d)],
        vec!["exact density".to_string(), target.to_string(), rational_round_decimal(&target, d)],
    ];
    let mut text = table(&rows);
    text += &format!("z-score {z:.2}\n");
    Ok(Report {
        command: "padic-mc",
        params: vec![
            ("p", json!(p)),
            ("model", json!(model.as_str())),
            ("n", json!(n)),
            ("seed", json!(seed)),
            ("digits", json!(digits)),
            ("workers", json!(w)),
        ],
        text,
        result: json!({
            "soluble": r.soluble, "insoluble": r.insoluble, "undecided": r.undecided,
            "soluble_frac": exact(&frac, d), "density": exact(&target, d), "z_score": format!("{z:.4}"),
        }),
    })
}

fn bounds_json(r: &BoundsReport, d: usize) -> Value {
    let regions: Vec<Value> = r
        .regions
        .iter()
        .map(|g| {
            json!({
                "name": g.name, "weight": g.weight, "volume": g.volume.to_string(),
                "v1": g.v1.to_string(), "v2": g.v2.to_string(), "undecided": g.undecided.to_string(), "boxes": g.boxes,
            })
        })
        .collect();
    json!({
        "method": r.method.as_str(),
        "depth": r.depth,
        "boxes": r.boxes_processed,
        "v1": exact(&r.v1, d),
        "v2": exact(&r.v2, d),
        "undecided": exact(&r.undecided, d),
        "lower": { "exact": r.rho_inf_lower.to_string(), "decimal": rational_directed_decimal(&r.rho_inf_lower, d, false) },
        "upper": { "exact": r.rho_inf_upper.to_string(), "decimal": rational_directed_decimal(&r.rho_inf_upper, d, true) },
        "regions": regions,
    })
}

fn check_depth(depth: u32) -> Result<u32, Failure> {
    if depth > MAX_DEPTH {
        Err(usage(format!("depth {depth} is above the limit {MAX_DEPTH}")))
    } else {
        Ok(depth)
    }
}

struct BoundsArgs {
    depths: Vec<u32>,
    method: Method,
    checkpoint: Option<PathBuf>,
    resume: Option<PathBuf>,
    max_pending: usize,
    workers: usize,
}

fn real_bounds(a: BoundsArgs, d: usize) -> Outcome {
    if a.depths.is_empty() {
        return Err(usage("--depth needs at least one value"));
    }
    if a.depths.len() > 1 && (a.checkpoint.is_some() || a.resume.is_some()) {
        return Err(usage("checkpoints need a single --depth"));
    }
    let mut rows = vec![["Depth", "Boxes", "Lower bound", "Upper bound", "Width"].map(String::from).to_vec()];
    let mut runs = Vec::new();
    for &depth in &a.depths {
        let mut cfg = BoundsConfig::new(check_depth(depth)?, a.method);
        cfg.workers = a.workers;
        cfg.checkpoint = a.checkpoint.clone();
        cfg.resume = a.resume.clone();
        cfg.max_pending = a.max_pending;
        let r = run_bounds_with(&cfg)?;
        rows.push(vec![
            depth.to_string(),
            r.boxes_processed.to_string(),
            rational_directed_decimal(&r.rho_inf_lower, d, false),
            rational_directed_decimal(&r.rho_inf_upper, d, true),
            rational_directed_decimal(&r.width(), d, true),
        ]);
        runs.push(bounds_json(&r, d));
    }
    let depth_list = a.depths.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    Ok(Report {
        command: "real-bounds",
        params: vec![
            ("depth", json!(depth_list)),
            ("method", json!(a.method.as_str())),
            ("workers", json!(a.workers)),
            ("checkpoint", json!(path(&a.checkpoint))),
            ("resume", json!(path(&a.resume))),
            ("max_pending", json!(a.max_pending)),
        ],
        text: table(&rows),
        result: json!({ "runs": runs }),
    })
}

fn real_mc(model: ModelKind, n: u64, seed: u64, w: usize) -> Outcome {
    let r = monte_carlo_real_with_workers(model, n, seed, w)?;
    let (lo, hi) = r.error_bar();
    Ok(Report {
        command: "real-mc",
        params: vec![("model", json!(model.as_str())), ("n", json!(n)), ("seed", json!(seed)), ("workers", json!(w))],
        text: format!(
            "hits      {} of {}\nestimate  {:.6}\nsigma     {:.6}\n4 sigma   [{lo:.6}, {hi:.6}]\n",
            r.hits,
            r.n,
            r.estimate(),
            r.sigma()
        ),
        result: json!({
            "hits": r.hits, "n": r.n,
            "estimate": format!("{:.8}", r.estimate()), "sigma": format!("{:.8}", r.sigma()),
            "four_sigma": [format!("{lo:.8}"), format!("{hi:.8}")],
        }),
    })
}

struct RhoArgs {
    model: ModelKind,
    pmax: u64,
    precision: u32,
    real_depth: Option<u32>,
    method: Method,
    real_given: Option<(String, String, bool)>,
    real_mc_n: Option<u64>,
    seed: u64,
    workers: usize,
}

fn rho(a: RhoArgs, d: usize) -> Outcome {
    if a.pmax < 3 {
        return Err(usage("--pmax must be at least 3"));
    }
    if a.precision < 16 {
        return Err(usage("--precision must be at least 16 bits"));
    }
    let mut params = vec![
        ("model", json!(a.model.as_str())),
        ("pmax", json!(a.pmax)),
        ("precision", json!(a.precision)),
        ("workers", json!(a.workers)),
    ];
    let real = if let Some((lo, hi, trusted)) = &a.real_given {
        let (lo_q, hi_q) = (parse_rational(lo)?, parse_rational(hi)?);
        if lo_q > hi_q || lo_q < Rational::from_integer(0.into()) || hi_q > Rational::from_integer(1.into()) {
            return Err(usage("the real factor must satisfy 0 <= lower <= upper <= 1"));
        }
        params.push(("real_lower", json!(lo)));
        params.push(("real_upper", json!(hi)));
        params.push(("trusted", json!(trusted)));
        RealPart::given(&lo_q, &hi_q, *trusted, a.precision)
    } else {
        let use_mc = a.real_mc_n.is_some() || (a.real_depth.is_none() && a.model == ModelKind::GeneralizedBQ);
        if use_mc {
            let n = a.real_mc_n.unwrap_or(1_000_000);
            params.push(("real_mc_n", json!(n)));
            params.push(("seed", json!(a.seed)));
            RealPart::from_monte_carlo(&monte_carlo_real_with_workers(a.model, n, a.seed, a.workers)?, a.precision)
        } else {
            let depth = check_depth(a.real_depth.unwrap_or(20))?;
            params.push(("real_depth", json!(depth)));
            params.push(("method", json!(a.method.as_str())));
            let mut cfg = BoundsConfig::new(depth, a.method);
            cfg.workers = a.workers;
            let r = run_bounds_with(&cfg)?;
            if a.model == ModelKind::GeneralizedBQ {
                // the real factor of the generalized model has no proven bounds;
                // the plain-model enclosure is reported but cannot be rigorous
                let mut part = RealPart::from_bounds(&r, a.precision);
                part.rigorous = false;
                part
            } else {
                RealPart::from_bounds(&r, a.precision)
            }
        }
    };
    let g: GlobalReport = rho_interval(a.model, real, a.pmax, a.precision)?;
    let iv = |i: &locsol_core::DyadicInterval| {
        format!(
            "[{}, {}]",
            rational_directed_decimal(&i.lo().to_rational(), d, false),
            rational_directed_decimal(&i.hi().to_rational(), d, true)
        )
    };
    let rows = vec![
        vec!["real factor".to_string(), iv(&g.real_part.interval), g.real_part.source.clone()],
        vec!["finite product".to_string(), iv(&g.finite_product), format!("p <= {}", g.pmax)],
        vec!["tail".to_string(), iv(&g.tail), format!("p > {}", g.pmax)],
        vec!["rho".to_string(), iv(&g.rho), if g.rigorous { "rigorous".into() } else { "not rigorous".into() }],
    ];
    Ok(Report { command: "rho", params, text: table(&rows), result: g.to_json(d) })
}

fn dispatch(cmd: Command) -> (Outcome, Output) {
    match cmd {
        Command::ROfP { p, model, out } => (r_of_p(p, model, out.decimals), out),
        Command::Recursion { p, symbolic, out } => (recursion(p, symbolic, out.decimals), out),
        Command::FpCounts { p, model, formulas, out } => (fp_counts(p, model, formulas), out),
        Command::PadicDecide { p, h, f, depth, out } => (padic_decide(p, h, f, depth), out),
        Command::PadicMc { p, model, n, seed, digits, workers: w, out } => {
            let r = workers(&w).and_then(|w| padic_mc(p, model, n, seed, digits, w, out.decimals));
            (r, out)
        }
        Command::RealBounds { depth, method, checkpoint, resume, max_pending, workers: w, out } => {
            let r = workers(&w).and_then(|workers| {
                real_bounds(BoundsArgs { depths: depth, method, checkpoint, resume, max_pending, workers }, out.decimals)
            });
            (r, out)
        }
        Command::RealMc { model, n, seed, workers: w, out } => (workers(&w).and_then(|w| real_mc(model, n, seed, w)), out),
        Command::Rho {
            model,
            pmax,
            precision,
            real_depth,
            method,
            real_lower,
            real_upper,
            trusted,
            real_mc_n,
            seed,
            workers: w,
            out,
        } => {
            let real_given = real_lower.zip(real_upper).map(|(l, u)| (l, u, trusted));
            let r = workers(&w).and_then(|workers| {
                rho(
                    RhoArgs { model, pmax, precision, real_depth, method, real_given, real_mc_n, seed, workers },
                    out.decimals,
                )
            });
            (r, out)
        }
    }
}

/// Runs the command line `argv` (program name first), writing to the given
/// streams, and returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (outcome, out) = dispatch(cli.command);
    if out.decimals > MAX_DECIMALS {
        let _ = writeln!(stderr, "error: --decimals is limited to {MAX_DECIMALS}");
        return EXIT_USAGE;
    }
    match outcome {
        Ok(report) => match stdout.write_all(report.render(out.json).as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(_) => EXIT_RESOURCE,
        },
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// [`run_with`] on the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
