use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use eqfactor::characterization::{decide_equitable, enumerate_bad_sequences, Decision};
use eqfactor::degree_bounded::{
    factorize_interval, factorize_max_degrees, factorize_min_degrees, hilton_parity_factorize, IntervalOutcome,
};
use eqfactor::equitable::{almost_equitable_factorize, equitable_factorize, parity_constrained_equitable, AlmostSpec, EquitableOutcome};
use eqfactor::graph::{contains, full_set, members};
use eqfactor::harness::{
    brute_force_oracle, conjecture_search, parse_graph, parse_rationals, parse_vertex_list, verify_factorization,
    AlmostClaim, Claims, Conjecture, OracleAnswer, Problem, RatioClaim, SearchConfig, Witness,
};
use eqfactor::orientation::{find_mod_k_orientation, OrientationTarget};
use eqfactor::parity_epsilon::{almost_even_factorize, epsilon_parity_factor, split_two_bounded, Rational, RatioSpec, TwoBound};
use eqfactor::{Error, Factorization, Multigraph, Preconditions};

#[derive(Parser)]
#[command(name = "eqf", version, about = "Equitable and degree-constrained graph factorizations")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Equitable,
    Interval,
    Min,
    Max,
    Hilton,
    Parity,
    Epsilon,
    AlmostEven,
    Almost,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleProblem {
    Equitable,
    Interval,
    Almost,
    GfParity,
    AlmostEven,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a factorization and recheck it.
    Factorize {
        graph: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value = "")]
        v0: String,
        #[arg(long, default_value = "")]
        v1: String,
        /// Rationals such as `1/3,2/3`.
        #[arg(long, default_value = "")]
        eps: String,
        /// Degree bounds for `min` and `max`.
        #[arg(long, default_value = "")]
        bounds: String,
        /// Odd modulus for `min` and `max` with more than two bounds.
        #[arg(long)]
        p: Option<usize>,
        /// Vertices with odd prescribed parity.
        #[arg(long, default_value = "")]
        odd: String,
        /// Exceptional counts for `almost`.
        #[arg(long, default_value = "")]
        s: String,
        #[arg(long, default_value = "")]
        z: String,
        #[arg(long)]
        assume_preconditions: bool,
    },
    /// Decide whether an equitable factorization exists.
    Check {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Residue sequences that block equitable factorizations.
    Table {
        #[arg(long)]
        k: usize,
    },
    /// Orientation with prescribed out-degrees modulo k.
    Orient {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        targets: String,
    },
    /// Recheck a factorization against a JSON claims file.
    Verify {
        graph: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long)]
        claims: PathBuf,
    },
    /// Exhaustive existence check.
    Oracle {
        graph: PathBuf,
        #[arg(long, value_enum)]
        problem: OracleProblem,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "")]
        v0: String,
        #[arg(long, default_value = "")]
        lo: String,
        #[arg(long, default_value = "")]
        hi: String,
        #[arg(long, default_value = "")]
        s: String,
        #[arg(long, default_value = "")]
        z: String,
        #[arg(long, default_value = "")]
        eps: String,
    },
    /// Random counterexample search.
    Search {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        conjecture: String,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        mult_max: usize,
        #[arg(long, default_value_t = 2)]
        k_min: usize,
        #[arg(long, default_value_t = 2)]
        k_max: usize,
    },
}

enum Failure {
    Lib(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Out = Result<(u8, Value, String), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_)
        | Error::NecessaryConditionViolated(_)
        | Error::IffConditionFails(_)
        | Error::ParityObstruction(_)
        | Error::NoValidZ(_) => 1,
        Error::HypothesisUnmet(_) | Error::NotApplicable(_) => 2,
        Error::CapExceeded(_) | Error::SearchExhausted(_) => 3,
        Error::InvalidInput(_) | Error::SpecInvalid(_) => 4,
        Error::InternalContradiction(_) => 5,
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &PathBuf) -> Result<Multigraph, Failure> {
    Ok(parse_graph(&read(path)?)?)
}

fn ints<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Failure::Input(format!("bad number `{t}`"))))
        .collect()
}

fn need_k(k: Option<usize>) -> Result<usize, Failure> {
    k.ok_or_else(|| Failure::Input("--k is required for this mode".into()))
}

fn factorization_out(g: &Multigraph, f: &Factorization, claims: &Claims, extra: Value) -> Out {
    let report = verify_factorization(g, f, claims)?;
    let sizes = f.sizes();
    let mut text = String::new();
    for (e, c) in f.assignment.iter().enumerate() {
        text.push_str(&format!("factor {e} {c}\n"));
    }
    for (i, s) in sizes.iter().enumerate() {
        text.push_str(&format!("summary {i} {s}\n"));
    }
    text.push_str(&format!("verified {}\n", report.pass));
    let mut j = json!({ "assignment": f.assignment, "sizes": sizes, "report": report });
    if let (Value::Object(m), Value::Object(x)) = (&mut j, extra) {
        m.extend(x);
    }
    Ok((if report.pass { 0 } else { 5 }, j, text))
}

fn edge_lists_to_factorization(g: &Multigraph, parts: &[Vec<usize>]) -> Result<Factorization, Failure> {
    let mut asg = vec![usize::MAX; g.num_edges()];
    for (i, p) in parts.iter().enumerate() {
        for &e in p {
            asg[e] = i;
        }
    }
    if asg.contains(&usize::MAX) {
        return Err(Failure::Lib(Error::InternalContradiction("parts do not cover E(G)".into())));
    }
    Ok(Factorization::new(parts.len(), asg)?)
}

fn strings(eps: &[Rational]) -> Vec<String> {
    eps.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect()
}

#[allow(clippy::too_many_arguments)]
fn factorize(
    g: &Multigraph,
    k: Option<usize>,
    mode: Mode,
    v0: &str,
    v1: &str,
    eps: &str,
    bounds: &str,
    p: Option<usize>,
    odd: &str,
    s: &str,
    z: &str,
    pre: Preconditions,
) -> Out {
    let n = g.n();
    let v0 = parse_vertex_list(v0, n)?;
    let v1 = parse_vertex_list(v1, n)?;
    let odd = parse_vertex_list(odd, n)?;
    let fpar: Vec<u8> = (0..n).map(|v| u8::from(contains(odd, v))).collect();
    match mode {
        Mode::Equitable => {
            let k = need_k(k)?;
            match equitable_factorize(g, k, pre)? {
                EquitableOutcome::Factorized { factorization, route } => {
                    factorization_out(g, &factorization, &Claims::equitable(k), json!({ "route": format!("{route:?}") }))
                }
                EquitableOutcome::Obstructed(c) => Ok((
                    1,
                    json!({ "exists": false, "certificate": c }),
                    format!("nonexistence\ncertificate z {:?} m {} checksum {}\n", members(c.z).collect::<Vec<_>>(), c.m, c.checksum),
                )),
            }
        }
        Mode::Interval => {
            let k = need_k(k)?;
            match factorize_interval(g, k, v0, pre)? {
                IntervalOutcome::Factorized(f) => {
                    let claims = Claims { k, size_balanced: true, interval_v0: Some(members(v0).collect()), ..Claims::default() };
                    factorization_out(g, &f, &claims, json!({}))
                }
                IntervalOutcome::Impossible(proof) => Ok((
                    1,
                    json!({ "exists": false, "certificate": proof }),
                    format!("nonexistence\ncertificate parity_sum {} residue_sum {}\n", proof.parity_sum, proof.residue_sum),
                )),
            }
        }
        Mode::Min | Mode::Max => {
            let b: Vec<usize> = ints(bounds)?;
            let lower = mode == Mode::Min;
            let f = match (p, b.as_slice()) {
                (None, &[b1, b2]) => {
                    let m = if lower { TwoBound::Min(b1, b2) } else { TwoBound::Max(b1, b2) };
                    let (f1, f2) = split_two_bounded(g, m, pre)?;
                    edge_lists_to_factorization(g, &[f1, f2])?
                }
                (Some(p), _) if lower => factorize_min_degrees(g, &b, p, pre)?,
                (Some(p), _) => factorize_max_degrees(g, &b, p, pre)?,
                (None, _) => return Err(Failure::Input("--p is required unless exactly two bounds are given".into())),
            };
            let claims = Claims {
                k: b.len(),
                min_degrees: lower.then(|| b.clone()),
                max_degrees: (!lower).then(|| b.clone()),
                ..Claims::default()
            };
            factorization_out(g, &f, &claims, json!({}))
        }
        Mode::Hilton => {
            let k = need_k(k)?;
            let (f, jv) = hilton_parity_factorize(g, k)?;
            let claims = Claims { k, equitable: true, at_most_one_odd: true, jv: Some(jv.clone()), ..Claims::default() };
            factorization_out(g, &f, &claims, json!({ "jv": jv }))
        }
        Mode::Parity => {
            let k = need_k(k)?;
            let f = parity_constrained_equitable(g, k, v0, &fpar, pre)?;
            factorization_out(g, &f, &Claims { k, size_balanced: true, ..Claims::default() }, json!({}))
        }
        Mode::Epsilon => {
            let e = parse_rationals(eps)?;
            let [e] = e[..] else {
                return Err(Failure::Input("--eps takes one rational in this mode".into()));
            };
            let all = full_set(n);
            let spec = RatioSpec { eps: e, v0, v1: v1 & !v0, v1p: all & !v0 & !v1, fpar, z: None };
            let f1 = epsilon_parity_factor(g, &spec, pre)?;
            let f2 = (0..g.num_edges()).filter(|e| !f1.contains(e)).collect();
            let f = edge_lists_to_factorization(g, &[f1, f2])?;
            let claims = Claims { k: 2, ratios: Some(complement_claim(e)), ..Claims::default() };
            factorization_out(g, &f, &claims, json!({}))
        }
        Mode::AlmostEven => {
            let e = parse_rationals(eps)?;
            let a = almost_even_factorize(g, &e, false, pre)?;
            let f = edge_lists_to_factorization(g, &a.factors)?;
            let claims = Claims {
                k: e.len(),
                ratios: Some(RatioClaim { eps: strings(&e), slack: 2 }),
                at_most_one_odd: true,
                jv: Some(a.jv.clone()),
                ..Claims::default()
            };
            factorization_out(g, &f, &claims, json!({ "jv": a.jv, "first_carries_odd": a.first_carries_odd }))
        }
        Mode::Almost => {
            let k = need_k(k)?;
            let spec = AlmostSpec { s: ints(s)?, z: parse_vertex_list(z, n)? };
            let f = almost_equitable_factorize(g, k, &spec, pre)?;
            let claims = Claims {
                k,
                almost: Some(AlmostClaim { s: spec.s.clone(), z: members(spec.z).collect() }),
                ..Claims::default()
            };
            factorization_out(g, &f, &claims, json!({}))
        }
    }
}

/// `F` and its complement, each within two of its share.
fn complement_claim(e: Rational) -> RatioClaim {
    RatioClaim { eps: strings(&[e, Rational::from(1) - e]), slack: 2 }
}

fn check(g: &Multigraph, k: usize) -> Out {
    match decide_equitable(g, k)? {
        Decision::Yes(w) => {
            let mut text = String::from("exists yes\n");
            for row in &w.x {
                text.push_str(&format!("x {}\n", row.iter().map(u8::to_string).collect::<Vec<_>>().join(" ")));
            }
            Ok((0, json!({ "exists": true, "witness": w }), text))
        }
        Decision::No(c) => Ok((
            1,
            json!({ "exists": false, "certificate": c }),
            format!("exists no\ncertificate z {:?} m {} checksum {}\n", members(c.z).collect::<Vec<_>>(), c.m, c.checksum),
        )),
    }
}

fn table(k: usize) -> Out {
    let rows = enumerate_bad_sequences(k, k)?;
    let mut text = String::new();
    let mut list = Vec::new();
    for r in &rows {
        let res = if r.residues.is_empty() {
            "0".to_string()
        } else {
            r.residues.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
        };
        text.push_str(&format!("{k} {res}{}\n", if r.star { " *" } else { "" }));
        list.push(json!({ "residues": r.residues, "star": r.star }));
    }
    Ok((0, json!({ "k": k, "rows": list }), text))
}

fn orient(g: &Multigraph, k: usize, targets: &str) -> Out {
    let p: Vec<i64> = ints(targets)?;
    let d = find_mod_k_orientation(g, &OrientationTarget::exact(k, &p)?)?;
    let mut text = String::new();
    let mut arcs = Vec::new();
    for e in 0..g.num_edges() {
        let (t, h) = (d.tail(e), d.head(g, e));
        text.push_str(&format!("arc {e} {t} {h}\n"));
        arcs.push([t, h]);
    }
    Ok((0, json!({ "arcs": arcs, "out_degrees": d.out_degrees(g) }), text))
}

fn parse_assignment(text: &str, m: usize) -> Result<Factorization, Failure> {
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        let asg: Vec<usize> = serde_json::from_value(v["assignment"].clone())
            .map_err(|_| Failure::Input("JSON assignment needs an `assignment` array".into()))?;
        let k = asg.iter().max().map_or(1, |x| x + 1);
        return Ok(Factorization { k, assignment: asg });
    }
    let mut asg = vec![usize::MAX; m];
    for line in text.lines() {
        let t: Vec<&str> = line.split_whitespace().collect();
        if let ["factor", e, c] = t[..] {
            let (e, c): (usize, usize) = (
                e.parse().map_err(|_| Failure::Input(format!("bad line `{line}`")))?,
                c.parse().map_err(|_| Failure::Input(format!("bad line `{line}`")))?,
            );
            if e >= m {
                return Err(Failure::Input(format!("edge {e} out of range")));
            }
            asg[e] = c;
        }
    }
    if asg.contains(&usize::MAX) {
        return Err(Failure::Input("assignment is not total on E(G)".into()));
    }
    let k = asg.iter().max().map_or(1, |x| x + 1);
    Ok(Factorization { k, assignment: asg })
}

fn verify(g: &Multigraph, asg: &str, claims: &str) -> Out {
    let claims: Claims = serde_json::from_str(claims).map_err(|e| Failure::Input(format!("claims: {e}")))?;
    let mut f = parse_assignment(asg, g.num_edges())?;
    if f.k <= claims.k {
        f.k = claims.k;
    }
    let r = verify_factorization(g, &f, &claims)?;
    let mut text = String::new();
    for c in &r.checks {
        text.push_str(&format!("claim {} {}", c.claim, if c.pass { "pass" } else { "fail" }));
        if let Some(v) = c.vertex {
            text.push_str(&format!(" vertex {v}"));
        }
        if let Some(i) = c.factor {
            text.push_str(&format!(" factor {i}"));
        }
        text.push('\n');
    }
    text.push_str(&format!("verified {}\n", r.pass));
    Ok((u8::from(!r.pass), json!(r), text))
}

#[allow(clippy::too_many_arguments)]
fn oracle(g: &Multigraph, problem: OracleProblem, k: Option<usize>, v0: &str, lo: &str, hi: &str, s: &str, z: &str, eps: &str) -> Out {
    let n = g.n();
    let v0 = parse_vertex_list(v0, n)?;
    let p = match problem {
        OracleProblem::Equitable => Problem::Equitable { k: need_k(k)? },
        OracleProblem::Interval => Problem::Interval { k: need_k(k)?, v0 },
        OracleProblem::Almost => Problem::Almost { k: need_k(k)?, spec: AlmostSpec { s: ints(s)?, z: parse_vertex_list(z, n)? } },
        OracleProblem::GfParity => Problem::GfParity { v0, lo: ints(lo)?, hi: ints(hi)? },
        OracleProblem::AlmostEven => Problem::AlmostEven { eps: parse_rationals(eps)?, first_odd: false },
    };
    let OracleAnswer { exists, witness } = brute_force_oracle(g, &p)?;
    let mut text = format!("exists {}\n", if exists { "yes" } else { "no" });
    match &witness {
        Some(Witness::Factorization(f)) => {
            for (e, c) in f.assignment.iter().enumerate() {
                text.push_str(&format!("factor {e} {c}\n"));
            }
        }
        Some(Witness::Factor(edges)) => {
            text.push_str(&format!("edges {}\n", edges.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")));
        }
        None => {}
    }
    Ok((u8::from(!exists), json!({ "exists": exists, "witness": witness }), text))
}

#[allow(clippy::too_many_arguments)]
fn search(seed: u64, trials: usize, id: &str, n: (usize, usize), mult_max: usize, k: (usize, usize)) -> Out {
    let conjecture: Conjecture = id.parse()?;
    let c = SearchConfig { seed, trials, n_range: n, mult_range: (0, mult_max), k_range: k, conjecture };
    let r = conjecture_search(&c)?;
    let mut text = format!(
        "trials {} consistent {} skipped {} distinct {} counterexamples {}\n",
        r.trials,
        r.consistent,
        r.skipped,
        r.distinct,
        r.counterexamples.len()
    );
    for cx in &r.counterexamples {
        text.push_str(&format!("counterexample trial {} k {}\n{}", cx.trial, cx.k, cx.graph));
    }
    Ok((u8::from(!r.counterexamples.is_empty()), json!(r), text))
}

fn run(cli: &Cli) -> Out {
    match &cli.cmd {
        Cmd::Factorize { graph, k, mode, v0, v1, eps, bounds, p, odd, s, z, assume_preconditions } => {
            let pre = if *assume_preconditions { Preconditions::Assume } else { Preconditions::Validate };
            factorize(&load(graph)?, *k, *mode, v0, v1, eps, bounds, *p, odd, s, z, pre)
        }
        Cmd::Check { graph, k } => check(&load(graph)?, *k),
        Cmd::Table { k } => table(*k),
        Cmd::Orient { graph, k, targets } => orient(&load(graph)?, *k, targets),
        Cmd::Verify { graph, assignment, claims } => verify(&load(graph)?, &read(assignment)?, &read(claims)?),
        Cmd::Oracle { graph, problem, k, v0, lo, hi, s, z, eps } => oracle(&load(graph)?, *problem, *k, v0, lo, hi, s, z, eps),
        Cmd::Search { seed, trials, conjecture, n_min, n_max, mult_max, k_min, k_max } => {
            search(*seed, *trials, conjecture, (*n_min, *n_max), *mult_max, (*k_min, *k_max))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, j, text) = match run(&cli) {
        Ok(r) => r,
        Err(Failure::Lib(e)) => {
            let code = exit_code(&e);
            (code, json!({ "error": e.to_string(), "exit": code }), format!("error {e}\n"))
        }
        Err(Failure::Input(msg)) => (4, json!({ "error": msg, "exit": 4 }), format!("error {msg}\n")),
    };
    match cli.format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{j}"),
    }
    ExitCode::from(code)
}
