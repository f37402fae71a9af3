//! Command-line surface: compute, verify and export.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::Ring;
use crate::burnside;
use crate::complexes::build_with;
use crate::concordance::{self, Alpha};
use crate::corpus;
use crate::diagram::movie::MovieScript;
use crate::diagram::OrientedDiagram;
use crate::error::Error;
use crate::homology::{self, Coeffs, HomologyReport};
use crate::jones::unnormalized_jones;
use crate::moves::{movie_map, same_mod2};
use crate::resolution::Assigned;
use crate::verify;

#[derive(Parser, Debug)]
#[command(name = "khlab", version, about = "Even, odd and unified Khovanov homology")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// PD code, named diagram or path to a file of diagrams
    #[arg(long, global = true)]
    pub pd: Option<String>,
    /// Input file (diagrams one per line, or a movie for `cobordism`)
    #[arg(long = "in", global = true, alias = "movie")]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Theory::Odd)]
    pub theory: Theory,
    #[arg(long, global = true, value_enum, default_value_t = Coeff::Z)]
    pub coeff: Coeff,
    #[arg(long, global = true)]
    pub reduced: bool,
    /// Basepoint edge for reduced homology
    #[arg(long, global = true)]
    pub bp: Option<u32>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Human-readable tables
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Comma-separated suite names, or `all`
    #[arg(long, global = true, default_value = "all")]
    pub suite: String,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Bigraded homology table
    Homology,
    /// Homology relative to the basepoint circle
    ReducedHomology,
    /// Kauffman bracket against the Euler characteristic
    Jones,
    /// Run invariant suites over a corpus
    Verify,
    /// Build and check the signed Burnside functor
    Burnside,
    /// Chain map of a movie of elementary cobordisms
    Cobordism,
    /// s-invariant and the alpha invariants r+-, s+-
    S,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theory {
    Even,
    Odd,
    Unified,
}

impl Theory {
    fn ring(self) -> Ring {
        match self {
            Theory::Even => Ring::Even,
            Theory::Odd => Ring::Odd,
            Theory::Unified => Ring::Unified,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coeff {
    #[value(name = "Z")]
    Z,
    #[value(name = "F2")]
    F2,
    #[value(name = "Q")]
    Q,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Tsv,
}

/// Exit status and rendered output.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::EdgeMultiplicity { .. }
            | Error::Orientation(_)
            | Error::BadBasepoint(_)
            | Error::LengthMismatch { .. }
            | Error::NoBasepoint
            | Error::Move(_)
            | Error::Movie { .. }
            | Error::NotAKnot(_) => Failure::Validation(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn invalid<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Validation(msg.into()))
}

/// A named diagram, a PD code, or the path of a file with one diagram per line.
fn diagrams_from(spec: &str) -> Res<Vec<OrientedDiagram>> {
    if let Some(d) = corpus::named(spec) {
        return Ok(vec![d]);
    }
    let path = PathBuf::from(spec);
    if path.is_file() {
        return read_diagrams(&path);
    }
    Ok(vec![OrientedDiagram::parse(spec)?])
}

fn read_diagrams(path: &PathBuf) -> Res<Vec<OrientedDiagram>> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let d = corpus::named(body).map(Ok).unwrap_or_else(|| OrientedDiagram::parse(body));
        out.push(d.map_err(|e| Failure::Validation(format!("{}:{}: {e}", path.display(), k + 1)))?);
    }
    Ok(out)
}

fn inputs(c: &Common) -> Res<Vec<OrientedDiagram>> {
    match (&c.pd, &c.input) {
        (Some(p), _) => diagrams_from(p),
        (None, Some(f)) => read_diagrams(f),
        (None, None) => invalid("one of --pd or --in is required"),
    }
}

fn single(c: &Common) -> Res<OrientedDiagram> {
    let mut ds = inputs(c)?;
    if ds.len() != 1 {
        return invalid(format!("expected one diagram, got {}", ds.len()));
    }
    let d = ds.pop().unwrap();
    match c.bp {
        Some(b) => Ok(d.with_basepoint(Some(b))?),
        None => Ok(d),
    }
}

fn coeffs(c: Coeff) -> Coeffs {
    match c {
        Coeff::Z => Coeffs::Z,
        Coeff::F2 => Coeffs::F2,
        Coeff::Q => Coeffs::Q,
    }
}

fn group_name(rank: usize, torsion: &[u64], c: Coeff) -> String {
    let base = match c {
        Coeff::Z => "Z",
        Coeff::F2 => "F2",
        Coeff::Q => "Q",
    };
    let mut parts = Vec::new();
    if rank > 0 {
        parts.push(if rank == 1 { base.to_string() } else { format!("{base}^{rank}") });
    }
    parts.extend(torsion.iter().map(|t| format!("Z/{t}")));
    parts.join("+")
}

fn homology_table(r: &HomologyReport, c: Coeff) -> String {
    let is: std::collections::BTreeSet<i64> = r.bigradings.iter().map(|b| b.i).collect();
    let mut js: Vec<i64> = r.bigradings.iter().map(|b| b.j).collect();
    js.sort_unstable();
    js.dedup();
    js.reverse();
    let mut s = String::new();
    write!(s, "{:>5} |", "j\\i").unwrap();
    for i in &is {
        write!(s, " {i:>8}").unwrap();
    }
    s.push('\n');
    for j in js {
        write!(s, "{j:>5} |").unwrap();
        for i in &is {
            let cell = r.bigradings.iter().find(|b| b.i == *i && b.j == j).map_or(String::new(), |b| group_name(b.rank, &b.torsion, c));
            write!(s, " {cell:>8}").unwrap();
        }
        s.push('\n');
    }
    writeln!(s, "euler: {}", r.euler).unwrap();
    s
}

fn cmd_homology(c: &Common, reduced: bool) -> Res<(Value, String, String)> {
    let d = single(c)?;
    if reduced && d.basepoint().is_none() {
        return invalid("reduced homology needs a basepoint (--bp or bp= in the PD code)");
    }
    let a = Assigned::new(&d, None)?;
    let cx = build_with(&d, &a, c.theory.ring(), reduced)?;
    let r = homology::report(&cx, coeffs(c.coeff));
    let mut v = serde_json::to_value(&r).unwrap();
    v["command"] = json!(if reduced { "reduced-homology" } else { "homology" });
    v["diagram"] = json!(d.to_string());
    v["coeff"] = json!(format!("{:?}", c.coeff));
    let mut tsv = String::from("i\tj\trank\ttorsion\n");
    for b in &r.bigradings {
        let t: Vec<String> = b.torsion.iter().map(|x| x.to_string()).collect();
        writeln!(tsv, "{}\t{}\t{}\t{}", b.i, b.j, b.rank, t.join(",")).unwrap();
    }
    Ok((v, tsv, homology_table(&r, c.coeff)))
}

fn cmd_jones(c: &Common) -> Res<(Value, String, String)> {
    let d = single(c)?;
    let oracle = unnormalized_jones(&d).to_string();
    let euler = build_with(&d, &Assigned::new(&d, None)?, Ring::Even, false)?.euler().to_string();
    let eq = oracle == euler;
    let v = json!({"command": "jones", "diagram": d.to_string(), "jones": oracle, "euler": euler, "equal": eq});
    let tsv = format!("jones\teuler\tequal\n{oracle}\t{euler}\t{eq}\n");
    let pretty = format!("jones:  {oracle}\neuler:  {euler}\nequal:  {eq}\n");
    Ok((v, tsv, pretty))
}

fn cmd_verify(c: &Common) -> Res<(Value, String, String, bool)> {
    let ds = if c.pd.is_some() || c.input.is_some() {
        inputs(c)?
    } else {
        let mut v: Vec<_> = corpus::NAMED.iter().filter_map(|n| corpus::named(n)).collect();
        v.extend(corpus::random_corpus(c.seed, 50, 8));
        v
    };
    let suites: Vec<&str> = if c.suite == "all" { verify::SUITES.to_vec() } else { c.suite.split(',').map(str::trim).collect() };
    if let Some(bad) = suites.iter().find(|s| !verify::SUITES.contains(s)) {
        return invalid(format!("unknown suite '{bad}'; expected one of {} or all", verify::SUITES.join(", ")));
    }
    let results = suites.iter().map(|s| verify::run_suite(s, &ds, c.seed)).collect::<crate::Result<Vec<_>>>()?;
    let ok = results.iter().all(|r| r.passed());
    let v = json!({"command": "verify", "diagrams": ds.len(), "passed": ok, "suites": results});
    let mut tsv = String::from("suite\tdiagrams\tpassed\tfailures\n");
    let mut pretty = String::new();
    for r in &results {
        writeln!(tsv, "{}\t{}\t{}\t{}", r.suite, r.diagrams, r.passed(), r.failures.len()).unwrap();
        let extra = r.hexagons.map_or(String::new(), |h| format!(", {h} hexagons verified"));
        writeln!(pretty, "{:<11} {} ({} diagrams{extra})", r.suite, if r.passed() { "pass" } else { "FAIL" }, r.diagrams).unwrap();
        for f in &r.failures {
            writeln!(pretty, "    {f}").unwrap();
        }
        if let Some(w) = &r.warning {
            writeln!(pretty, "    warning: {w}").unwrap();
        }
    }
    Ok((v, tsv, pretty, ok))
}

fn cmd_burnside(c: &Common) -> Res<(Value, String, String, bool)> {
    let d = single(c)?;
    let r = burnside::verify(&d)?;
    let ok = r.passed();
    let mut v = serde_json::to_value(&r).unwrap();
    v["command"] = json!("burnside");
    v["diagram"] = json!(d.to_string());
    v["passed"] = json!(ok);
    let tsv = format!(
        "squares\tladybugs\thexagons\todd_transpose\tdoubled_matches_unified\tforgets_to_even\n{}\t{}\t{}\t{}\t{}\t{}\n",
        r.squares, r.ladybugs, r.hexagons, r.odd_transpose, r.doubled_matches_unified, r.forgets_to_even
    );
    let pretty = format!(
        "squares: {}\nladybugs: {}\nhexagons verified: {}\nodd transpose: {}\ndoubled = unified: {}\nforgets to even: {}\n",
        r.squares, r.ladybugs, r.hexagons, r.odd_transpose, r.doubled_matches_unified, r.forgets_to_even
    );
    Ok((v, tsv, pretty, ok))
}

#[derive(Serialize)]
struct WitnessSummary {
    theory: &'static str,
    chain_map: bool,
    shift: [i64; 2],
    source_gens: usize,
    target_gens: usize,
}

fn cmd_cobordism(c: &Common) -> Res<(Value, String, String, bool)> {
    let Some(path) = &c.input else {
        return invalid("cobordism needs a movie file (--in or --movie)");
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    let script = MovieScript::parse(&text)?;
    let start = match (&c.pd, &script.start) {
        (Some(p), _) => {
            let mut ds = diagrams_from(p)?;
            if ds.len() != 1 {
                return invalid("expected one starting diagram");
            }
            ds.pop().unwrap()
        }
        (None, Some(s)) => corpus::named(s).map(Ok).unwrap_or_else(|| OrientedDiagram::parse(s))?,
        (None, None) => return invalid("no starting diagram: give --pd or a 'start' line"),
    };
    let frames = script.frames(&start)?;
    let end = frames.last().unwrap().clone();
    let mut summaries = Vec::new();
    let mut maps = Vec::new();
    for ring in [Ring::Even, Ring::Odd, Ring::Mod2] {
        let w = movie_map(&start, &script, ring)?;
        summaries.push(WitnessSummary {
            theory: ring.name(),
            chain_map: w.is_chain_map,
            shift: [w.shift.i, w.shift.j],
            source_gens: w.source.len(),
            target_gens: w.target.len(),
        });
        maps.push(w);
    }
    let mod2_agree = same_mod2(&maps[0], &maps[1]);
    let euler = script.euler();
    let mut v = json!({
        "command": "cobordism",
        "start": start.to_string(),
        "end": end.to_string(),
        "moves": script.moves.len(),
        "euler": euler,
        "witnesses": summaries,
        "odd_mod2_equals_even": mod2_agree,
    });
    let mut ok = maps.iter().all(|w| w.is_chain_map) && mod2_agree;
    // genus bound for connected cobordisms between knots
    if start.components() == 1 && end.components() == 1 && euler <= 0 && euler % 2 == 0 {
        let g = -euler / 2;
        let (s0, s1) = (concordance::s_invariant(&start)?, concordance::s_invariant(&end)?);
        let bound = (s0 - s1).abs() <= 2 * g;
        ok &= bound;
        v["genus"] = json!(g);
        v["s_start"] = json!(s0);
        v["s_end"] = json!(s1);
        v["genus_bound_holds"] = json!(bound);
    }
    v["passed"] = json!(ok);
    let mut tsv = String::from("theory\tchain_map\tshift_i\tshift_j\n");
    let mut pretty = format!("{} -> {}\n", start, end);
    for s in v["witnesses"].as_array().unwrap() {
        writeln!(tsv, "{}\t{}\t{}\t{}", s["theory"].as_str().unwrap(), s["chain_map"], s["shift"][0], s["shift"][1]).unwrap();
        writeln!(pretty, "{:<5} chain map: {}, degree ({}, {})", s["theory"].as_str().unwrap(), s["chain_map"], s["shift"][0], s["shift"][1]).unwrap();
    }
    writeln!(pretty, "odd mod 2 = even: {mod2_agree}").unwrap();
    Ok((v, tsv, pretty, ok))
}

fn cmd_s(c: &Common) -> Res<(Value, String, String)> {
    let d = single(c)?;
    let alpha = match c.theory {
        Theory::Even => Alpha::BocksteinEven,
        Theory::Odd => Alpha::BocksteinOdd,
        Theory::Unified => return invalid("s uses --theory even or odd to pick the Bockstein"),
    };
    let r = concordance::report(&d, alpha)?;
    let mut v = serde_json::to_value(&r).unwrap();
    v["command"] = json!("s");
    v["diagram"] = json!(d.to_string());
    let tsv = format!("s\tr_plus\ts_plus\tr_minus\ts_minus\n{}\t{}\t{}\t{}\t{}\n", r.s, r.r_plus, r.s_plus, r.r_minus, r.s_minus);
    let pretty = format!("s = {}\nr+ = {}, s+ = {}\nr- = {}, s- = {}\n", r.s, r.r_plus, r.s_plus, r.r_minus, r.s_minus);
    Ok((v, tsv, pretty))
}

/// Run a parsed configuration; never exits the process.
pub fn run(cfg: &RunConfig) -> Outcome {
    let c = &cfg.common;
    let result: Res<(Value, String, String, bool)> = match cfg.command {
        Command::Homology => cmd_homology(c, c.reduced).map(|(a, b, p)| (a, b, p, true)),
        Command::ReducedHomology => cmd_homology(c, true).map(|(a, b, p)| (a, b, p, true)),
        Command::Jones => cmd_jones(c).map(|(a, b, p)| (a, b, p, true)),
        Command::Verify => cmd_verify(c),
        Command::Burnside => cmd_burnside(c),
        Command::Cobordism => cmd_cobordism(c),
        Command::S => cmd_s(c).map(|(a, b, p)| (a, b, p, true)),
    };
    match result {
        Ok((json, tsv, pretty, ok)) => {
            let text = if c.pretty {
                pretty
            } else if c.format == Format::Tsv {
                tsv
            } else {
                serde_json::to_string(&json).unwrap() + "\n"
            };
            Outcome { code: if ok { 0 } else { 1 }, text }
        }
        Err(Failure::Validation(m)) => Outcome { code: 2, text: format!("error: {m}\n") },
        Err(Failure::Internal(m)) => Outcome { code: 1, text: format!("internal error: {m}\n") },
    }
}

pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(j) = cfg.common.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    log::debug!("{cfg:?}");
    let out = run(&cfg);
    if out.code == 0 || out.code == 1 && !out.text.starts_with("internal error") {
        match &cfg.common.out {
            Some(p) => {
                if let Err(e) = std::fs::write(p, &out.text) {
                    eprintln!("error: {}: {e}", p.display());
                    return 2;
                }
            }
            None => print!("{}", out.text),
        }
    } else {
        eprint!("{}", out.text);
    }
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        let cfg = RunConfig::try_parse_from(std::iter::once("khlab").chain(args.iter().copied())).unwrap();
        run(&cfg)
    }

    #[test]
    fn unknot_homology() {
        let o = run_args(&["homology", "--pd", "U", "--theory", "even"]);
        assert_eq!(o.code, 0);
        let v: Value = serde_json::from_str(&o.text).unwrap();
        let b = v["bigradings"].as_array().unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|e| e["i"] == 0 && e["rank"] == 1 && e["j"].as_i64().unwrap().abs() == 1));
    }

    #[test]
    fn missing_input_is_validation_error() {
        assert_eq!(run_args(&["homology"]).code, 2);
        assert_eq!(run_args(&["homology", "--pd", "PD[X(1,2"]).code, 2);
        assert_eq!(run_args(&["reduced-homology", "--pd", "trefoil"]).code, 2);
        assert_eq!(RunConfig::try_parse_from(["khlab", "homology", "--theory", "weird"]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn s_and_jones() {
        let v: Value = serde_json::from_str(&run_args(&["s", "--pd", "trefoil"]).text).unwrap();
        assert_eq!(v["s"], 2);
        let v: Value = serde_json::from_str(&run_args(&["jones", "--pd", "hopf"]).text).unwrap();
        assert_eq!(v["equal"], true);
    }

    #[test]
    fn deterministic() {
        let a = run_args(&["homology", "--pd", "figure_eight", "--theory", "odd"]).text;
        let b = run_args(&["homology", "--pd", "figure_eight", "--theory", "odd"]).text;
        assert_eq!(a, b);
    }
}
