//! Batch front end: merges flags with an optional TOML config, dispatches to
//! the library and renders each result as JSON, CSV or plain text with a
//! header recording the version, the parameters and the precision used.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use prlocus::crystals::{
    canonical_signature, default_precision, random_crystal, supersingular_at, Crystal,
    CrystalError, CrystalJson,
};
use prlocus::deform::{densify, DeformError, DensifyOptions, DensifyReport, TraceJson};
use prlocus::lifting::{lift_pr_tower, LiftError};
use prlocus::localmodels::{
    derive_chart_equations, enumerate_chart, field_of_order, Chart, LocalModelError,
};
use prlocus::polygons::{
    dominates, is_symmetric, mean, polygon_from_slopes, pr_from_signature, Polygon, Signature,
};
use prlocus::prdata::{
    counterexample_check, enumerate_pr_slice, is_rapoport, stratum_counts, validate_pr,
    EnumerateError, FilteredModuleJson,
};
use prlocus::rings::{FiniteField, RamifiedRing};
use prlocus::Case;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;
pub const EXIT_UNSUPPORTED: i32 = 5;

const DEFAULT_BUDGET: u64 = 1 << 20;
const DEFAULT_STEP_BUDGET: u64 = 8;

#[derive(Parser, Debug)]
#[command(
    name = "prlocus",
    version,
    about = "Experiments on Pappas-Rapoport filtrations and their deformations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dominance, mean and symmetry of polygons given as "slope x mult" lists, e.g. "0x1, 1x1".
    Polygon { polygons: Vec<String> },
    /// Hodge stratum counts of the PR data over F_q for a signature.
    Enumerate,
    /// Component counts of a local-model chart (U11 or U21) over F_q.
    Localmodel {
        #[arg(default_value = "U11")]
        chart: String,
        /// Include every classified point in JSON output.
        #[arg(long)]
        verbose: bool,
    },
    /// Deforms a crystal until its Newton polygon reaches the PR polygon.
    Deform {
        #[arg(long, value_enum, default_value_t = Fixture::Supersingular)]
        fixture: Fixture,
        /// Crystal JSON file, used instead of a fixture.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Exhaustive search for the nilpotent flag counterexample over F_q.
    Counterexample,
    /// Lifts a special-fiber PR datum into the Rapoport locus.
    Lift {
        /// Point of the enumeration to lift; chosen from the seed when absent.
        #[arg(long)]
        index: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    Supersingular,
    Random,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// Run parameters. The config file uses the same keys as the flags.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    /// Residue characteristic.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Residue field order.
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Ramification index.
    #[arg(long, global = true)]
    pub e: Option<usize>,
    /// Inertia degree.
    #[arg(long, global = true)]
    pub f: Option<usize>,
    /// Height.
    #[arg(long, global = true)]
    pub h: Option<usize>,
    /// Signature d_{τ,j}: rows for τ separated by ';', entries by ','.
    #[arg(long, global = true)]
    pub sig: Option<String>,
    /// AL, AU, C or AR.
    #[arg(long, global = true)]
    pub case: Option<String>,
    /// Truncation order in t for families.
    #[arg(long = "trunc-t", global = true)]
    pub trunc_t: Option<u32>,
    /// Witt precision m.
    #[arg(long = "prec-m", global = true)]
    pub prec_m: Option<u32>,
    /// Denominator bound p^D for exponents of t.
    #[arg(long = "denom-d", global = true)]
    pub denom_d: Option<u32>,
    /// Work budget (enumerated points or deformation steps).
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// RNG seed for random fixtures.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with default parameters; flags take precedence.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Params {
    /// Fields set here win over those of `base`.
    pub fn over(self, base: Params) -> Params {
        Params {
            p: self.p.or(base.p),
            q: self.q.or(base.q),
            e: self.e.or(base.e),
            f: self.f.or(base.f),
            h: self.h.or(base.h),
            sig: self.sig.or(base.sig),
            case: self.case.or(base.case),
            trunc_t: self.trunc_t.or(base.trunc_t),
            prec_m: self.prec_m.or(base.prec_m),
            denom_d: self.denom_d.or(base.denom_d),
            budget: self.budget.or(base.budget),
            seed: self.seed.or(base.seed),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
            config: self.config.or(base.config),
        }
    }

    fn case_or(&self, default: Case) -> Result<Case, CliError> {
        match &self.case {
            None => Ok(default),
            Some(s) => s.parse().map_err(CliError::input),
        }
    }

    fn budget(&self) -> u64 {
        self.budget.unwrap_or(DEFAULT_BUDGET)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

pub fn load_config(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::input(format!("bad config {}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, message)
    }
}

impl From<CrystalError> for CliError {
    fn from(e: CrystalError) -> Self {
        let code = match e {
            CrystalError::PrecisionExhausted { .. } => EXIT_PRECISION,
            _ => EXIT_INPUT,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<DeformError> for CliError {
    fn from(e: DeformError) -> Self {
        let code = match &e {
            DeformError::UnsupportedCase(_) => EXIT_UNSUPPORTED,
            DeformError::BudgetExhausted { .. } => EXIT_BUDGET,
            DeformError::Crystal(CrystalError::PrecisionExhausted { .. }) => EXIT_PRECISION,
            DeformError::NotRapoport | DeformError::Parameters(_) | DeformError::Crystal(_) => {
                EXIT_INPUT
            }
            _ => EXIT_FAILURE,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<LiftError> for CliError {
    fn from(e: LiftError) -> Self {
        let code = match e {
            LiftError::UnsupportedCase(_) => EXIT_UNSUPPORTED,
            LiftError::InvalidInstance(_) => EXIT_INPUT,
            LiftError::CertificationFailed(_) => EXIT_FAILURE,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<EnumerateError> for CliError {
    fn from(e: EnumerateError) -> Self {
        let code = match e {
            EnumerateError::BudgetExceeded { .. } => EXIT_BUDGET,
            EnumerateError::UnsupportedCase(_) => EXIT_UNSUPPORTED,
            EnumerateError::OddHeight(_) => EXIT_INPUT,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<LocalModelError> for CliError {
    fn from(e: LocalModelError) -> Self {
        let code = match e {
            LocalModelError::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_INPUT,
        };
        CliError::new(code, e.to_string())
    }
}

/// A command result before rendering.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: &'static str,
    /// The parameters actually used, defaults filled in.
    pub parameters: Map<String, Value>,
    pub precision: Option<u32>,
    pub result: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Plain-text body; the table is used when empty.
    pub text: Vec<String>,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Report {
            command,
            ..Default::default()
        }
    }

    fn param(&mut self, key: &str, v: impl Into<Value>) {
        self.parameters.insert(key.to_string(), v.into());
    }

    fn header(&self) -> String {
        let mut s = format!("# prlocus {} {}", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.parameters {
            let v = match v {
                Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            s.push_str(&format!(" {k}={v}"));
        }
        if let Some(m) = self.precision {
            s.push_str(&format!(" precision={m}"));
        }
        s
    }

    fn csv_body(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = json!({
                    "version": 1,
                    "prlocus": env!("CARGO_PKG_VERSION"),
                    "command": self.command,
                    "parameters": self.parameters,
                    "precision": self.precision,
                    "result": self.result,
                });
                serde_json::to_string_pretty(&v).expect("serializable") + "\n"
            }
            Format::Csv => format!("{}\n{}", self.header(), self.csv_body()),
            Format::Text if self.text.is_empty() => {
                format!("{}\n{}", self.header(), self.csv_body())
            }
            Format::Text => format!("{}\n{}\n", self.header(), self.text.join("\n")),
        }
    }
}

/// Exit code with the text for stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first), runs the command and renders it.
/// With --out the rendered output goes to the file instead of stdout.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let fail = |e: CliError| Outcome {
        code: e.code,
        stdout: String::new(),
        stderr: format!("error: {}\n", e.message),
    };
    let params = match &cli.params.config {
        Some(path) => match load_config(path) {
            Ok(base) => cli.params.clone().over(base),
            Err(e) => return fail(e),
        },
        None => cli.params.clone(),
    };
    let report = match dispatch(&cli.command, &params) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let text = report.render(params.format.unwrap_or_default());
    match &params.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code: EXIT_OK,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => fail(CliError::new(
                EXIT_FAILURE,
                format!("cannot write {}: {e}", path.display()),
            )),
        },
        None => Outcome {
            code: EXIT_OK,
            stdout: text,
            stderr: String::new(),
        },
    }
}

pub fn dispatch(cmd: &Command, params: &Params) -> Result<Report, CliError> {
    match cmd {
        Command::Polygon { polygons } => cmd_polygon(polygons, params),
        Command::Enumerate => cmd_enumerate(params),
        Command::Localmodel { chart, verbose } => cmd_localmodel(chart, *verbose, params),
        Command::Deform { fixture, input } => cmd_deform(*fixture, input.as_deref(), params),
        Command::Counterexample => cmd_counterexample(params),
        Command::Lift { index } => cmd_lift(*index, params),
    }
}

/// "0x1, 1x1" or "(1/2x2)": slopes with multiplicities, e the lcm of the
/// multiplicity denominators unless given.
pub fn parse_polygon(s: &str, e: Option<usize>) -> Result<Polygon, CliError> {
    let bad = |why: &str| CliError::input(format!("malformed polygon {s:?}: {why}"));
    let body = s.trim().trim_start_matches('(').trim_end_matches(')');
    let mut slopes = Vec::new();
    for part in body.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (sl, m) = part
            .split_once('x')
            .ok_or_else(|| bad("expected slope x multiplicity"))?;
        let sl: Rational64 = sl
            .trim()
            .parse()
            .map_err(|_| bad("slope is not a rational"))?;
        let m: Rational64 = m
            .trim()
            .parse()
            .map_err(|_| bad("multiplicity is not a rational"))?;
        slopes.push((sl, m));
    }
    if slopes.is_empty() {
        return Err(bad("no slopes"));
    }
    let e = match e {
        Some(e) => e as i64,
        None => slopes
            .iter()
            .fold(1i64, |acc, (_, m)| num_integer_lcm(acc, *m.denom())),
    };
    polygon_from_slopes(&slopes, e).map_err(|err| bad(&err.to_string()))
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    let (mut x, mut y) = (a.abs(), b.abs());
    while y != 0 {
        (x, y) = (y, x % y);
    }
    if x == 0 {
        0
    } else {
        a / x * b
    }
}

pub fn cmd_polygon(specs: &[String], params: &Params) -> Result<Report, CliError> {
    if specs.is_empty() {
        return Err(CliError::input("polygon needs at least one polygon"));
    }
    let ps: Vec<Polygon> = specs
        .iter()
        .map(|s| parse_polygon(s, params.e))
        .collect::<Result<_, _>>()?;
    let mut r = Report::new("polygon");
    if let Some(e) = params.e {
        r.param("e", e);
    }
    r.param("polygons", specs.join(" ; "));
    r.columns = vec!["kind", "a", "b", "value"];
    let mut dom = Vec::new();
    for (i, p) in ps.iter().enumerate() {
        r.rows.push(vec![
            "polygon".into(),
            i.to_string(),
            String::new(),
            p.to_string(),
        ]);
        r.rows.push(vec![
            "symmetric".into(),
            i.to_string(),
            String::new(),
            is_symmetric(p).to_string(),
        ]);
    }
    for (i, p) in ps.iter().enumerate() {
        let mut row = Vec::new();
        for (j, q) in ps.iter().enumerate() {
            let d = dominates(p, q).ok();
            if i != j {
                let v = d.map_or("endpoints differ".to_string(), |b| b.to_string());
                r.rows
                    .push(vec!["dominates".into(), i.to_string(), j.to_string(), v]);
            }
            row.push(d.map_or(Value::Null, Value::Bool));
        }
        dom.push(Value::Array(row));
    }
    let avg = mean(&ps).ok();
    if let Some(m) = &avg {
        r.rows.push(vec![
            "mean".into(),
            String::new(),
            String::new(),
            m.to_string(),
        ]);
    }
    r.result = json!({
        "polygons": ps.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        "display": ps.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "symmetric": ps.iter().map(is_symmetric).collect::<Vec<_>>(),
        "dominates": dom,
        "mean": avg.map(|m| m.to_json()),
    });
    Ok(r)
}

/// "1,1;2,0" for f = 2, e = 2. A single row is repeated over all τ.
pub fn parse_signature(s: &str, f: usize, e: usize, h: u32) -> Result<Signature, CliError> {
    let bad = |why: String| CliError::input(format!("malformed signature {s:?}: {why}"));
    let mut rows: Vec<Vec<u32>> = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<u32>()
                        .map_err(|_| bad(format!("{x:?} is not an integer")))
                })
                .collect::<Result<Vec<u32>, CliError>>()
        })
        .collect::<Result<_, _>>()?;
    if rows.len() == 1 && f > 1 {
        rows = vec![rows[0].clone(); f];
    }
    Signature::new(f, e, h, rows).map_err(|err| bad(err.to_string()))
}

fn sig_string(sig: &Signature) -> String {
    sig.d
        .iter()
        .map(|row| row.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

fn field(q: u64) -> Result<FiniteField, CliError> {
    field_of_order(q).map_err(|e| CliError::input(e.to_string()))
}

pub fn cmd_enumerate(params: &Params) -> Result<Report, CliError> {
    let q = params.q.unwrap_or(2);
    let (e, f, h) = (
        params.e.unwrap_or(2),
        params.f.unwrap_or(1),
        params.h.unwrap_or(2),
    );
    let case = params.case_or(Case::AL)?;
    let k = field(q)?;
    let sig = match &params.sig {
        Some(s) => parse_signature(s, f, e, h as u32)?,
        None => Signature::constant(f, e, h as u32, h as u32 / 2)
            .map_err(|x| CliError::input(x.to_string()))?,
    };
    let budget = params.budget();
    let strata = stratum_counts(&k, &sig, case, budget as u128)?;
    let pr = pr_from_signature(&sig);
    let mut r = Report::new("enumerate");
    r.param("q", q);
    r.param("e", e);
    r.param("f", f);
    r.param("h", h);
    r.param("case", case.to_string());
    r.param("sig", sig_string(&sig));
    r.param("budget", budget);
    r.columns = vec!["stratum_polygon", "count", "q", "rapoport"];
    let mut list = Vec::new();
    for (p, n) in &strata {
        let rap = *p == pr;
        r.rows.push(vec![
            p.to_string(),
            n.to_string(),
            q.to_string(),
            rap.to_string(),
        ]);
        list.push(json!({ "polygon": p.to_json(), "display": p.to_string(), "count": n, "rapoport": rap }));
    }
    let total: u64 = strata.iter().map(|(_, n)| n).sum();
    r.result = json!({ "pr_polygon": pr.to_json(), "total": total, "strata": list });
    Ok(r)
}

pub fn cmd_localmodel(chart: &str, verbose: bool, params: &Params) -> Result<Report, CliError> {
    let chart: Chart = chart.parse().map_err(CliError::input)?;
    let q = params.q.unwrap_or(5);
    let budget = params.budget();
    let eqs = derive_chart_equations(chart);
    let en = enumerate_chart(chart, q, budget)?;
    let c = en.counts;
    let mut r = Report::new("localmodel");
    r.param("chart", chart.to_string());
    r.param("q", q);
    r.param("budget", budget);
    r.columns = vec!["q", "component", "count"];
    for (name, n) in [
        ("torsion", c.torsion),
        ("isotropy", c.isotropy),
        ("intersection", c.intersection),
        ("total", c.total),
        ("rapoport", c.rapoport),
        ("degenerate", c.degenerate),
    ] {
        r.rows.push(vec![q.to_string(), name.into(), n.to_string()]);
    }
    let mut result = json!({
        "coordinates": chart.coordinates(),
        "equations": eqs.render(),
        "consistent": eqs.consistent,
        "counts": c,
        "all_valid": en.all_valid,
        "shortcut_agrees": en.shortcut_agrees,
    });
    if verbose {
        let pts: Vec<Value> = en
            .points
            .iter()
            .map(|p| {
                json!({
                    "coords": p.point.coords,
                    "torsion": p.torsion,
                    "isotropy": p.isotropy,
                    "rapoport": p.rapoport,
                })
            })
            .collect();
        result["points"] = Value::Array(pts);
    }
    r.result = result;
    Ok(r)
}

/// Builds the crystal to deform at precision m.
fn deform_input(
    fixture: Fixture,
    input: Option<&Path>,
    params: &Params,
    m: u32,
) -> Result<Crystal, CliError> {
    if let Some(path) = input {
        return Ok(read_crystal_json(path)?.to_crystal_at(m)?);
    }
    let p = params.p.unwrap_or(3);
    match fixture {
        Fixture::Supersingular => {
            let case = params.case_or(Case::C)?;
            if case == Case::AR {
                return Err(CliError::new(EXIT_UNSUPPORTED, "case AR is not supported"));
            }
            Ok(supersingular_at(p, case, m)?)
        }
        Fixture::Random => {
            let case = params.case_or(Case::AL)?;
            if case == Case::AR {
                return Err(CliError::new(EXIT_UNSUPPORTED, "case AR is not supported"));
            }
            let (e, h) = (params.e.unwrap_or(1), params.h.unwrap_or(2));
            let f = params.f.unwrap_or(if case == Case::AU { 2 } else { 1 });
            let ring = RamifiedRing::with_params(p, f as u32, e, m)
                .map_err(|x| CliError::input(x.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed());
            Ok(random_crystal(&ring, case, h, &mut rng)?)
        }
    }
}

fn read_crystal_json(path: &Path) -> Result<CrystalJson, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("bad crystal JSON: {e}")))
}

fn is_precision(e: &CliError) -> bool {
    e.code == EXIT_PRECISION
}

pub fn cmd_deform(
    fixture: Fixture,
    input: Option<&Path>,
    params: &Params,
) -> Result<Report, CliError> {
    let default_m = match (fixture, input) {
        (_, Some(path)) => read_crystal_json(path)?.m,
        (Fixture::Random, None) => {
            let case = params.case_or(Case::AL)?;
            let f = params.f.unwrap_or(if case == Case::AU { 2 } else { 1 });
            default_precision(f, params.h.unwrap_or(2)) + 1
        }
        (Fixture::Supersingular, None) => default_precision(1, 2) + 1,
    };
    let m0 = params.prec_m.unwrap_or(default_m);
    let opts = DensifyOptions {
        trunc: params.trunc_t.unwrap_or(DensifyOptions::default().trunc),
        denom: params.denom_d.unwrap_or(DensifyOptions::default().denom),
    };
    let budget = params.budget.unwrap_or(DEFAULT_STEP_BUDGET) as usize;
    let attempt = |m: u32| -> Result<(Crystal, Signature, DensifyReport), CliError> {
        let c = deform_input(fixture, input, params, m)?;
        let sig = match &params.sig {
            Some(s) => parse_signature(s, c.f(), c.e(), c.h() as u32)?,
            None => canonical_signature(&c),
        };
        let rep = densify(&c, &sig, budget, opts)?;
        Ok((c, sig, rep))
    };
    // one retry with doubled precision, then the error stands
    let (m, (c, sig, rep)) = match attempt(m0) {
        Err(e) if is_precision(&e) => (2 * m0, attempt(2 * m0)?),
        other => (m0, other?),
    };
    let mut r = Report::new("deform");
    r.precision = Some(m);
    match input {
        Some(path) => r.param("input", path.display().to_string()),
        None => r.param("fixture", format!("{fixture:?}").to_lowercase()),
    }
    r.param("case", c.case().to_string());
    r.param("p", c.p());
    r.param("e", c.e());
    r.param("f", c.f());
    r.param("h", c.h());
    r.param("sig", sig_string(&sig));
    r.param("trunc-t", opts.trunc);
    r.param("denom-d", opts.denom);
    r.param("budget", budget);
    if fixture == Fixture::Random && input.is_none() {
        r.param("seed", params.seed());
    }
    r.columns = vec![
        "step",
        "special",
        "generic",
        "certified",
        "mu_ordinary",
        "source",
    ];
    for s in &rep.steps {
        r.rows.push(vec![
            s.index.to_string(),
            s.special.to_string(),
            s.generic.to_string(),
            s.certified.to_string(),
            s.mu_ordinary.to_string(),
            s.source.clone(),
        ]);
        r.text.push(format!(
            "step {}: newton {} -> {} via {}",
            s.index, s.special, s.generic, s.source
        ));
    }
    let final_mu = rep.steps.last().map_or(true, |s| s.mu_ordinary);
    r.text.push(format!("mu_ordinary: {final_mu}"));
    let mut result = serde_json::to_value(TraceJson::new(&c, &rep.steps)).expect("serializable");
    result["sources"] = json!(rep
        .steps
        .iter()
        .map(|s| s.source.clone())
        .collect::<Vec<_>>());
    result["mu_ordinary"] = json!(final_mu);
    r.result = result;
    Ok(r)
}

pub fn cmd_counterexample(params: &Params) -> Result<Report, CliError> {
    let q = params.q.unwrap_or(2);
    let k = field(q)?;
    let budget = params.budget();
    let needed = q.checked_pow(12).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(CliError::new(
            EXIT_BUDGET,
            format!("search needs {needed} candidates, over the budget of {budget}"),
        ));
    }
    let rep = counterexample_check(&k);
    let mut r = Report::new("counterexample");
    r.param("q", q);
    r.param("budget", budget);
    r.columns = vec!["q", "profile_pi1", "profile_pi2", "candidates", "count"];
    let prof = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    r.rows.push(vec![
        q.to_string(),
        prof(&rep.profile_pi1),
        prof(&rep.profile_pi2),
        rep.candidates.to_string(),
        rep.count.to_string(),
    ]);
    r.result = serde_json::to_value(&rep).expect("serializable");
    Ok(r)
}

pub fn cmd_lift(index: Option<usize>, params: &Params) -> Result<Report, CliError> {
    let q = params.q.unwrap_or(2);
    let (e, h) = (params.e.unwrap_or(2), params.h.unwrap_or(2));
    let case = params.case_or(Case::AL)?;
    let trunc = params.trunc_t.unwrap_or(2) as usize;
    if trunc == 0 {
        return Err(CliError::input("trunc-t must be positive"));
    }
    let k = field(q)?;
    let sig = match &params.sig {
        Some(s) => parse_signature(s, 1, e, h as u32)?,
        None => Signature::constant(1, e, h as u32, h as u32 / 2)
            .map_err(|x| CliError::input(x.to_string()))?,
    };
    let budget = params.budget();
    let points = enumerate_pr_slice(&k, e, h, &sig.d[0], case, budget as u128)?;
    if points.is_empty() {
        return Err(CliError::input("the signature has no PR data"));
    }
    let idx = match index {
        Some(i) if i < points.len() => i,
        Some(i) => {
            return Err(CliError::input(format!(
                "index {i} is out of range for {} points",
                points.len()
            )))
        }
        None => ChaCha8Rng::seed_from_u64(params.seed()).gen_range(0..points.len()),
    };
    let point = &points[idx];
    let lift = lift_pr_tower(&k, point, case, None, trunc)?;
    let reduces = lift.exact.map(|x| lift.ring.at_zero(x)) == *point;
    let truncated_valid = validate_pr(&lift.series, &lift.module).is_valid();
    let generic_rapoport = is_rapoport(&lift.ring.field, &lift.exact);
    let mut r = Report::new("lift");
    r.param("q", q);
    r.param("e", e);
    r.param("h", h);
    r.param("case", case.to_string());
    r.param("sig", sig_string(&sig));
    r.param("trunc-t", trunc);
    r.param("budget", budget);
    r.param("index", idx);
    if index.is_none() {
        r.param("seed", params.seed());
    }
    r.columns = vec!["step", "j", "generic_dim"];
    for (i, row) in lift.generic_dims.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            r.rows.push(vec![
                (i + 1).to_string(),
                (j + 1).to_string(),
                d.to_string(),
            ]);
        }
    }
    let steps: Vec<Vec<Vec<Vec<u32>>>> = lift.module.steps.iter().map(|s| s.to_rows()).collect();
    r.result = json!({
        "points": points.len(),
        "special": FilteredModuleJson::from_module(&k, point),
        "special_rapoport": is_rapoport(&k, point),
        "generic_dims": lift.generic_dims,
        "generic_rapoport": generic_rapoport,
        "reduces_to_input": reduces,
        "truncated_is_pr": truncated_valid,
        "lifted_steps": steps,
    });
    Ok(r)
}

#[cfg(test)]
mod tests;
