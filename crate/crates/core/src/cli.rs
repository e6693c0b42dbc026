//! Command-line front end.
//!
//! Every command is a thin shell over a library call. [`run`] returns the
//! report and exit status instead of printing, so the binary and the tests
//! share one code path. Exit status 0 means a verdict was computed (an
//! out-of-bound verdict is data, not failure), 1 a usage or input error, and
//! 2 an exhausted enumeration budget or an indeterminate verdict.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::{json, Value};

use crate::boolprog::{io_table, parse_program, EnumConfig, IoTable, Program, Valuation, DEFAULT_CAP};
use crate::bounding::{decide, noninterferent, BoundQuery, ExperimentArgs, ProblemId, Verdict};
use crate::dist::{Belief, Dist, Experiment};
use crate::error::{Error, Result};
use crate::gadgets::{
    decide_majsat_via, dilution_family, dilution_me_bound, gadget_for, PropFormula, ReductionRun, Route, TraceSet,
};
use crate::measures::{
    be, cc, format_float, gecc, ge_uniform_closed, me_uniform_closed, mecc, se_uniform, LadderConfig, MeasureId,
    QifValue,
};
use crate::ratio::{format_ratio, parse_rational};
use crate::selfcomp::{cc_counterexample, check_assertion, self_compose_cc, AssertionResult};

/// Exit status for computed verdicts.
pub const EXIT_OK: i32 = 0;
/// Exit status for usage, parse and input errors.
pub const EXIT_USAGE: i32 = 1;
/// Exit status for an exceeded enumeration cap or an indeterminate verdict.
pub const EXIT_LIMIT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qifbound",
    version,
    about = "Exact quantitative information flow for loop-free boolean programs"
)]
pub struct Cli {
    /// Write one JSON object per query to standard output.
    #[arg(long, global = true)]
    pub json: bool,

    /// Largest number of input bits to enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute leakage measures under the uniform distribution.
    Analyze(AnalyzeArgs),
    /// Decide whether a measure is at most q.
    Bound(BoundArgs),
    /// Build the self-composition for CC <= q and check its assertion.
    Selfcompose(SelfcomposeArgs),
    /// Check non-interference, globally or at one low input.
    Noninterference(NoninterferenceArgs),
    /// Print the MAJSAT reduction gadget of a route for a formula.
    Gadget(GadgetArgs),
    /// Decide MAJSAT for a formula through a bounding query.
    Majsat(MajsatArgs),
    /// Pad a trace set with extra low inputs.
    Dilute(DiluteArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Program file.
    pub program: PathBuf,
    /// Comma-separated measures: SE, ME, GE, BE, CC, MECC, GECC.
    #[arg(long, value_delimiter = ',', default_value = "SE,ME,GE,CC", value_parser = parse_measure)]
    pub measures: Vec<MeasureId>,
    /// High input for BE, as bits; without it BE is maximized over experiments.
    #[arg(long, value_parser = parse_valuation)]
    pub high: Option<Valuation>,
    /// Low input for BE, as bits.
    #[arg(long, value_parser = parse_valuation)]
    pub low: Option<Valuation>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Program file.
    pub program: PathBuf,
    /// Bounding problem: SE_U, ME_U, GE_U, CC, BE1, BE2, SECC, MECC, GECC, BE1CC, BE2CC.
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemId,
    /// Bound, as a decimal or a fraction a/b.
    #[arg(long, value_parser = parse_bound)]
    pub q: BigRational,
    /// High input of the experiment, as bits.
    #[arg(long, value_parser = parse_valuation)]
    pub high: Option<Valuation>,
    /// Low input of the experiment, as bits.
    #[arg(long, value_parser = parse_valuation)]
    pub low: Option<Valuation>,
    /// Belief file ({"space": [bits], "weights": ["n/d", ...]}); uniform by default.
    #[arg(long)]
    pub belief: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelfcomposeArgs {
    /// Program file.
    pub program: PathBuf,
    /// Capacity bound.
    #[arg(long, value_parser = parse_bound)]
    pub q: BigRational,
    /// Write the composed program here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoninterferenceArgs {
    /// Program file.
    pub program: PathBuf,
    /// Restrict the check to this low input, as bits.
    #[arg(long, value_parser = parse_valuation)]
    pub low: Option<Valuation>,
}

#[derive(Debug, Args)]
pub struct GadgetArgs {
    /// Route: SE, ME, GE, CC, BE1, BE2.
    #[arg(long, value_parser = parse_route)]
    pub route: Route,
    /// Formula file (`vars x1, ..., xn;` then an expression).
    pub formula: PathBuf,
    /// Write the gadget here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MajsatArgs {
    /// Route: SE, ME, GE, CC, BE1, BE2, or `all`.
    #[arg(long, default_value = "all", value_parser = parse_routes)]
    pub route: RouteChoice,
    /// Formula file (`vars x1, ..., xn;` then an expression).
    pub formula: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiluteArgs {
    /// Trace file ({"high": [..], "low": [..], "outputs": [..], "traces": [{"h", "l", "o"}]}).
    pub traces: PathBuf,
    /// Number of padding low inputs.
    #[arg(long)]
    pub t: usize,
    /// Write the padded program here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RouteChoice(pub Vec<Route>);

fn parse_measure(s: &str) -> std::result::Result<MeasureId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_problem(s: &str) -> std::result::Result<ProblemId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_route(s: &str) -> std::result::Result<Route, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_routes(s: &str) -> std::result::Result<RouteChoice, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(RouteChoice(Route::ALL.to_vec()));
    }
    s.split(',').map(parse_route).collect::<std::result::Result<_, _>>().map(RouteChoice)
}

fn parse_bound(s: &str) -> std::result::Result<BigRational, String> {
    let q = parse_rational(s).map_err(|e| e.to_string())?;
    if q.is_negative() {
        return Err(Error::NonPositiveBound(format_ratio(&q)).to_string());
    }
    Ok(q)
}

fn parse_valuation(s: &str) -> std::result::Result<Valuation, String> {
    Valuation::parse(s).map_err(|e| e.to_string())
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json_requested = args.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome::ok(text);
            }
            return usage_failure(json_requested, "usage", text);
        }
    };
    match execute(&cli) {
        Ok(report) => report.into_outcome(cli.json),
        Err(e) => {
            let code = exit_code(&e);
            let kind = if code == EXIT_LIMIT { "limit" } else { "input" };
            failure(cli.json, code, kind, e.to_string())
        }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_LIMIT,
        _ => EXIT_USAGE,
    }
}

fn usage_failure(json: bool, kind: &str, message: String) -> Outcome {
    failure(json, EXIT_USAGE, kind, message)
}

fn failure(json: bool, code: i32, kind: &str, message: String) -> Outcome {
    let message = message.trim_end().to_string();
    let stdout = if json {
        format!("{}\n", json!({"error": {"kind": kind, "message": message}}))
    } else {
        String::new()
    };
    Outcome { code, stdout, stderr: format!("error: {message}\n") }
}

/// A computed report: text and JSON renderings, and whether any verdict was
/// indeterminate.
struct Report {
    text: String,
    json: Vec<Value>,
    indeterminate: bool,
}

impl Report {
    fn into_outcome(self, json: bool) -> Outcome {
        let stdout = if json {
            self.json.iter().map(|v| format!("{v}\n")).collect()
        } else {
            self.text
        };
        let code = if self.indeterminate { EXIT_LIMIT } else { EXIT_OK };
        Outcome { code, stdout, stderr: String::new() }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program> {
    parse_program(&read(path)?)
}

fn load_formula(path: &Path) -> Result<PropFormula> {
    PropFormula::parse(&read(path)?)
}

fn execute(cli: &Cli) -> Result<Report> {
    let config = EnumConfig { cap: cli.cap };
    match &cli.command {
        Command::Analyze(a) => analyze(a, config),
        Command::Bound(a) => bound(a, config),
        Command::Selfcompose(a) => selfcompose(a, config),
        Command::Noninterference(a) => noninterference(a, config),
        Command::Gadget(a) => gadget(a),
        Command::Majsat(a) => majsat(a, config),
        Command::Dilute(a) => dilute(a, config),
    }
}

/// The value of one measure under the uniform distribution. BE uses the
/// given experiment, or the largest value over all experiments.
pub fn measure_value(table: &IoTable, m: MeasureId, high: Option<&Valuation>, low: Option<&Valuation>) -> Result<QifValue> {
    Ok(match m {
        MeasureId::SE => se_uniform(table),
        MeasureId::ME => me_uniform_closed(table),
        MeasureId::GE => ge_uniform_closed(table),
        MeasureId::CC => cc(table),
        MeasureId::MECC => mecc(table),
        MeasureId::GECC => gecc(table),
        MeasureId::BE => {
            let belief = Belief::uniform(table.high_space().clone())?;
            match high {
                Some(h) => {
                    let l = low.cloned().unwrap_or_else(|| Valuation::from_code(0, table.low_space().width()));
                    be(table, &Experiment::new(belief, h.clone(), l))?
                }
                None => {
                    let (hi, li, _) = crate::bounding::min_mass_experiment(table, &belief)?;
                    let h = Valuation::from_code(table.high_space().code(hi), table.high_space().width());
                    let l = Valuation::from_code(table.low_space().code(li), table.low_space().width());
                    be(table, &Experiment::new(belief, h, l))?.with_witness(table.low_space().label(li))
                }
            }
        }
    })
}

fn analyze(a: &AnalyzeArgs, config: EnumConfig) -> Result<Report> {
    let program = load_program(&a.program)?;
    let table = io_table(&program, config)?;
    let mut text = String::new();
    let mut values = Vec::new();
    for &m in &a.measures {
        let v = measure_value(&table, m, a.high.as_ref(), a.low.as_ref())?;
        text.push_str(&format!("{v}\n"));
        values.push(v.to_json());
    }
    let json = json!({
        "command": "analyze",
        "program": a.program.display().to_string(),
        "inputBits": program.input_bits(),
        "measures": values,
    });
    Ok(Report { text, json: vec![json], indeterminate: false })
}

fn bound(a: &BoundArgs, config: EnumConfig) -> Result<Report> {
    let program = load_program(&a.program)?;
    let belief = match &a.belief {
        Some(path) => Some(Belief::new(Dist::from_json_str(&read(path)?)?)?),
        None => None,
    };
    let table = io_table(&program, config)?;
    let query = BoundQuery {
        problem: a.problem,
        q: a.q.clone(),
        args: ExperimentArgs { belief, h: a.high.clone(), l: a.low.clone() },
    };
    let decision = decide(&table, &query, &LadderConfig::default())?;
    Ok(Report {
        text: format!("{decision}\n"),
        json: vec![decision.to_json()],
        indeterminate: decision.verdict == Verdict::Indeterminate,
    })
}

fn selfcompose(a: &SelfcomposeArgs, config: EnumConfig) -> Result<Report> {
    let program = load_program(&a.program)?;
    let composed = self_compose_cc(&program, &a.q, config)?;
    let result = check_assertion(&composed, config)?;
    if let Some(out) = &a.out {
        write(out, &composed.to_text())?;
    }
    let mut text = format!(
        "{} copies, {} input bits; assertion {}\n",
        composed.copies(),
        composed.program().input_bits(),
        if result.holds() { "holds: CC is within the bound" } else { "fails: CC exceeds the bound" }
    );
    let mut json = json!({
        "command": "selfcompose",
        "q": format_ratio(&a.q),
        "copies": composed.copies(),
        "inputBits": composed.program().input_bits(),
        "assertionHolds": result.holds(),
        "composed": composed.to_text(),
    });
    if let AssertionResult::Violated { high, low } = &result {
        text.push_str(&format!("first violation: high {high}, low \"{low}\"\n"));
        json["violation"] = json!({"high": high.to_string(), "low": low.to_string()});
        let table = io_table(&program, config)?;
        let cx = cc_counterexample(&table, &a.q)?;
        text.push_str(&format!("counterexample at low \"{}\":\n", cx.low));
        for t in &cx.traces {
            text.push_str(&format!("  h = {} -> o = {}\n", t.h, t.o));
        }
        text.push_str(&format!("  re-measured: {}\n", cx.measured));
        json["counterexample"] = cx.to_json();
    }
    if a.out.is_none() {
        text.push('\n');
        text.push_str(&composed.to_text());
    }
    Ok(Report { text, json: vec![json], indeterminate: false })
}

/// The first pair of high inputs with different outputs at the same low
/// input, if any: `(low index, h0, h1)`.
pub fn interference_witness(table: &IoTable, li: Option<usize>) -> Option<(usize, usize, usize)> {
    let lows: Vec<usize> = match li {
        Some(li) => vec![li],
        None => (0..table.n_low()).collect(),
    };
    lows.into_iter().find_map(|li| {
        let first = table.output(0, li);
        (1..table.n_high()).find(|&hi| table.output(hi, li) != first).map(|hi| (li, 0, hi))
    })
}

fn noninterference(a: &NoninterferenceArgs, config: EnumConfig) -> Result<Report> {
    let program = load_program(&a.program)?;
    let table = io_table(&program, config)?;
    let li = match &a.low {
        Some(l) => {
            if l.len() != table.low_space().width() {
                return Err(Error::WidthMismatch { expected: table.low_space().width(), got: l.len() });
            }
            Some(table.low_space().index_of(l.code()).ok_or_else(|| Error::PointNotInSpace(l.to_string()))?)
        }
        None => None,
    };
    let witness = interference_witness(&table, li);
    debug_assert!(li.is_some() || witness.is_none() == noninterferent(&table));
    let scope = match &a.low {
        Some(l) => format!("at low input \"{l}\""),
        None => "for all low inputs".to_string(),
    };
    let mut json = json!({
        "command": "noninterference",
        "low": a.low.as_ref().map(|l| l.to_string()),
        "noninterferent": witness.is_none(),
    });
    let text = match witness {
        None => format!("non-interferent {scope}\n"),
        Some((li, h0, h1)) => {
            let hs = table.high_space();
            let w = json!({
                "low": table.low_space().label(li),
                "h0": hs.label(h0),
                "o0": table.output_label(table.output(h0, li)),
                "h1": hs.label(h1),
                "o1": table.output_label(table.output(h1, li)),
            });
            json["witness"] = w.clone();
            format!(
                "interferent {scope}: at low \"{}\", h = {} gives {} but h = {} gives {}\n",
                w["low"].as_str().unwrap_or_default(),
                hs.label(h0),
                w["o0"].as_str().unwrap_or_default(),
                hs.label(h1),
                w["o1"].as_str().unwrap_or_default()
            )
        }
    };
    Ok(Report { text, json: vec![json], indeterminate: false })
}

fn gadget(a: &GadgetArgs) -> Result<Report> {
    let phi = load_formula(&a.formula)?;
    let program = gadget_for(a.route, &phi)?;
    let body = program.to_string();
    let text = match &a.out {
        Some(out) => {
            write(out, &body)?;
            format!("wrote the {} gadget to {}\n", a.route, out.display())
        }
        None => body.clone(),
    };
    let json = json!({"command": "gadget", "route": a.route.name(), "gadget": body});
    Ok(Report { text, json: vec![json], indeterminate: false })
}

fn majsat(a: &MajsatArgs, config: EnumConfig) -> Result<Report> {
    let phi = load_formula(&a.formula)?;
    let runs = a
        .route
        .0
        .iter()
        .map(|&r| decide_majsat_via(r, &phi, config))
        .collect::<Result<Vec<ReductionRun>>>()?;
    let text = runs.iter().map(ToString::to_string).collect();
    Ok(Report { text, json: runs.iter().map(ReductionRun::to_json).collect(), indeterminate: false })
}

fn dilute(a: &DiluteArgs, config: EnumConfig) -> Result<Report> {
    let traces = TraceSet::from_json_str(&read(&a.traces)?)?;
    let program = dilution_family(&traces, a.t)?;
    let table = io_table(&program, config)?;
    let me = me_uniform_closed(&table);
    let ge = ge_uniform_closed(&table);
    let low_bits = table.low_space().width();
    let me_bound = dilution_me_bound(traces.len(), low_bits);
    if let Some(out) = &a.out {
        write(out, &program.to_string())?;
    }
    let mut text = format!(
        "{} traces padded with {} low inputs\n{me}\n{ge}\nME bound: log({}) = {}\n",
        traces.len(),
        a.t,
        match &me_bound {
            crate::measures::Exact::Log2(r) => format_ratio(r),
            crate::measures::Exact::Rational(r) => format!("2^{}", format_ratio(r)),
        },
        format_float(me_bound.to_f64())
    );
    if a.out.is_none() {
        text.push('\n');
        text.push_str(&program.to_string());
    }
    let json = json!({
        "command": "dilute",
        "t": a.t,
        "traces": traces.len(),
        "lowBits": low_bits,
        "ME": me.to_json(),
        "GE": ge.to_json(),
        "meBound": me_bound.to_string(),
        "program": program.to_string(),
    });
    Ok(Report { text, json: vec![json], indeterminate: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_problem_is_a_usage_error() {
        let out = run(["qifbound", "bound", "x.bp", "--problem", "XX", "--q", "1"]);
        assert_eq!(out.code, EXIT_USAGE);
        let out = run(["qifbound", "bound", "x.bp", "--problem", "CC", "--q", "-1", "--json"]);
        assert_eq!(out.code, EXIT_USAGE);
        let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "usage");
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let out = run(["qifbound", "analyze", "/nonexistent/prog.bp"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stderr.contains("nonexistent"));
    }

    #[test]
    fn help_exits_cleanly() {
        let out = run(["qifbound", "--help"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("majsat"));
    }
}
