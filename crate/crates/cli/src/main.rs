//! `orthorep`: greedegree, faithful orthogonal representations, garden
//! certificates, formula-graph reductions and matrix property checks.
//!
//! Every JSON report carries `"schema": "orthorep/1"` and the effective
//! configuration, and is byte-identical across runs with the same inputs.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use orthorep::garden::{symbolic_columns, symbolic_inner, verify_unique_monomial, DEFAULT_MONOMIAL_BUDGET, DEFAULT_SEARCH_BUDGET};
use orthorep::greedy::greedegree;
use orthorep::io::{parse_graph, to_graph6};
use orthorep::linalg::{nullity, psd_check, rat, RationalMatrix};
use orthorep::lss::{attempt_seed, detect_success, main_theorem_witness, uniform_lss, Chooser, LssRun, SuccessReport, DEFAULT_BOUND, MAX_RESEEDS};
use orthorep::props::{has_sap, is_upper_zero_generic, mpu_witness_check, pattern_check, PatternVerdict};
use orthorep::reduction::{
    build_formula_graph, parse_dimacs, parse_ratio, reduction_equivalence_check, verify_dichotomy, Approximation,
    EQUIVALENCE_VERTEX_GUARD,
};
use orthorep::{GardenError, Graph, LssError, Ordering};

const SCHEMA: &str = "orthorep/1";
const DEFAULT_SEED: u64 = 1;
/// Largest atom count for which `reduce --verify` runs the equivalence check.
const EQUIVALENCE_ATOM_GUARD: usize = 24;
/// Polynomials with more terms are summarised rather than printed.
const POLY_PRINT_LIMIT: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "orthorep", version, about = "Faithful orthogonal representations along greedy orderings")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for the coefficient grid.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Coefficients are drawn from [-bound, bound].
    #[arg(long, global = true, default_value_t = DEFAULT_BOUND)]
    bound: u64,
    /// Override the ambient dimension.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Cap on the terms of any symbolic polynomial.
    #[arg(long, global = true, default_value_t = DEFAULT_MONOMIAL_BUDGET)]
    budget_monomials: usize,
    /// Cap on search nodes when looking for a leading term.
    #[arg(long, global = true, default_value_t = DEFAULT_SEARCH_BUDGET)]
    budget_index: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Run the optional cross-checks.
    #[arg(long, global = true)]
    verify: bool,
    /// Refuse to fall back on a default seed.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Largest final degree over all greedy orderings.
    Greedegree {
        /// Graph file (edge list or graph6); `-` reads stdin.
        graph: PathBuf,
    },
    /// Build a faithful orthogonal representation along a greedy ordering.
    Represent { graph: PathBuf },
    /// Leading monomial of one Gram entry, found from its garden.
    Garden {
        graph: PathBuf,
        /// 1-based vertex ordering, comma or space separated; defaults to an optimal greedy ordering.
        #[arg(long)]
        order: Option<String>,
        /// 1-based position of the first vector.
        #[arg(long)]
        i: usize,
        /// 1-based position of the second vector.
        #[arg(long)]
        j: usize,
    },
    /// Build the formula graph of a DIMACS CNF.
    Reduce {
        cnf: PathBuf,
        /// Approximation factor F ≥ 1 (ε = 1/(F+1)).
        #[arg(long, conflicts_with = "fraction")]
        factor: Option<String>,
        /// Approximation fraction ε in (0, 1/2].
        #[arg(long)]
        fraction: Option<String>,
    },
    /// Check a symmetric matrix against a graph.
    CheckMatrix {
        matrix: PathBuf,
        graph: PathBuf,
        /// 1-based arrangement for the upper-zero test; defaults to the identity.
        #[arg(long)]
        order: Option<String>,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl ToString) -> Self {
        Self { code: 1, msg: msg.to_string() }
    }
}

impl From<GardenError> for Failure {
    fn from(e: GardenError) -> Self {
        let code = if matches!(e, GardenError::Budget { .. }) { 4 } else { 1 };
        Self { code, msg: e.to_string() }
    }
}

impl From<LssError> for Failure {
    fn from(e: LssError) -> Self {
        let code = if matches!(e, LssError::Degenerate { .. }) { 3 } else { 1 };
        Self { code, msg: e.to_string() }
    }
}

/// A finished report: JSON body, text rendering and whether the verdict passed.
struct Report {
    body: Value,
    text: String,
    pass: bool,
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    parse_graph(&read_input(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_order(text: Option<&str>, g: &Graph) -> Result<Option<Ordering>, Failure> {
    let Some(text) = text else { return Ok(None) };
    let ord = Ordering::parse_one_based(text).map_err(Failure::input)?;
    ord.check_for(g).map_err(Failure::input)?;
    Ok(Some(ord))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialise")
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_greedegree(g: &Graph) -> Result<Report, Failure> {
    let r = greedegree(g).map_err(Failure::input)?;
    let body = json!({
        "n": g.n(),
        "greedegree": r.value,
        "witness": r.witness.one_based(),
        "explored": r.explored,
    });
    let text = format!(
        "greedegree: {}\nwitness ordering: {}\nstates explored: {}\n",
        r.value,
        join(&r.witness.one_based()),
        r.explored
    );
    Ok(Report { body, text, pass: true })
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// Run at a fixed dimension, reseeding like the default pipeline; the last
/// run is returned even when it never succeeds.
fn run_at_dim(g: &Graph, ord: &Ordering, d: usize, seed: u64, bound: u64) -> Result<(LssRun, SuccessReport, PatternVerdict, usize), Failure> {
    let mut last = None;
    for a in 0..=MAX_RESEEDS {
        let run = uniform_lss(g, ord, d, Chooser::Grid { seed: attempt_seed(seed, a), bound })?;
        let report = detect_success(&run);
        let pattern = pattern_check(&run.t, g).map_err(Failure::input)?;
        let done = report.strong && pattern.is_faithful;
        last = Some((run, report, pattern, a + 1));
        if done {
            break;
        }
    }
    Ok(last.expect("at least one attempt"))
}

fn cmd_represent(g: &Graph, c: &Common, seed: u64) -> Result<Report, Failure> {
    let gd = greedegree(g).map_err(Failure::input)?;
    let (run, report, pattern, attempts) = match c.dim {
        None => {
            let w = main_theorem_witness(g, seed, c.bound)?;
            (w.run, w.report, w.pattern, w.attempts)
        }
        Some(d) => run_at_dim(g, &gd.witness, d, seed, c.bound)?,
    };
    let upper = is_upper_zero_generic(&run.t, &run.ordering).map_err(Failure::input)?;
    let sap = has_sap(&run.t).map_err(Failure::input)?;
    let psd = psd_check(&run.t).map_err(Failure::input)?.is_psd();
    let codim = nullity(&run.t);
    let pass = report.strong && pattern.is_faithful && upper.generic && sap.has_sap && psd;
    // pairs with a nonzero Gram entry, as a graph on the same vertices
    let support = Graph::from_edges(
        g.n(),
        (0..g.n()).flat_map(|u| (u + 1..g.n()).map(move |v| (u, v))).filter(|&(u, v)| run.t[(u, v)] != rat(0)),
    )
    .expect("vertex pairs are in range");
    let body = json!({
        "n": g.n(),
        "greedegree": gd.value,
        "ordering": run.ordering.one_based(),
        "d": run.d,
        "seed": run.seed,
        "attempts": attempts,
        "R": run.r.to_json(),
        "T": run.t.to_json(),
        "success": to_value(&report),
        "pattern": to_value(&pattern),
        "psd": psd,
        "upper_zero": to_value(&upper),
        "sap": { "has_sap": sap.has_sap, "x_nullity": sap.x_nullity },
        "nullity": codim,
        "support_graph6": to_graph6(&support),
        "pass": pass,
    });
    let text = format!(
        "ordering: {}\nd: {}\nattempts: {}\nR:\n{}T:\n{}weak: {}\nstrong: {}\nfaithful: {}\npsd: {}\nupper-zero generic: {}\nsap: {}\nnullity: {}\nverdict: {}\n",
        join(&run.ordering.one_based()),
        run.d,
        attempts,
        run.r.to_text(),
        run.t.to_text(),
        yes(report.weak),
        yes(report.strong),
        yes(pattern.is_faithful),
        yes(psd),
        yes(upper.generic),
        yes(sap.has_sap),
        codim,
        if pass { "pass" } else { "fail" },
    );
    Ok(Report { body, text, pass })
}

fn cmd_garden(g: &Graph, c: &Common, order: Option<&str>, i: usize, j: usize) -> Result<Report, Failure> {
    let n = g.n();
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Failure::input(format!("positions must lie in 1..={n}")));
    }
    let ord = match load_order(order, g)? {
        Some(o) => o,
        None => greedegree(g).map_err(Failure::input)?.witness,
    };
    let (i, j) = ((i - 1).min(j - 1), (i - 1).max(j - 1));
    let d = c.dim.unwrap_or_else(|| (0..n).map(|p| ord.kk(g, p)).max().unwrap_or(0) + 1);
    let r = verify_unique_monomial(g, &ord, i, j, d, c.budget_index)?;
    // full expansion is optional; its budget only limits what is printed
    let poly = symbolic_columns(g, &ord, d, c.budget_monomials)
        .and_then(|cols| symbolic_inner(&cols[i], &cols[j], c.budget_monomials))
        .ok();
    let poly_json = match &poly {
        Some(p) if p.len() <= POLY_PRINT_LIMIT => json!({ "terms": p.len(), "polynomial": p.to_string() }),
        Some(p) => json!({ "terms": p.len(), "polynomial": null }),
        None => json!({ "terms": null, "polynomial": null }),
    };
    // For greedy orderings related pairs must verify and the others vanish.
    let pass = !r.greedy || if r.related { r.verified } else { r.identically_zero };
    let leading_text = match &r.leading {
        None => "identically zero".to_string(),
        Some(l) => format!("{} * {}", l.coeff, l.monomial),
    };
    let predicted_text = match &r.predicted {
        None => "none".to_string(),
        Some(p) => format!("{} * {}", p.sign, p.monomial),
    };
    let poly_text = match &poly {
        Some(p) if p.len() <= POLY_PRINT_LIMIT => format!("{p}"),
        Some(p) => format!("{} terms", p.len()),
        None => "not expanded (monomial budget)".to_string(),
    };
    let body = json!({
        "n": n,
        "ordering": ord.one_based(),
        "report": to_value(&r),
        "identically_zero": r.identically_zero,
        "expansion": poly_json,
        "pass": pass,
    });
    let text = format!(
        "ordering: {}\npair: ({}, {})\nd: {}\ngreedy: {}\nadjacent or equal: {}\nleading: {}\npredicted: {}\nmatch: {}\npolynomial: {}\nverdict: {}\n",
        join(&ord.one_based()),
        i + 1,
        j + 1,
        d,
        yes(r.greedy),
        yes(r.related),
        leading_text,
        predicted_text,
        yes(r.verified),
        poly_text,
        if pass { "pass" } else { "fail" },
    );
    Ok(Report { body, text, pass })
}

fn cmd_reduce(text: &str, c: &Common, factor: Option<&str>, fraction: Option<&str>) -> Result<Report, Failure> {
    let phi = parse_dimacs(text).map_err(Failure::input)?;
    let mode = match (factor, fraction) {
        (_, Some(e)) => Approximation::Fraction(parse_ratio(e).map_err(Failure::input)?),
        (Some(f), None) => Approximation::Factor(parse_ratio(f).map_err(Failure::input)?),
        (None, None) => Approximation::Factor(rat(1)),
    };
    let bundle = build_formula_graph(&phi, &mode).map_err(Failure::input)?;
    let mut body = json!({ "bundle": to_value(&bundle) });
    let mut text = format!(
        "{}\nn: {}  t: {}  k: {}  f: {}  m: {}  delta: {}  Delta: {}  epsilon: {}\n",
        bundle.graph6, bundle.n, bundle.t, bundle.k, bundle.f, bundle.m, bundle.delta, bundle.upper, bundle.epsilon
    );
    let mut pass = true;
    if c.verify {
        let dich = verify_dichotomy(&bundle);
        pass &= dich.holds;
        text.push_str(&format!("dichotomy: {}\n", if dich.holds { "holds" } else { "fails" }));
        body["dichotomy"] = to_value(&dich);
        if bundle.n <= EQUIVALENCE_VERTEX_GUARD && phi.t <= EQUIVALENCE_ATOM_GUARD {
            let eq = reduction_equivalence_check(&phi, &bundle).map_err(Failure::input)?;
            pass &= eq.agree;
            text.push_str(&format!(
                "satisfiable: {}\npair avoidable: {}\nequivalence: {}\n",
                yes(eq.satisfiable),
                yes(eq.pair_avoidable),
                if eq.agree { "agree" } else { "disagree" }
            ));
            body["equivalence"] = to_value(&eq);
        } else {
            text.push_str("equivalence: skipped (instance too large)\n");
            body["equivalence"] = Value::Null;
        }
    }
    body["pass"] = json!(pass);
    Ok(Report { body, text, pass })
}

fn cmd_check_matrix(a: &RationalMatrix, g: &Graph, order: Option<&str>) -> Result<Report, Failure> {
    if a.rows() != g.n() || a.cols() != g.n() {
        return Err(Failure::input(format!("matrix is {}x{} but the graph has {} vertices", a.rows(), a.cols(), g.n())));
    }
    a.ensure_symmetric().map_err(Failure::input)?;
    let ord = load_order(order, g)?.unwrap_or_else(|| Ordering::identity(g.n()));
    let psd = psd_check(a).map_err(Failure::input)?;
    let pattern = pattern_check(a, g).map_err(Failure::input)?;
    let upper = is_upper_zero_generic(a, &ord).map_err(Failure::input)?;
    let sap = has_sap(a).map_err(Failure::input)?;
    let mpu = mpu_witness_check(a, g, &ord);
    let body = json!({
        "n": g.n(),
        "ordering": ord.one_based(),
        "psd": to_value(&psd),
        "pattern": to_value(&pattern),
        "upper_zero": to_value(&upper),
        "sap": to_value(&sap),
        "witness": to_value(&mpu),
        "pass": mpu.passed,
    });
    let text = format!(
        "psd: {}\northogonal pattern: {}\nfaithful: {}\nupper-zero generic: {}\nsap: {}\nnullity: {}\nverdict: {}\n",
        yes(psd.is_psd()),
        yes(pattern.is_orthogonal_rep),
        yes(pattern.is_faithful),
        yes(upper.generic),
        yes(sap.has_sap),
        mpu.nullity,
        if mpu.passed { "pass" } else { "fail" },
    );
    Ok(Report { body, text, pass: mpu.passed })
}

fn config(cli: &Cli, seed: Option<u64>) -> Value {
    let c = &cli.common;
    let (name, inputs): (&str, Vec<&PathBuf>) = match &cli.command {
        Command::Greedegree { graph } => ("greedegree", vec![graph]),
        Command::Represent { graph } => ("represent", vec![graph]),
        Command::Garden { graph, .. } => ("garden", vec![graph]),
        Command::Reduce { cnf, .. } => ("reduce", vec![cnf]),
        Command::CheckMatrix { matrix, graph, .. } => ("check-matrix", vec![matrix, graph]),
    };
    let mut cfg = json!({
        "subcommand": name,
        "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "seed": seed,
        "bound": c.bound,
        "dim": c.dim,
        "budget_monomials": c.budget_monomials,
        "budget_index": c.budget_index,
        "format": c.format,
        "verify": c.verify,
        "strict": c.strict,
    });
    match &cli.command {
        Command::Garden { order, i, j, .. } => {
            cfg["order"] = json!(order);
            cfg["i"] = json!(i);
            cfg["j"] = json!(j);
        }
        Command::Reduce { factor, fraction, .. } => {
            cfg["factor"] = json!(factor);
            cfg["fraction"] = json!(fraction);
        }
        Command::CheckMatrix { order, .. } => cfg["order"] = json!(order),
        _ => {}
    }
    cfg
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Greedegree { graph } => cmd_greedegree(&load_graph(graph)?),
        Command::Represent { graph } => {
            let g = load_graph(graph)?;
            let seed = c.seed.unwrap_or(DEFAULT_SEED);
            cmd_represent(&g, c, seed)
        }
        Command::Garden { graph, order, i, j } => cmd_garden(&load_graph(graph)?, c, order.as_deref(), *i, *j),
        Command::Reduce { cnf, factor, fraction } => cmd_reduce(&read_input(cnf)?, c, factor.as_deref(), fraction.as_deref()),
        Command::CheckMatrix { matrix, graph, order } => {
            let a = RationalMatrix::from_text(&read_input(matrix)?).map_err(|e| Failure::input(format!("{}: {e}", matrix.display())))?;
            cmd_check_matrix(&a, &load_graph(graph)?, order.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.common.strict && cli.common.seed.is_none() && matches!(cli.command, Command::Represent { .. }) {
        eprintln!("error: --strict requires an explicit --seed");
        return ExitCode::from(1);
    }
    let seed = match cli.command {
        Command::Represent { .. } => Some(cli.common.seed.unwrap_or(DEFAULT_SEED)),
        _ => cli.common.seed,
    };
    match run(&cli) {
        Ok(report) => {
            match cli.common.format {
                Format::Json => {
                    let mut out = json!({ "schema": SCHEMA, "config": config(&cli, seed) });
                    if let (Value::Object(out), Value::Object(body)) = (&mut out, report.body) {
                        out.extend(body);
                    }
                    println!("{}", serde_json::to_string_pretty(&out).expect("reports serialise"));
                }
                Format::Text => print!("{}", report.text),
            }
            ExitCode::from(if report.pass { 0 } else { 2 })
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
