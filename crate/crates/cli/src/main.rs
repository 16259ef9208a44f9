//! Command-line front end. Prints one JSON document on stdout; summaries
//! go to stderr.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use qkwhitney::curves::{curve_neighborhood_schubert, incidence_neighborhood, neighborhood_table};
use qkwhitney::ktheory::{euler_char, fixed_points, schubert_class, schubert_classes, KClass, Variant};
use qkwhitney::presentation::{coulomb_equivalence, verify_classical, verify_presentation, Coefficients};
use qkwhitney::qk::{
    conjectural_product_fln, gw2, gw3_divisor, quantum_gram, quantum_k, verify_flag_reduction, verify_qk_whitney,
    wedge, wedge_quotient, Divisor, GWOracle, LineClass, Mutation,
};
use qkwhitney::report::Report;
use qkwhitney::{Degree, Error, FlagSpace, Permutation};

const GRAMMAR: &str = "\
flags:  --n N  [--ranks a,b,...]  [--qdeg D]  [--coeffs exact|seed:<u64>]  [--conditional]
        --ranks omitted means the full flag variety Fl(N)
classes (--sigma): factors joined by '*':
        1 | O_<w> | O^<w> | S<j> | detS<j> | wedge<l>S<j> | Q<j> | detQ<j> | wedge<l>Q<j>
        where Q<j> is S_{j+1}/S_j and <w> is one-line notation, e.g. O_132*detS2
divisors (--divisor): det:<j> | opp:<j> | qdet:<j>
degrees (--d): comma-separated, one entry per step, e.g. 0,1";

#[derive(Parser, Debug)]
#[command(name = "qkwhitney", version, about = "Equivariant quantum K-theory of partial flag varieties", after_help = GRAMMAR)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    #[arg(long, global = true, default_value_t = 3)]
    n: usize,
    /// Strictly increasing ranks below n; omit for the full flag variety.
    #[arg(long, global = true, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,
    /// Truncation: every q_j exponent is at most D.
    #[arg(long, global = true, default_value_t = 2)]
    qdeg: u32,
    #[arg(long, global = true, default_value = "seed:0", value_parser = parse_coeffs)]
    coeffs: Coefficients,
    /// Use the conjectural three-point formula on Fl(n); results are tagged conditional.
    #[arg(long, global = true)]
    conditional: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Localization of a Schubert class and its Euler characteristic.
    Schubert {
        #[arg(long)]
        w: String,
        #[arg(long, value_enum, default_value_t = VariantArg::B)]
        variant: VariantArg,
    },
    /// Label of the curve neighborhood of a Schubert variety.
    CurveNbhd {
        #[arg(long)]
        w: String,
        #[arg(long)]
        d: String,
    },
    /// Two-point or divisor three-point K-theoretic Gromov-Witten invariant.
    Gw {
        #[arg(long = "type", value_enum)]
        kind: GwKind,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        w: String,
        #[arg(long)]
        d: String,
        /// Line class for three-point invariants.
        #[arg(long)]
        divisor: Option<String>,
    },
    /// Quantum product of a line bundle with a class.
    Product {
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        sigma: String,
    },
    /// Run a verification sweep and print its report.
    Verify {
        #[arg(value_enum)]
        which: VerifyKind,
        /// Deliberately break one ingredient; the report should fail.
        #[arg(long, value_parser = parse_mutation)]
        mutation: Option<Mutation>,
    },
    /// Emit a table.
    Table {
        #[arg(long, value_enum, default_value_t = TableKind::CurveNbhd)]
        kind: TableKind,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    B,
    Opposite,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GwKind {
    #[value(name = "2pt")]
    Two,
    #[value(name = "3pt")]
    Three,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VerifyKind {
    Classical,
    Incidence,
    FlagReduction,
    Coulomb,
    Presentation,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TableKind {
    CurveNbhd,
    Gram,
    Products,
}

fn parse_coeffs(s: &str) -> Result<Coefficients, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            eprintln!("\n{GRAMMAR}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok((out, ok)) => {
            println!("{}", serde_json::to_string_pretty(&out).expect("json serializes"));
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}\n\n{GRAMMAR}");
            ExitCode::from(2)
        }
    }
}

fn space_of(g: &Global) -> Result<FlagSpace, Error> {
    if g.n < 2 {
        return Err(Error::InvalidSpace(format!("n={} is too small", g.n)));
    }
    match &g.ranks {
        Some(r) => FlagSpace::new(g.n, r.clone()),
        None => Ok(FlagSpace::full(g.n)),
    }
}

/// The incidence variety for `--n`, rejecting contradicting `--ranks`.
fn incidence_of(g: &Global) -> Result<FlagSpace, Error> {
    if g.n < 3 {
        return Err(Error::InvalidSpace(format!("Fl(1, n-1; n) needs n >= 3, got {}", g.n)));
    }
    let space = FlagSpace::incidence(g.n);
    match &g.ranks {
        Some(r) if *r != space.ranks => {
            Err(Error::InvalidSpace(format!("this check runs on Fl(1, n-1; n), not ranks {r:?}")))
        }
        _ => Ok(space),
    }
}

fn run(cli: &Cli) -> Result<(Value, bool), Error> {
    let g = &cli.global;
    let mut config = Map::new();
    config.insert("n".into(), json!(g.n));
    config.insert("ranks".into(), json!(g.ranks));
    config.insert("qdeg".into(), json!(g.qdeg));
    config.insert("coeffs".into(), json!(g.coeffs.to_string()));
    config.insert("conditional".into(), json!(g.conditional));
    let mut body = Map::new();
    let mut ok = true;
    match &cli.command {
        Command::Schubert { w, variant } => {
            config.insert("command".into(), json!("schubert"));
            config.insert("w".into(), json!(w));
            let space = space_of(g)?;
            let w = Permutation::parse(w)?;
            let variant = match variant {
                VariantArg::B => Variant::B,
                VariantArg::Opposite => Variant::Opposite,
            };
            config.insert("variant".into(), json!(format!("{variant:?}").to_lowercase()));
            let c = schubert_class(&space, &w, variant)?;
            body.insert("localization".into(), c.to_json());
            body.insert("euler_char".into(), json!(euler_char(&c).to_string()));
        }
        Command::CurveNbhd { w, d } => {
            config.insert("command".into(), json!("curve-nbhd"));
            config.insert("w".into(), json!(w));
            config.insert("d".into(), json!(d));
            let space = space_of(g)?;
            let (w, d) = (Permutation::parse(w)?, Degree::parse(d)?);
            let label = curve_neighborhood_schubert(&space, &w, &d)?;
            body.insert("label".into(), json!(label.one_line()));
            if space.is_incidence() {
                body.insert("closed_form".into(), json!(incidence_neighborhood(space.n(), &w, &d)?.one_line()));
            }
        }
        Command::Gw { kind, sigma, w, d, divisor } => {
            config.insert("command".into(), json!("gw"));
            config.insert(
                "type".into(),
                json!(match kind {
                    GwKind::Two => "2pt",
                    GwKind::Three => "3pt",
                }),
            );
            config.insert("sigma".into(), json!(sigma));
            config.insert("w".into(), json!(w));
            config.insert("d".into(), json!(d));
            config.insert("divisor".into(), json!(divisor));
            let space = space_of(g)?;
            let class = parse_class(&space, sigma)?;
            let (w, d) = (Permutation::parse(w)?, Degree::parse(d)?);
            let value = match kind {
                GwKind::Two => gw2(&class, &w, &d)?,
                GwKind::Three => {
                    let text = divisor.as_deref().ok_or_else(|| Error::Parse("3pt needs --divisor".into()))?;
                    let oracle = GWOracle::for_space(&space, g.conditional)?;
                    body.insert("oracle".into(), json!(oracle.mode()));
                    body.insert("conditional".into(), json!(oracle.is_conditional()));
                    match parse_divisor(text)? {
                        DivisorArg::Line(dv) => gw3_divisor(&oracle, &LineClass::from(dv), &class, &w, &d)?,
                        DivisorArg::QuotientDet(_) => return Err(Error::Parse("3pt takes det:<j> or opp:<j>".into())),
                    }
                }
            };
            body.insert("value".into(), json!(value.to_string()));
        }
        Command::Product { divisor, sigma } => {
            config.insert("command".into(), json!("product"));
            config.insert("divisor".into(), json!(divisor));
            config.insert("sigma".into(), json!(sigma));
            let space = space_of(g)?;
            let class = parse_class(&space, sigma)?;
            let oracle = GWOracle::for_space(&space, g.conditional)?;
            let engine = quantum_k(&oracle, g.qdeg)?;
            let x = engine.element(&class);
            let product = match parse_divisor(divisor)? {
                DivisorArg::Line(Divisor::Det(j)) => engine.det_product(j, &x)?,
                DivisorArg::Line(dv) => engine.divisor_product(dv, &x)?,
                DivisorArg::QuotientDet(j) => engine.quotient_det_product(j, &x)?,
            };
            body.insert("oracle".into(), json!(oracle.mode()));
            body.insert("conditional".into(), json!(engine.is_conditional()));
            body.insert("product".into(), product.to_json());
        }
        Command::Verify { which, mutation } => {
            let name = which.to_possible_value().unwrap().get_name().to_string();
            config.insert("command".into(), json!(format!("verify {name}")));
            config.insert("mutation".into(), json!(mutation.map(|m| m.to_string())));
            let modes = coefficient_modes(g.coeffs);
            let report = match which {
                VerifyKind::Classical => verify_classical(&space_of(g)?, &modes)?,
                VerifyKind::Incidence => verify_qk_whitney(&incidence_of(g)?, g.qdeg, *mutation)?,
                VerifyKind::FlagReduction => verify_flag_reduction(g.n, g.qdeg, *mutation)?,
                VerifyKind::Coulomb => coulomb_equivalence(&incidence_of(g)?, g.qdeg, *mutation)?,
                VerifyKind::Presentation => verify_presentation(&incidence_of(g)?, g.qdeg, &modes)?,
            };
            return Ok(emit_report(report, config));
        }
        Command::Table { kind } => {
            let name = kind.to_possible_value().unwrap().get_name().to_string();
            config.insert("command".into(), json!("table"));
            config.insert("kind".into(), json!(name));
            let space = space_of(g)?;
            match kind {
                TableKind::CurveNbhd => {
                    let rows: Vec<Value> = neighborhood_table(&space, g.qdeg)
                        .iter()
                        .map(|r| json!({ "w": r.w.one_line(), "d": r.d.entries(), "label": r.label.one_line() }))
                        .collect();
                    body.insert("rows".into(), json!(rows));
                }
                TableKind::Gram => {
                    let points = fixed_points(&space).points();
                    let gram = quantum_gram(&space, g.qdeg);
                    let rows: Vec<Value> = points
                        .iter()
                        .zip(&gram)
                        .map(|(w, row)| {
                            let entries: Vec<Value> = points
                                .iter()
                                .zip(row)
                                .filter(|(_, s)| !s.is_zero())
                                .map(|(v, s)| json!({ "v": v.one_line(), "series": s.to_string() }))
                                .collect();
                            json!({ "w": w.one_line(), "entries": entries })
                        })
                        .collect();
                    body.insert("pairing".into(), json!("((O_w, O^v))"));
                    body.insert("rows".into(), json!(rows));
                }
                TableKind::Products => {
                    if space.is_full() && g.conditional {
                        let (report, table) = conjectural_product_fln(g.n, g.qdeg)?;
                        ok = report.passed();
                        eprintln!("{}", summary(&report));
                        body.insert("report".into(), report.to_json());
                        body.insert("rows".into(), json!(table.iter().map(|r| r.to_json()).collect::<Vec<_>>()));
                    } else {
                        let oracle = GWOracle::for_space(&space, g.conditional)?;
                        let engine = quantum_k(&oracle, g.qdeg)?;
                        let mut rows = Vec::new();
                        for i in 1..=space.k() {
                            for (w, o) in fixed_points(&space).points().iter().zip(schubert_classes(&space, Variant::B))
                            {
                                let p = engine.det_product(i, &engine.element(o))?;
                                rows.push(json!({ "i": i, "w": w.one_line(), "product": p.to_json() }));
                            }
                        }
                        body.insert("oracle".into(), json!(oracle.mode()));
                        body.insert("conditional".into(), json!(engine.is_conditional()));
                        body.insert("rows".into(), json!(rows));
                    }
                }
            }
        }
    }
    body.insert("config".into(), Value::Object(config));
    Ok((Value::Object(body), ok))
}

/// Two seeds for the randomized mode, so a lucky specialization is caught.
fn coefficient_modes(c: Coefficients) -> Vec<Coefficients> {
    match c {
        Coefficients::Exact => vec![c],
        Coefficients::Seed(s) => vec![c, Coefficients::Seed(s.wrapping_add(1))],
    }
}

fn emit_report(mut report: Report, mut config: Map<String, Value>) -> (Value, bool) {
    if let Value::Object(extra) = std::mem::take(&mut report.config) {
        config.extend(extra);
    }
    report.config = Value::Object(config);
    eprintln!("{}", summary(&report));
    let ok = report.passed();
    (report.to_json(), ok)
}

fn summary(r: &Report) -> String {
    let status = serde_json::to_value(r.status).unwrap();
    format!("{}: {} ({} checked, {} witnesses)", r.check, status.as_str().unwrap(), r.checked, r.witnesses.len())
}

enum DivisorArg {
    Line(Divisor),
    QuotientDet(usize),
}

fn parse_divisor(s: &str) -> Result<DivisorArg, Error> {
    let bad = || Error::Parse(format!("bad divisor {s:?}; expected det:<j>, opp:<j> or qdet:<j>"));
    let (kind, j) = s.split_once(':').ok_or_else(bad)?;
    let j: usize = j.trim().parse().map_err(|_| bad())?;
    match kind.trim() {
        "det" => Ok(DivisorArg::Line(Divisor::Det(j))),
        "opp" => Ok(DivisorArg::Line(Divisor::Opposite(j))),
        "qdet" => Ok(DivisorArg::QuotientDet(j)),
        _ => Err(bad()),
    }
}

/// A product of Schubert classes and exterior powers of tautological
/// bundles, written as in the flag grammar.
fn parse_class(space: &FlagSpace, s: &str) -> Result<KClass, Error> {
    let mut out = KClass::one(space);
    for factor in s.split('*') {
        out = out.mul(&parse_factor(space, factor.trim())?);
    }
    Ok(out)
}

fn parse_factor(space: &FlagSpace, f: &str) -> Result<KClass, Error> {
    let bad = || Error::Parse(format!("bad class factor {f:?}"));
    let index = |t: &str| -> Result<usize, Error> { t.parse().map_err(|_| bad()) };
    let k = space.k();
    let sub = |j: usize, l: usize| -> Result<KClass, Error> {
        if j > k + 1 {
            return Err(Error::OutOfRange(format!("S{j} on {space}")));
        }
        Ok(wedge(space, j, l))
    };
    let quot = |j: usize, l: usize| -> Result<KClass, Error> {
        if j > k {
            return Err(Error::OutOfRange(format!("Q{j} on {space}")));
        }
        Ok(wedge_quotient(space, j, l))
    };
    if f == "1" {
        return Ok(KClass::one(space));
    }
    if let Some(w) = f.strip_prefix("O_") {
        return schubert_class(space, &Permutation::parse(w)?, Variant::B);
    }
    if let Some(w) = f.strip_prefix("O^") {
        return schubert_class(space, &Permutation::parse(w)?, Variant::Opposite);
    }
    if let Some(j) = f.strip_prefix("detS") {
        let j = index(j)?;
        return sub(j, space.rank(j.min(k + 1)));
    }
    if let Some(j) = f.strip_prefix("detQ") {
        let j = index(j)?;
        return quot(j, space.rank((j + 1).min(k + 1)) - space.rank(j.min(k + 1)));
    }
    if let Some(rest) = f.strip_prefix("wedge") {
        if let Some((l, j)) = rest.split_once('S') {
            return sub(index(j)?, index(l)?);
        }
        if let Some((l, j)) = rest.split_once('Q') {
            return quot(index(j)?, index(l)?);
        }
        return Err(bad());
    }
    if let Some(j) = f.strip_prefix('S') {
        return sub(index(j)?, 1);
    }
    if let Some(j) = f.strip_prefix('Q') {
        return quot(index(j)?, 1);
    }
    Err(bad())
}
