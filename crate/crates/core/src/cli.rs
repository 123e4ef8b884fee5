//! Command-line surface. Exit codes distinguish mathematical impossibility
//! from malformed input: 0 on success, 1 on domain errors (singular or
//! indefinite systems, invalid germs), 2 on parse errors. Reports are
//! deterministic: identical inputs produce byte-identical output.

use crate::blowup::GermConfig;
use crate::classify::{classify, thm_consistency, Witness};
use crate::discrepancy::{discrepancies, mld_from_log_resolution, variety_gap, GoodLc};
use crate::family::{self, FamilyInvariants, ScanSpec};
use crate::germ::{
    cs_index, eigen, is_invariant, seidenberg_reduce, tang, z_index, LambdaKind, ReductionNode,
    SingKind,
};
use crate::io::{parse_germ, parse_graph, parse_poly, GraphFile};
use crate::rat::{fmt_rat, parse_rat, Rat};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "folsurf",
    about = "Exact-arithmetic toolkit for foliated surface singularity germs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a dual graph into the seven singularity types
    Classify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Discrepancies, log discrepancies, status, and pld for a germ graph
    Discrep {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Append decimal approximations to the table
        #[arg(long)]
        approx: bool,
    },
    /// Singularity status only
    Status {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Partial log discrepancy only
    Pld {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Foliation-vs-variety gap coefficients
    Gap {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Minimal log discrepancy via the update-rule search
    Mld {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value = "1/4")]
        epsilon: String,
        #[arg(long)]
        json: bool,
    },
    /// Closed-form chain-family evaluation over a range of middle lengths
    Family {
        #[arg(long)]
        m1: i64,
        #[arg(long)]
        q1: i64,
        #[arg(long)]
        m2: i64,
        #[arg(long)]
        q2: i64,
        #[arg(long = "alphaL")]
        alpha_l: Option<String>,
        #[arg(long = "alphaR")]
        alpha_r: Option<String>,
        /// Inclusive range A..B for the middle length n
        #[arg(long)]
        n: String,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        json: bool,
    },
    /// Grid scan of partial log discrepancies for stabilization evidence
    AccScan {
        /// JSON scan specification; the standard grid when omitted
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        json: bool,
        /// Worker threads for the grid
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Local vector-field germ computations
    Germ {
        action: GermAction,
        file: PathBuf,
        /// Curve germ polynomial, e.g. "y - x^2"
        #[arg(long)]
        curve: Option<String>,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long)]
        json: bool,
    },
    /// Cross-module oracle suites with a seed for the randomized parts
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Smaller sizes for a fast smoke run
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GermAction {
    Indices,
    Tang,
    Reduce,
}

pub enum CliError {
    Parse(String),
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Domain(m) => m,
        }
    }
}

fn rj(r: &Rat) -> Value {
    Value::String(fmt_rat(r))
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &PathBuf) -> Result<(GraphFile, Value), CliError> {
    let text = read_file(path)?;
    let file = parse_graph(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    let digest = json!({"path": path.display().to_string(), "bytes": text.len()});
    Ok((file, digest))
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

fn report(command: &str, input: Value, result: Value) -> Value {
    json!({"command": command, "input": input, "result": result})
}

fn emit(json_flag: bool, value: &Value, human: String) -> String {
    if json_flag {
        serde_json::to_string_pretty(value).expect("serializable") + "\n"
    } else {
        human
    }
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::None => Value::Null,
        Witness::FChainOrder(o) => json!({"chain_order": o}),
        Witness::BadTail(t) => json!({"bad_tail": t}),
        Witness::ChainOrder(o) => json!({"chain_order": o}),
        Witness::DihedralTail { tail, chain } => json!({"bad_tail": tail, "chain": chain}),
        Witness::Cycle(c) => json!({"cycle": c}),
        Witness::NodalCurve(c) => json!({"nodal_curve": c}),
        Witness::TransverseCurve(c) => json!({"transverse_curve": c}),
        Witness::StarCenter(c) => json!({"center": c}),
    }
}

fn run_classify(file: &PathBuf, json_flag: bool) -> Result<String, CliError> {
    let (gf, digest) = load_graph(file)?;
    let c = classify(&gf.graph).map_err(domain)?;
    let result = json!({
        "type": c.type_tag.as_str(),
        "witness": witness_json(&c.witness),
    });
    let human = format!("{}\n", c.type_tag.as_str());
    Ok(emit(json_flag, &report("classify", digest, result), human))
}

fn good_lc_str(g: GoodLc) -> &'static str {
    match g {
        GoodLc::Yes => "yes",
        GoodLc::No => "no",
        GoodLc::NotApplicable => "n/a",
    }
}

fn approx_str(r: &Rat) -> String {
    use num::ToPrimitive;
    let v = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    format!("{v:.6}")
}

fn run_discrep(file: &PathBuf, json_flag: bool, approx: bool) -> Result<String, CliError> {
    let (gf, digest) = load_graph(file)?;
    let r = discrepancies(&gf.graph).map_err(domain)?;
    let consistency = classify(&gf.graph)
        .ok()
        .map(|c| thm_consistency(&c, &r))
        .unwrap_or_default();
    let result = json!({
        "a": r.a.iter().map(|(k, v)| (k.clone(), rj(v))).collect::<serde_json::Map<_,_>>(),
        "log_disc": r.log_disc.iter().map(|(k, v)| (k.clone(), rj(v))).collect::<serde_json::Map<_,_>>(),
        "status": r.status.as_str(),
        "pld": rj(&r.pld),
        "pld_by_convention": r.pld_by_convention,
        "unfiltered_min": rj(&r.unfiltered_min),
        "good_lc": good_lc_str(r.good_lc),
        "consistency": consistency,
    });
    let mut human = format!("{:<8} {:>12} {:>12}\n", "curve", "a", "log disc");
    for (id, a) in &r.a {
        let mut line = format!(
            "{:<8} {:>12} {:>12}",
            id,
            fmt_rat(a),
            fmt_rat(&r.log_disc[id])
        );
        if approx {
            line.push_str(&format!(" {:>12}", approx_str(a)));
        }
        line.push('\n');
        human.push_str(&line);
    }
    human.push_str(&format!(
        "status {}  pld {}{}  unfiltered-min {}  good-lc {}\n",
        r.status,
        fmt_rat(&r.pld),
        if r.pld_by_convention {
            " (empty-min convention)"
        } else {
            ""
        },
        fmt_rat(&r.unfiltered_min),
        good_lc_str(r.good_lc),
    ));
    Ok(emit(json_flag, &report("discrep", digest, result), human))
}

fn run_status(file: &PathBuf, json_flag: bool) -> Result<String, CliError> {
    let (gf, digest) = load_graph(file)?;
    let r = discrepancies(&gf.graph).map_err(domain)?;
    let result = json!({"status": r.status.as_str()});
    Ok(emit(
        json_flag,
        &report("status", digest, result),
        format!("{}\n", r.status),
    ))
}

fn run_pld(file: &PathBuf, json_flag: bool) -> Result<String, CliError> {
    let (gf, digest) = load_graph(file)?;
    let r = discrepancies(&gf.graph).map_err(domain)?;
    let result = json!({
        "pld": rj(&r.pld),
        "pld_by_convention": r.pld_by_convention,
        "unfiltered_min": rj(&r.unfiltered_min),
    });
    Ok(emit(
        json_flag,
        &report("pld", digest, result),
        format!("{}\n", fmt_rat(&r.pld)),
    ))
}

fn run_gap(file: &PathBuf, json_flag: bool) -> Result<String, CliError> {
    let (gf, digest) = load_graph(file)?;
    let gap = variety_gap(&gf.graph).map_err(domain)?;
    let result = json!({
        "b": gap.b.iter().map(|(k, v)| (k.clone(), rj(v))).collect::<serde_json::Map<_,_>>(),
    });
    let mut human = String::new();
    for (id, b) in &gap.b {
        human.push_str(&format!("{:<8} {}\n", id, fmt_rat(b)));
    }
    Ok(emit(json_flag, &report("gap", digest, result), human))
}

fn run_mld(file: &PathBuf, depth: u32, epsilon: &str, json_flag: bool) -> Result<String, CliError> {
    let (gf, digest) = load_graph(file)?;
    let eps = parse_rat(epsilon)
        .filter(|e| e > &Rat::from_integer(0.into()))
        .ok_or_else(|| CliError::Parse("epsilon must be a positive rational".into()))?;
    let cfg = GermConfig::with_points(gf.graph.clone(), gf.points.clone()).map_err(domain)?;
    let res = crate::blowup::mld(&cfg, depth, &eps).map_err(domain)?;
    // The closed-form log-resolution value is reported alongside when the
    // machine-checkable hypotheses hold.
    let formula = mld_from_log_resolution(&gf.graph).ok();
    let result = json!({
        "mld": res.value.to_string(),
        "certified": res.certified,
        "explored": res.explored,
        "log_resolution_formula": formula.map(|v| v.to_string()),
    });
    let human = format!(
        "mld {} (certified: {}, explored {} blowups)\n",
        res.value, res.certified, res.explored
    );
    Ok(emit(json_flag, &report("mld", digest, result), human))
}

fn parse_range(s: &str) -> Result<(u32, u32), CliError> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| CliError::Parse("range must be A..B".into()))?;
    let a = a
        .parse()
        .map_err(|_| CliError::Parse("bad range start".into()))?;
    let b = b
        .parse()
        .map_err(|_| CliError::Parse("bad range end".into()))?;
    if b < a {
        return Err(CliError::Parse("range end before start".into()));
    }
    Ok((a, b))
}

#[allow(clippy::too_many_arguments)]
fn run_family(
    m1: i64,
    q1: i64,
    m2: i64,
    q2: i64,
    alpha_l: Option<&str>,
    alpha_r: Option<&str>,
    n: &str,
    csv: bool,
    json_flag: bool,
) -> Result<String, CliError> {
    let (from, to) = parse_range(n)?;
    let inv = match (alpha_l, alpha_r) {
        (Some(l), Some(r)) => {
            let al = parse_rat(l).ok_or_else(|| CliError::Parse("bad alphaL".into()))?;
            let ar = parse_rat(r).ok_or_else(|| CliError::Parse("bad alphaR".into()))?;
            FamilyInvariants::with_alphas(m1, q1, m2, q2, al, ar).map_err(domain)?
        }
        (None, None) => FamilyInvariants::new(m1, q1, m2, q2, vec![]).map_err(domain)?,
        _ => {
            return Err(CliError::Parse(
                "supply both --alphaL and --alphaR or neither".into(),
            ))
        }
    };
    let mut rows = Vec::new();
    for nn in from..=to {
        let mut row = family::evaluate(&inv, nn).map_err(domain)?;
        // Closed forms follow the requested alpha-invariants even when they
        // are not realized by boundary data on the assembled graph.
        row.alpha_l = inv.alpha_l.clone();
        row.alpha_r = inv.alpha_r.clone();
        row.a_l1 = family::a_l1(&inv, nn);
        row.a_r1 = family::a_r1(&inv, nn);
        row.limit = family::pld_limit(&inv);
        rows.push(row);
    }
    if csv {
        let mut out = String::from(family::ScanRow::csv_header());
        out.push('\n');
        for r in &rows {
            out.push_str(&r.to_csv());
            out.push('\n');
        }
        return Ok(out);
    }
    let result = json!({
        "rows": rows.iter().map(|r| json!({
            "n": r.n,
            "det": r.det.to_string(),
            "a_L1": rj(&r.a_l1),
            "a_R1": rj(&r.a_r1),
            "pld": rj(&r.pld),
            "limit": rj(&r.limit),
        })).collect::<Vec<_>>(),
    });
    let mut human = format!(
        "{:>4} {:>10} {:>12} {:>12} {:>12} {:>12}\n",
        "n", "det", "a_L1", "a_R1", "pld", "limit"
    );
    for r in &rows {
        human.push_str(&format!(
            "{:>4} {:>10} {:>12} {:>12} {:>12} {:>12}\n",
            r.n,
            r.det.to_string(),
            fmt_rat(&r.a_l1),
            fmt_rat(&r.a_r1),
            fmt_rat(&r.pld),
            fmt_rat(&r.limit)
        ));
    }
    Ok(emit(
        json_flag,
        &report("family", json!({"m1": m1, "q1": q1, "m2": m2, "q2": q2}), result),
        human,
    ))
}

#[derive(serde::Deserialize)]
struct ScanSpecFile {
    m_values: Vec<i64>,
    n_from: u32,
    n_to: u32,
    coeffs: Vec<String>,
    #[serde(default)]
    max_increasing_run: Option<usize>,
}

fn run_acc_scan(
    spec: Option<&PathBuf>,
    csv: bool,
    json_flag: bool,
    jobs: usize,
) -> Result<String, CliError> {
    let spec = match spec {
        None => ScanSpec::standard(),
        Some(path) => {
            let text = read_file(path)?;
            let f: ScanSpecFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Parse(format!("bad scan spec: {e}")))?;
            let coeffs = f
                .coeffs
                .iter()
                .map(|s| parse_rat(s).ok_or_else(|| CliError::Parse(format!("bad coeff `{s}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            ScanSpec {
                m_values: f.m_values,
                n_from: f.n_from,
                n_to: f.n_to,
                coeffs,
                max_increasing_run: f
                    .max_increasing_run
                    .unwrap_or((f.n_to - f.n_from + 1) as usize),
            }
        }
    };
    let res = family::acc_scan_with_jobs(&spec, jobs).map_err(domain)?;
    if csv {
        let mut out = String::from(family::ScanRow::csv_header());
        out.push('\n');
        for r in &res.rows {
            out.push_str(&r.to_csv());
            out.push('\n');
        }
        return Ok(out);
    }
    let result = json!({
        "rows": res.rows.len(),
        "acc_flags": res.acc_flags,
        "pld_attained_off_ends": res.attained_elsewhere,
    });
    let human = format!(
        "{} rows; {} ACC flags; pld attained away from L1/R1 in {} rows\n",
        res.rows.len(),
        res.acc_flags.len(),
        res.attained_elsewhere
    );
    Ok(emit(json_flag, &report("acc-scan", Value::Null, result), human))
}

fn lambda_json(k: &SingKind) -> Value {
    match k {
        SingKind::NonDegenerate(LambdaKind::Rational(l)) => json!({"lambda": fmt_rat(l)}),
        SingKind::NonDegenerate(LambdaKind::NonRational { discriminant }) => {
            json!({"lambda": "non-rational", "discriminant": fmt_rat(discriminant)})
        }
        SingKind::SaddleNode => json!({"saddle_node": true}),
        SingKind::NilpotentOrZero => json!({"nilpotent_or_zero": true}),
    }
}

fn render_tree(node: &ReductionNode, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    let kind = match &node.eigen.kind {
        SingKind::NonDegenerate(LambdaKind::Rational(l)) => format!("lambda={}", fmt_rat(l)),
        SingKind::NonDegenerate(LambdaKind::NonRational { .. }) => "lambda non-rational".into(),
        SingKind::SaddleNode => "saddle-node".into(),
        SingKind::NilpotentOrZero => "nilpotent-or-zero".into(),
    };
    out.push_str(&format!(
        "{pad}{} [{}{}]\n",
        node.label,
        kind,
        if node.eigen.reduced { ", reduced" } else { "" }
    ));
    for c in &node.children {
        render_tree(c, indent + 1, out);
    }
}

fn run_germ(
    action: GermAction,
    file: &PathBuf,
    curve: Option<&str>,
    depth: u32,
    json_flag: bool,
) -> Result<String, CliError> {
    let text = read_file(file)?;
    let v = parse_germ(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    let digest = json!({"path": file.display().to_string(), "bytes": text.len()});
    match action {
        GermAction::Indices => {
            let e = eigen(&v).map_err(domain)?;
            let mut result = json!({
                "eigen": lambda_json(&e.kind),
                "reduced": e.reduced,
                "trace": fmt_rat(&e.trace),
                "det": fmt_rat(&e.det),
            });
            let mut human = format!(
                "eigen: {}  reduced: {}\n",
                serde_json::to_string(&lambda_json(&e.kind)).unwrap(),
                e.reduced
            );
            if let Some(cs) = curve {
                let f = parse_poly(cs).map_err(CliError::Parse)?;
                let c = crate::germ::CurveGerm::new(f).map_err(domain)?;
                if !is_invariant(&v, &c) {
                    return Err(CliError::Domain(
                        "curve is not invariant; use `germ tang` instead".into(),
                    ));
                }
                let z = z_index(&v, &c).map_err(domain)?;
                let cs_val = cs_index(&v, &c).map_err(domain)?;
                result["Z"] = json!(z);
                result["CS"] = rj(&cs_val);
                human.push_str(&format!("Z: {z}  CS: {}\n", fmt_rat(&cs_val)));
            }
            Ok(emit(json_flag, &report("germ-indices", digest, result), human))
        }
        GermAction::Tang => {
            let cs = curve.ok_or_else(|| CliError::Parse("tang needs --curve".into()))?;
            let f = parse_poly(cs).map_err(CliError::Parse)?;
            let c = crate::germ::CurveGerm::new(f).map_err(domain)?;
            let t = tang(&v, &c).map_err(domain)?;
            let result = json!({"tang": t});
            Ok(emit(
                json_flag,
                &report("germ-tang", digest, result),
                format!("tang {t}\n"),
            ))
        }
        GermAction::Reduce => {
            let out = seidenberg_reduce(&v, depth).map_err(domain)?;
            let mut human = String::new();
            render_tree(&out.root, 0, &mut human);
            human.push_str(&format!(
                "success: {}{}\n",
                out.success,
                if out.flags.is_empty() {
                    String::new()
                } else {
                    format!("  flags: {:?}", out.flags)
                }
            ));
            let result = json!({
                "success": out.success,
                "flags": out.flags,
                "depth": out.root.depth(),
            });
            Ok(emit(json_flag, &report("germ-reduce", digest, result), human))
        }
    }
}

fn run_verify(seed: u64, quick: bool) -> Result<String, CliError> {
    let mut out = String::new();
    let mut all_pass = true;
    for suite in crate::verify::run_all(seed, quick) {
        all_pass &= suite.passed;
        out.push_str(&suite.line());
        out.push('\n');
    }
    // The boundary-free mld value set is part of the bundled checks.
    let scan = crate::blowup::mld_zero_boundary_scan(if quick { 4 } else { 8 }).map_err(domain)?;
    let ok = scan.iter().all(|v| {
        use num::{One, Signed, Zero};
        v.is_zero() || (v.numer().is_one() && !v.is_negative())
    });
    all_pass &= ok;
    out.push_str(&format!(
        "zero-boundary-scan: {} — values {{{}}}\n",
        if ok { "PASS" } else { "FAIL" },
        scan.iter().map(fmt_rat).collect::<Vec<_>>().join(", ")
    ));
    if all_pass {
        Ok(out)
    } else {
        print!("{out}");
        Err(CliError::Domain("verification failures".into()))
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn cli_main() -> i32 {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Classify { file, json } => run_classify(file, *json),
        Command::Discrep { file, json, approx } => run_discrep(file, *json, *approx),
        Command::Status { file, json } => run_status(file, *json),
        Command::Pld { file, json } => run_pld(file, *json),
        Command::Gap { file, json } => run_gap(file, *json),
        Command::Mld {
            file,
            depth,
            epsilon,
            json,
        } => run_mld(file, *depth, epsilon, *json),
        Command::Family {
            m1,
            q1,
            m2,
            q2,
            alpha_l,
            alpha_r,
            n,
            csv,
            json,
        } => run_family(
            *m1,
            *q1,
            *m2,
            *q2,
            alpha_l.as_deref(),
            alpha_r.as_deref(),
            n,
            *csv,
            *json,
        ),
        Command::AccScan {
            spec,
            csv,
            json,
            jobs,
        } => run_acc_scan(spec.as_ref(), *csv, *json, *jobs),
        Command::Germ {
            action,
            file,
            curve,
            depth,
            json,
        } => run_germ(*action, file, curve.as_deref(), *depth, *json),
        Command::Verify { seed, quick } => run_verify(*seed, *quick),
    };
    match outcome {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
