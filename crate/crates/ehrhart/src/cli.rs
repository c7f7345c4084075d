//! Flag-driven command line front end: JSON problem specifications in,
//! JSON or CSV results out, with exit codes distinguishing schema errors,
//! mathematical domain errors and resource bounds.

use crate::exactlin::{IntMatrix, Rat, RatMatrix, Subspace};
use crate::oracle::{brute_intermediate_sum, VPolytope};
use crate::parametric::{
    chamber_of, dilation_qp, enumerate_bases, intermediate_ehrhart_qp, minkowski_support,
    Chamber, DilationVariant, ParametricPolytope, Weight,
};
use crate::steppoly::{format_rat, parse_rat, LinearFormQ, QuasiPolynomial};
use crate::{Error, Result};
use clap::{Parser, ValueEnum};
use num::{Signed, Zero};
use serde::Deserialize;
use serde_json::{json, Value};
use std::io::Read as _;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Chambers,
    Ehrhart,
    Plotdata,
    Oracle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Exact,
    Barvinok,
    Conebycone,
}

#[derive(Parser, Debug)]
#[command(name = "ehrhart", about = "weighted Ehrhart quasi-polynomials of parametric polytopes")]
struct Cli {
    /// what to compute
    #[arg(long, value_enum, default_value = "ehrhart")]
    mode: Mode,
    /// JSON problem specification; stdin when omitted
    #[arg(long)]
    input: Option<PathBuf>,
    /// result file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// overrides the "variant" field of the specification
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// overrides the "k" field of the specification
    #[arg(long)]
    k: Option<usize>,
    /// comma-separated dilation parameters to tabulate
    #[arg(long)]
    eval: Option<String>,
    /// grid min,max,step of dilation parameters
    #[arg(long)]
    grid: Option<String>,
    /// assert agreement with the brute-force oracle at every evaluation
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Deserialize)]
struct WeightTermSpec {
    coeff: String,
    ell: Vec<String>,
    power: u32,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SubspaceSpec {
    Keyword(String),
    Rows(Vec<Vec<String>>),
}

#[derive(Deserialize)]
struct MinkowskiSpec {
    #[serde(default)]
    vertex_lists: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default)]
    b_vectors: Option<Vec<Vec<String>>>,
    #[serde(default)]
    coefficients: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
struct ProblemSpec {
    schema: u32,
    mu: Vec<Vec<i64>>,
    #[serde(default)]
    weight: Option<Vec<WeightTermSpec>>,
    #[serde(default)]
    b: Option<Vec<String>>,
    #[serde(default)]
    ray_b0: Option<Vec<String>>,
    #[serde(default)]
    minkowski: Option<MinkowskiSpec>,
    #[serde(default)]
    subspace: Option<SubspaceSpec>,
    #[serde(default)]
    variant: Option<String>,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    samples: Option<Vec<Vec<String>>>,
    #[serde(default)]
    columns: Option<Vec<ColumnSpec>>,
}

#[derive(Deserialize)]
struct ColumnSpec {
    label: String,
    #[serde(default)]
    variant: Option<String>,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    subspace: Option<SubspaceSpec>,
}

fn parse_vec(v: &[String]) -> Result<Vec<Rat>> {
    v.iter().map(|s| parse_rat(s)).collect()
}

fn schema_err(msg: &str) -> Error {
    Error::Schema(msg.into())
}

fn parse_subspace(spec: &Option<SubspaceSpec>, d: usize) -> Result<Subspace> {
    match spec {
        None => Ok(Subspace::zero(d)),
        Some(SubspaceSpec::Keyword(w)) if w == "zero" => Ok(Subspace::zero(d)),
        Some(SubspaceSpec::Keyword(w)) if w == "full" => Ok(Subspace::full(d)),
        Some(SubspaceSpec::Keyword(w)) => {
            Err(schema_err(&format!("unknown subspace keyword {w:?}")))
        }
        Some(SubspaceSpec::Rows(rows)) => {
            let parsed: Result<Vec<Vec<Rat>>> = rows.iter().map(|r| parse_vec(r)).collect();
            let parsed = parsed?;
            if parsed.iter().any(|r| r.len() != d) {
                return Err(schema_err("subspace rows must have the ambient dimension"));
            }
            Ok(Subspace::from_rows(d, &parsed))
        }
    }
}

fn parse_weight(spec: &Option<Vec<WeightTermSpec>>, d: usize) -> Result<Weight> {
    match spec {
        None => Ok(Weight::unit(d)),
        Some(terms) => {
            let mut out = Vec::with_capacity(terms.len());
            for t in terms {
                if t.ell.len() != d {
                    return Err(schema_err("weight form must have the ambient dimension"));
                }
                out.push((parse_rat(&t.coeff)?, LinearFormQ::new(&parse_vec(&t.ell)?), t.power));
            }
            Weight::new(d, out)
        }
    }
}

fn parse_variant(
    arg: Option<VariantArg>,
    field: &Option<String>,
    k: Option<usize>,
    subspace: Subspace,
) -> Result<DilationVariant> {
    let name = match arg {
        Some(VariantArg::Exact) => "exact".to_string(),
        Some(VariantArg::Barvinok) => "barvinok".to_string(),
        Some(VariantArg::Conebycone) => "conebycone".to_string(),
        None => field.clone().unwrap_or_else(|| "exact".to_string()),
    };
    match name.as_str() {
        "exact" => Ok(DilationVariant::Exact(subspace)),
        "barvinok" => Ok(DilationVariant::Barvinok(
            k.ok_or_else(|| schema_err("variant barvinok needs k"))?,
        )),
        "conebycone" => Ok(DilationVariant::ConeByCone(
            k.ok_or_else(|| schema_err("variant conebycone needs k"))?,
        )),
        other => Err(schema_err(&format!("unknown variant {other:?}"))),
    }
}

fn load_spec(cli: &Cli) -> Result<ProblemSpec> {
    let text = match &cli.input {
        Some(path) => std::fs::read_to_string(path)?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let spec: ProblemSpec =
        serde_json::from_str(&text).map_err(|e| schema_err(&format!("invalid JSON: {e}")))?;
    if spec.schema != 1 {
        return Err(schema_err("unsupported schema version"));
    }
    if spec.mu.is_empty() {
        return Err(schema_err("mu must be nonempty"));
    }
    Ok(spec)
}

fn polytope_of(spec: &ProblemSpec) -> Result<ParametricPolytope> {
    ParametricPolytope::new(IntMatrix::from_rows(&spec.mu))
}

// the sample defining the chamber, and for Minkowski input the specialization
// matrix whose columns are the per-polytope support parameters
struct Assembled {
    pp: ParametricPolytope,
    tau: Chamber,
    base: Vec<Rat>,
    minkowski_t: Option<RatMatrix>,
    eval_points: Vec<Vec<Rat>>,
}

fn assemble(spec: &ProblemSpec) -> Result<Assembled> {
    let pp = polytope_of(spec)?;
    if let Some(mk) = &spec.minkowski {
        let bs: Vec<Vec<Rat>> = match (&mk.vertex_lists, &mk.b_vectors) {
            (Some(lists), None) => {
                let parsed: Result<Vec<Vec<Vec<Rat>>>> = lists
                    .iter()
                    .map(|l| l.iter().map(|v| parse_vec(v)).collect())
                    .collect();
                minkowski_support(&parsed?, &pp)?
            }
            (None, Some(vs)) => vs.iter().map(|v| parse_vec(v)).collect::<Result<_>>()?,
            _ => return Err(schema_err("minkowski needs vertex_lists or b_vectors")),
        };
        if bs.is_empty() || bs.iter().any(|b| b.len() != pp.n_params()) {
            return Err(schema_err("minkowski parameter vectors must match mu"));
        }
        let mut sum = vec![Rat::zero(); pp.n_params()];
        for b in &bs {
            for (s, x) in sum.iter_mut().zip(b) {
                *s += x;
            }
        }
        let tau = chamber_of(&pp, &sum)?;
        let mut t = RatMatrix::zeros(pp.n_params(), bs.len());
        for (j, b) in bs.iter().enumerate() {
            for (i, x) in b.iter().enumerate() {
                t.set(i, j, x.clone());
            }
        }
        let eval_points = match &mk.coefficients {
            Some(cs) => cs.iter().map(|v| parse_vec(v)).collect::<Result<_>>()?,
            None => Vec::new(),
        };
        return Ok(Assembled { pp, tau, base: sum, minkowski_t: Some(t), eval_points });
    }
    let base = match (&spec.b, &spec.ray_b0) {
        (Some(b), _) => parse_vec(b)?,
        (None, Some(b0)) => parse_vec(b0)?,
        (None, None) => return Err(schema_err("need b, ray_b0 or minkowski")),
    };
    if base.len() != pp.n_params() {
        return Err(schema_err("parameter vector must match the rows of mu"));
    }
    let tau = chamber_of(&pp, &base)?;
    Ok(Assembled { pp, tau, base, minkowski_t: None, eval_points: Vec::new() })
}

fn chamber_json(tau: &Chamber) -> Value {
    Value::Array(
        tau.basis_index_sets()
            .iter()
            .map(|s| Value::Array(s.iter().map(|&i| Value::from(i as u64)).collect()))
            .collect(),
    )
}

fn rat_list_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(|x| Value::from(format_rat(x))).collect())
}

fn cmd_chambers(spec: &ProblemSpec) -> Result<Value> {
    let pp = polytope_of(spec)?;
    let bases = enumerate_bases(&pp);
    let sample_rows: Vec<Vec<Rat>> = match (&spec.samples, &spec.b) {
        (Some(rows), _) => rows.iter().map(|r| parse_vec(r)).collect::<Result<_>>()?,
        (None, Some(b)) => vec![parse_vec(b)?],
        (None, None) => Vec::new(),
    };
    let mut reports = Vec::new();
    for b in &sample_rows {
        let entry = match chamber_of(&pp, b) {
            Ok(tau) => json!({
                "b": rat_list_json(b),
                "status": "ok",
                "chamber": chamber_json(&tau),
            }),
            Err(e @ (Error::OnWall | Error::EmptyChamber)) => json!({
                "b": rat_list_json(b),
                "status": format!("{e:?}"),
            }),
            Err(e) => return Err(e),
        };
        reports.push(entry);
    }
    Ok(json!({
        "schema": 1,
        "bases": bases.iter().map(|bs| bs.indices().to_vec()).collect::<Vec<_>>(),
        "samples": reports,
    }))
}

fn parse_rat_list(text: &str) -> Result<Vec<Rat>> {
    text.split(',')
        .map(|s| parse_rat(s.trim()))
        .collect::<Result<Vec<_>>>()
        .map_err(|_| schema_err("evaluation points must be rationals"))
}

fn grid_points(text: &str) -> Result<Vec<Rat>> {
    let parts = parse_rat_list(text)?;
    if parts.len() != 3 {
        return Err(schema_err("grid must be min,max,step"));
    }
    let (min, max, step) = (parts[0].clone(), parts[1].clone(), parts[2].clone());
    if !step.is_positive() {
        return Err(schema_err("grid step must be positive"));
    }
    let mut out = Vec::new();
    let mut t = min;
    while t <= max {
        out.push(t.clone());
        t += &step;
        if out.len() > 100_000 {
            return Err(Error::ResourceBound("grid too fine".into()));
        }
    }
    Ok(out)
}

fn variant_qp(
    pp: &ParametricPolytope,
    tau: &Chamber,
    variant: &DilationVariant,
    h: &Weight,
) -> Result<QuasiPolynomial> {
    match variant {
        DilationVariant::Exact(l) => intermediate_ehrhart_qp(pp, tau, l, h),
        DilationVariant::Barvinok(k) => crate::parametric::barvinok_patched_qp(pp, tau, *k, h),
        DilationVariant::ConeByCone(k) => crate::parametric::cone_by_cone_qp(pp, tau, *k, h),
    }
}

fn oracle_value(
    pp: &ParametricPolytope,
    b: &[Rat],
    l: &Subspace,
    h: &Weight,
) -> Result<Rat> {
    let p = VPolytope::from_h(pp.mu(), b)?;
    brute_intermediate_sum(&p, l, h)
}

fn cmd_ehrhart(cli: &Cli, spec: &ProblemSpec) -> Result<Value> {
    let asm = assemble(spec)?;
    let d = asm.pp.dim();
    let h = parse_weight(&spec.weight, d)?;
    let l = parse_subspace(&spec.subspace, d)?;
    let k = cli.k.or(spec.k);
    let variant = parse_variant(cli.variant, &spec.variant, k, l.clone())?;
    let dilation = spec.ray_b0.is_some() && spec.b.is_none() && spec.minkowski.is_none();
    let qp = if dilation {
        dilation_qp(&asm.pp, &asm.tau, &asm.base, &variant, &h)?
    } else {
        let full = variant_qp(&asm.pp, &asm.tau, &variant, &h)?;
        match &asm.minkowski_t {
            Some(t) => full.specialize(t),
            None => full,
        }
    };
    let mut table = Vec::new();
    let mut points: Vec<Vec<Rat>> = asm.eval_points.clone();
    if let Some(text) = &cli.eval {
        if !dilation {
            return Err(schema_err("--eval tabulates a dilation; provide ray_b0"));
        }
        points.extend(parse_rat_list(text)?.into_iter().map(|t| vec![t]));
    }
    for pt in &points {
        if pt.len() != qp.n() {
            return Err(schema_err("evaluation point has the wrong arity"));
        }
        let value = qp.eval(pt);
        if cli.oracle_check {
            if !matches!(variant, DilationVariant::Exact(_)) {
                return Err(schema_err("--oracle-check applies to the exact variant"));
            }
            let b = expand_point(&asm, pt, dilation);
            let want = oracle_value(&asm.pp, &b, &l, &h)?;
            if want != value {
                return Err(Error::InvalidInput(format!(
                    "oracle disagreement at {:?}: pipeline {} vs oracle {}",
                    pt.iter().map(format_rat).collect::<Vec<_>>(),
                    format_rat(&value),
                    format_rat(&want),
                )));
            }
        }
        table.push(json!({
            "t": rat_list_json(pt),
            "value": format_rat(&value),
        }));
    }
    Ok(json!({
        "schema": 1,
        "chamber": chamber_json(&asm.tau),
        "qp": qp.to_json(),
        "eval": table,
    }))
}

// parameter vector behind an evaluation point: t·b0 for dilations, T·t for
// Minkowski coefficients, b itself otherwise
fn expand_point(asm: &Assembled, pt: &[Rat], dilation: bool) -> Vec<Rat> {
    if dilation {
        return asm.base.iter().map(|x| x * &pt[0]).collect();
    }
    match &asm.minkowski_t {
        Some(t) => t.mul_vec(pt),
        None => asm.base.clone(),
    }
}

fn decimal_12(r: &Rat) -> String {
    let scale = num::pow::pow(crate::exactlin::Int::from(10), 12);
    let scaled = r * Rat::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let neg = rounded.is_negative();
    let digits = rounded.abs().to_string();
    let padded = format!("{digits:0>13}");
    let split = padded.len() - 12;
    let (int_part, frac_part) = padded.split_at(split);
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_part)
}

fn cmd_plotdata(cli: &Cli, spec: &ProblemSpec) -> Result<String> {
    if spec.ray_b0.is_none() {
        return Err(schema_err("plotdata needs ray_b0"));
    }
    let asm = assemble(spec)?;
    let d = asm.pp.dim();
    let h = parse_weight(&spec.weight, d)?;
    let grid_text = cli
        .grid
        .as_deref()
        .ok_or_else(|| schema_err("plotdata needs --grid min,max,step"))?;
    let ts = grid_points(grid_text)?;
    // each column is one variant of the dilation along ray_b0
    let mut columns: Vec<(String, QuasiPolynomial)> = Vec::new();
    let specs: Vec<(String, Option<String>, Option<usize>, Option<&SubspaceSpec>)> =
        match &spec.columns {
            Some(cols) => cols
                .iter()
                .map(|c| (c.label.clone(), c.variant.clone(), c.k, c.subspace.as_ref()))
                .collect(),
            None => vec![("value".to_string(), spec.variant.clone(), cli.k.or(spec.k), spec.subspace.as_ref())],
        };
    for (label, var_name, k, sub) in &specs {
        let l = match sub {
            Some(SubspaceSpec::Keyword(w)) if w == "zero" => Subspace::zero(d),
            Some(SubspaceSpec::Keyword(w)) if w == "full" => Subspace::full(d),
            Some(SubspaceSpec::Keyword(w)) => {
                return Err(schema_err(&format!("unknown subspace keyword {w:?}")))
            }
            Some(SubspaceSpec::Rows(rows)) => {
                let parsed: Result<Vec<Vec<Rat>>> = rows.iter().map(|r| parse_vec(r)).collect();
                Subspace::from_rows(d, &parsed?)
            }
            None => Subspace::zero(d),
        };
        let variant = parse_variant(cli.variant, var_name, *k, l)?;
        let qp = dilation_qp(&asm.pp, &asm.tau, &asm.base, &variant, &h)?;
        columns.push((label.clone(), qp));
    }
    let mut out = String::from("t");
    for (label, _) in &columns {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for t in &ts {
        out.push_str(&decimal_12(t));
        for (_, qp) in &columns {
            out.push(',');
            out.push_str(&decimal_12(&qp.eval(std::slice::from_ref(t))));
        }
        out.push('\n');
    }
    Ok(out)
}

fn cmd_oracle(spec: &ProblemSpec) -> Result<Value> {
    let pp = polytope_of(spec)?;
    let d = pp.dim();
    let h = parse_weight(&spec.weight, d)?;
    let l = parse_subspace(&spec.subspace, d)?;
    let b = match &spec.b {
        Some(b) => parse_vec(b)?,
        None => return Err(schema_err("oracle mode needs b")),
    };
    if b.len() != pp.n_params() {
        return Err(schema_err("parameter vector must match the rows of mu"));
    }
    let value = oracle_value(&pp, &b, &l, &h)?;
    Ok(json!({ "schema": 1, "value": format_rat(&value) }))
}

fn write_output(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_command(cli: &Cli) -> Result<()> {
    let spec = load_spec(cli)?;
    let text = match (cli.mode, cli.format) {
        (Mode::Plotdata, _) => cmd_plotdata(cli, &spec)?,
        (Mode::Chambers, Format::Json) => format!("{:#}\n", cmd_chambers(&spec)?),
        (Mode::Ehrhart, Format::Json) => format!("{:#}\n", cmd_ehrhart(cli, &spec)?),
        (Mode::Oracle, Format::Json) => format!("{:#}\n", cmd_oracle(&spec)?),
        (_, Format::Csv) => return Err(schema_err("csv output is for plotdata mode")),
    };
    write_output(cli, &text)
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match run_command(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let diag = json!({ "error": format!("{e:?}"), "message": e.to_string() });
            eprintln!("{diag}");
            e.exit_code()
        }
    }
}
