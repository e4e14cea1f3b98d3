//! Command-line front end: build named constructions from expressions,
//! run checks and certifications, import and export objects and
//! certificates, and emit machine-readable reports.
//!
//! Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 usage or input error.

mod expr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use complicial::certifier::{self, Certificate, CertifyOptions, Extras};
use complicial::io as cio;
use complicial::lifting::{self, ClosureKind, Flavor, Status};
use complicial::strata::{isomorphic, locate_subset, Subset, TruncatedStratifiedSet};
use serde_json::json;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "complicial", version, about = "Toolkit for truncated stratified simplicial sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    All,
    Inner,
    Left,
    Right,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::All => Flavor::All,
            FlavorArg::Inner => Flavor::Inner,
            FlavorArg::Left => Flavor::Left,
            FlavorArg::Right => Flavor::Right,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Summary,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosureArg {
    Hom,
    LaxL,
    LaxR,
    DecL,
    DecR,
}

impl From<ClosureArg> for ClosureKind {
    fn from(c: ClosureArg) -> ClosureKind {
        match c {
            ClosureArg::Hom => ClosureKind::Hom,
            ClosureArg::LaxL => ClosureKind::LaxLeft,
            ClosureArg::LaxR => ClosureKind::LaxRight,
            ClosureArg::DecL => ClosureKind::DecLeft,
            ClosureArg::DecR => ClosureKind::DecRight,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a construction expression and write the canonical set file.
    Build {
        expr: String,
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Run a named check on set files or expressions.
    Check {
        /// One of: compliciality, thinness, well-tempered, strict,
        /// quasi-category, equivalence-edges, iso, validate.
        name: String,
        /// Set files (or expressions) the check applies to.
        inputs: Vec<String>,
        #[arg(long, value_enum, default_value = "all")]
        flavor: FlavorArg,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Search for an anodyne-extension certificate from start to target.
    Certify {
        /// Target: an expression or a set file path.
        target: String,
        /// Start subset, located inside the target by generator names.
        #[arg(long)]
        start: String,
        #[arg(long, value_enum, default_value = "all")]
        flavor: FlavorArg,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 5_000_000)]
        budget: u64,
        #[arg(long)]
        thin_horns: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Independently replay a certificate against target and start.
    Replay {
        cert: PathBuf,
        target: String,
        #[arg(long)]
        start: String,
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Enumerate stratified maps between two sets.
    Maps {
        source: String,
        target: String,
        #[arg(long)]
        count: bool,
        #[arg(long)]
        list: bool,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Compute a bounded closure (hom, lax or decalage) of two sets.
    Closure {
        #[arg(value_enum)]
        kind: ClosureArg,
        source: String,
        target: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => match status {
            Status::Pass => ExitCode::SUCCESS,
            Status::Fail => ExitCode::from(1),
            Status::Inconclusive => ExitCode::from(2),
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

/// Loads a set from a json file path or evaluates an expression.
fn load_set(spec: &str, trunc: Option<usize>, budget: u64) -> Result<TruncatedStratifiedSet> {
    if spec.ends_with(".json") {
        let text = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        let file: cio::SetFile = cio::from_json(&text)?;
        let set = cio::set_from_file(&file)?;
        Ok(match trunc {
            Some(d) => set.with_truncation(d),
            None => set,
        })
    } else {
        let parsed = expr::parse(spec)?;
        expr::eval(&parsed, &expr::EvalOptions { trunc, budget })
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {path:?}"))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Inconclusive => "inconclusive",
    }
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Build { expr: e, trunc, out, format, budget } => {
            let parsed = expr::parse(&e)?;
            let set = expr::eval(&parsed, &expr::EvalOptions { trunc, budget })?;
            let report = set.validate();
            if !report.is_valid() {
                bail!("built set is invalid: {report}");
            }
            match format {
                FormatArg::Json => {
                    emit(&out, &cio::to_canonical_json(&cio::set_to_file(&set))?)?;
                }
                FormatArg::Summary => {
                    let thin: usize = set
                        .all_gens()
                        .filter(|&g| set.thin_flag(g))
                        .count();
                    emit(
                        &out,
                        &format!(
                            "truncation {}; generators per dimension {:?}; {} thin flag(s)\n",
                            set.truncation(),
                            set.gen_counts(),
                            thin
                        ),
                    )?;
                }
            }
            Ok(Status::Pass)
        }
        Command::Check { name, inputs, flavor, dim, budget, out, format } => {
            run_check(&name, &inputs, flavor.into(), dim, budget, &out, format)
        }
        Command::Certify { target, start, flavor, dim, budget, thin_horns, out, trunc } => {
            let tset = load_set(&target, trunc, budget)?;
            let sset = load_set(&start, Some(tset.truncation()), budget)?;
            let ssub = locate_subset(&tset, &sset).map_err(|e| anyhow!(e.to_string()))?;
            let full = Subset::full(&tset);
            let dim = dim.unwrap_or(tset.truncation());
            let opts = CertifyOptions { extras: Extras::None, thin_horns, budget };
            let outcome = certifier::certify(&tset, &full, &ssub, flavor.into(), dim, opts)
                .map_err(|e| anyhow!(e.to_string()))?;
            if let Some(cert) = &outcome.certificate {
                let text = cio::to_canonical_json(&cio::certificate_to_file(cert))?;
                emit(&out, &text)?;
                eprintln!("certified in {} step(s), {} nodes", cert.steps.len(), outcome.nodes);
            } else {
                eprintln!(
                    "no certificate: {} after {} nodes",
                    status_str(outcome.status),
                    outcome.nodes
                );
            }
            Ok(outcome.status)
        }
        Command::Replay { cert, target, start, trunc } => {
            let text = fs::read_to_string(&cert).with_context(|| format!("reading {cert:?}"))?;
            let file: cio::CertificateFile = cio::from_json(&text)?;
            let certificate: Certificate = cio::certificate_from_file(&file)?;
            let tset = load_set(&target, trunc, 10_000_000)?;
            let sset = load_set(&start, Some(tset.truncation()), 10_000_000)?;
            let ssub = locate_subset(&tset, &sset).map_err(|e| anyhow!(e.to_string()))?;
            let full = Subset::full(&tset);
            let report = certifier::replay(&tset, &full, &ssub, &certificate)
                .map_err(|e| anyhow!(e.to_string()))?;
            match &report.failed_step {
                Some((i, reason)) => eprintln!("replay failed at step {i}: {reason}"),
                None if report.status == Status::Pass => {
                    eprintln!("replayed {} step(s)", report.steps)
                }
                None => eprintln!("replay did not reach the target"),
            }
            Ok(report.status)
        }
        Command::Maps { source, target, count, list, budget } => {
            let s = load_set(&source, None, budget)?;
            let t = load_set(&target, None, budget)?;
            let s = if s.truncation() < t.truncation() { s } else { s.with_truncation(t.truncation()) };
            let e = lifting::enumerate_maps(&s, &t, &[], None, budget)
                .map_err(|e| anyhow!(e.to_string()))?;
            if count || !list {
                println!("{}", e.maps.len());
            }
            if list {
                for m in &e.maps {
                    println!("{}", lifting::canonical_map_name(m, &s, &t));
                }
            }
            if !e.exhausted {
                eprintln!("warning: enumeration budget exhausted; counts are lower bounds");
                return Ok(Status::Inconclusive);
            }
            Ok(Status::Pass)
        }
        Command::Closure { kind, source, target, dim, budget, out } => {
            let x = load_set(&source, None, budget)?;
            let a = load_set(&target, None, budget)?;
            let h = lifting::closure_truncation(kind.into(), &x, &a, dim, budget)
                .map_err(|e| anyhow!(e.to_string()))?;
            emit(&out, &cio::to_canonical_json(&cio::set_to_file(&h))?)?;
            Ok(Status::Pass)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_check(
    name: &str,
    inputs: &[String],
    flavor: Flavor,
    dim: Option<usize>,
    budget: u64,
    out: &Option<PathBuf>,
    format: FormatArg,
) -> Result<Status> {
    let need = |i: usize| -> Result<TruncatedStratifiedSet> {
        let spec = inputs.get(i).ok_or_else(|| anyhow!("check `{name}` needs input {i}"))?;
        load_set(spec, None, budget)
    };
    let (status, report) = match name {
        "compliciality" => {
            let t = need(0)?;
            let d = dim.unwrap_or(t.truncation());
            let rep = lifting::check_compliciality(&t, flavor, d, budget)
                .map_err(|e| anyhow!(e.to_string()))?;
            let entries: Vec<_> = rep
                .entries
                .iter()
                .map(|e| {
                    json!({
                        "kind": format!("{:?}", e.kind),
                        "n": e.n,
                        "k": e.k,
                        "status": status_str(e.verdict.status),
                        "witness": witness_json(&e.verdict.witness, &t),
                    })
                })
                .collect();
            (
                rep.status(),
                json!({
                    "check": "compliciality",
                    "flavor": format!("{flavor:?}"),
                    "dim": d,
                    "truncation": rep.truncation,
                    "entries": entries,
                }),
            )
        }
        "thinness" => {
            let t = need(0)?;
            let d = dim.unwrap_or(t.truncation());
            let mut status = Status::Pass;
            let mut entries = Vec::new();
            for n in 2..=d {
                for k in flavor.ks(n) {
                    let v = lifting::check_thinness_extension(&t, n, k)
                        .map_err(|e| anyhow!(e.to_string()))?;
                    status = status.and(v.status);
                    entries.push(json!({
                        "n": n,
                        "k": k,
                        "status": status_str(v.status),
                        "witness": witness_json(&v.witness, &t),
                    }));
                }
            }
            (status, json!({"check": "thinness", "dim": d, "entries": entries}))
        }
        "well-tempered" => {
            let t = need(0)?;
            let v = complicial::strata::is_well_tempered(&t).map_err(|e| anyhow!(e.to_string()))?;
            let status = if v.well_tempered { Status::Pass } else { Status::Fail };
            let witness = v.witness.map(|(r, k)| {
                json!({"simplex": complicial::strata::ref_label(&t, &r), "index": k})
            });
            (
                status,
                json!({
                    "check": "well-tempered",
                    "truncation": v.truncation,
                    "witness": witness,
                }),
            )
        }
        "strict" => {
            let t = need(0)?;
            let d = dim.unwrap_or(t.truncation());
            let v = lifting::check_strict(&t, d, budget).map_err(|e| anyhow!(e.to_string()))?;
            (
                v.strict,
                json!({
                    "check": "strict",
                    "dim": d,
                    "routes_agree": v.routes_agree,
                    "route_stratified": status_str(v.route_stratified),
                    "route_direct": status_str(v.route_direct),
                }),
            )
        }
        "quasi-category" => {
            let t = need(0)?;
            let d = dim.unwrap_or(t.truncation());
            let v = lifting::check_quasi_category(&t, d, budget)
                .map_err(|e| anyhow!(e.to_string()))?;
            (
                v.mid_fibrant.and(v.estrat_complicial),
                json!({
                    "check": "quasi-category",
                    "dim": d,
                    "mid_fibrant": status_str(v.mid_fibrant),
                    "estrat_complicial": status_str(v.estrat_complicial),
                }),
            )
        }
        "equivalence-edges" => {
            let t = need(0)?;
            let v = lifting::check_equivalence_edges(&t, budget)
                .map_err(|e| anyhow!(e.to_string()))?;
            (
                status_of(&v),
                json!({
                    "check": "equivalence-edges",
                    "status": status_str(v.status),
                    "witness": witness_json(&v.witness, &t),
                }),
            )
        }
        "iso" => {
            let a = need(0)?;
            let b = need(1)?;
            let outcome = isomorphic(&a, &b, &[], budget);
            let status = if outcome.iso.is_some() {
                Status::Pass
            } else if outcome.exhausted {
                Status::Fail
            } else {
                Status::Inconclusive
            };
            (status, json!({"check": "iso", "status": status_str(status)}))
        }
        "validate" => {
            let t = need(0)?;
            let rep = t.validate();
            let status = if rep.is_valid() { Status::Pass } else { Status::Fail };
            (status, json!({"check": "validate", "violations": rep.violations}))
        }
        other => bail!("unknown check `{other}`"),
    };
    let body = json!({"schema": cio::REPORT_SCHEMA, "status": status_str(status), "report": report});
    match format {
        FormatArg::Json => emit(out, &format!("{}\n", serde_json::to_string_pretty(&body)?))?,
        FormatArg::Summary => emit(out, &format!("{}: {}\n", name, status_str(status)))?,
    }
    Ok(status)
}

fn status_of(v: &lifting::Verdict) -> Status {
    v.status
}

/// Compact witness payload for a report: the offending simplex, or the
/// image list of the unfillable map.
fn witness_json(w: &lifting::Witness, t: &TruncatedStratifiedSet) -> serde_json::Value {
    match w {
        lifting::Witness::None => serde_json::Value::Null,
        lifting::Witness::Simplex(r) => json!(complicial::strata::ref_label(t, r)),
        lifting::Witness::Map(m) => json!(m
            .assignment
            .iter()
            .map(|level| level
                .iter()
                .map(|r| complicial::strata::ref_label(t, r))
                .collect::<Vec<_>>())
            .collect::<Vec<_>>()),
    }
}
