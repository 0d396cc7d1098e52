use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use homotransfer::ainf::{check_morphism, check_stasheff, AInfinityStructure, IdentityReport};
use homotransfer::bar::check_cinfinity;
use homotransfer::complex::{homology_contraction, normalize_weak_system, ChainComplex, ContractionReport, WeakSystem};
use homotransfer::linfty::{check_cce_square_zero, check_master, transfer_linf};
use homotransfer::transfer::{
    check_cotwisting, transfer_all_with_budget, transfer_coalgebra, transfer_coalgebra_recursive, CobarMode, Method, DEFAULT_TREE_BUDGET,
};
use homotransfer::{Error, Field, Result};
use serde_json::{json, Value};

use crate::io::{emit, emit_string, load, parse_str, Loaded};

#[derive(Debug, Parser)]
#[command(name = "homotransfer", version, about = "Exact homotopy transfer of algebraic structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Field override, `Q` or `Fp:<p>`; coefficients are reinterpreted.
    #[arg(long, global = true)]
    pub field: Option<String>,
    #[arg(long, global = true, default_value_t = 5)]
    pub max_arity: usize,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Echoed into reports; every pipeline is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on the number of trees per arity for the tree method.
    #[arg(long, global = true, default_value_t = DEFAULT_TREE_BUDGET as u64)]
    pub tree_budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Hpt,
    Recursive,
    Kadeishvili,
    Trees,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Stasheff,
    Morphism,
    Master,
    Contraction,
    Cinfinity,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Contraction of the underlying complex onto its homology.
    Homology { input: PathBuf },
    /// Transfer the structure to homology.
    Transfer {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Hpt)]
        method: MethodArg,
        #[arg(long)]
        check_cinfinity: bool,
    },
    /// Run an identity checker on a structure file.
    Check {
        input: PathBuf,
        #[arg(long, value_enum)]
        which: Option<Which>,
    },
    /// Re-emit in canonical form; weak systems become contractions.
    Normalize { input: PathBuf },
}

/// Result of a command: a JSON report and whether every check passed.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 2,
        Error::MethodDivergence(_) | Error::SignConsistency(_) | Error::Divergence(_) => 4,
        Error::Resource(_) => 5,
        _ => 3,
    }
}

fn read(path: &Path, field: Option<&str>) -> Result<Loaded> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut doc = parse_str(&text)?;
    if let Some(f) = field {
        override_field(&mut doc, f);
    }
    load(&doc)
}

fn override_field(doc: &mut crate::io::Document, f: &str) {
    doc.field = f.to_string();
    if let Some(m) = doc.morphism.as_mut() {
        override_field(&mut m.target, f);
    }
    if let Some(t) = doc.twisting.as_mut() {
        override_field(&mut t.target, f);
    }
}

/// Writes atomically through a temporary file in the target directory.
fn write_out(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).and_then(|_| fs::rename(&tmp, path)).map_err(|e| Error::Resource(format!("{}: {e}", path.display())))
}

fn identity_json(r: &IdentityReport) -> Value {
    json!({
        "name": r.name,
        "passed": r.passed(),
        "wordsChecked": r.words_checked(),
        "nonzeroResiduals": r.failing_words(),
        "firstFailure": r.first_failure,
    })
}

fn contraction_json(r: &ContractionReport) -> Value {
    json!({
        "name": "contraction axioms",
        "passed": r.all_passed(),
        "axioms": r.checks.iter().map(|c| json!({
            "axiom": c.axiom.label(),
            "passed": c.passed,
            "offending": c.offending,
        })).collect::<Vec<_>>(),
    })
}

fn complex_of(x: &Loaded) -> ChainComplex {
    let d = match x {
        Loaded::Dga(a) => a.d.clone(),
        Loaded::Dgc(c) => c.d.clone(),
        Loaded::Dgla(g) => g.d.clone(),
        Loaded::Ainf { structure, .. } => structure.differential(),
        Loaded::AinfCoalgebra(c) => c.differential(),
        Loaded::Linf { structure, .. } => {
            let q1 = structure.coderivation.components.get(&1).cloned().unwrap_or_default();
            let cols = (0..structure.carrier.len())
                .map(|x| q1.get(&homotransfer::words::word(&[x as u32])).map(|v| v.neg()).unwrap_or_default())
                .collect();
            homotransfer::GradedMap::new(structure.carrier.clone(), structure.carrier.clone(), -1, cols)
                .expect("validated on load")
        }
        Loaded::Contraction(c) => c.big.d().clone(),
    };
    ChainComplex::new(d).expect("validated on load")
}

fn ops_summary(ops: &std::collections::BTreeMap<usize, homotransfer::words::Table>) -> Value {
    ops.iter().map(|(n, t)| (format!("m{n}"), json!(t.values().map(|v| v.len()).sum::<usize>()))).collect::<serde_json::Map<_, _>>().into()
}

fn config(cli: &Cli, field: Field) -> Value {
    json!({
        "field": field.to_string(),
        "maxArity": cli.max_arity,
        "seed": cli.seed,
        "treeBudget": cli.tree_budget,
        "threads": rayon::current_num_threads(),
    })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    if cli.max_arity < 2 {
        return Err(Error::Parse("--max-arity must be at least 2".into()));
    }
    let start = Instant::now();
    let (Command::Homology { input }
    | Command::Transfer { input, .. }
    | Command::Check { input, .. }
    | Command::Normalize { input }) = &cli.command;
    let x = read(input, cli.field.as_deref())?;
    let (mut report, passed, output) = match &cli.command {
        Command::Homology { .. } => homology(&x)?,
        Command::Transfer { method, check_cinfinity, .. } => transfer(&x, cli, *method, *check_cinfinity)?,
        Command::Check { which, .. } => check(&x, cli.max_arity, *which)?,
        Command::Normalize { .. } => normalize(&x)?,
    };
    let f = x.field();
    report["config"] = config(cli, f);
    report["passed"] = json!(passed);
    report["seconds"] = json!(start.elapsed().as_secs_f64());
    if let (Some(path), Some(doc)) = (&cli.out, output) {
        write_out(path, &doc)?;
        report["output"] = json!(path.display().to_string());
    }
    Ok(Outcome { report, passed })
}

type Step = (Value, bool, Option<String>);

fn homology(x: &Loaded) -> Result<Step> {
    let c = complex_of(x);
    let k = homology_contraction(&c);
    let r = k.verify();
    let betti: Vec<Value> = c.betti().into_iter().filter(|&(_, b)| b > 0).map(|(d, b)| json!([d, b])).collect();
    let report = json!({
        "command": "homology",
        "dimension": c.dim(),
        "betti": betti,
        "checks": [contraction_json(&r)],
    });
    Ok((report, r.all_passed(), Some(emit_string(&emit(&Loaded::Contraction(k))))))
}

fn transfer(x: &Loaded, cli: &Cli, method: MethodArg, cinf: bool) -> Result<Step> {
    let max = cli.max_arity;
    let c = homology_contraction(&complex_of(x));
    match x {
        Loaded::Dga(_) | Loaded::Ainf { .. } => {
            let a = match x {
                Loaded::Dga(a) => a.to_ainf(max),
                Loaded::Ainf { structure, .. } => structure.truncated(max),
                _ => unreachable!(),
            };
            let strict = a.ops.keys().all(|&n| n <= 2);
            let methods: Vec<Method> = match method {
                MethodArg::Hpt => vec![Method::Hpt],
                MethodArg::Recursive => vec![Method::Recursive],
                MethodArg::Kadeishvili => vec![Method::Kadeishvili],
                MethodArg::Trees => vec![Method::Trees],
                MethodArg::All if strict => Method::ALL.to_vec(),
                MethodArg::All => vec![Method::Hpt, Method::Trees],
            };
            let out = transfer_all_with_budget(&a, &c, max, &methods, cli.tree_budget.into())?;
            let t = &out[0];
            let mut checks = vec![identity_json(&check_stasheff(&t.structure, max))];
            let mut passed = checks[0]["passed"] == json!(true);
            if let Some(f) = &t.morphism {
                let r = check_morphism(f, max);
                passed &= r.passed();
                checks.push(identity_json(&r));
            }
            if cinf {
                let r = check_cinfinity(&t.structure, max);
                passed &= r.passed();
                checks.push(identity_json(&r));
            }
            let report = json!({
                "command": "transfer",
                "kind": "ainf",
                "methods": methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
                "agreement": (methods.len() > 1).then_some(true),
                "homologyDimension": c.small.dim(),
                "operations": ops_summary(&t.structure.ops),
                "checks": checks,
            });
            let doc = emit(&Loaded::Ainf { structure: t.structure.clone(), morphism: t.morphism.clone() });
            Ok((report, passed, Some(emit_string(&doc))))
        }
        Loaded::Dgc(_) | Loaded::AinfCoalgebra(_) => {
            let ainf = match x {
                Loaded::Dgc(d) => d.to_ainf(max),
                Loaded::AinfCoalgebra(a) => a.clone(),
                _ => unreachable!(),
            };
            let mode = CobarMode::Connected;
            let out = match (method, x) {
                (MethodArg::Hpt, _) => transfer_coalgebra(&ainf, &c, max, mode)?,
                (MethodArg::Recursive, Loaded::Dgc(d)) => transfer_coalgebra_recursive(d, &c, max, mode)?,
                (MethodArg::All, Loaded::Dgc(d)) => {
                    let a = transfer_coalgebra(&ainf, &c, max, mode)?;
                    let b = transfer_coalgebra_recursive(d, &c, max, mode)?;
                    if let Some((n, _)) = a.structure.first_difference(&b.structure, max) {
                        return Err(Error::MethodDivergence(format!("hpt and recursive differ on cooperation {n}")));
                    }
                    a
                }
                (MethodArg::All, _) => transfer_coalgebra(&ainf, &c, max, mode)?,
                _ => return Err(Error::Structure(format!("method {method:?} does not apply to coalgebras"))),
            };
            let mut checks = vec![];
            let mut passed = true;
            if let Loaded::Dgc(d) = x {
                let r = check_cotwisting(d, &out.structure, &out.tau, max);
                passed &= r.passed();
                checks.push(identity_json(&r));
            }
            let sizes: serde_json::Map<String, Value> = out
                .structure
                .ops
                .iter()
                .map(|(n, t)| (format!("delta{n}"), json!(t.iter().map(|v| v.len()).sum::<usize>())))
                .collect();
            let report = json!({
                "command": "transfer",
                "kind": "ainf-coalgebra",
                "homologyDimension": c.small.dim(),
                "operations": sizes,
                "checks": checks,
            });
            Ok((report, passed, Some(emit_string(&emit(&Loaded::AinfCoalgebra(out.structure))))))
        }
        Loaded::Dgla(g) => {
            let out = transfer_linf(g, &c, max)?;
            let checks = [
                identity_json(&out.structure.check_square_zero(max)),
                identity_json(&check_master(g, &out.structure, &out.tau, max)),
                contraction_json(&out.perturbed.contraction.verify()),
            ];
            let passed = checks.iter().all(|r| r["passed"] == json!(true));
            let report = json!({
                "command": "transfer",
                "kind": "linf",
                "homologyDimension": c.small.dim(),
                "operations": ops_summary(&out.structure.coderivation.components),
                "agreesWithPerturbationLemma": out.agrees_with_perturbation,
                "checks": checks,
            });
            let doc = emit(&Loaded::Linf { structure: out.structure, twisting: Some((g.clone(), out.tau)) });
            Ok((report, passed, Some(emit_string(&doc))))
        }
        Loaded::Linf { .. } | Loaded::Contraction(_) => {
            Err(Error::Structure("transfer needs a dga, dgc, dgla, ainf or ainf-coalgebra input".into()))
        }
    }
}

fn default_which(x: &Loaded) -> Which {
    match x {
        Loaded::Ainf { morphism: Some(_), .. } => Which::Morphism,
        Loaded::Dga(_) | Loaded::Ainf { .. } => Which::Stasheff,
        Loaded::Dgla(_) | Loaded::Linf { .. } => Which::Master,
        _ => Which::Contraction,
    }
}

fn as_ainf(x: &Loaded, max: usize) -> Option<AInfinityStructure> {
    match x {
        Loaded::Dga(a) => Some(a.to_ainf(max)),
        Loaded::Ainf { structure, .. } => Some(structure.clone()),
        _ => None,
    }
}

fn check(x: &Loaded, max: usize, which: Option<Which>) -> Result<Step> {
    let which = which.unwrap_or_else(|| default_which(x));
    let mismatch = || Error::Structure(format!("check {which:?} does not apply to a {:?} file", x.kind()));
    let checks: Vec<Value> = match which {
        Which::Stasheff => {
            let a = as_ainf(x, max).ok_or_else(mismatch)?;
            vec![identity_json(&check_stasheff(&a, max.min(a.max_arity.max(2))))]
        }
        Which::Cinfinity => {
            let a = as_ainf(x, max).ok_or_else(mismatch)?;
            vec![identity_json(&check_cinfinity(&a, max.min(a.max_arity.max(2))))]
        }
        Which::Morphism => {
            let Loaded::Ainf { morphism: Some(f), structure } = x else { return Err(mismatch()) };
            vec![identity_json(&check_morphism(f, max.min(structure.max_arity.max(2))))]
        }
        Which::Master => match x {
            Loaded::Dgla(g) => {
                let mut r = vec![identity_json(&check_cce_square_zero(g, max))];
                r.push(json!({
                    "name": "jacobi",
                    "passed": g.jacobi_failure().is_none(),
                    "firstFailure": g.jacobi_failure(),
                }));
                r
            }
            Loaded::Linf { structure, twisting } => {
                let n = max.min(structure.max_arity.max(2));
                let mut r = vec![identity_json(&structure.check_square_zero(n))];
                if let Some((g, tau)) = twisting {
                    r.push(identity_json(&check_master(g, structure, tau, n)));
                }
                r
            }
            _ => return Err(mismatch()),
        },
        Which::Contraction => {
            let Loaded::Contraction(c) = x else { return Err(mismatch()) };
            vec![contraction_json(&c.verify())]
        }
    };
    let passed = checks.iter().all(|r| r["passed"] == json!(true));
    Ok((json!({ "command": "check", "which": format!("{which:?}").to_lowercase(), "checks": checks }), passed, None))
}

fn normalize(x: &Loaded) -> Result<Step> {
    match x {
        Loaded::Contraction(c) if !c.verify().all_passed() => {
            let n = normalize_weak_system(&WeakSystem(c.clone()))?;
            let r = n.contraction.verify();
            let report = json!({
                "command": "normalize",
                "weakSystem": true,
                "blockForm": n.blocks.holds(),
                "imageDimension": n.blocks.image_dim,
                "complementDimension": n.blocks.complement_dim,
                "checks": [contraction_json(&r)],
            });
            Ok((report, r.all_passed() && n.blocks.holds(), Some(emit_string(&emit(&Loaded::Contraction(n.contraction))))))
        }
        _ => Ok((json!({ "command": "normalize", "weakSystem": false }), true, Some(emit_string(&emit(x))))),
    }
}
