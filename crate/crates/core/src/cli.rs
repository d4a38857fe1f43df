//! Command-line interface: check a model against a presentation, run the
//! derivations, list the catalog.
//!
//! Exit codes: 0 all checks pass, 1 an axiom or equation fails, 2 invalid
//! input or missing structure.

use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;

use crate::fincat;
use crate::interpret::derived;
use crate::interpret::{check_all, Interpretation};
use crate::limits::Limits;
use crate::models::externalize::{externalize, with_trace};
use crate::models::{self, builtin::model_from_spec, MonoidalModel};
use crate::presentation::catalog;
use crate::report::{render_json, render_text, strip_timing, RunReport};

#[derive(Parser)]
#[command(name = "profcheck", about = "finite Prof engine: check monoidal structure presentations on concrete models")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a model, externalize it into a presentation and check every
    /// equation.
    Check {
        /// Model: a JSON file path or builtin:<name>
        model: String,
        #[arg(long)]
        presentation: String,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_elements: Option<usize>,
        /// Write the report to a file as well as stdout
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a derivation: karoubi, traces, trace-from-duals, rotate, lindist
    /// or prop4.
    Derive {
        model: String,
        #[arg(long)]
        what: String,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_elements: Option<usize>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List builtin presentations and models.
    List,
}

fn load_model(spec: &str, limits: &Limits) -> Result<MonoidalModel, String> {
    let m = if let Some(name) = spec.strip_prefix("builtin:") {
        models::builtin_model(name).map_err(|e| e.to_string())?
    } else {
        let text = std::fs::read_to_string(spec).map_err(|e| format!("cannot read `{spec}`: {e}"))?;
        let parsed = serde_json::from_str(&text).map_err(|e| format!("invalid model JSON: {e}"))?;
        model_from_spec(parsed, limits).map_err(|e| e.to_string())?
    };
    m.size_guard(limits).map_err(|e| e.to_string())?;
    m.validate().map_err(|e| e.to_string())?;
    Ok(m)
}

fn externalize_for(
    model: &MonoidalModel,
    pres: &str,
    limits: &Limits,
) -> Result<Interpretation, String> {
    // presentations that interpret a trace get the unique enumerated one
    // attached when the model has none stored; the rotational left-trace
    // check uses a trace when one exists
    let needs_trace = matches!(pres, "T" | "T_bal" | "T_star" | "TensorTrR");
    let m = if needs_trace {
        with_trace(model, limits).map_err(|e| e.to_string())?
    } else if pres == "ParTrL" {
        with_trace(model, limits).unwrap_or_else(|_| model.clone())
    } else {
        model.clone()
    };
    externalize(&m, pres, limits).map_err(|e| e.to_string())
}

fn emit(report: RunReport, format: &str, path: Option<&PathBuf>) -> i32 {
    let text = match format {
        "json" => render_json(&report),
        _ => render_text(&report),
    };
    println!("{text}");
    if let Some(p) = path {
        if let Err(e) = std::fs::write(p, render_json(&report)) {
            eprintln!("cannot write report: {e}");
            return 2;
        }
    }
    if report.passed {
        0
    } else {
        1
    }
}

fn run() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Cmd::List => {
            println!("presentations:");
            for (name, what) in catalog::catalog() {
                println!("  {name:<12} {what}");
            }
            println!("models:");
            for name in models::builtin::zoo_names() {
                println!("  builtin:{name}");
            }
            0
        }
        Cmd::Check {
            model,
            presentation,
            format,
            seed,
            max_elements,
            report,
        } => {
            let mut limits = Limits::from_env();
            if let Some(m) = max_elements {
                limits.max_elements = m;
            }
            let m = match load_model(&model, &limits) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let interp = match externalize_for(&m, &presentation, &limits) {
                Ok(i) => i,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let check = check_all(&interp);
            let passed = check.passed();
            emit(
                RunReport {
                    command: "check".into(),
                    model: m.name.clone(),
                    presentation: Some(presentation),
                    seed,
                    passed,
                    check: Some(strip_timing(&check)),
                    derived: None,
                    warnings: m.validate().ok().flatten().into_iter().collect(),
                },
                &format,
                report.as_ref(),
            )
        }
        Cmd::Derive {
            model,
            what,
            format,
            seed,
            max_elements,
            report,
        } => {
            let mut limits = Limits::from_env();
            if let Some(m) = max_elements {
                limits.max_elements = m;
            }
            let m = match load_model(&model, &limits) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            };
            let derived = match what.as_str() {
                "karoubi" => {
                    let (env, _) = fincat::karoubi_envelope(&m.base);
                    let complete = fincat::is_cauchy_complete(&env).is_ok();
                    Ok(json!({
                        "what": "karoubi",
                        "objects": env.n_obj(),
                        "morphisms": env.n_mor(),
                        "cauchy_complete": complete,
                    }))
                }
                "traces" => models::find_traces(&m, &limits)
                    .map(|ts| json!({"what": "traces", "count": ts.len()}))
                    .map_err(|e| e.to_string()),
                "trace-from-duals" => externalize_for(&m, "M_RA", &limits).and_then(|i| {
                    derived::trace_from_duality(&i)
                        .map(|r| {
                            json!({
                                "what": "trace-from-duals",
                                "t_check_passed": r.check.passed(),
                            })
                        })
                        .map_err(|e| e.to_string())
                }),
                "rotate" => externalize_for(&m, "T_star", &limits).and_then(|i| {
                    derived::rotate_trace(&i)
                        .map(|r| {
                            json!({
                                "what": "rotate",
                                "round_trip_exact": r.round_trip_exact,
                                "left_axioms": r
                                    .left_axioms
                                    .iter()
                                    .map(|(n, v)| json!({"axiom": n, "ok": v.is_ok()}))
                                    .collect::<Vec<_>>(),
                            })
                        })
                        .map_err(|e| e.to_string())
                }),
                "lindist" => externalize_for(&m, "F_star", &limits).and_then(|i| {
                    derived::linear_distributors(&i)
                        .map(|r| {
                            json!({
                                "what": "lindist",
                                "left_invertible": r.left_invertible,
                                "right_invertible": r.right_invertible,
                                "left_witness": r.left_witness,
                                "right_witness": r.right_witness,
                            })
                        })
                        .map_err(|e| e.to_string())
                }),
                "prop4" => externalize_for(&m, "T_star", &limits).and_then(|i| {
                    derived::check_prop4_conditions(&i)
                        .map(|r| {
                            json!({
                                "what": "prop4",
                                "applicable": r.applicable,
                                "conditions_hold": r.conditions_hold,
                                "distributors_invert": r.distributors_invert,
                                "finding": r.finding,
                            })
                        })
                        .map_err(|e| e.to_string())
                }),
                other => Err(format!("unknown derivation `{other}`")),
            };
            match derived {
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
                Ok(value) => {
                    let passed = value
                        .get("t_check_passed")
                        .or_else(|| value.get("round_trip_exact"))
                        .map(|v| v.as_bool().unwrap_or(true))
                        .unwrap_or(true);
                    emit(
                        RunReport {
                            command: format!("derive --what {what}"),
                            model: m.name.clone(),
                            presentation: None,
                            seed,
                            passed,
                            check: None,
                            derived: Some(value),
                            warnings: Vec::new(),
                        },
                        &format,
                        report.as_ref(),
                    )
                }
            }
        }
    }
}

pub fn main() {
    std::process::exit(run());
}
