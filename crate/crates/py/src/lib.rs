//! Python bindings for the profcheck engine: look up builtin presentations
//! and models, run the equation checker and the derivations, and inspect
//! Karoubi envelopes. Reports come back as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde_json::json;

use profcheck::fincat;
use profcheck::interpret::{check_all, derived};
use profcheck::limits::Limits;
use profcheck::models::{self, builtin::model_from_spec, externalize, MonoidalModel};
use profcheck::presentation::catalog;
use profcheck::report::{render_json, strip_timing, RunReport};

fn load(model: &str, limits: &Limits) -> PyResult<MonoidalModel> {
    let m = if let Some(name) = model.strip_prefix("builtin:") {
        models::builtin_model(name).map_err(|e| PyValueError::new_err(e.to_string()))?
    } else {
        let spec =
            serde_json::from_str(model).map_err(|e| PyValueError::new_err(format!("model JSON: {e}")))?;
        model_from_spec(spec, limits).map_err(|e| PyValueError::new_err(e.to_string()))?
    };
    m.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(m)
}

/// Builtin presentation names with the definition each transcribes.
#[pyfunction]
fn list_presentations() -> Vec<(String, String)> {
    catalog::catalog()
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

/// Builtin model names, usable as "builtin:<name>".
#[pyfunction]
fn list_models() -> Vec<String> {
    models::builtin::zoo_names().into_iter().map(String::from).collect()
}

/// Externalizes a model (builtin:<name> or a model JSON document) into the
/// named presentation and checks every equation. Returns the JSON report.
#[pyfunction]
fn check(model: &str, presentation: &str) -> PyResult<String> {
    let limits = Limits::from_env();
    let m = load(model, &limits)?;
    let needs_trace = matches!(presentation, "T" | "T_bal" | "T_star" | "TensorTrR");
    let m = if needs_trace {
        externalize::with_trace(&m, &limits).map_err(|e| PyValueError::new_err(e.to_string()))?
    } else if presentation == "ParTrL" {
        externalize::with_trace(&m, &limits).unwrap_or(m)
    } else {
        m
    };
    let interp = externalize::externalize(&m, presentation, &limits)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let report = check_all(&interp);
    Ok(render_json(&RunReport {
        command: "check".into(),
        model: m.name.clone(),
        presentation: Some(presentation.to_string()),
        seed: 0,
        passed: report.passed(),
        check: Some(strip_timing(&report)),
        derived: None,
        warnings: Vec::new(),
    }))
}

/// Runs a derivation: traces, trace-from-duals, rotate, lindist, prop4 or
/// karoubi. Returns the JSON result.
#[pyfunction]
fn derive(model: &str, what: &str) -> PyResult<String> {
    let limits = Limits::from_env();
    let m = load(model, &limits)?;
    let ext = |pres: &str| {
        let mm = if matches!(pres, "T_star") {
            externalize::with_trace(&m, &limits).map_err(|e| PyValueError::new_err(e.to_string()))?
        } else {
            m.clone()
        };
        externalize::externalize(&mm, pres, &limits).map_err(|e| PyValueError::new_err(e.to_string()))
    };
    let value = match what {
        "karoubi" => {
            let (env, _) = fincat::karoubi_envelope(&m.base);
            json!({
                "objects": env.n_obj(),
                "morphisms": env.n_mor(),
                "cauchy_complete": fincat::is_cauchy_complete(&env).is_ok(),
            })
        }
        "traces" => {
            let ts = models::find_traces(&m, &limits).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
            json!({"count": ts.len()})
        }
        "trace-from-duals" => {
            let rep = derived::trace_from_duality(&ext("M_RA")?)
                .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
            json!({"t_check_passed": rep.check.passed()})
        }
        "rotate" => {
            let rep = derived::rotate_trace(&ext("T_star")?)
                .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
            json!({
                "round_trip_exact": rep.round_trip_exact,
                "left_axioms_pass": rep.left_axioms.iter().all(|(_, r)| r.is_ok()),
            })
        }
        "lindist" => {
            let rep = derived::linear_distributors(&ext("F_star")?)
                .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
            json!({
                "left_invertible": rep.left_invertible,
                "right_invertible": rep.right_invertible,
                "left_witness": rep.left_witness,
                "right_witness": rep.right_witness,
            })
        }
        "prop4" => {
            let rep = derived::check_prop4_conditions(&ext("T_star")?)
                .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
            json!({
                "applicable": rep.applicable,
                "conditions_hold": rep.conditions_hold,
                "distributors_invert": rep.distributors_invert,
                "finding": rep.finding,
            })
        }
        other => return Err(PyValueError::new_err(format!("unknown derivation `{other}`"))),
    };
    Ok(value.to_string())
}

/// Validates a category JSON document and reports whether every idempotent
/// splits; returns the Karoubi envelope sizes.
#[pyfunction]
fn karoubi(category_json: &str) -> PyResult<String> {
    let limits = Limits::from_env();
    let spec = serde_json::from_str(category_json)
        .map_err(|e| PyValueError::new_err(format!("category JSON: {e}")))?;
    let cat = fincat::validate_category(spec, &limits)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let (env, _) = fincat::karoubi_envelope(&cat);
    Ok(json!({
        "input_cauchy_complete": fincat::is_cauchy_complete(&cat).is_ok(),
        "envelope_objects": env.n_obj(),
        "envelope_morphisms": env.n_mor(),
    })
    .to_string())
}

#[pymodule]
fn profcheck_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(list_presentations, m)?)?;
    m.add_function(wrap_pyfunction!(list_models, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(derive, m)?)?;
    m.add_function(wrap_pyfunction!(karoubi, m)?)?;
    Ok(())
}
