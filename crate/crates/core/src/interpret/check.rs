//! Equation checking: evaluate both rewrite paths of every equation and
//! compare the resulting cells pointwise on canonical representatives.

use serde::Serialize;
use std::time::Instant;

use super::{moves, EvalCtx, InterpError, Interpretation};
use crate::presentation::{invertibility_equations, Equation};

#[derive(Debug, Clone, Serialize)]
pub struct EquationVerdict {
    pub label: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub millis: u128,
}

impl EquationVerdict {
    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub presentation: String,
    pub equations: Vec<EquationVerdict>,
    pub semantic: Vec<EquationVerdict>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.equations.iter().chain(self.semantic.iter()).all(|v| v.passed())
    }

    pub fn first_failure(&self) -> Option<&EquationVerdict> {
        self.equations
            .iter()
            .chain(self.semantic.iter())
            .find(|v| !v.passed())
    }
}

/// Checks one equation: both sides evaluate from the common source and the
/// resulting cells must agree componentwise.
pub fn check_equation(ctx: &mut EvalCtx, eq: &Equation) -> EquationVerdict {
    let start = Instant::now();
    let res = (|| -> Result<Option<String>, InterpError> {
        let src = ctx.interp.presentation.normalize(&eq.lhs.source)?;
        let (lhs, llp) = moves::eval_path(ctx, &src, &eq.lhs.steps)?;
        let (rhs, rlp) = moves::eval_path(ctx, &src, &eq.rhs.steps)?;
        if *llp.total() != *rlp.total() {
            return Err(InterpError::IllTyped("sides end at different composites".into()));
        }
        Ok(lhs.first_difference(&rhs).map(|(b, a, e)| {
            format!(
                "at ({}, {}), element {} maps to {} on the left and {} on the right",
                llp.total().tgt_cat().objects[b],
                llp.total().src_cat().objects[a],
                e,
                lhs.target.fiber(b, a)[lhs.apply(b, a, lhs.source.pos(b, a, &e).unwrap()) as usize],
                rhs.target.fiber(b, a)[rhs.apply(b, a, rhs.source.pos(b, a, &e).unwrap()) as usize],
            )
        }))
    })();
    let millis = start.elapsed().as_millis();
    match res {
        Ok(None) => EquationVerdict {
            label: eq.label.clone(),
            verdict: "pass".into(),
            witness: None,
            millis,
        },
        Ok(Some(w)) => EquationVerdict {
            label: eq.label.clone(),
            verdict: "fail".into(),
            witness: Some(w),
            millis,
        },
        Err(e) => EquationVerdict {
            label: eq.label.clone(),
            verdict: "error".into(),
            witness: Some(e.to_string()),
            millis,
        },
    }
}

/// Checks derived-cell invertibility marks and other semantic obligations.
fn semantic_verdicts(ctx: &mut EvalCtx) -> Vec<EquationVerdict> {
    let mut out = Vec::new();
    let pres = ctx.interp.presentation.clone();
    for name in &pres.invertible {
        if pres.derived_cell(name).is_none() {
            continue; // generator marks produce syntactic equations
        }
        let start = Instant::now();
        let verdict = match ctx.derived_cell_eval(name) {
            Ok(cell) => {
                if cell.is_bijective() {
                    EquationVerdict {
                        label: format!("{name}.invertible"),
                        verdict: "pass".into(),
                        witness: None,
                        millis: start.elapsed().as_millis(),
                    }
                } else {
                    EquationVerdict {
                        label: format!("{name}.invertible"),
                        verdict: "fail".into(),
                        witness: Some(format!("derived cell `{name}` is not componentwise bijective")),
                        millis: start.elapsed().as_millis(),
                    }
                }
            }
            Err(e) => EquationVerdict {
                label: format!("{name}.invertible"),
                verdict: "error".into(),
                witness: Some(e.to_string()),
                millis: start.elapsed().as_millis(),
            },
        };
        out.push(verdict);
    }
    for (label, note) in &pres.semantic_checks {
        out.push(super::derived::semantic_check(ctx, label, note));
    }
    out
}

/// Evaluates every equation of the presentation (including the generated
/// invertibility pairs) plus the semantic obligations. Equations distribute
/// across scoped worker threads, each with its own evaluation context; the
/// merged report is sorted by label, so it is deterministic regardless of
/// scheduling.
pub fn check_all(interp: &Interpretation) -> CheckReport {
    let mut eqs: Vec<Equation> = interp.presentation.equations.clone();
    eqs.extend(invertibility_equations(&interp.presentation));
    let shared = std::sync::Arc::new(super::EvalCaches::default());
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(4);
    let mut equations: Vec<EquationVerdict> = if workers <= 1 || eqs.len() <= 1 {
        let mut ctx = EvalCtx::with_caches(interp, shared.clone());
        eqs.iter().map(|eq| check_equation(&mut ctx, eq)).collect()
    } else {
        let chunk = eqs.len().div_ceil(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = eqs
                .chunks(chunk)
                .map(|part| {
                    let caches = shared.clone();
                    scope.spawn(move || {
                        let mut ctx = EvalCtx::with_caches(interp, caches);
                        part.iter().map(|eq| check_equation(&mut ctx, eq)).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker")).collect()
        })
    };
    equations.sort_by(|x, y| x.label.cmp(&y.label));
    let mut ctx = EvalCtx::with_caches(interp, shared);
    let mut semantic = semantic_verdicts(&mut ctx);
    semantic.sort_by(|x, y| x.label.cmp(&y.label));
    CheckReport {
        presentation: interp.presentation.name.clone(),
        equations,
        semantic,
    }
}
