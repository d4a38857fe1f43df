//! The classical trace axiom families and the brute-force trace search.

use super::{ModelError, MonoidalModel, TraceFamily};
use crate::limits::Limits;

/// Verdicts for the classical families: tightening in both variables,
/// sliding, vanishing at the unit and at the tensor, superposing, yanking.
#[derive(Debug, Clone)]
pub struct JsvReport {
    pub families: Vec<(String, Result<(), String>)>,
}

impl JsvReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(|(_, r)| r.is_ok())
    }

    pub fn first_failure(&self) -> Option<(&str, &str)> {
        self.families
            .iter()
            .find_map(|(n, r)| r.as_ref().err().map(|e| (n.as_str(), e.as_str())))
    }
}

fn check_family(
    m: &MonoidalModel,
    tr: &TraceFamily,
    family: &str,
) -> Result<(), String> {
    let c = &m.base;
    let n = c.n_obj();
    match family {
        // naturality in the output: Tr((h⊗1)∘f) = h∘Tr(f)
        "tightening_out" => {
            for x in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        for &f in &c.hom(m.tobj(a, x), m.tobj(b, x)) {
                            for b2 in 0..n {
                                for &h in &c.hom(b, b2) {
                                    let lhs = m.trace_apply(
                                        tr,
                                        x,
                                        a,
                                        b2,
                                        c.compose(m.tmor(h, c.id_of(x)), f).unwrap(),
                                    );
                                    let rhs = c.compose(h, m.trace_apply(tr, x, a, b, f)).unwrap();
                                    if lhs != rhs {
                                        return Err(format!(
                                            "x={}, f={}, h={}",
                                            c.objects[x], c.mor_ids[f], c.mor_ids[h]
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Ok(())
        }
        // naturality in the input: Tr(f∘(g⊗1)) = Tr(f)∘g
        "tightening_in" => {
            for x in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        for &f in &c.hom(m.tobj(a, x), m.tobj(b, x)) {
                            for a0 in 0..n {
                                for &g in &c.hom(a0, a) {
                                    let lhs = m.trace_apply(
                                        tr,
                                        x,
                                        a0,
                                        b,
                                        c.compose(f, m.tmor(g, c.id_of(x))).unwrap(),
                                    );
                                    let rhs = c.compose(m.trace_apply(tr, x, a, b, f), g).unwrap();
                                    if lhs != rhs {
                                        return Err(format!(
                                            "x={}, f={}, g={}",
                                            c.objects[x], c.mor_ids[f], c.mor_ids[g]
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Ok(())
        }
        // dinaturality: Tr^x((1⊗k)∘f) = Tr^{x'}(f∘(1⊗k)) for k: x' → x,
        // f: a⊗x → b⊗x'
        "sliding" => {
            for x in 0..n {
                for x2 in 0..n {
                    for &k in &c.hom(x2, x) {
                        for a in 0..n {
                            for b in 0..n {
                                for &f in &c.hom(m.tobj(a, x), m.tobj(b, x2)) {
                                    let lhs = m.trace_apply(
                                        tr,
                                        x,
                                        a,
                                        b,
                                        c.compose(m.tmor(c.id_of(b), k), f).unwrap(),
                                    );
                                    let rhs = m.trace_apply(
                                        tr,
                                        x2,
                                        a,
                                        b,
                                        c.compose(f, m.tmor(c.id_of(a), k)).unwrap(),
                                    );
                                    if lhs != rhs {
                                        return Err(format!(
                                            "k={}, f={}",
                                            c.mor_ids[k], c.mor_ids[f]
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Ok(())
        }
        // Tr^I(f) = ρ_b ∘ f ∘ ρ_a⁻¹
        "vanishing_unit" => {
            let i = m.unit;
            for a in 0..n {
                for b in 0..n {
                    for &f in &c.hom(m.tobj(a, i), m.tobj(b, i)) {
                        let rho_inv = m.inverse_of(m.runitor[a]).unwrap();
                        let expected = c.compose_chain(&[m.runitor[b], f, rho_inv]).unwrap();
                        let got = m.trace_apply(tr, i, a, b, f);
                        if got != expected {
                            return Err(format!("f={}", c.mor_ids[f]));
                        }
                    }
                }
            }
            Ok(())
        }
        // Tr^{x⊗y}(f) = Tr^x(Tr^y(α-conjugate of f))
        "vanishing_tensor" => {
            for x in 0..n {
                for y in 0..n {
                    let xy = m.tobj(x, y);
                    for a in 0..n {
                        for b in 0..n {
                            for &f in &c.hom(m.tobj(a, xy), m.tobj(b, xy)) {
                                let conj = c
                                    .compose_chain(&[
                                        m.inverse_of(m.associator[b][x][y]).unwrap(),
                                        f,
                                        m.associator[a][x][y],
                                    ])
                                    .unwrap();
                                let inner = m.trace_apply(tr, y, m.tobj(a, x), m.tobj(b, x), conj);
                                let outer = m.trace_apply(tr, x, a, b, inner);
                                let direct = m.trace_apply(tr, xy, a, b, f);
                                if outer != direct {
                                    return Err(format!(
                                        "x={}, y={}, f={}",
                                        c.objects[x], c.objects[y], c.mor_ids[f]
                                    ));
                                }
                            }
                        }
                    }
                }
            }
            Ok(())
        }
        // Tr^x(α-conjugate of g⊗f) = g ⊗ Tr^x(f)
        "superposing" => {
            for x in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        for &f in &c.hom(m.tobj(a, x), m.tobj(b, x)) {
                            for cc in 0..n {
                                for d in 0..n {
                                    for &g in &c.hom(cc, d) {
                                        let lhs_arg = c
                                            .compose_chain(&[
                                                m.inverse_of(m.associator[d][b][x]).unwrap(),
                                                m.tmor(g, f),
                                                m.associator[cc][a][x],
                                            ])
                                            .unwrap();
                                        let lhs = m.trace_apply(
                                            tr,
                                            x,
                                            m.tobj(cc, a),
                                            m.tobj(d, b),
                                            lhs_arg,
                                        );
                                        let rhs = m.tmor(g, m.trace_apply(tr, x, a, b, f));
                                        if lhs != rhs {
                                            return Err(format!(
                                                "x={}, f={}, g={}",
                                                c.objects[x], c.mor_ids[f], c.mor_ids[g]
                                            ));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Ok(())
        }
        // Tr^x(σ_{x,x}) = θ_x (identity twist when absent); skipped without
        // a braiding
        "yanking" => {
            let Some(br) = &m.braiding else {
                return Ok(());
            };
            for x in 0..n {
                let got = m.trace_apply(tr, x, x, x, br[x][x]);
                let expected = m.twist.as_ref().map_or(c.id_of(x), |t| t[x]);
                if got != expected {
                    return Err(format!("x={}", c.objects[x]));
                }
            }
            Ok(())
        }
        other => Err(format!("unknown family `{other}`")),
    }
}

pub const JSV_FAMILIES: [&str; 7] = [
    "tightening_in",
    "tightening_out",
    "sliding",
    "vanishing_unit",
    "vanishing_tensor",
    "superposing",
    "yanking",
];

/// Exhaustively checks the classical trace axiom families, reporting a
/// witness per failing family.
pub fn check_jsv_axioms(m: &MonoidalModel, tr: &TraceFamily) -> JsvReport {
    JsvReport {
        families: JSV_FAMILIES
            .iter()
            .map(|f| (f.to_string(), check_family(m, tr, f)))
            .collect(),
    }
}

/// Exhaustive enumeration of every trace family satisfying the classical
/// axioms, in deterministic order. Guarded by the candidate-entry budget.
pub fn find_traces(m: &MonoidalModel, limits: &Limits) -> Result<Vec<TraceFamily>, ModelError> {
    let c = &m.base;
    let n = c.n_obj();
    // function spaces per triple
    let mut spaces: Vec<(usize, usize, usize, usize, usize)> = Vec::new(); // x,a,b,src,tgt
    let mut total: f64 = 1.0;
    for x in 0..n {
        for a in 0..n {
            for b in 0..n {
                let src = c.hom(m.tobj(a, x), m.tobj(b, x)).len();
                let tgt = c.hom(a, b).len();
                if src > 0 && tgt == 0 {
                    // no function exists: a legitimate empty search space
                    return Ok(Vec::new());
                }
                if src > 0 {
                    total *= (tgt as f64).powi(src as i32);
                    if total > limits.trace_budget as f64 {
                        return Err(ModelError::SizeGuard(u64::MAX, limits.trace_budget));
                    }
                }
                spaces.push((x, a, b, src, tgt));
            }
        }
    }
    // odometer over function graphs, lexicographic
    let mut counters: Vec<Vec<u32>> = spaces.iter().map(|&(_, _, _, src, _)| vec![0u32; src]).collect();
    let mut out = Vec::new();
    loop {
        let mut maps = vec![vec![vec![Vec::new(); n]; n]; n];
        for (i, &(x, a, b, _, _)) in spaces.iter().enumerate() {
            maps[x][a][b] = counters[i].clone();
        }
        let cand = TraceFamily { maps };
        if check_jsv_axioms(m, &cand).passed() {
            out.push(cand);
        }
        // increment
        let mut i = spaces.len();
        'inc: loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            let (_, _, _, src, tgt) = spaces[i];
            let mut j = src;
            while j > 0 {
                j -= 1;
                counters[i][j] += 1;
                if (counters[i][j] as usize) < tgt {
                    break 'inc;
                }
                counters[i][j] = 0;
            }
        }
    }
}

/// Enumerates braiding candidates (natural families with the hexagon laws);
/// used to certify that a model admits none.
pub fn find_braidings(m: &MonoidalModel) -> Vec<Vec<Vec<usize>>> {
    let c = &m.base;
    let n = c.n_obj();
    // candidate component per (a,b): an iso a⊗b → b⊗a; discrete-style
    // models have at most one candidate per slot
    let mut slots: Vec<Vec<usize>> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let cands: Vec<usize> = c
                .hom(m.tobj(a, b), m.tobj(b, a))
                .into_iter()
                .filter(|&f| m.is_iso(f))
                .collect();
            if cands.is_empty() {
                return Vec::new();
            }
            slots.push(cands);
        }
    }
    let mut idx = vec![0usize; slots.len()];
    let mut out = Vec::new();
    loop {
        let br: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| slots[a * n + b][idx[a * n + b]]).collect())
            .collect();
        let mut probe = m.clone();
        probe.braiding = Some(br.clone());
        probe.twist = None;
        probe.trace = None;
        probe.duals = None;
        probe.star = None;
        if probe.validate().is_ok() {
            out.push(br);
        }
        let mut i = slots.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < slots[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin::{bool_chain, builtin_model, monoid_model, s3_discrete, zmod};

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn bool_chain_has_no_trace() {
        // oracle: at (x,a,b) = (0,1,0), Hom(1∧0, 0∧0) = Hom(0,0) is nonempty
        // but Hom(1,0) is empty, so no function family exists
        let m = bool_chain();
        assert!(find_traces(&m, &limits()).unwrap().is_empty());
    }

    #[test]
    fn zmod2_has_exactly_one_trace() {
        let m = zmod(2);
        let traces = find_traces(&m, &limits()).unwrap();
        assert_eq!(traces.len(), 1);
        assert!(check_jsv_axioms(&m, &traces[0]).passed());
    }

    #[test]
    fn zmod3_has_exactly_one_trace() {
        let m = zmod(3);
        let traces = find_traces(&m, &limits()).unwrap();
        assert_eq!(traces.len(), 1);
    }

    #[test]
    fn terminal_has_exactly_one_trace() {
        let m = builtin_model("terminal").unwrap();
        assert_eq!(find_traces(&m, &limits()).unwrap().len(), 1);
    }

    #[test]
    fn monoid_model_trace_is_identity_by_eckmann_hilton() {
        // analytic oracle: vanishing at the unit forces Tr = id on the
        // single object, and commutativity makes sliding hold
        let m = monoid_model("m2", vec![vec![0, 1], vec![1, 1]]).unwrap();
        let traces = find_traces(&m, &limits()).unwrap();
        assert_eq!(traces.len(), 1);
        let tr = &traces[0];
        for (pos, &f) in m.base.hom(0, 0).iter().enumerate() {
            assert_eq!(tr.maps[0][0][0][pos] as usize, pos, "Tr must fix {}", m.base.mor_ids[f]);
        }
    }

    #[test]
    fn non_dinatural_mutation_caught_with_witness() {
        let m = monoid_model("m2", vec![vec![0, 1], vec![1, 1]]).unwrap();
        let mut tr = find_traces(&m, &limits()).unwrap().remove(0);
        tr.maps[0][0][0][1] = 0; // retarget Tr(z) to 1
        let rep = check_jsv_axioms(&m, &tr);
        assert!(!rep.passed());
        assert!(rep.first_failure().is_some());
    }

    #[test]
    fn s3_admits_no_braiding() {
        // any braiding on a discrete group model forces commutativity
        let m = s3_discrete();
        assert!(find_braidings(&m).is_empty());
    }

    #[test]
    fn zmod2_admits_braiding() {
        assert_eq!(find_braidings(&zmod(2)).len(), 1);
    }
}
