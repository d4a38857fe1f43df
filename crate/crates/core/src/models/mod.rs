//! Concrete finite monoidal categories with optional braiding, twist,
//! trace, duals and *-autonomous data, plus the classical trace-axiom
//! checks and the brute-force trace search.

pub mod builtin;
pub mod externalize;
pub mod jsv;

pub use builtin::builtin_model;
pub use jsv::{check_jsv_axioms, find_traces, JsvReport};

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::fincat::FinCategory;
use crate::limits::Limits;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("model law `{law}` fails: {witness}")]
    Law { law: String, witness: String },
    #[error("missing structure `{0}`")]
    MissingStructure(String),
    #[error("unknown model `{0}`")]
    UnknownName(String),
    #[error("size guard: {0} exceeds cap {1}")]
    SizeGuard(u64, u64),
    #[error(transparent)]
    Cat(#[from] crate::fincat::CatError),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Duals: per object a dual object with unit I → a⊗a* and counit a*⊗a → I.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualData {
    pub dual: Vec<usize>,
    pub unit: Vec<usize>,
    pub counit: Vec<usize>,
}

/// Second monoidal structure ⅋ with a dualizing negation relating it to ⊗.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarData {
    pub par_obj: Vec<Vec<usize>>,
    pub par_mor: Vec<Vec<usize>>,
    pub bottom: usize,
    pub par_associator: Vec<Vec<Vec<usize>>>,
    pub par_lunitor: Vec<usize>,
    pub par_runitor: Vec<usize>,
    pub neg_obj: Vec<usize>,
    /// f: a → b maps to ¬f: ¬b → ¬a.
    pub neg_mor: Vec<usize>,
    /// π_a: a ⊗ ¬a → ⊥.
    pub pairing: Vec<usize>,
    /// γ_a: I → ¬a ⅋ a.
    pub copairing: Vec<usize>,
}

/// A trace family: for every (x, a, b) a function
/// Hom(a⊗x, b⊗x) → Hom(a, b), stored as position maps over the sorted
/// hom-sets of the base category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFamily {
    pub maps: Vec<Vec<Vec<Vec<u32>>>>,
}

#[derive(Debug, Clone)]
pub struct MonoidalModel {
    pub name: String,
    pub base: Arc<FinCategory>,
    pub tensor_obj: Vec<Vec<usize>>,
    pub tensor_mor: Vec<Vec<usize>>,
    pub unit: usize,
    /// associator[a][b][c]: (a⊗b)⊗c → a⊗(b⊗c)
    pub associator: Vec<Vec<Vec<usize>>>,
    /// lunitor[a]: I⊗a → a
    pub lunitor: Vec<usize>,
    /// runitor[a]: a⊗I → a
    pub runitor: Vec<usize>,
    /// braiding[a][b]: a⊗b → b⊗a
    pub braiding: Option<Vec<Vec<usize>>>,
    pub twist: Option<Vec<usize>>,
    pub trace: Option<TraceFamily>,
    pub duals: Option<DualData>,
    pub star: Option<StarData>,
}

impl MonoidalModel {
    pub fn tobj(&self, a: usize, b: usize) -> usize {
        self.tensor_obj[a][b]
    }

    pub fn tmor(&self, f: usize, g: usize) -> usize {
        self.tensor_mor[f][g]
    }

    /// A strict model skeleton: all structure isos are identities; callers
    /// fill the optional data.
    pub fn strict(
        name: &str,
        base: Arc<FinCategory>,
        tensor_obj: Vec<Vec<usize>>,
        tensor_mor: Vec<Vec<usize>>,
        unit: usize,
    ) -> MonoidalModel {
        let n = base.n_obj();
        let associator = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        (0..n)
                            .map(|cc| base.id_of(tensor_obj[tensor_obj[a][b]][cc]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let lunitor = (0..n).map(|a| base.id_of(tensor_obj[unit][a])).collect();
        let runitor = (0..n).map(|a| base.id_of(tensor_obj[a][unit])).collect();
        MonoidalModel {
            name: name.into(),
            base,
            tensor_obj,
            tensor_mor,
            unit,
            associator,
            lunitor,
            runitor,
            braiding: None,
            twist: None,
            trace: None,
            duals: None,
            star: None,
        }
    }

    /// Sorted hom-set (morphism indices).
    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        self.base.hom(a, b)
    }

    pub fn hom_pos(&self, a: usize, b: usize, f: usize) -> u32 {
        self.base
            .hom(a, b)
            .iter()
            .position(|&g| g == f)
            .expect("morphism in hom-set") as u32
    }

    pub fn is_iso(&self, f: usize) -> bool {
        let (a, b) = (self.base.src(f), self.base.tgt(f));
        self.base.hom(b, a).iter().any(|&g| {
            self.base.compose(g, f) == Some(self.base.id_of(a))
                && self.base.compose(f, g) == Some(self.base.id_of(b))
        })
    }

    pub fn inverse_of(&self, f: usize) -> Option<usize> {
        let (a, b) = (self.base.src(f), self.base.tgt(f));
        self.base.hom(b, a).into_iter().find(|&g| {
            self.base.compose(g, f) == Some(self.base.id_of(a))
                && self.base.compose(f, g) == Some(self.base.id_of(b))
        })
    }

    fn law(&self, law: &str, witness: String) -> ModelError {
        ModelError::Law {
            law: law.into(),
            witness,
        }
    }

    fn check_monoidal_structure(
        &self,
        tobj: &[Vec<usize>],
        tmor: &[Vec<usize>],
        unit: usize,
        assoc: &[Vec<Vec<usize>>],
        lun: &[usize],
        run: &[usize],
        tag: &str,
    ) -> Result<(), ModelError> {
        let c = &self.base;
        let n = c.n_obj();
        for a in 0..n {
            for b in 0..n {
                let idid = tmor[c.id_of(a)][c.id_of(b)];
                if idid != c.id_of(tobj[a][b]) {
                    return Err(self.law(
                        &format!("{tag} tensor identities"),
                        format!("id_{} , id_{}", c.objects[a], c.objects[b]),
                    ));
                }
            }
        }
        for f in 0..c.n_mor() {
            for g in 0..c.n_mor() {
                let fg = tmor[f][g];
                if c.src(fg) != tobj[c.src(f)][c.src(g)] || c.tgt(fg) != tobj[c.tgt(f)][c.tgt(g)] {
                    return Err(self.law(
                        &format!("{tag} tensor boundaries"),
                        format!("{} , {}", c.mor_ids[f], c.mor_ids[g]),
                    ));
                }
            }
        }
        for f2 in 0..c.n_mor() {
            for f1 in 0..c.n_mor() {
                let Some(f21) = c.compose(f2, f1) else { continue };
                for g2 in 0..c.n_mor() {
                    for g1 in 0..c.n_mor() {
                        let Some(g21) = c.compose(g2, g1) else { continue };
                        let lhs = tmor[f21][g21];
                        let rhs = c.compose(tmor[f2][g2], tmor[f1][g1]).unwrap();
                        if lhs != rhs {
                            return Err(self.law(
                                &format!("{tag} tensor composition"),
                                format!(
                                    "({},{}) then ({},{})",
                                    c.mor_ids[f1], c.mor_ids[g1], c.mor_ids[f2], c.mor_ids[g2]
                                ),
                            ));
                        }
                    }
                }
            }
        }
        for a in 0..n {
            let l = lun[a];
            if c.src(l) != tobj[unit][a] || c.tgt(l) != a || !self.is_iso(l) {
                return Err(self.law(&format!("{tag} left unitor"), c.objects[a].clone()));
            }
            let r = run[a];
            if c.src(r) != tobj[a][unit] || c.tgt(r) != a || !self.is_iso(r) {
                return Err(self.law(&format!("{tag} right unitor"), c.objects[a].clone()));
            }
        }
        for f in 0..c.n_mor() {
            let (a, b) = (c.src(f), c.tgt(f));
            let lhs = c.compose(f, lun[a]).unwrap();
            let rhs = c.compose(lun[b], tmor[c.id_of(unit)][f]).unwrap();
            if lhs != rhs {
                return Err(self.law(&format!("{tag} left unitor naturality"), c.mor_ids[f].clone()));
            }
            let lhs = c.compose(f, run[a]).unwrap();
            let rhs = c.compose(run[b], tmor[f][c.id_of(unit)]).unwrap();
            if lhs != rhs {
                return Err(self.law(&format!("{tag} right unitor naturality"), c.mor_ids[f].clone()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let al = assoc[a][b][d];
                    if c.src(al) != tobj[tobj[a][b]][d]
                        || c.tgt(al) != tobj[a][tobj[b][d]]
                        || !self.is_iso(al)
                    {
                        return Err(self.law(
                            &format!("{tag} associator"),
                            format!("({},{},{})", c.objects[a], c.objects[b], c.objects[d]),
                        ));
                    }
                }
            }
        }
        // naturality in each slot
        for f in 0..c.n_mor() {
            for b in 0..n {
                for d in 0..n {
                    let (a1, a2) = (c.src(f), c.tgt(f));
                    let idb = c.id_of(b);
                    let idd = c.id_of(d);
                    let lhs = c.compose(tmor[f][c.id_of(tobj[b][d])], assoc[a1][b][d]).unwrap();
                    let rhs = c.compose(assoc[a2][b][d], tmor[tmor[f][idb]][idd]).unwrap();
                    if lhs != rhs {
                        return Err(self.law(
                            &format!("{tag} associator naturality (slot 1)"),
                            c.mor_ids[f].clone(),
                        ));
                    }
                    let lhs = c.compose(tmor[idb][tmor[f][idd]], assoc[b][a1][d]).unwrap();
                    let rhs = c.compose(assoc[b][a2][d], tmor[tmor[idb][f]][idd]).unwrap();
                    if lhs != rhs {
                        return Err(self.law(
                            &format!("{tag} associator naturality (slot 2)"),
                            c.mor_ids[f].clone(),
                        ));
                    }
                    let lhs = c.compose(tmor[idb][tmor[idd][f]], assoc[b][d][a1]).unwrap();
                    let rhs = c.compose(assoc[b][d][a2], tmor[c.id_of(tobj[b][d])][f]).unwrap();
                    if lhs != rhs {
                        return Err(self.law(
                            &format!("{tag} associator naturality (slot 3)"),
                            c.mor_ids[f].clone(),
                        ));
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        let lhs = c
                            .compose(assoc[a][b][tobj[d][e]], assoc[tobj[a][b]][d][e])
                            .unwrap();
                        let rhs = c
                            .compose(
                                tmor[c.id_of(a)][assoc[b][d][e]],
                                c.compose(assoc[a][tobj[b][d]][e], tmor[assoc[a][b][d]][c.id_of(e)])
                                    .unwrap(),
                            )
                            .unwrap();
                        if lhs != rhs {
                            return Err(self.law(
                                &format!("{tag} pentagon"),
                                format!(
                                    "({},{},{},{})",
                                    c.objects[a], c.objects[b], c.objects[d], c.objects[e]
                                ),
                            ));
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let lhs = tmor[run[a]][c.id_of(b)];
                let rhs = c.compose(tmor[c.id_of(a)][lun[b]], assoc[a][unit][b]).unwrap();
                if lhs != rhs {
                    return Err(self.law(
                        &format!("{tag} triangle"),
                        format!("({},{})", c.objects[a], c.objects[b]),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Exhaustive validation of every law carried by the model; optional
    /// structure is checked exactly when present. A base that is not Cauchy
    /// complete is reported as a warning string, not a failure.
    pub fn validate(&self) -> Result<Option<String>, ModelError> {
        self.base.check_laws()?;
        self.check_monoidal_structure(
            &self.tensor_obj,
            &self.tensor_mor,
            self.unit,
            &self.associator,
            &self.lunitor,
            &self.runitor,
            "tensor",
        )?;
        let c = &self.base;
        let n = c.n_obj();
        if let Some(br) = &self.braiding {
            for a in 0..n {
                for b in 0..n {
                    let s = br[a][b];
                    if c.src(s) != self.tobj(a, b) || c.tgt(s) != self.tobj(b, a) || !self.is_iso(s) {
                        return Err(self.law("braiding", format!("({},{})", c.objects[a], c.objects[b])));
                    }
                }
            }
            for f in 0..c.n_mor() {
                for g in 0..c.n_mor() {
                    let lhs = c.compose(br[c.tgt(f)][c.tgt(g)], self.tmor(f, g)).unwrap();
                    let rhs = c.compose(self.tmor(g, f), br[c.src(f)][c.src(g)]).unwrap();
                    if lhs != rhs {
                        return Err(self.law(
                            "braiding naturality",
                            format!("({},{})", c.mor_ids[f], c.mor_ids[g]),
                        ));
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    for d in 0..n {
                        let lhs = c
                            .compose(
                                self.associator[b][d][a],
                                c.compose(br[a][self.tobj(b, d)], self.associator[a][b][d]).unwrap(),
                            )
                            .unwrap();
                        let rhs = c
                            .compose(
                                self.tmor(c.id_of(b), br[a][d]),
                                c.compose(self.associator[b][a][d], self.tmor(br[a][b], c.id_of(d)))
                                    .unwrap(),
                            )
                            .unwrap();
                        if lhs != rhs {
                            return Err(self.law(
                                "hexagon 1",
                                format!("({},{},{})", c.objects[a], c.objects[b], c.objects[d]),
                            ));
                        }
                        let ainv = |x: usize, y: usize, z: usize| self.inverse_of(self.associator[x][y][z]).unwrap();
                        let lhs = c
                            .compose(
                                ainv(d, a, b),
                                c.compose(br[self.tobj(a, b)][d], ainv(a, b, d)).unwrap(),
                            )
                            .unwrap();
                        let rhs = c
                            .compose(
                                self.tmor(br[a][d], c.id_of(b)),
                                c.compose(ainv(a, d, b), self.tmor(c.id_of(a), br[b][d])).unwrap(),
                            )
                            .unwrap();
                        if lhs != rhs {
                            return Err(self.law(
                                "hexagon 2",
                                format!("({},{},{})", c.objects[a], c.objects[b], c.objects[d]),
                            ));
                        }
                    }
                }
            }
        }
        if let Some(tw) = &self.twist {
            let br = self
                .braiding
                .as_ref()
                .ok_or(ModelError::MissingStructure("braiding for twist".into()))?;
            for a in 0..n {
                let t = tw[a];
                if c.src(t) != a || c.tgt(t) != a || !self.is_iso(t) {
                    return Err(self.law("twist boundary", c.objects[a].clone()));
                }
            }
            for f in 0..c.n_mor() {
                let lhs = c.compose(tw[c.tgt(f)], f).unwrap();
                let rhs = c.compose(f, tw[c.src(f)]).unwrap();
                if lhs != rhs {
                    return Err(self.law("twist naturality", c.mor_ids[f].clone()));
                }
            }
            if tw[self.unit] != c.id_of(self.unit) {
                return Err(self.law("twist at unit", String::new()));
            }
            for a in 0..n {
                for b in 0..n {
                    let lhs = tw[self.tobj(a, b)];
                    let rhs = c
                        .compose(br[b][a], c.compose(br[a][b], self.tmor(tw[a], tw[b])).unwrap())
                        .unwrap();
                    if lhs != rhs {
                        return Err(self.law("balance", format!("({},{})", c.objects[a], c.objects[b])));
                    }
                }
            }
        }
        if let Some(du) = &self.duals {
            for a in 0..n {
                let ad = du.dual[a];
                let eta = du.unit[a];
                let eps = du.counit[a];
                if c.src(eta) != self.unit || c.tgt(eta) != self.tobj(a, ad) {
                    return Err(self.law("dual unit boundary", c.objects[a].clone()));
                }
                if c.src(eps) != self.tobj(ad, a) || c.tgt(eps) != self.unit {
                    return Err(self.law("dual counit boundary", c.objects[a].clone()));
                }
                let lam_inv = self.inverse_of(self.lunitor[a]).unwrap();
                let snake = c
                    .compose_chain(&[
                        self.runitor[a],
                        self.tmor(c.id_of(a), eps),
                        self.associator[a][ad][a],
                        self.tmor(eta, c.id_of(a)),
                        lam_inv,
                    ])
                    .unwrap();
                if snake != c.id_of(a) {
                    return Err(self.law("snake (object)", c.objects[a].clone()));
                }
                let rho_inv = self.inverse_of(self.runitor[ad]).unwrap();
                let assoc_inv = self.inverse_of(self.associator[ad][a][ad]).unwrap();
                let snake = c
                    .compose_chain(&[
                        self.lunitor[ad],
                        self.tmor(eps, c.id_of(ad)),
                        assoc_inv,
                        self.tmor(c.id_of(ad), eta),
                        rho_inv,
                    ])
                    .unwrap();
                if snake != c.id_of(ad) {
                    return Err(self.law("snake (dual)", c.objects[a].clone()));
                }
            }
        }
        if let Some(st) = &self.star {
            self.check_monoidal_structure(
                &st.par_obj,
                &st.par_mor,
                st.bottom,
                &st.par_associator,
                &st.par_lunitor,
                &st.par_runitor,
                "par",
            )?;
            for a in 0..n {
                if st.neg_obj[st.neg_obj[a]] != a {
                    return Err(self.law("negation involutive", c.objects[a].clone()));
                }
                let pi = st.pairing[a];
                if c.src(pi) != self.tobj(a, st.neg_obj[a]) || c.tgt(pi) != st.bottom {
                    return Err(self.law("pairing boundary", c.objects[a].clone()));
                }
                let ga = st.copairing[a];
                if c.src(ga) != self.unit || c.tgt(ga) != st.par_obj[st.neg_obj[a]][a] {
                    return Err(self.law("copairing boundary", c.objects[a].clone()));
                }
            }
            for f in 0..c.n_mor() {
                let nf = st.neg_mor[f];
                if c.src(nf) != st.neg_obj[c.tgt(f)] || c.tgt(nf) != st.neg_obj[c.src(f)] {
                    return Err(self.law("negation boundary", c.mor_ids[f].clone()));
                }
            }
            for f2 in 0..c.n_mor() {
                for f1 in 0..c.n_mor() {
                    let Some(f21) = c.compose(f2, f1) else { continue };
                    let lhs = st.neg_mor[f21];
                    let rhs = c.compose(st.neg_mor[f1], st.neg_mor[f2]).unwrap();
                    if lhs != rhs {
                        return Err(self.law(
                            "negation contravariant",
                            format!("({},{})", c.mor_ids[f2], c.mor_ids[f1]),
                        ));
                    }
                }
            }
        }
        if let Some(tr) = &self.trace {
            for x in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let src = c.hom(self.tobj(a, x), self.tobj(b, x)).len();
                        let tgt = c.hom(a, b).len();
                        let m = &tr.maps[x][a][b];
                        if m.len() != src || m.iter().any(|&p| p as usize >= tgt.max(1)) {
                            return Err(self.law(
                                "trace shape",
                                format!("({},{},{})", c.objects[x], c.objects[a], c.objects[b]),
                            ));
                        }
                        if src > 0 && tgt == 0 {
                            return Err(self.law(
                                "trace shape",
                                format!(
                                    "no function exists at ({},{},{})",
                                    c.objects[x], c.objects[a], c.objects[b]
                                ),
                            ));
                        }
                    }
                }
            }
        }
        Ok(crate::fincat::is_cauchy_complete(&self.base)
            .err()
            .map(|e| format!("base is not Cauchy complete (idempotent `{e}`); consider the Karoubi envelope")))
    }

    /// Applies a trace family entry by morphism index.
    pub fn trace_apply(&self, tr: &TraceFamily, x: usize, a: usize, b: usize, f: usize) -> usize {
        let pos = self.hom_pos(self.tobj(a, x), self.tobj(b, x), f);
        let out = tr.maps[x][a][b][pos as usize];
        self.base.hom(a, b)[out as usize]
    }

    pub fn size_guard(&self, limits: &Limits) -> Result<(), ModelError> {
        if self.base.n_mor() > limits.max_morphisms {
            return Err(ModelError::SizeGuard(
                self.base.n_mor() as u64,
                limits.max_morphisms as u64,
            ));
        }
        Ok(())
    }
}
