//! Interpretation of presentations in finite Prof: states evaluate to
//! layered composites of profunctors, rewrite paths evaluate to natural
//! families on coend representatives, and equations are checked pointwise.

pub mod check;
pub mod derived;
pub mod moves;

pub use check::{check_all, check_equation, CheckReport, EquationVerdict};

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::fincat::{FinCategory, ProductCat};
use crate::limits::Limits;
use crate::models::MonoidalModel;
use crate::presentation::{PresError, Presentation, SColour, State, Tile};
use crate::prof::{
    self, coend::fold_layers, CoendTable, Elem, Prof, ProfCell, ProfError,
};

#[derive(Debug, thiserror::Error)]
pub enum InterpError {
    #[error(transparent)]
    Pres(#[from] PresError),
    #[error(transparent)]
    Prof(#[from] ProfError),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
    #[error(transparent)]
    Cat(#[from] crate::fincat::CatError),
    #[error("ill-typed: {0}")]
    IllTyped(String),
    #[error("no interpretation assigned to `{0}`")]
    Unassigned(String),
    #[error("not well-defined on coend classes: {witness}")]
    NotWellDefinedOnClasses { witness: String },
    #[error("1-cell `{0}` is not representable: {1}")]
    NotRepresentable(String, String),
    #[error("the required isomorphism is missing: {0}")]
    IsoMissing(String),
    #[error("{0}")]
    Other(String),
}

/// An interpretation: categories for colours, profunctors for generating
/// 1-cells, cells for generating 2-cells (built against the evaluator's
/// canonical representations), plus optional model-backed canonical cells
/// for the loop moves.
pub struct Interpretation {
    pub presentation: Presentation,
    pub zero: BTreeMap<String, Arc<FinCategory>>,
    pub one: BTreeMap<String, Prof>,
    pub two: BTreeMap<String, ProfCell>,
    /// Canonical model-backed cells for Fuse/Merge steps, keyed
    /// "fuse:<mult>:<psi>" and "merge:<mult>:<psi>".
    pub canonical: BTreeMap<String, ProfCell>,
    /// The model this interpretation was externalized from, when any; the
    /// derived operations (trace from duality, rotations, distributors)
    /// consult its braiding, duals and star data.
    pub model: Option<MonoidalModel>,
    /// Names of model structure inside the presentation: multiplication,
    /// unit, adjoints, trace cell, per family.
    pub families: BTreeMap<String, FamilyNames>,
    pub limits: Limits,
}

/// Generator names of one monoid family inside a presentation.
#[derive(Debug, Clone)]
pub struct FamilyNames {
    pub mult: String,
    pub unit: String,
    pub psi: String,
    pub phi: String,
    pub trace: Option<String>,
}

/// A state evaluated to profunctors: the tensor row of each layer, the
/// bottom-up fold composites with their coend tables, and the word
/// categories between layers.
pub struct LayeredProf {
    pub state: State,
    pub word_cats: Vec<ProductCat>,
    pub layers: Vec<Prof>,
    pub folds: Vec<Prof>,
    pub tables: Vec<Option<Arc<CoendTable>>>,
    /// Hom profunctor of the source word, used as the total for empty states.
    pub empty_total: Option<Prof>,
}

impl LayeredProf {
    pub fn total(&self) -> &Prof {
        match self.folds.last() {
            Some(p) => p,
            None => self.empty_total.as_ref().expect("empty state total"),
        }
    }

    pub fn src_cat(&self) -> &ProductCat {
        &self.word_cats[0]
    }

    pub fn tgt_cat(&self) -> &ProductCat {
        self.word_cats.last().unwrap()
    }
}

/// A fully decomposed element of a layered composite: one element per layer
/// (bottom to top) and the boundary objects between consecutive layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainDecomp {
    pub elems: Vec<Elem>,
    /// mids[i]: object of word_cats[i+1] between layers i and i+1
    /// (length = layers − 1).
    pub mids: Vec<usize>,
}

/// Caches shared between evaluation contexts (and worker threads).
#[derive(Default)]
pub struct EvalCaches {
    states: Mutex<HashMap<String, Arc<LayeredProf>>>,
    derived: Mutex<HashMap<String, Arc<ProfCell>>>,
}

/// Evaluation context: caches evaluated states and derived cells.
pub struct EvalCtx<'a> {
    pub interp: &'a Interpretation,
    caches: Arc<EvalCaches>,
    /// Exhaustively re-check every class member during surgery.
    pub scan_classes: bool,
}

impl<'a> EvalCtx<'a> {
    pub fn new(interp: &'a Interpretation) -> EvalCtx<'a> {
        EvalCtx {
            interp,
            caches: Arc::new(EvalCaches::default()),
            scan_classes: true,
        }
    }

    pub fn with_caches(interp: &'a Interpretation, caches: Arc<EvalCaches>) -> EvalCtx<'a> {
        EvalCtx {
            interp,
            caches,
            scan_classes: true,
        }
    }

    pub fn caches(&self) -> Arc<EvalCaches> {
        self.caches.clone()
    }

    pub fn limits(&self) -> &Limits {
        &self.interp.limits
    }

    fn colour_cat(&self, s: &SColour) -> Result<Arc<FinCategory>, InterpError> {
        let c = self
            .interp
            .zero
            .get(&s.colour)
            .ok_or_else(|| InterpError::Unassigned(s.colour.clone()))?;
        Ok(if s.dual { c.opposite() } else { c.clone() })
    }

    pub fn word_cat(&self, w: &[SColour]) -> Result<ProductCat, InterpError> {
        let factors = w
            .iter()
            .map(|s| self.colour_cat(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProductCat::new(factors, self.limits())?)
    }

    fn tile_prof(&self, t: &Tile) -> Result<Prof, InterpError> {
        let limits = self.limits();
        Ok(match t {
            Tile::Gen(n) => self
                .interp
                .one
                .get(n)
                .ok_or_else(|| InterpError::Unassigned(n.clone()))?
                .clone(),
            Tile::RotGen(n) => {
                let p = self
                    .interp
                    .one
                    .get(n)
                    .ok_or_else(|| InterpError::Unassigned(n.clone()))?;
                prof::rot_r(p, limits)?
            }
            Tile::Id(s) => {
                let c = self.colour_cat(s)?;
                prof::hom_profunctor(&c, limits)?
            }
            Tile::Cup(w) => prof::cup_w(&self.word_cat(w)?, limits)?,
            Tile::Cap(w) => prof::cap_w(&self.word_cat(w)?, limits)?,
            Tile::Sym(w1, w2) => prof::sym_w(&self.word_cat(w1)?, &self.word_cat(w2)?, limits)?,
        })
    }

    /// Evaluates a state to its layered composite, cached by display key.
    pub fn eval_state(&mut self, st: &State) -> Result<Arc<LayeredProf>, InterpError> {
        let key = format!("{}|{}", crate::presentation::word_str(&st.source), st);
        if let Some(lp) = self.caches.states.lock().unwrap().get(&key) {
            return Ok(lp.clone());
        }
        let pres = &self.interp.presentation;
        let words = pres.wire_words(st)?;
        let word_cats = words
            .iter()
            .map(|w| self.word_cat(w))
            .collect::<Result<Vec<_>, InterpError>>()?;
        let mut layers = Vec::with_capacity(st.layers.len());
        for l in &st.layers {
            let tiles = l
                .iter()
                .map(|t| self.tile_prof(t))
                .collect::<Result<Vec<_>, _>>()?;
            let layer = prof::tensor_many(&tiles, self.limits())?;
            layers.push(layer);
        }
        let lp = if layers.is_empty() {
            LayeredProf {
                state: st.clone(),
                empty_total: Some(prof::hom_w(&word_cats[0], self.limits())?),
                word_cats,
                layers,
                folds: Vec::new(),
                tables: Vec::new(),
            }
        } else {
            let (folds, tables) = fold_layers(&layers, self.limits())?;
            LayeredProf {
                state: st.clone(),
                word_cats,
                layers,
                folds,
                tables,
                empty_total: None,
            }
        };
        // boundary sanity
        debug_assert_eq!(lp.total().source.cat, lp.word_cats[0].cat);
        debug_assert_eq!(lp.total().target.cat, lp.word_cats.last().unwrap().cat);
        let rc = Arc::new(lp);
        self.caches.states.lock().unwrap().insert(key, rc.clone());
        Ok(rc)
    }

    /// Evaluates a 1-cell expression (through its normalized state).
    pub fn eval_one_cell(
        &mut self,
        e: &crate::presentation::OneCellExpr,
    ) -> Result<Arc<LayeredProf>, InterpError> {
        let st = self.interp.presentation.normalize(e)?;
        self.eval_state(&st)
    }

    /// Evaluates a 2-cell (a rewrite path) to its natural family together
    /// with the final composite.
    pub fn eval_two_cell(
        &mut self,
        e: &crate::presentation::TwoCellExpr,
    ) -> Result<(ProfCell, Arc<LayeredProf>), InterpError> {
        let src = self.interp.presentation.normalize(&e.source)?;
        moves::eval_path(self, &src, &e.steps)
    }

    pub(crate) fn derived_cell_eval(&mut self, name: &str) -> Result<Arc<ProfCell>, InterpError> {
        if let Some(c) = self.caches.derived.lock().unwrap().get(name) {
            return Ok(c.clone());
        }
        let expr = self
            .interp
            .presentation
            .derived_cell(name)
            .ok_or_else(|| InterpError::Unassigned(name.to_string()))?
            .clone();
        let src = self.interp.presentation.normalize(&expr.source)?;
        let (cell, _) = moves::eval_path(self, &src, &expr.steps)?;
        let rc = Arc::new(cell);
        self.caches.derived.lock().unwrap().insert(name.to_string(), rc.clone());
        Ok(rc)
    }
}

/// Decomposes a class representative of the total composite into per-layer
/// elements and intermediate boundary objects.
pub fn unfold(lp: &LayeredProf, b: usize, a: usize, pos: u32) -> ChainDecomp {
    let k = lp.layers.len();
    let elem = lp.total().fiber(b, a)[pos as usize].clone();
    if k == 0 {
        return ChainDecomp {
            elems: vec![elem],
            mids: Vec::new(),
        };
    }
    if k == 1 {
        return ChainDecomp {
            elems: vec![elem],
            mids: Vec::new(),
        };
    }
    let Elem::Chain { parts, mids } = elem else {
        unreachable!("multi-layer total has chain elements")
    };
    // parts are outermost (top layer) first
    let elems: Vec<Elem> = parts.into_iter().rev().collect();
    let mids_idx: Vec<usize> = mids
        .into_iter()
        .rev()
        .enumerate()
        .map(|(i, obj)| {
            lp.word_cats[i + 1]
                .cat
                .obj_index(&obj)
                .expect("mid object resolves")
        })
        .collect();
    ChainDecomp {
        elems,
        mids: mids_idx,
    }
}

/// Recomposes a chain decomposition into the class it belongs to.
pub fn refold(lp: &LayeredProf, b: usize, a: usize, chain: &ChainDecomp) -> Option<u32> {
    let k = lp.layers.len();
    if k == 0 {
        return lp.total().pos(b, a, &chain.elems[0]);
    }
    if k == 1 {
        return lp.total().pos(b, a, &chain.elems[0]);
    }
    // sequential class lookup through the fold tables
    let mut mids_b = chain.mids.clone();
    mids_b.push(b); // boundary above the top layer
    let a0 = a;
    let mut class_elem = chain.elems[0].clone();
    let mut _lower = a0;
    for i in 1..k {
        let table = lp.tables[i].as_ref().unwrap();
        let mid_obj = &lp.word_cats[i].cat.objects[chain.mids[i - 1]];
        let raw = Elem::splice(&chain.elems[i], mid_obj, &class_elem);
        let fiber_b = if i == k - 1 { b } else { mids_b[i] };
        let cls = table.table(fiber_b, a0).class_of(&raw)?;
        class_elem = lp.folds[i].fiber(fiber_b, a0)[cls as usize].clone();
    }
    lp.total().pos(b, a, &class_elem)
}

/// Runs `f` on every member chain of a class (for well-definedness scans).
pub fn for_each_member(
    lp: &LayeredProf,
    b: usize,
    a: usize,
    class: u32,
    cap: usize,
    f: &mut impl FnMut(&ChainDecomp),
) {
    let k = lp.layers.len();
    if k <= 1 {
        let elem = lp.total().fiber(b, a)[class as usize].clone();
        f(&ChainDecomp {
            elems: vec![elem],
            mids: Vec::new(),
        });
        return;
    }
    // recursively expand: members at fold level i are (layer elem, class at
    // level i-1) pairs
    let mut count = 0usize;
    let mut stack: Vec<(usize, u32, Vec<Elem>, Vec<usize>)> = vec![(k - 1, class, Vec::new(), Vec::new())];
    while let Some((level, cls, upper_elems, upper_mids)) = stack.pop() {
        if count >= cap {
            return;
        }
        if level == 0 {
            let elem = lp.folds[0].fiber(*upper_mids.last().unwrap(), a)[cls as usize].clone();
            let mut elems = vec![elem];
            elems.extend(upper_elems.iter().rev().cloned());
            let mids: Vec<usize> = upper_mids.iter().rev().copied().collect();
            count += 1;
            f(&ChainDecomp { elems, mids });
            continue;
        }
        let fiber_b = if level == k - 1 { b } else { *upper_mids.last().unwrap() };
        let table = lp.tables[level].as_ref().unwrap();
        for raw in table.table(fiber_b, a).members(cls) {
            // raw = splice(layer elem, mid obj, inner class rep)
            let (outer, mid_obj, inner) = raw.split(lp.layers[level].chain_len);
            let mid_idx = lp.word_cats[level].cat.obj_index(&mid_obj).unwrap();
            let inner_class = lp.folds[level - 1]
                .pos(mid_idx, a, &inner)
                .expect("inner rep in fiber");
            let mut ue = upper_elems.clone();
            ue.push(outer);
            let mut um = upper_mids.clone();
            um.push(mid_idx);
            stack.push((level - 1, inner_class, ue, um));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::Limits;
    use crate::models::builtin::{builtin_model, zmod};
    use crate::models::externalize::{externalize, with_trace};

    #[test]
    fn m_ra_checks_on_zmod2() {
        let m = zmod(2);
        let interp = externalize(&m, "M_RA", &Limits::default()).unwrap();
        let report = check::check_all(&interp);
        if !report.passed() {
            panic!("M_RA on Zmod(2) fails: {:?}", report.first_failure());
        }
    }

    #[test]
    fn t_checks_on_zmod2() {
        let m = with_trace(&zmod(2), &Limits::default()).unwrap();
        let interp = externalize(&m, "T", &Limits::default()).unwrap();
        let report = check::check_all(&interp);
        if !report.passed() {
            panic!("T on Zmod(2) fails: {:?}", report.first_failure());
        }
    }

    #[test]
    fn t_checks_on_monoid2() {
        let m = with_trace(&builtin_model("monoid2").unwrap(), &Limits::default()).unwrap();
        let interp = externalize(&m, "T", &Limits::default()).unwrap();
        let report = check::check_all(&interp);
        if !report.passed() {
            panic!("T on monoid2 fails: {:?}", report.first_failure());
        }
    }
}

#[cfg(test)]
mod zoo_tests {
    use super::*;
    use crate::limits::Limits;
    use crate::models::builtin::builtin_model;
    use crate::models::externalize::{externalize, with_trace};

    fn run(model_name: &str, pres: &str, with_tr: bool) {
        let limits = Limits::default();
        let mut m = builtin_model(model_name).unwrap();
        if with_tr {
            m = with_trace(&m, &limits).unwrap();
        }
        let interp = externalize(&m, pres, &limits).unwrap();
        let report = check::check_all(&interp);
        if !report.passed() {
            panic!("{pres} on {model_name} fails: {:?}", report.first_failure());
        }
    }

    #[test]
    fn b_and_l_on_zmod2() {
        run("Zmod(2)", "B", false);
        run("Zmod(2)", "L", false);
    }

    #[test]
    fn t_bal_on_zmod2() {
        run("Zmod(2)", "T_bal", true);
    }

    #[test]
    fn t_on_zmod3() {
        run("Zmod(3)", "T", true);
    }

    #[test]
    fn a_on_zmod2() {
        run("Zmod(2)", "A", false);
    }

    #[test]
    fn a_fails_on_bool_chain() {
        // bool_chain is not autonomous: a reassociation cell must fail to
        // invert
        let limits = Limits::default();
        let m = builtin_model("bool_chain").unwrap();
        let interp = externalize(&m, "A", &limits).unwrap();
        let report = check::check_all(&interp);
        assert!(!report.passed());
    }

    #[test]
    fn f_star_on_bool_chain() {
        run("bool_chain", "F_star", false);
    }

    #[test]
    fn f_star_on_lukasiewicz3() {
        run("lukasiewicz3", "F_star", false);
    }

    #[test]
    fn t_star_on_zmod2() {
        let limits = Limits::default();
        let m = with_trace(&builtin_model("Zmod(2)").unwrap(), &limits).unwrap();
        let interp = externalize(&m, "T_star", &limits).unwrap();
        let report = check::check_all(&interp);
        if !report.passed() {
            panic!("T_star on Zmod(2) fails: {:?}", report.first_failure());
        }
    }

    #[test]
    fn d_passes_on_zmod2_fails_on_chains() {
        let limits = Limits::default();
        let m = builtin_model("Zmod(2)").unwrap();
        let interp = externalize(&m, "D", &limits).unwrap();
        assert!(check::check_all(&interp).passed());
        for bad in ["bool_chain", "lukasiewicz3"] {
            let m = builtin_model(bad).unwrap();
            let interp = externalize(&m, "D", &limits).unwrap();
            let rep = check::check_all(&interp);
            assert!(!rep.passed(), "D should fail on {bad}");
        }
    }
}
