//! Externalization: re-expressing a concrete monoidal model as an
//! interpretation of a presentation in finite Prof.
//!
//! Generating 1-cells go to embeddings of the tensor and unit functors;
//! generating 2-cells act on coend classes through a contract / transform /
//! inject pipeline over the model's tables. Externalization requires a
//! strict model (every structure iso an identity); all zoo members are
//! strict, and weak models are still fully served by the law checkers.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{ModelError, MonoidalModel, TraceFamily};
use crate::fincat::{FinCategory, Functor, ProductCat};
use crate::interpret::{
    moves::{assemble_layer, tile_components},
    refold, unfold, ChainDecomp, EvalCtx, FamilyNames, InterpError, Interpretation, LayeredProf,
};
use crate::limits::Limits;
use crate::presentation::{catalog, Presentation, State, Tile};
use crate::prof::{self, Elem, Prof, ProfCell};

/// One monoidal structure of the model viewed uniformly: object/morphism
/// tensor tables and a unit, so the ⊗ and ⅋ families share the builders.
#[derive(Clone)]
pub struct FamilyOps {
    pub tobj: Vec<Vec<usize>>,
    pub tmor: Vec<Vec<usize>>,
    pub unit: usize,
}

impl FamilyOps {
    fn tensor_functor(&self, base: &Arc<FinCategory>, limits: &Limits) -> Result<Functor, ModelError> {
        let prod = ProductCat::new(vec![base.clone(), base.clone()], limits)?;
        let obj_map = (0..prod.cat.n_obj())
            .map(|o| {
                let m = prod.obj_multi(o);
                self.tobj[m[0]][m[1]]
            })
            .collect();
        let mor_map = (0..prod.cat.n_mor())
            .map(|f| {
                let m = prod.mor_multi(f);
                self.tmor[m[0]][m[1]]
            })
            .collect();
        let f = Functor {
            name: "tensor".into(),
            source: prod.cat.clone(),
            target: base.clone(),
            obj_map,
            mor_map,
        };
        f.validate()?;
        Ok(f)
    }

    fn unit_functor(&self, base: &Arc<FinCategory>) -> Functor {
        Functor {
            name: "unit".into(),
            source: FinCategory::terminal(),
            target: base.clone(),
            obj_map: vec![self.unit],
            mor_map: vec![base.id_of(self.unit)],
        }
    }

    /// Left-fold tensor evaluation of an object tuple (empty = unit).
    pub fn fold_obj(&self, objs: &[usize]) -> usize {
        objs.iter().fold(self.unit, |acc, &o| {
            if acc == self.unit && objs.first() == Some(&o) && objs.len() >= 1 {
                // strictness: unit ⊗ o = o, so folding from the unit is flat
            }
            self.tobj[acc][o]
        })
    }

    pub fn fold_mor(&self, base: &Arc<FinCategory>, mors: &[usize]) -> usize {
        mors.iter()
            .fold(base.id_of(self.unit), |acc, &f| self.tmor[acc][f])
    }
}

fn is_strict(m: &MonoidalModel) -> bool {
    let c = &m.base;
    let strict_assoc = m
        .associator
        .iter()
        .flatten()
        .flatten()
        .all(|&f| c.is_identity(f));
    let strict_unitors = m.lunitor.iter().chain(m.runitor.iter()).all(|&f| c.is_identity(f));
    let strict_par = m.star.as_ref().map_or(true, |s| {
        s.par_associator.iter().flatten().flatten().all(|&f| c.is_identity(f))
            && s.par_lunitor.iter().chain(s.par_runitor.iter()).all(|&f| c.is_identity(f))
    });
    strict_assoc && strict_unitors && strict_par
}

/// Which structure a presentation needs from the model.
fn required_structure(name: &str) -> (&'static [&'static str], bool, bool) {
    // (family tags, needs braiding/twist, needs trace)
    match name {
        "M" | "M_RA" | "A" => (&["tensor"], false, false),
        "B" | "L" => (&["tensor"], true, false),
        "T" => (&["tensor"], false, true),
        "T_bal" => (&["tensor"], true, true),
        "F" | "F_star" | "D" | "ParTrL" => (&["par"], false, false),
        "T_star" | "TensorTrR" => (&["par", "tensor"], false, true),
        _ => (&["tensor"], false, false),
    }
}

/// Externalizes a model into an interpretation of the named builtin
/// presentation. Fails with MissingStructure when the model lacks what the
/// presentation interprets.
pub fn externalize(
    model: &MonoidalModel,
    pres_name: &str,
    limits: &Limits,
) -> Result<Interpretation, InterpError> {
    let presentation = catalog::builtin(pres_name)?;
    if !is_strict(model) {
        return Err(InterpError::Model(ModelError::MissingStructure(
            "strict structure (externalization evaluates strict models; weak models are served by the law checkers)".into(),
        )));
    }
    let (families, needs_braiding, needs_trace) = required_structure(pres_name);
    if needs_braiding && (model.braiding.is_none() || model.twist.is_none()) {
        return Err(InterpError::Model(ModelError::MissingStructure("braiding/twist".into())));
    }
    if needs_trace && model.trace.is_none() {
        return Err(InterpError::Model(ModelError::MissingStructure(
            "trace (find_traces returned nothing to attach?)".into(),
        )));
    }
    if families.contains(&"par") && model.star.is_none() {
        return Err(InterpError::Model(ModelError::MissingStructure("star (⅋) data".into())));
    }

    let base = model.base.clone();
    let mut zero = BTreeMap::new();
    zero.insert("c".to_string(), base.clone());

    let tensor_ops = FamilyOps {
        tobj: model.tensor_obj.clone(),
        tmor: model.tensor_mor.clone(),
        unit: model.unit,
    };
    let par_ops = model.star.as_ref().map(|s| FamilyOps {
        tobj: s.par_obj.clone(),
        tmor: s.par_mor.clone(),
        unit: s.bottom,
    });

    let mut one: BTreeMap<String, Prof> = BTreeMap::new();
    let mut fams: BTreeMap<String, FamilyNames> = BTreeMap::new();
    for &fam in families {
        let (ops, mult, unit_n, psi, phi, trace_n): (&FamilyOps, &str, &str, &str, &str, Option<&str>) =
            match (fam, pres_name) {
                ("tensor", "T_star") | ("tensor", "TensorTrR") => {
                    (&tensor_ops, "tm", "tu", "tm_adj", "tu_adj", Some("TrT"))
                }
                ("tensor", "T") | ("tensor", "T_bal") => {
                    (&tensor_ops, "m", "u", "m_adj", "u_adj", Some("Tr"))
                }
                ("tensor", _) => (&tensor_ops, "m", "u", "m_adj", "u_adj", None),
                ("par", _) => (par_ops.as_ref().unwrap(), "pm", "pu", "wm", "wu", None),
                _ => unreachable!(),
            };
        let tf = ops.tensor_functor(&base, limits).map_err(InterpError::Model)?;
        let uf = ops.unit_functor(&base);
        let pair = ProductCat::new(vec![base.clone(), base.clone()], limits)?;
        let one_pc = ProductCat {
            factors: vec![base.clone()],
            cat: base.clone(),
        };
        let empty_pc = ProductCat::new(vec![], limits)?;
        if presentation.one_cell(mult).is_some() {
            one.insert(
                mult.into(),
                prof::embed_cov_pc(&tf, pair.clone(), one_pc.clone(), limits)?,
            );
            one.insert(
                unit_n.into(),
                prof::embed_cov_pc(&uf, empty_pc.clone(), one_pc.clone(), limits)?,
            );
        }
        if presentation.one_cell(psi).is_some() {
            one.insert(
                psi.into(),
                prof::embed_contra_pc(&tf, one_pc.clone(), pair.clone(), limits)?,
            );
            one.insert(
                phi.into(),
                prof::embed_contra_pc(&uf, one_pc.clone(), empty_pc.clone(), limits)?,
            );
        }
        fams.insert(
            fam.to_string(),
            FamilyNames {
                mult: mult.into(),
                unit: unit_n.into(),
                psi: psi.into(),
                phi: phi.into(),
                trace: trace_n.map(|s| s.to_string()),
            },
        );
    }

    // provisional interpretation for evaluating boundary states
    let mut interp = Interpretation {
        presentation: presentation.clone(),
        zero,
        one,
        two: BTreeMap::new(),
        canonical: BTreeMap::new(),
        model: Some(model.clone()),
        families: fams.clone(),
        limits: limits.clone(),
    };

    let mut two = BTreeMap::new();
    let mut canonical = BTreeMap::new();
    {
        let mut ctx = EvalCtx::new(&interp);
        for &fam in families {
            let names = fams.get(fam).unwrap().clone();
            let ops = match fam {
                "tensor" => tensor_ops.clone(),
                _ => par_ops.clone().unwrap(),
            };
            build_family_cells(&mut ctx, model, &ops, &names, &presentation, &mut two, &mut canonical)?;
        }
        // braiding and twist cells
        if presentation.two_cell("braid").is_some() {
            let br = model
                .braiding
                .as_ref()
                .ok_or_else(|| InterpError::Model(ModelError::MissingStructure("braiding".into())))?;
            two.insert("braid".to_string(), braid_cell(&mut ctx, model, br)?);
        }
        if presentation.two_cell("twist").is_some() {
            let tw = model
                .twist
                .as_ref()
                .ok_or_else(|| InterpError::Model(ModelError::MissingStructure("twist".into())))?;
            let id_state = State {
                source: vec![crate::presentation::SColour::plain("c")],
                layers: vec![],
            };
            let lp = ctx.eval_state(&id_state)?;
            let b2 = base.clone();
            let tw2 = tw.clone();
            let cell = ProfCell::from_fn("twist", lp.total().clone(), lp.total().clone(), move |_b, _a, e| {
                let Elem::Atom(id) = e else { unreachable!() };
                let f = b2.mor_index(id).unwrap();
                Elem::atom(&b2.mor_ids[b2.compose(tw2[b2.tgt(f)], f).unwrap()])
            })?;
            cell.check_equivariance()?;
            two.insert("twist".to_string(), cell);
        }
    }
    interp.two = two;
    interp.canonical = canonical;
    Ok(interp)
}

// ---------------------------------------------------------------------------
// contract / inject helpers over strict models

/// The tile element as a base morphism from the tensor of its upper
/// boundary objects to the tensor of its lower boundary objects.
fn tile_morphism(base: &Arc<FinCategory>, e: &Elem) -> Result<usize, InterpError> {
    match e {
        Elem::Atom(id) => base
            .mor_index(id)
            .ok_or_else(|| InterpError::IllTyped(format!("element `{id}` is not a base morphism"))),
        _ => Err(InterpError::IllTyped("non-atomic tile element in contraction".into())),
    }
}

/// Contracts a chain over a loop-free single-family state into one base
/// morphism ⊗(top objects) → ⊗(bottom objects).
pub fn strict_contract(
    base: &Arc<FinCategory>,
    ops: &FamilyOps,
    lp: &LayeredProf,
    chain: &ChainDecomp,
) -> Result<usize, InterpError> {
    let mut layer_mors = Vec::with_capacity(chain.elems.len());
    for (elem, tiles) in chain.elems.iter().zip(lp.state.layers.iter()) {
        let comps = tile_components(tiles, elem);
        let mors = comps
            .iter()
            .map(|e| tile_morphism(base, e))
            .collect::<Result<Vec<_>, _>>()?;
        layer_mors.push(ops.fold_mor(base, &mors));
    }
    base.compose_chain(&layer_mors)
        .ok_or_else(|| InterpError::IllTyped("contraction chain not composable".into()))
}

// The cell builders need the presentation's declarations; they are passed
// explicitly below.

struct FamilyCtx<'m> {
    base: Arc<FinCategory>,
    ops: FamilyOps,
    model: &'m MonoidalModel,
    names: FamilyNames,
}

#[allow(clippy::too_many_arguments)]
fn build_family_cells(
    ctx: &mut EvalCtx,
    model: &MonoidalModel,
    ops: &FamilyOps,
    names: &FamilyNames,
    pres: &Presentation,
    two: &mut BTreeMap<String, ProfCell>,
    canonical: &mut BTreeMap<String, ProfCell>,
) -> Result<(), InterpError> {
    let fam = FamilyCtx {
        base: model.base.clone(),
        ops: ops.clone(),
        model,
        names: names.clone(),
    };
    let prefix_map: Vec<&str> = if names.mult == "m" {
        vec!["alpha", "lambda", "rho", "eta_m", "eps_m", "eta_u", "eps_u"]
    } else if names.mult == "tm" {
        vec!["talpha", "tlambda", "trho", "eta_tm", "eps_tm", "eta_tu", "eps_tu"]
    } else {
        vec![
            "palpha", "plambda", "prho", "walpha", "wlambda", "wrho", "eta_pm", "eps_pm",
            "eta_pu", "eps_pu",
        ]
    };
    for cell_name in prefix_map {
        if pres.two_cell(cell_name).is_none() {
            continue;
        }
        let cell = build_structure_cell(ctx, &fam, pres, cell_name)?;
        two.insert(cell_name.to_string(), cell);
    }
    if let Some(tr_name) = &names.trace {
        if pres.two_cell(tr_name).is_some() {
            let tr = model
                .trace
                .clone()
                .ok_or_else(|| InterpError::Model(ModelError::MissingStructure("trace".into())))?;
            let cell = trace_cell(ctx, &fam, pres, tr_name, &tr)?;
            two.insert(tr_name.clone(), cell);
            canonical.insert(
                format!("fuse:{}:{}", names.mult, names.psi),
                fuse_cell(ctx, &fam, pres)?,
            );
            canonical.insert(
                format!("merge:{}:{}", names.mult, names.psi),
                merge_cell(ctx, &fam, pres)?,
            );
        }
    }
    Ok(())
}

/// Builds a structure cell (associator family, unitors, adjunction units and
/// counits, and their comonoid mirrors) by contract–transform–inject.
fn build_structure_cell(
    ctx: &mut EvalCtx,
    fam: &FamilyCtx,
    pres: &Presentation,
    cell_name: &str,
) -> Result<ProfCell, InterpError> {
    let decl = pres
        .two_cell(cell_name)
        .ok_or_else(|| InterpError::Unassigned(cell_name.to_string()))?
        .clone();
    let src_state = pres.normalize(&decl.source)?;
    let tgt_state = pres.normalize(&decl.target)?;
    let src_lp = ctx.eval_state(&src_state)?;
    let tgt_lp = ctx.eval_state(&tgt_state)?;
    let base = fam.base.clone();
    let ops = fam.ops.clone();
    let nb = src_lp.total().tgt_cat().n_obj();
    let na = src_lp.total().src_cat().n_obj();
    let mut maps = Vec::with_capacity(nb);
    for b in 0..nb {
        let mut row = Vec::with_capacity(na);
        for a in 0..na {
            let n = src_lp.total().fiber(b, a).len();
            let mut m = Vec::with_capacity(n);
            for pos in 0..n as u32 {
                let chain = unfold(&src_lp, b, a, pos);
                let phi = contract_family(&base, &ops, &src_lp, &chain)?;
                // strict models: the transformed morphism is φ itself
                let out = inject_family(&base, &ops, pres, &tgt_lp, b, a, phi)?;
                m.push(out);
            }
            row.push(m);
        }
        maps.push(row);
    }
    let cell = ProfCell::new(cell_name, src_lp.total().clone(), tgt_lp.total().clone(), maps);
    cell.check_equivariance()?;
    Ok(cell)
}

/// Contraction over a family state: every tile element is read as a base
/// morphism from the family-fold of its upper objects to the fold of its
/// lower objects; layers fold across wires, the chain composes downward.
fn contract_family(
    base: &Arc<FinCategory>,
    ops: &FamilyOps,
    lp: &LayeredProf,
    chain: &ChainDecomp,
) -> Result<usize, InterpError> {
    if lp.state.layers.is_empty() {
        // a hom element of the word category: fold its components
        let word0 = &lp.word_cats[0];
        let Elem::Atom(id) = &chain.elems[0] else {
            return Err(InterpError::IllTyped("hom element not atomic".into()));
        };
        let f = word0
            .cat
            .mor_index(id)
            .ok_or_else(|| InterpError::IllTyped(format!("`{id}` not in word category")))?;
        return Ok(ops.fold_mor(base, &word0.mor_multi(f)));
    }
    strict_contract(base, ops, lp, chain)
}

/// Injection into a family state: identity-shaped chain with φ carried by
/// the outermost layer that can hold it.
#[allow(clippy::too_many_arguments)]
fn inject_family(
    base: &Arc<FinCategory>,
    ops: &FamilyOps,
    pres: &Presentation,
    lp: &LayeredProf,
    b: usize,
    a: usize,
    phi: usize,
) -> Result<u32, InterpError> {
    strict_inject_with_decls(base, ops, pres, lp, b, a, phi)
}

/// Injection of a morphism φ as the canonical chain of a family state.
/// Covariant layers sit below, contravariant layers above; boundaries are
/// evaluated upward from the source tuple below the junction and downward
/// from the target tuple above it, and φ is carried by the junction tile.
pub fn strict_inject_with_decls(
    base: &Arc<FinCategory>,
    ops: &FamilyOps,
    pres: &Presentation,
    lp: &LayeredProf,
    b: usize,
    a: usize,
    phi: usize,
) -> Result<u32, InterpError> {
    let k = lp.state.layers.len();
    if k == 0 {
        let word0 = &lp.word_cats[0];
        if word0.factors.len() == 1 {
            let e = Elem::atom(&base.mor_ids[phi]);
            return lp
                .total()
                .pos(b, a, &e)
                .ok_or_else(|| InterpError::IllTyped("injected morphism not in hom".into()));
        }
        return Err(InterpError::IllTyped(
            "injection into a multi-wire identity state is ambiguous".into(),
        ));
    }
    let is_contra = |t: &Tile| -> bool {
        matches!(t, Tile::Gen(n) if {
            let d = pres.one_cell(n).unwrap();
            d.target.len() > d.source.len() || (d.source.len() == 1 && d.target.is_empty())
        })
    };
    let junction = lp
        .state
        .layers
        .iter()
        .position(|l| l.iter().any(is_contra))
        .unwrap_or(k);
    // boundaries[i] = object multi-index at word_cats[i]
    let mut boundaries: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
    boundaries[0] = lp.word_cats[0].obj_multi(a);
    // upward evaluation below the junction
    for li in 0..junction.min(k) {
        let mut upper = Vec::new();
        let mut wire = 0usize;
        for t in &lp.state.layers[li] {
            match t {
                Tile::Id(_) => {
                    upper.push(boundaries[li][wire]);
                    wire += 1;
                }
                Tile::Sym(w1, w2) => {
                    let (k1, k2) = (w1.len(), w2.len());
                    let xs = boundaries[li][wire..wire + k1].to_vec();
                    let ys = boundaries[li][wire + k1..wire + k1 + k2].to_vec();
                    upper.extend(ys);
                    upper.extend(xs);
                    wire += k1 + k2;
                }
                Tile::Gen(n) => {
                    let d = pres.one_cell(n).unwrap();
                    let n_in = d.source.len();
                    let objs = boundaries[li][wire..wire + n_in].to_vec();
                    upper.push(ops.fold_obj(&objs));
                    wire += n_in;
                }
                other => {
                    return Err(InterpError::IllTyped(format!("inject cannot handle tile {other}")))
                }
            }
        }
        boundaries[li + 1] = upper;
    }
    // downward evaluation above the junction
    boundaries[k] = lp.word_cats[k].obj_multi(b);
    for li in (junction..k).rev() {
        if li == junction && junction < k {
            // the junction boundary below comes from the upward pass (or a
            // itself when the junction is the bottom layer)
            continue;
        }
        let mut lower = Vec::new();
        for (t, seg) in layer_upper_segments(pres, &lp.state.layers[li], &boundaries[li + 1])? {
            match t {
                Tile::Id(_) => lower.push(seg[0]),
                Tile::Sym(w1, w2) => {
                    let (k1, k2) = (w1.len(), w2.len());
                    // upper order is (w2, w1); lower is (w1, w2)
                    let ys = seg[..k2].to_vec();
                    let xs = seg[k2..k2 + k1].to_vec();
                    lower.extend(xs);
                    lower.extend(ys);
                }
                Tile::Gen(_) => lower.push(ops.fold_obj(&seg)),
                other => {
                    return Err(InterpError::IllTyped(format!("inject cannot handle tile {other}")))
                }
            }
        }
        boundaries[li] = lower;
    }
    // assemble elements
    let mut elems = Vec::with_capacity(k);
    let mut mids = Vec::new();
    let mut placed = false;
    for li in 0..k {
        let tiles = &lp.state.layers[li];
        let segs = layer_upper_segments(pres, tiles, &boundaries[li + 1])?;
        let mut comps = Vec::with_capacity(tiles.len());
        let mut wire_lower = 0usize;
        for (t, seg) in segs {
            match &t {
                Tile::Id(s) => {
                    let cat = if s.dual { base.opposite() } else { base.clone() };
                    comps.push(Elem::atom(&cat.mor_ids[cat.id_of(seg[0])]));
                    wire_lower += 1;
                }
                Tile::Sym(w1, w2) => {
                    let (k1, k2) = (w1.len(), w2.len());
                    let ys = seg[..k2].to_vec();
                    let xs = seg[k2..].to_vec();
                    let y_cat = sub_word_cat(lp, li + 1, 0, k2);
                    let x_cat = sub_word_cat(lp, li + 1, k2, k1);
                    comps.push(Elem::Tuple(vec![
                        Elem::atom(&y_cat.cat.mor_ids[y_cat.cat.id_of(y_cat.obj_of(&ys))]),
                        Elem::atom(&x_cat.cat.mor_ids[x_cat.cat.id_of(x_cat.obj_of(&xs))]),
                    ]));
                    wire_lower += k1 + k2;
                }
                Tile::Gen(n) => {
                    let d = pres.one_cell(n).unwrap();
                    let contra = is_contra(&t);
                    let carrier = if junction < k {
                        li == junction && contra && !placed
                    } else {
                        li == k - 1 && !placed
                    };
                    if contra {
                        let upper_fold = ops.fold_obj(&seg);
                        let elem_mor = if carrier {
                            placed = true;
                            phi
                        } else {
                            base.id_of(upper_fold)
                        };
                        comps.push(Elem::atom(&base.mor_ids[elem_mor]));
                        wire_lower += d.source.len();
                    } else {
                        let lower_objs =
                            boundaries[li][wire_lower..wire_lower + d.source.len()].to_vec();
                        let lower_fold = ops.fold_obj(&lower_objs);
                        let elem_mor = if carrier {
                            placed = true;
                            phi
                        } else {
                            base.id_of(lower_fold)
                        };
                        comps.push(Elem::atom(&base.mor_ids[elem_mor]));
                        wire_lower += d.source.len();
                    }
                }
                other => {
                    return Err(InterpError::IllTyped(format!("inject cannot handle tile {other}")))
                }
            }
        }
        elems.push(assemble_layer(tiles, comps));
        if li + 1 < k {
            mids.push(lp.word_cats[li + 1].obj_of(&boundaries[li + 1]));
        }
    }
    if !placed {
        return Err(InterpError::IllTyped("no tile carried the injected morphism".into()));
    }
    refold(lp, b, a, &ChainDecomp { elems, mids })
        .ok_or_else(|| InterpError::IllTyped("injected chain did not refold".into()))
}

/// Pairs each tile of a layer with its segment of the upper boundary.
fn layer_upper_segments(
    pres: &Presentation,
    tiles: &[Tile],
    upper: &[usize],
) -> Result<Vec<(Tile, Vec<usize>)>, InterpError> {
    let mut out = Vec::with_capacity(tiles.len());
    let mut pos = 0usize;
    for t in tiles {
        let n_out = match t {
            Tile::Id(_) => 1,
            Tile::Sym(w1, w2) => w1.len() + w2.len(),
            Tile::Gen(n) => {
                pres.one_cell(n)
                    .ok_or_else(|| InterpError::Unassigned(n.clone()))?
                    .target
                    .len()
            }
            Tile::RotGen(n) => {
                pres.one_cell(n)
                    .ok_or_else(|| InterpError::Unassigned(n.clone()))?
                    .source
                    .len()
            }
            Tile::Cup(w) => 2 * w.len(),
            Tile::Cap(_) => 0,
        };
        out.push((t.clone(), upper[pos..pos + n_out].to_vec()));
        pos += n_out;
    }
    Ok(out)
}

/// Word sub-category of consecutive wires at a boundary.
fn sub_word_cat(lp: &LayeredProf, level: usize, start: usize, len: usize) -> ProductCat {
    let cats = lp.word_cats[level].factors[start..start + len].to_vec();
    ProductCat::new(cats, &Limits::default()).expect("sub word category")
}

// ---------------------------------------------------------------------------
// trace, loop, fuse and merge cells

/// Reads a 4-layer trace-loop chain into (loop object, content morphism):
/// f: b⊗X → a⊗X assembled from the representative.
fn read_loop(
    base: &Arc<FinCategory>,
    ops: &FamilyOps,
    chain: &[Elem],
    layers: &[crate::presentation::Layer],
) -> Result<(usize, usize), InterpError> {
    // layers: [1⊗cup ; m⊗1̂ ; ψ⊗1̂ ; 1⊗cap]
    let l0 = tile_components(&layers[0], &chain[0]);
    let l1 = tile_components(&layers[1], &chain[1]);
    let l2 = tile_components(&layers[2], &chain[2]);
    let l3 = tile_components(&layers[3], &chain[3]);
    let h0 = tile_morphism(base, &l0[0])?;
    let u = tile_morphism(base, &l0[1])?;
    let mu = tile_morphism(base, &l1[0])?;
    let k1 = tile_morphism(base, &l1[1])?; // Ĉ morphism: underlying k1: q → r
    let psi = tile_morphism(base, &l2[0])?;
    let k2 = tile_morphism(base, &l2[1])?;
    let h3 = tile_morphism(base, &l3[0])?;
    let w = tile_morphism(base, &l3[1])?;
    // f̃ := (h0 ⊗ (k2∘k1∘u)) ∘ μ ∘ ψ ∘ (h3 ⊗ w): b⊗t → a⊗t, with the loop
    // wire reading u: p→q, k1: q→r, k2: r→t, w: t→s
    let kku = base
        .compose_chain(&[k2, k1, u])
        .ok_or_else(|| InterpError::IllTyped("loop chain".into()))?;
    let x = base.src(w); // t
    let f = base
        .compose_chain(&[ops.tmor[h0][kku], mu, psi, ops.tmor[h3][w]])
        .ok_or_else(|| InterpError::IllTyped("loop content not composable".into()))?;
    Ok((x, f))
}

/// Canonical loop chain for content g: b⊗X → a⊗X.
fn inject_loop(
    base: &Arc<FinCategory>,
    ops: &FamilyOps,
    lp: &LayeredProf,
    b: usize,
    a: usize,
    x: usize,
    g: usize,
) -> Result<u32, InterpError> {
    let idx = base.id_of(x);
    let bx = ops.tobj[b][x];
    let elems = vec![
        Elem::Tuple(vec![Elem::atom(&base.mor_ids[base.id_of(a)]), Elem::atom(&base.mor_ids[idx])]),
        Elem::Tuple(vec![Elem::atom(&base.mor_ids[g]), Elem::atom(&base.mor_ids[idx])]),
        Elem::Tuple(vec![Elem::atom(&base.mor_ids[base.id_of(bx)]), Elem::atom(&base.mor_ids[idx])]),
        Elem::Tuple(vec![Elem::atom(&base.mor_ids[base.id_of(b)]), Elem::atom(&base.mor_ids[idx])]),
    ];
    let mids = vec![
        lp.word_cats[1].obj_of(&[a, x, x]),
        lp.word_cats[2].obj_of(&[bx, x]),
        lp.word_cats[3].obj_of(&[b, x, x]),
    ];
    refold(lp, b, a, &ChainDecomp { elems, mids })
        .ok_or_else(|| InterpError::IllTyped("loop chain did not refold".into()))
}

fn trace_cell(
    ctx: &mut EvalCtx,
    fam: &FamilyCtx,
    pres: &Presentation,
    tr_name: &str,
    tr: &TraceFamily,
) -> Result<ProfCell, InterpError> {
    let decl = pres.two_cell(tr_name).unwrap().clone();
    let src_lp = ctx.eval_state(&pres.normalize(&decl.source)?)?;
    let tgt_lp = ctx.eval_state(&pres.normalize(&decl.target)?)?;
    let base = fam.base.clone();
    let ops = fam.ops.clone();
    let nb = src_lp.total().tgt_cat().n_obj();
    let na = src_lp.total().src_cat().n_obj();
    let mut maps = Vec::with_capacity(nb);
    for b in 0..nb {
        let mut row = Vec::with_capacity(na);
        for a in 0..na {
            let n = src_lp.total().fiber(b, a).len();
            let mut m = Vec::with_capacity(n);
            for pos in 0..n as u32 {
                let chain = unfold(&src_lp, b, a, pos);
                let (x, f) = read_loop(&base, &ops, &chain.elems, &src_lp.state.layers)?;
                let out = fam.model.trace_apply(tr, x, b, a, f);
                let e = Elem::atom(&base.mor_ids[out]);
                let p = tgt_lp
                    .total()
                    .pos(b, a, &e)
                    .ok_or_else(|| InterpError::IllTyped("trace output not in hom".into()))?;
                m.push(p);
            }
            row.push(m);
        }
        maps.push(row);
    }
    let cell = ProfCell::new(tr_name, src_lp.total().clone(), tgt_lp.total().clone(), maps);
    cell.check_equivariance()?;
    // well-definedness on coend classes: every member of a class must trace
    // to the same morphism (the sliding direction of the correspondence)
    for b in 0..nb {
        for a in 0..na {
            for pos in 0..src_lp.total().fiber(b, a).len() as u32 {
                let expected = cell.apply(b, a, pos);
                let mut witness: Option<String> = None;
                crate::interpret::for_each_member(&src_lp, b, a, pos, 4096, &mut |member| {
                    if witness.is_some() {
                        return;
                    }
                    match read_loop(&base, &ops, &member.elems, &src_lp.state.layers) {
                        Ok((x, f)) => {
                            let out = fam.model.trace_apply(tr, x, b, a, f);
                            let e = Elem::atom(&base.mor_ids[out]);
                            if tgt_lp.total().pos(b, a, &e) != Some(expected) {
                                witness = Some(format!(
                                    "class {pos} at ({b},{a}): member traces to `{}`",
                                    base.mor_ids[out]
                                ));
                            }
                        }
                        Err(e) => witness = Some(e.to_string()),
                    }
                });
                if let Some(w) = witness {
                    return Err(InterpError::NotWellDefinedOnClasses { witness: w });
                }
            }
        }
    }
    Ok(cell)
}

/// The loop-fusion cell: nested (X, then Y) loops collapse onto X⊗Y.
fn fuse_cell(ctx: &mut EvalCtx, fam: &FamilyCtx, pres: &Presentation) -> Result<ProfCell, InterpError> {
    let (src_layers, tgt_layers) = pres
        .action_patterns(
            &crate::presentation::StepAction::Fuse {
                mult: fam.names.mult.clone(),
                psi: fam.names.psi.clone(),
            },
            &[],
        )
        .map_err(InterpError::Pres)?;
    let c0 = crate::presentation::SColour::plain("c");
    let src_state = State {
        source: vec![c0.clone()],
        layers: src_layers,
    };
    let tgt_state = State {
        source: vec![c0],
        layers: tgt_layers,
    };
    let src_lp = ctx.eval_state(&src_state)?;
    let tgt_lp = ctx.eval_state(&tgt_state)?;
    let base = fam.base.clone();
    let ops = fam.ops.clone();
    let nb = base.n_obj();
    let na = base.n_obj();
    let mut maps = Vec::with_capacity(nb);
    for b in 0..nb {
        let mut row = Vec::with_capacity(na);
        for a in 0..na {
            let n = src_lp.total().fiber(b, a).len();
            let mut m = Vec::with_capacity(n);
            for pos in 0..n as u32 {
                let chain = unfold(&src_lp, b, a, pos);
                let (z, f) = read_double_loop(&base, &ops, &chain.elems, &src_lp.state.layers)?;
                let out = inject_loop(&base, &ops, &tgt_lp, b, a, z, f)?;
                m.push(out);
            }
            row.push(m);
        }
        maps.push(row);
    }
    let cell = ProfCell::new("fuse", src_lp.total().clone(), tgt_lp.total().clone(), maps);
    cell.check_equivariance()?;
    Ok(cell)
}

/// Reads the 8-layer nested-loop chain into (X⊗Y, f: b⊗(X⊗Y) → a⊗(X⊗Y)).
fn read_double_loop(
    base: &Arc<FinCategory>,
    ops: &FamilyOps,
    chain: &[Elem],
    layers: &[crate::presentation::Layer],
) -> Result<(usize, usize), InterpError> {
    let comp = |i: usize| tile_components(&layers[i], &chain[i]);
    let m0 = comp(0); // (h0, cupX)
    let m1 = comp(1); // (μ1, k̂X)
    let m2 = comp(2); // (h2, cupY, k̂X)
    let m3 = comp(3); // (μ3, l̂Y, k̂X)
    let m4 = comp(4); // (ψ4, l̂Y, k̂X)
    let m5 = comp(5); // (h5, capY, k̂X)
    let m6 = comp(6); // (ψ6, k̂X)
    let m7 = comp(7); // (h7, capX)
    let g = |e: &Elem| tile_morphism(base, e);
    let h0 = g(&m0[0])?;
    let ux = g(&m0[1])?;
    let mu1 = g(&m1[0])?;
    let kx1 = g(&m1[1])?;
    let h2 = g(&m2[0])?;
    let uy = g(&m2[1])?;
    let kx2 = g(&m2[2])?;
    let mu3 = g(&m3[0])?;
    let ly1 = g(&m3[1])?;
    let kx3 = g(&m3[2])?;
    let psi4 = g(&m4[0])?;
    let ly2 = g(&m4[1])?;
    let kx4 = g(&m4[2])?;
    let h5 = g(&m5[0])?;
    let wy = g(&m5[1])?;
    let kx5 = g(&m5[2])?;
    let psi6 = g(&m6[0])?;
    let kx6 = g(&m6[1])?;
    let h7 = g(&m7[0])?;
    let wx = g(&m7[1])?;
    let x = base.src(wx);
    let y = base.src(wy);
    let f = strict_double_loop_content(
        base, ops, h0, ux, mu1, kx1, h2, uy, kx2, mu3, ly1, kx3, psi4, ly2, kx4, h5, wy, kx5,
        psi6, kx6, h7, wx,
    )?;
    Ok((ops.tobj[x][y], f))
}

/// Strict assembly of the nested loop content: the downward composite from
/// b⊗X⊗Y to a⊗X⊗Y with the loop-wire morphisms folded into the closing leg.
#[allow(clippy::too_many_arguments)]
fn strict_double_loop_content(
    base: &Arc<FinCategory>,
    ops: &FamilyOps,
    h0: usize,
    ux: usize,
    mu1: usize,
    kx1: usize,
    h2: usize,
    uy: usize,
    kx2: usize,
    mu3: usize,
    ly1: usize,
    kx3: usize,
    psi4: usize,
    ly2: usize,
    kx4: usize,
    h5: usize,
    wy: usize,
    kx5: usize,
    psi6: usize,
    kx6: usize,
    h7: usize,
    wx: usize,
) -> Result<usize, InterpError> {
    let y = base.src(wy);
    let kx = base
        .compose_chain(&[kx6, kx5, kx4, kx3, kx2, kx1, ux])
        .ok_or_else(|| InterpError::IllTyped("outer loop wire not composable".into()))?;
    let ky = base
        .compose_chain(&[ly2, ly1, uy])
        .ok_or_else(|| InterpError::IllTyped("inner loop wire not composable".into()))?;
    let idy = base.id_of(y);
    let id_py = base.id_of(base.src(uy));
    let bottom = ops.tmor[base
        .compose(psi6, ops.tmor[h7][wx])
        .ok_or_else(|| InterpError::IllTyped("outer closing leg".into()))?][idy];
    base.compose_chain(&[
        ops.tmor[ops.tmor[h0][kx]][ky],
        ops.tmor[mu1][id_py],
        ops.tmor[h2][id_py],
        mu3,
        psi4,
        ops.tmor[h5][wy],
        bottom,
    ])
    .ok_or_else(|| InterpError::IllTyped("double loop content not composable".into()))
}

/// The strand-merge cell: an idle strand beside a loop merges through the
/// multiplication.
fn merge_cell(ctx: &mut EvalCtx, fam: &FamilyCtx, pres: &Presentation) -> Result<ProfCell, InterpError> {
    let (src_layers, tgt_layers) = pres
        .action_patterns(
            &crate::presentation::StepAction::Merge {
                mult: fam.names.mult.clone(),
                psi: fam.names.psi.clone(),
            },
            &[],
        )
        .map_err(InterpError::Pres)?;
    let c0 = crate::presentation::SColour::plain("c");
    let src_state = State {
        source: vec![c0.clone(), c0.clone()],
        layers: src_layers,
    };
    let tgt_state = State {
        source: vec![c0.clone(), c0],
        layers: tgt_layers,
    };
    let src_lp = ctx.eval_state(&src_state)?;
    let tgt_lp = ctx.eval_state(&tgt_state)?;
    let base = fam.base.clone();
    let ops = fam.ops.clone();
    let src_total = src_lp.total().clone();
    let nb = src_total.tgt_cat().n_obj();
    let na = src_total.src_cat().n_obj();
    let mut maps = Vec::with_capacity(nb);
    for b in 0..nb {
        let bm = src_lp.tgt_cat().obj_multi(b);
        let mut row = Vec::with_capacity(na);
        for a in 0..na {
            let am = src_lp.src_cat().obj_multi(a);
            let n = src_total.fiber(b, a).len();
            let mut m = Vec::with_capacity(n);
            for pos in 0..n as u32 {
                let chain = unfold(&src_lp, b, a, pos);
                // strand atoms and loop components per layer
                let mut strand = Vec::new();
                let mut loop_elems = Vec::new();
                for (li, e) in chain.elems.iter().enumerate() {
                    let comps = tile_components(&src_lp.state.layers[li], e);
                    strand.push(tile_morphism(&base, &comps[0])?);
                    loop_elems.push(Elem::Tuple(comps[1..].to_vec()));
                }
                let g = base
                    .compose_chain(&strand)
                    .ok_or_else(|| InterpError::IllTyped("strand not composable".into()))?;
                let loop_layers = pres
                    .trace_loop_layers(&fam.names.mult, &fam.names.psi)
                    .map_err(InterpError::Pres)?;
                let (x, f) = read_loop(&base, &ops, &loop_elems, &loop_layers)?;
                // merged content: (g⊗f) α-shuffled; strict models flatten
                let gf = ops.tmor[g][f];
                // target chain: mult below, loop with content, psi above
                let b2 = ops.tobj[bm[0]][bm[1]];
                let a2 = ops.tobj[am[0]][am[1]];
                let elems = {
                    let mut v = Vec::with_capacity(6);
                    v.push(Elem::atom(&base.mor_ids[base.id_of(a2)]));
                    let inner_b = ops.tobj[b2][x];
                    let idx = base.id_of(x);
                    v.push(Elem::Tuple(vec![
                        Elem::atom(&base.mor_ids[base.id_of(a2)]),
                        Elem::atom(&base.mor_ids[idx]),
                    ]));
                    v.push(Elem::Tuple(vec![
                        Elem::atom(&base.mor_ids[gf]),
                        Elem::atom(&base.mor_ids[idx]),
                    ]));
                    v.push(Elem::Tuple(vec![
                        Elem::atom(&base.mor_ids[base.id_of(inner_b)]),
                        Elem::atom(&base.mor_ids[idx]),
                    ]));
                    v.push(Elem::Tuple(vec![
                        Elem::atom(&base.mor_ids[base.id_of(b2)]),
                        Elem::atom(&base.mor_ids[idx]),
                    ]));
                    v.push(Elem::atom(&base.mor_ids[base.id_of(b2)]));
                    v
                };
                let mids = vec![
                    tgt_lp.word_cats[1].obj_of(&[a2]),
                    tgt_lp.word_cats[2].obj_of(&[a2, x, x]),
                    tgt_lp.word_cats[3].obj_of(&[ops.tobj[b2][x], x]),
                    tgt_lp.word_cats[4].obj_of(&[b2, x, x]),
                    tgt_lp.word_cats[5].obj_of(&[b2]),
                ];
                let out = refold(&tgt_lp, b, a, &ChainDecomp { elems, mids })
                    .ok_or_else(|| InterpError::IllTyped("merged chain did not refold".into()))?;
                m.push(out);
            }
            row.push(m);
        }
        maps.push(row);
    }
    let cell = ProfCell::new("merge", src_total, tgt_lp.total().clone(), maps);
    cell.check_equivariance()?;
    Ok(cell)
}

/// The braiding cell: m ⇒ m∘σ by post-composing the model braiding.
fn braid_cell(
    ctx: &mut EvalCtx,
    model: &MonoidalModel,
    br: &[Vec<usize>],
) -> Result<ProfCell, InterpError> {
    let pres = ctx.interp.presentation.clone();
    let decl = pres.two_cell("braid").unwrap().clone();
    let src_lp = ctx.eval_state(&pres.normalize(&decl.source)?)?;
    let tgt_lp = ctx.eval_state(&pres.normalize(&decl.target)?)?;
    let base = model.base.clone();
    let nb = src_lp.total().tgt_cat().n_obj();
    let na = src_lp.total().src_cat().n_obj();
    let mut maps = Vec::with_capacity(nb);
    for b in 0..nb {
        let mut row = Vec::with_capacity(na);
        for a in 0..na {
            let am = src_lp.src_cat().obj_multi(a);
            let n = src_lp.total().fiber(b, a).len();
            let mut m = Vec::with_capacity(n);
            for pos in 0..n as u32 {
                let mu = tile_morphism(&base, &src_lp.total().fiber(b, a)[pos as usize])?;
                let shuffled = base
                    .compose(br[am[0]][am[1]], mu)
                    .ok_or_else(|| InterpError::IllTyped("braid post-composition".into()))?;
                // target chain: [sym with identity components ; m-elem]
                let mids = vec![tgt_lp.word_cats[1].obj_of(&[am[1], am[0]])];
                let elems = vec![
                    Elem::Tuple(vec![
                        Elem::atom(&base.mor_ids[base.id_of(am[1])]),
                        Elem::atom(&base.mor_ids[base.id_of(am[0])]),
                    ]),
                    Elem::atom(&base.mor_ids[shuffled]),
                ];
                let out = refold(&tgt_lp, b, a, &ChainDecomp { elems, mids })
                    .ok_or_else(|| InterpError::IllTyped("braided chain did not refold".into()))?;
                m.push(out);
            }
            row.push(m);
        }
        maps.push(row);
    }
    let cell = ProfCell::new("braid", src_lp.total().clone(), tgt_lp.total().clone(), maps);
    cell.check_equivariance()?;
    Ok(cell)
}

pub fn read_loop_pub(
    base: &Arc<FinCategory>,
    ops: &FamilyOps,
    chain: &[Elem],
    layers: &[crate::presentation::Layer],
) -> Result<(usize, usize), InterpError> {
    read_loop(base, ops, chain, layers)
}

pub fn inject_loop_pub(
    base: &Arc<FinCategory>,
    ops: &FamilyOps,
    lp: &LayeredProf,
    b: usize,
    a: usize,
    x: usize,
    g: usize,
) -> Result<u32, InterpError> {
    inject_loop(base, ops, lp, b, a, x, g)
}

/// Attaches a trace family to a model, taking the unique enumerated trace
/// when none is stored.
pub fn with_trace(model: &MonoidalModel, limits: &Limits) -> Result<MonoidalModel, ModelError> {
    if model.trace.is_some() {
        return Ok(model.clone());
    }
    let traces = super::find_traces(model, limits)?;
    let tr = traces
        .into_iter()
        .next()
        .ok_or_else(|| ModelError::MissingStructure("trace (enumeration found none)".into()))?;
    let mut m = model.clone();
    m.trace = Some(tr);
    Ok(m)
}

/// Extracts the trace family back out of an interpretation's trace cell by
/// injecting each morphism as a canonical loop class and reading the image.
pub fn extract_trace(interp: &Interpretation) -> Result<TraceFamily, InterpError> {
    let model = interp
        .model
        .clone()
        .ok_or_else(|| InterpError::Other("extraction needs a model-backed interpretation".into()))?;
    let fam = interp
        .families
        .get("tensor")
        .ok_or_else(|| InterpError::Other("no tensor family".into()))?
        .clone();
    let tr_name = fam
        .trace
        .ok_or_else(|| InterpError::Other("presentation has no trace cell".into()))?;
    let cell = interp
        .two
        .get(&tr_name)
        .ok_or_else(|| InterpError::Unassigned(tr_name.clone()))?;
    let mut ctx = EvalCtx::new(interp);
    let loop_layers = interp.presentation.trace_loop_layers(&fam.mult, &fam.psi)?;
    let src_state = State {
        source: vec![crate::presentation::SColour::plain("c")],
        layers: loop_layers,
    };
    let src_lp = ctx.eval_state(&src_state)?;
    let base = model.base.clone();
    let ops = FamilyOps {
        tobj: model.tensor_obj.clone(),
        tmor: model.tensor_mor.clone(),
        unit: model.unit,
    };
    let n = base.n_obj();
    let mut maps = vec![vec![vec![Vec::new(); n]; n]; n];
    for x in 0..n {
        for a in 0..n {
            for b in 0..n {
                let hom = base.hom(model.tobj(a, x), model.tobj(b, x));
                let mut m = Vec::with_capacity(hom.len());
                for &f in &hom {
                    let cls = inject_loop(&base, &ops, &src_lp, a, b, x, f)?;
                    let out_pos = cell.apply(a, b, cls);
                    let out_elem = &cell.target.fiber(a, b)[out_pos as usize];
                    let Elem::Atom(id) = out_elem else {
                        return Err(InterpError::IllTyped("trace image not atomic".into()));
                    };
                    let g = base
                        .mor_index(id)
                        .ok_or_else(|| InterpError::IllTyped("trace image not in base".into()))?;
                    m.push(
                        base.hom(a, b)
                            .iter()
                            .position(|&q| q == g)
                            .ok_or_else(|| InterpError::IllTyped("trace image outside hom".into()))?
                            as u32,
                    );
                }
                maps[x][a][b] = m;
            }
        }
    }
    Ok(TraceFamily { maps })
}
