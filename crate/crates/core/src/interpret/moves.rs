//! Semantic evaluation of rewrite paths: each step applies an isolated cell
//! inside an identity context via surgery on coend representatives, with an
//! exhaustive well-definedness scan over class members.


use std::sync::Arc;

use super::{refold, unfold, ChainDecomp, EvalCtx, InterpError, LayeredProf};
use crate::presentation::{Layer, RewriteStep, State, StepAction, Tile, Word};
use crate::prof::{Elem, ProfCell};

/// Evaluates a rewrite path from a source state; returns the accumulated
/// cell ⟦source⟧ ⇒ ⟦target⟧ and the final layered composite.
pub fn eval_path(
    ctx: &mut EvalCtx,
    source: &State,
    steps: &[RewriteStep],
) -> Result<(ProfCell, Arc<LayeredProf>), InterpError> {
    let mut cur_state = source.clone();
    let mut cur_lp = ctx.eval_state(&cur_state)?;
    let mut acc = ProfCell::identity(cur_lp.total());
    for step in steps {
        let new_state = ctx.interp.presentation.apply_step(&cur_state, step)?;
        let new_lp = ctx.eval_state(&new_state)?;
        let cell = step_cell(ctx, &cur_state, &cur_lp, &new_lp, step)?;
        acc = cell
            .after(&acc)
            .map_err(|e| InterpError::IllTyped(format!("path composition: {e}")))?;
        cur_state = new_state;
        cur_lp = new_lp;
    }
    Ok((acc, cur_lp))
}

struct Site {
    depth: usize,
    n_src: usize,
    left: Word,
    right: Word,
}

fn step_cell(
    ctx: &mut EvalCtx,
    cur_state: &State,
    cur: &Arc<LayeredProf>,
    new: &Arc<LayeredProf>,
    step: &RewriteStep,
) -> Result<ProfCell, InterpError> {
    let pres = &ctx.interp.presentation;
    let n_src = pres.action_src_len(&step.action)?;
    let active: Vec<Layer> = cur_state.layers[step.depth..step.depth + n_src]
        .iter()
        .map(|l| {
            let nl = step.left.len();
            let nr = step.right.len();
            l[nl..l.len() - nr].to_vec()
        })
        .collect();
    let (pat_src, pat_tgt) = pres.action_patterns(&step.action, &active)?;
    let words = pres.wire_words(cur_state)?;
    let strip_word =
        |w: &Word| -> Word { w[step.left.len()..w.len() - step.right.len()].to_vec() };
    let pat_src_state = State {
        source: strip_word(&words[step.depth]),
        layers: pat_src,
    };
    let pat_tgt_state = State {
        source: pat_src_state.source.clone(),
        layers: pat_tgt,
    };
    let src_lp = ctx.eval_state(&pat_src_state)?;
    let tgt_lp = ctx.eval_state(&pat_tgt_state)?;
    let iso = isolated_cell(ctx, &step.action, &src_lp, &tgt_lp)?;
    let site = Site {
        depth: step.depth,
        n_src,
        left: step.left.clone(),
        right: step.right.clone(),
    };
    apply_in_context(ctx, cur, new, &site, &src_lp, &tgt_lp, &iso, &step.to_string())
}

/// The isolated cell of an action between its evaluated pattern states.
/// Structural moves use the (cached, deterministic) canonical iso search;
/// their patterns are generated by identity chains, which pins the iso, and
/// the equivariance and class scans re-verify every use.
fn isolated_cell(
    ctx: &mut EvalCtx,
    action: &StepAction,
    src_lp: &Arc<LayeredProf>,
    tgt_lp: &Arc<LayeredProf>,
) -> Result<ProfCell, InterpError> {
    match action {
        StepAction::Gen2(n) => {
            let cell = ctx
                .interp
                .two
                .get(n)
                .ok_or_else(|| InterpError::Unassigned(n.clone()))?;
            check_cell_boundaries(cell, src_lp, tgt_lp, n)?;
            Ok(cell.clone())
        }
        StepAction::Inv(n) => {
            let cell = match ctx.interp.two.get(n) {
                Some(c) => c.clone(),
                None => (*ctx.derived_cell_eval(n)?).clone(),
            };
            let inv = cell.inverse().map_err(InterpError::Prof)?;
            check_cell_boundaries(&inv, src_lp, tgt_lp, n)?;
            Ok(inv)
        }
        StepAction::Derived(n) => {
            let cell = ctx.derived_cell_eval(n)?;
            check_cell_boundaries(&cell, src_lp, tgt_lp, n)?;
            Ok((*cell).clone())
        }
        StepAction::Fuse { mult, psi } => {
            let key = format!("fuse:{mult}:{psi}");
            let cell = ctx
                .interp
                .canonical
                .get(&key)
                .ok_or_else(|| InterpError::Unassigned(key.clone()))?;
            check_cell_boundaries(cell, src_lp, tgt_lp, &key)?;
            Ok(cell.clone())
        }
        StepAction::Merge { mult, psi } => {
            let key = format!("merge:{mult}:{psi}");
            let cell = ctx
                .interp
                .canonical
                .get(&key)
                .ok_or_else(|| InterpError::Unassigned(key.clone()))?;
            check_cell_boundaries(cell, src_lp, tgt_lp, &key)?;
            Ok(cell.clone())
        }
        StepAction::Exchange { .. }
        | StepAction::SlideUp { .. }
        | StepAction::SlideDown { .. }
        | StepAction::Rewire { .. }
        | StepAction::Bend { .. }
        | StepAction::Unbend { .. } => {
            let iso = crate::prof::find_iso(src_lp.total(), tgt_lp.total(), ctx.limits())?
                .ok_or_else(|| {
                    InterpError::IsoMissing(format!(
                        "structural move {} ⇒ {}",
                        src_lp.state, tgt_lp.state
                    ))
                })?;
            iso.check_equivariance()?;
            Ok(iso)
        }
    }
}

fn check_cell_boundaries(
    cell: &ProfCell,
    src_lp: &LayeredProf,
    tgt_lp: &LayeredProf,
    name: &str,
) -> Result<(), InterpError> {
    if *cell.source != **src_lp.total() || *cell.target != **tgt_lp.total() {
        return Err(InterpError::IllTyped(format!(
            "cell `{name}` does not match the evaluated pattern boundaries"
        )));
    }
    Ok(())
}

/// Splits a layer element into per-tile components.
pub fn tile_components(layer: &[Tile], elem: &Elem) -> Vec<Elem> {
    if layer.len() == 1 {
        return vec![elem.clone()];
    }
    match elem {
        Elem::Tuple(v) => v.clone(),
        other => vec![other.clone()],
    }
}

pub fn assemble_layer(layer: &[Tile], comps: Vec<Elem>) -> Elem {
    if layer.len() == 1 {
        return comps.into_iter().next().unwrap();
    }
    Elem::Tuple(comps)
}

// ---------------------------------------------------------------------------
// Contextual application

#[allow(clippy::too_many_arguments)]
fn apply_in_context(
    ctx: &mut EvalCtx,
    cur: &Arc<LayeredProf>,
    new: &Arc<LayeredProf>,
    site: &Site,
    pat_src: &Arc<LayeredProf>,
    pat_tgt: &Arc<LayeredProf>,
    iso: &ProfCell,
    step_name: &str,
) -> Result<ProfCell, InterpError> {
    let nb = cur.total().tgt_cat().n_obj();
    let na = cur.total().src_cat().n_obj();
    let mut maps = Vec::with_capacity(nb);
    for b in 0..nb {
        let mut row = Vec::with_capacity(na);
        for a in 0..na {
            let fiber_len = cur.total().fiber(b, a).len();
            let mut m = Vec::with_capacity(fiber_len);
            for pos in 0..fiber_len as u32 {
                let chain = unfold(cur, b, a, pos);
                let out = surgery(ctx, cur, new, site, pat_src, pat_tgt, iso, b, a, &chain)
                    .map_err(|e| {
                        InterpError::IllTyped(format!("step {step_name} at class {pos}: {e}"))
                    })?;
                if ctx.scan_classes && cur.layers.len() >= 2 {
                    let mut witness: Option<String> = None;
                    super::for_each_member(cur, b, a, pos, 4096, &mut |member| {
                        if witness.is_some() {
                            return;
                        }
                        match surgery(ctx, cur, new, site, pat_src, pat_tgt, iso, b, a, member) {
                            Ok(out2) if out2 == out => {}
                            Ok(out2) => {
                                witness = Some(format!(
                                    "step {step_name}: members of one class map to classes {out} and {out2}: \
                                     {:?} vs {:?}",
                                    chain.elems, member.elems
                                ));
                            }
                            Err(e) => witness = Some(format!("step {step_name}: member fails: {e}")),
                        }
                    });
                    if let Some(w) = witness {
                        return Err(InterpError::NotWellDefinedOnClasses { witness: w });
                    }
                }
                m.push(out);
            }
            row.push(m);
        }
        maps.push(row);
    }
    let cell = ProfCell::new(step_name, cur.total().clone(), new.total().clone(), maps);
    cell.check_equivariance()?;
    Ok(cell)
}

/// Core surgery: transports one chain across the step.
#[allow(clippy::too_many_arguments)]
fn surgery(
    ctx: &mut EvalCtx,
    cur: &Arc<LayeredProf>,
    new: &Arc<LayeredProf>,
    site: &Site,
    pat_src: &Arc<LayeredProf>,
    pat_tgt: &Arc<LayeredProf>,
    iso: &ProfCell,
    b: usize,
    a: usize,
    chain: &ChainDecomp,
) -> Result<u32, InterpError> {
    let k = cur.layers.len();
    let d = site.depth;
    let n_src = site.n_src;
    let n_tgt = pat_tgt.state.layers.len();
    let nl = site.left.len();
    let nr = site.right.len();

    let boundary_obj = |level: usize| -> usize {
        if level == 0 {
            a
        } else if level == k {
            b
        } else {
            chain.mids[level - 1]
        }
    };
    // insertion into an empty state: apply the cell at the identity of the
    // source object and slide the hom content through the left action
    if k == 0 {
        if n_src != 0 {
            return Err(InterpError::IllTyped("pattern exceeds empty state".into()));
        }
        let word0 = &cur.word_cats[0];
        let Elem::Atom(uid) = &chain.elems[0] else {
            return Err(InterpError::IllTyped("empty-state element not atomic".into()));
        };
        let u = word0
            .cat
            .mor_index(uid)
            .ok_or_else(|| InterpError::IllTyped("hom element not found".into()))?;
        let nl0 = site.left.len();
        let wlen = word0.factors.len();
        let nr0 = site.right.len();
        let a_multi = word0.obj_multi(a);
        let pat_bot0 = pat_src.word_cats[0].obj_of(&a_multi[nl0..wlen - nr0]);
        let cat0 = &pat_src.word_cats[0].cat;
        let id_elem = Elem::atom(&cat0.mor_ids[cat0.id_of(pat_bot0)]);
        let p = pat_src
            .total()
            .pos(pat_bot0, pat_bot0, &id_elem)
            .ok_or_else(|| InterpError::IllTyped("identity element missing".into()))?;
        let out_class0 = iso.apply(pat_bot0, pat_bot0, p);
        if pat_tgt.state.layers.is_empty() {
            // 0 ⇒ 0 layers on the empty state: pad the output hom element
            // with the identity context and compose into the hom content
            let out_elem = pat_tgt.total().fiber(pat_bot0, pat_bot0)[out_class0 as usize].clone();
            let Elem::Atom(oid) = &out_elem else {
                return Err(InterpError::IllTyped("hom output not atomic".into()));
            };
            let phi_mid = pat_tgt.word_cats[0]
                .cat
                .mor_index(oid)
                .ok_or_else(|| InterpError::IllTyped("output not in word category".into()))?;
            let mut phi_multi: Vec<usize> = (0..nl0)
                .map(|i| {
                    let cat = ctx.colour_cat_pub(&site.left[i]).unwrap();
                    cat.id_of(a_multi[i])
                })
                .collect();
            phi_multi.extend(pat_tgt.word_cats[0].mor_multi(phi_mid));
            phi_multi.extend((0..nr0).map(|i| {
                let cat = ctx.colour_cat_pub(&site.right[i]).unwrap();
                cat.id_of(a_multi[wlen - nr0 + i])
            }));
            let phi = word0.mor_of(&phi_multi);
            let out = word0
                .cat
                .compose(u, phi)
                .ok_or_else(|| InterpError::IllTyped("hom content not composable".into()))?;
            let e = Elem::atom(&word0.cat.mor_ids[out]);
            return new
                .total()
                .pos(b, a, &e)
                .ok_or_else(|| InterpError::IllTyped("composed hom element missing".into()));
        }
        let out_chain = unfold(pat_tgt, pat_bot0, pat_bot0, out_class0);
        // wrap with identity context at the a-objects
        let mut new_elems0 = Vec::with_capacity(out_chain.elems.len());
        let mut new_mids0 = Vec::new();
        for (j, oe) in out_chain.elems.iter().enumerate() {
            let comps = tile_components(&pat_tgt.state.layers[j], oe);
            let mut full = Vec::with_capacity(nl0 + comps.len() + nr0);
            for (i, s) in site.left.iter().enumerate() {
                let cat = ctx.colour_cat_pub(s)?;
                full.push(Elem::atom(&cat.mor_ids[cat.id_of(a_multi[i])]));
            }
            full.extend(comps);
            for (i, s) in site.right.iter().enumerate() {
                let cat = ctx.colour_cat_pub(s)?;
                full.push(Elem::atom(&cat.mor_ids[cat.id_of(a_multi[wlen - nr0 + i])]));
            }
            if j > 0 {
                let pat_multi = pat_tgt.word_cats[j].obj_multi(out_chain.mids[j - 1]);
                let mut full_multi: Vec<usize> = a_multi[..nl0].to_vec();
                full_multi.extend(pat_multi);
                full_multi.extend(a_multi[wlen - nr0..].iter().copied());
                new_mids0.push(new.word_cats[j].obj_of(&full_multi));
            }
            new_elems0.push(assemble_layer(&new.state.layers[j], full));
        }
        let at_a = refold(
            new,
            a,
            a,
            &ChainDecomp {
                elems: new_elems0,
                mids: new_mids0,
            },
        )
        .ok_or_else(|| InterpError::IllTyped("inserted chain did not refold".into()))?;
        return Ok(new.total().act_left(u, a, at_a));
    }
    let wlen_bot = cur.word_cats[d].factors.len();
    let wlen_top = cur.word_cats[d + n_src].factors.len();

    // extract per-layer context atoms and pattern components
    let mut pat_elems = Vec::with_capacity(n_src);
    let mut left_ctx: Vec<Vec<Elem>> = Vec::with_capacity(n_src);
    let mut right_ctx: Vec<Vec<Elem>> = Vec::with_capacity(n_src);
    for (j, li) in (d..d + n_src).enumerate() {
        let comps = tile_components(&cur.state.layers[li], &chain.elems[li]);
        left_ctx.push(comps[..nl].to_vec());
        right_ctx.push(comps[comps.len() - nr..].to_vec());
        let mid: Vec<Elem> = comps[nl..comps.len() - nr].to_vec();
        pat_elems.push(assemble_layer(&pat_src.state.layers[j], mid));
    }

    // per-wire downward composites of the context atoms
    let compose_ctx = |cols: &[Vec<Elem>], word: &Word| -> Result<Vec<usize>, InterpError> {
        let mut out = Vec::with_capacity(word.len());
        for (w_i, s) in word.iter().enumerate() {
            let cat = ctx.colour_cat_pub(s)?;
            let mut acc: Option<usize> = None;
            for row in cols.iter() {
                let Elem::Atom(id) = &row[w_i] else {
                    return Err(InterpError::IllTyped("context component not atomic".into()));
                };
                let f = cat
                    .mor_index(id)
                    .ok_or_else(|| InterpError::IllTyped(format!("context morphism `{id}`")))?;
                acc = Some(match acc {
                    None => f,
                    Some(g) => cat
                        .compose(g, f)
                        .ok_or_else(|| InterpError::IllTyped("context not composable".into()))?,
                });
            }
            out.push(acc.expect("nonempty context column"));
        }
        Ok(out)
    };

    let bot_obj = boundary_obj(d);
    let top_obj = boundary_obj(d + n_src);
    let project = |level_obj: usize, cats_idx: usize, range: std::ops::Range<usize>| -> Vec<usize> {
        let multi = cur.word_cats[cats_idx].obj_multi(level_obj);
        multi[range].to_vec()
    };
    let pat_bot = pat_src.word_cats[0].obj_of(&project(bot_obj, d, nl..wlen_bot - nr));
    let pat_top = pat_src
        .word_cats
        .last()
        .unwrap()
        .obj_of(&project(top_obj, d + n_src, nl..wlen_top - nr));

    // pattern class through the isolated cell
    let out_class: u32 = if n_src == 0 {
        let cat = &pat_src.word_cats[0].cat;
        let id_elem = Elem::atom(&cat.mor_ids[cat.id_of(pat_bot)]);
        let p = pat_src
            .total()
            .pos(pat_bot, pat_bot, &id_elem)
            .ok_or_else(|| InterpError::IllTyped("identity element missing".into()))?;
        iso.apply(pat_bot, pat_bot, p)
    } else {
        let sub_mids: Vec<usize> = (d + 1..d + n_src)
            .map(|level| {
                let w = cur.word_cats[level].factors.len();
                let multi = project(boundary_obj(level), level, nl..w - nr);
                pat_src.word_cats[level - d].obj_of(&multi)
            })
            .collect();
        let sub = ChainDecomp {
            elems: pat_elems,
            mids: sub_mids,
        };
        let p = refold(pat_src, pat_top, pat_bot, &sub)
            .ok_or_else(|| InterpError::IllTyped("pattern subchain did not refold".into()))?;
        iso.apply(pat_top, pat_bot, p)
    };

    // context composites (identities for insertions)
    let (hl, hr) = if n_src == 0 {
        let multi = cur.word_cats[d].obj_multi(bot_obj);
        let ids_l = site
            .left
            .iter()
            .enumerate()
            .map(|(i, s)| Ok(ctx.colour_cat_pub(s)?.id_of(multi[i])))
            .collect::<Result<Vec<_>, InterpError>>()?;
        let ids_r = site
            .right
            .iter()
            .enumerate()
            .map(|(i, s)| Ok(ctx.colour_cat_pub(s)?.id_of(multi[wlen_bot - nr + i])))
            .collect::<Result<Vec<_>, InterpError>>()?;
        (ids_l, ids_r)
    } else {
        (compose_ctx(&left_ctx, &site.left)?, compose_ctx(&right_ctx, &site.right)?)
    };

    // assemble the new chain: below, block, above
    let mut new_elems: Vec<Elem> = Vec::with_capacity(new.layers.len());
    let mut new_mids: Vec<usize> = Vec::new();
    for i in 0..d {
        if i > 0 {
            new_mids.push(chain.mids[i - 1]);
        }
        new_elems.push(chain.elems[i].clone());
    }

    if n_tgt == 0 {
        // deletion: the output is a word morphism absorbed into a neighbour
        let out_elem = pat_tgt.total().fiber(pat_top, pat_bot)[out_class as usize].clone();
        let Elem::Atom(id) = &out_elem else {
            return Err(InterpError::IllTyped("deleted block output not atomic".into()));
        };
        let mid_cat = &pat_tgt.word_cats[0];
        let phi_mid = mid_cat
            .cat
            .mor_index(id)
            .ok_or_else(|| InterpError::IllTyped("deleted output not in word category".into()))?;
        let mut phi_multi = hl.clone();
        phi_multi.extend(mid_cat.mor_multi(phi_mid));
        phi_multi.extend(hr.clone());
        let phi = cur.word_cats[d].mor_of(&phi_multi);
        if d + n_src < k {
            // absorb upward through the right action of the next layer
            let upper = &cur.layers[d + n_src];
            let acted = upper.act_right_elem(phi, boundary_obj(d + n_src + 1), &chain.elems[d + n_src]);
            if d > 0 {
                new_mids.push(bot_obj);
            }
            new_elems.push(acted);
            for level in d + n_src + 1..k {
                new_mids.push(chain.mids[level - 1]);
                new_elems.push(chain.elems[level].clone());
            }
        } else if d > 0 {
            // block at the top: absorb downward through the left action
            let lower = &cur.layers[d - 1];
            let acted = lower.act_left_elem(phi, boundary_obj(d - 1), &chain.elems[d - 1]);
            let last = new_elems.len() - 1;
            new_elems[last] = acted;
        } else {
            // the whole state was the block
            let cat = &new.word_cats[0].cat;
            let e = Elem::atom(&cat.mor_ids[phi]);
            return new
                .total()
                .pos(b, a, &e)
                .ok_or_else(|| InterpError::IllTyped("deleted total not in hom".into()));
        }
    } else {
        let out_chain = unfold(pat_tgt, pat_top, pat_bot, out_class);
        let top_multi = cur.word_cats[d + n_src].obj_multi(top_obj);
        for (j, oe) in out_chain.elems.iter().enumerate() {
            let comps = tile_components(&pat_tgt.state.layers[j], oe);
            let mut full = Vec::with_capacity(nl + comps.len() + nr);
            if j == 0 {
                for (i, s) in site.left.iter().enumerate() {
                    let cat = ctx.colour_cat_pub(s)?;
                    full.push(Elem::atom(&cat.mor_ids[hl[i]]));
                }
                full.extend(comps);
                for (i, s) in site.right.iter().enumerate() {
                    let cat = ctx.colour_cat_pub(s)?;
                    full.push(Elem::atom(&cat.mor_ids[hr[i]]));
                }
            } else {
                for (i, s) in site.left.iter().enumerate() {
                    let cat = ctx.colour_cat_pub(s)?;
                    full.push(Elem::atom(&cat.mor_ids[cat.id_of(top_multi[i])]));
                }
                full.extend(comps);
                for (i, s) in site.right.iter().enumerate() {
                    let cat = ctx.colour_cat_pub(s)?;
                    full.push(Elem::atom(&cat.mor_ids[cat.id_of(top_multi[wlen_top - nr + i])]));
                }
            }
            if j == 0 {
                if d > 0 {
                    new_mids.push(bot_obj);
                }
            } else {
                let pat_multi = pat_tgt.word_cats[j].obj_multi(out_chain.mids[j - 1]);
                let mut full_multi: Vec<usize> = top_multi[..nl].to_vec();
                full_multi.extend(pat_multi);
                full_multi.extend(top_multi[wlen_top - nr..].iter().copied());
                new_mids.push(new.word_cats[d + j].obj_of(&full_multi));
            }
            new_elems.push(assemble_layer(&new.state.layers[d + j], full));
        }
        for level in d + n_src..k {
            new_mids.push(boundary_obj(level));
            new_elems.push(chain.elems[level].clone());
        }
    }

    debug_assert_eq!(new_elems.len(), new.layers.len());
    if !new_elems.is_empty() {
        debug_assert_eq!(new_mids.len(), new_elems.len() - 1);
    }
    let out = ChainDecomp {
        elems: new_elems,
        mids: new_mids,
    };
    refold(new, b, a, &out)
        .ok_or_else(|| InterpError::IllTyped("re-embedded chain did not refold".into()))
}

impl<'a> EvalCtx<'a> {
    pub fn colour_cat_pub(
        &self,
        s: &crate::presentation::SColour,
    ) -> Result<std::sync::Arc<crate::fincat::FinCategory>, InterpError> {
        let c = self
            .interp
            .zero
            .get(&s.colour)
            .ok_or_else(|| InterpError::Unassigned(s.colour.clone()))?;
        Ok(if s.dual { c.opposite() } else { c.clone() })
    }
}
