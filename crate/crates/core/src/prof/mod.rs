//! Profunctors between finite categories: finite set-valued bimodules with
//! explicit action tables, composed by coend (see [`coend`]) and compared by
//! natural families of functions ([`cell`]).
//!
//! Orientation convention, fixed once for the whole crate: a profunctor from
//! A to B is a functor B^op × A → Set. The fiber at (b, a) is written E(b, a);
//! the left action of g: b' → b carries E(b, a) to E(b', a), the right action
//! of f: a → a' carries E(b, a) to E(b, a'). The Hom profunctor of C has
//! E(b, a) = C(b, a), and the covariant embedding of F: A → B has fibers
//! B(b, F a), which makes embed_cov(F) ⊣ embed_contra(F) come out true.

pub mod adjoint;
pub mod cell;
pub mod coend;
pub mod io;
pub mod iso;

pub use adjoint::{check_adjunction, embed_contra, embed_cov, has_right_adjoint, representability_solve};
pub use cell::ProfCell;
pub use coend::{compose_prof, CoendTable};
pub use iso::find_iso;

use std::fmt;
use std::sync::Arc;

use crate::fincat::{FinCategory, Functor, ProductCat};
use crate::limits::Limits;

pub type Prof = Arc<Profunctor>;

#[derive(Debug, thiserror::Error)]
pub enum ProfError {
    #[error("middle categories do not match: `{0}` vs `{1}`")]
    MiddleMismatch(String, String),
    #[error("profunctors are not parallel: {0}")]
    NotParallel(String),
    #[error("size guard: {0} elements exceeds cap {1}")]
    SizeGuard(usize, usize),
    #[error("action left fiber (b={b}, a={a}): image `{elem}` not found in destination fiber")]
    ActionImage { b: String, a: String, elem: String },
    #[error("bimodule law fails: {0}")]
    BimoduleLaw(String),
    #[error("equivariance fails for `{cell}` at (b={b}, a={a}), element `{elem}`, morphism `{mor}`")]
    Equivariance {
        cell: String,
        b: String,
        a: String,
        elem: String,
        mor: String,
    },
    #[error("cell is not well-defined on coend classes: {witness}")]
    NotWellDefined { witness: String },
    #[error("cell `{0}` is not componentwise bijective at (b={1}, a={2})")]
    NotInvertible(String, String, String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("search budget exhausted ({0} nodes)")]
    Budget(u64),
    #[error(transparent)]
    Cat(#[from] crate::fincat::CatError),
}

/// An element of a profunctor fiber. Composites carry their full flattened
/// chain of layer elements together with the middle objects they pass
/// through, which makes composition associative on the nose and keeps every
/// coend class representative self-describing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Atom(String),
    Tuple(Vec<Elem>),
    Chain { parts: Vec<Elem>, mids: Vec<String> },
}

impl Elem {
    pub fn atom(s: impl Into<String>) -> Elem {
        Elem::Atom(s.into())
    }

    /// Number of layer slots this element spans (chains count their parts).
    pub fn len(&self) -> usize {
        match self {
            Elem::Chain { parts, .. } => parts.len(),
            _ => 1,
        }
    }

    fn explode(&self) -> (Vec<Elem>, Vec<String>) {
        match self {
            Elem::Chain { parts, mids } => (parts.clone(), mids.clone()),
            other => (vec![other.clone()], Vec::new()),
        }
    }

    /// Splices `outer` above `inner` across the middle object `mid`,
    /// flattening nested chains.
    pub fn splice(outer: &Elem, mid: &str, inner: &Elem) -> Elem {
        let (mut parts, mut mids) = outer.explode();
        let (iparts, imids) = inner.explode();
        mids.push(mid.to_string());
        mids.extend(imids);
        parts.extend(iparts);
        Elem::Chain { parts, mids }
    }

    /// Splits a chain at `outer_len` parts back into (outer, mid, inner).
    pub fn split(&self, outer_len: usize) -> (Elem, String, Elem) {
        match self {
            Elem::Chain { parts, mids } => {
                let pack = |ps: &[Elem], ms: &[String]| {
                    if ps.len() == 1 {
                        ps[0].clone()
                    } else {
                        Elem::Chain {
                            parts: ps.to_vec(),
                            mids: ms.to_vec(),
                        }
                    }
                };
                let outer = pack(&parts[..outer_len], &mids[..outer_len.saturating_sub(1)]);
                let mid = mids[outer_len - 1].clone();
                let inner = pack(&parts[outer_len..], &mids[outer_len..]);
                (outer, mid, inner)
            }
            _ => panic!("split on a non-chain element"),
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Atom(s) => write!(f, "{s}"),
            Elem::Tuple(es) => {
                write!(f, "⟨")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "⟩")
            }
            Elem::Chain { parts, mids } => {
                write!(f, "[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " @{} ", mids[i - 1])?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// A finite profunctor with materialized fibers and action tables.
#[derive(Debug, Clone)]
pub struct Profunctor {
    pub name: String,
    pub source: ProductCat,
    pub target: ProductCat,
    /// Uniform chain length of the fiber elements (1 for atomic profunctors).
    pub chain_len: usize,
    fibers: Vec<Vec<Vec<Elem>>>,
    /// left[g][a]: positions of E(tgt g, a) → positions of E(src g, a).
    left: Vec<Vec<Vec<u32>>>,
    /// right[f][b]: positions of E(b, src f) → positions of E(b, tgt f).
    right: Vec<Vec<Vec<u32>>>,
}

impl PartialEq for Profunctor {
    fn eq(&self, other: &Self) -> bool {
        self.source.cat == other.source.cat
            && self.target.cat == other.target.cat
            && self.fibers == other.fibers
            && self.left == other.left
            && self.right == other.right
    }
}
impl Eq for Profunctor {}

impl fmt::Display for Profunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ↛ {} ({} elements)",
            self.name,
            self.source.cat.name,
            self.target.cat.name,
            self.total_elements()
        )
    }
}

impl Profunctor {
    pub fn src_cat(&self) -> &Arc<FinCategory> {
        &self.source.cat
    }

    pub fn tgt_cat(&self) -> &Arc<FinCategory> {
        &self.target.cat
    }

    pub fn fiber(&self, b: usize, a: usize) -> &[Elem] {
        &self.fibers[b][a]
    }

    pub fn pos(&self, b: usize, a: usize, e: &Elem) -> Option<u32> {
        self.fibers[b][a].binary_search(e).ok().map(|p| p as u32)
    }

    pub fn act_left(&self, g: usize, a: usize, pos: u32) -> u32 {
        self.left[g][a][pos as usize]
    }

    pub fn act_right(&self, f: usize, b: usize, pos: u32) -> u32 {
        self.right[f][b][pos as usize]
    }

    /// Left action applied to an element value.
    pub fn act_left_elem(&self, g: usize, a: usize, e: &Elem) -> Elem {
        let b = self.target.cat.tgt(g);
        let b2 = self.target.cat.src(g);
        let p = self.pos(b, a, e).expect("element in fiber");
        self.fibers[b2][a][self.act_left(g, a, p) as usize].clone()
    }

    pub fn act_right_elem(&self, f: usize, b: usize, e: &Elem) -> Elem {
        let a = self.source.cat.src(f);
        let a2 = self.source.cat.tgt(f);
        let p = self.pos(b, a, e).expect("element in fiber");
        self.fibers[b][a2][self.act_right(f, b, p) as usize].clone()
    }

    pub fn total_elements(&self) -> usize {
        self.fibers.iter().flat_map(|row| row.iter().map(|f| f.len())).sum()
    }

    /// Materializes fibers and actions from closures. The action closures map
    /// element values; images are located in the destination fibers.
    pub fn build(
        name: &str,
        source: ProductCat,
        target: ProductCat,
        limits: &Limits,
        chain_len: usize,
        mut fiber_fn: impl FnMut(usize, usize) -> Vec<Elem>,
        mut left_fn: impl FnMut(usize, usize, &Elem) -> Elem,
        mut right_fn: impl FnMut(usize, usize, &Elem) -> Elem,
    ) -> Result<Prof, ProfError> {
        let nb = target.cat.n_obj();
        let na = source.cat.n_obj();
        let mut fibers = Vec::with_capacity(nb);
        let mut total = 0usize;
        for b in 0..nb {
            let mut row = Vec::with_capacity(na);
            for a in 0..na {
                let mut f = fiber_fn(b, a);
                f.sort();
                f.dedup();
                total += f.len();
                if total > limits.max_elements {
                    return Err(ProfError::SizeGuard(total, limits.max_elements));
                }
                row.push(f);
            }
            fibers.push(row);
        }
        let mut left = Vec::with_capacity(target.cat.n_mor());
        for g in 0..target.cat.n_mor() {
            let bt = target.cat.tgt(g);
            let bs = target.cat.src(g);
            let mut per_a = Vec::with_capacity(na);
            for (a, dst) in (0..na).map(|a| (a, &fibers[bs][a])) {
                let mut map = Vec::with_capacity(fibers[bt][a].len());
                for e in &fibers[bt][a] {
                    let img = left_fn(g, a, e);
                    let p = dst.binary_search(&img).map_err(|_| ProfError::ActionImage {
                        b: target.cat.objects[bs].clone(),
                        a: source.cat.objects[a].clone(),
                        elem: img.to_string(),
                    })?;
                    map.push(p as u32);
                }
                per_a.push(map);
            }
            left.push(per_a);
        }
        let mut right = Vec::with_capacity(source.cat.n_mor());
        for f in 0..source.cat.n_mor() {
            let asrc = source.cat.src(f);
            let atgt = source.cat.tgt(f);
            let mut per_b = Vec::with_capacity(nb);
            for (b, dst) in (0..nb).map(|b| (b, &fibers[b][atgt])) {
                let mut map = Vec::with_capacity(fibers[b][asrc].len());
                for e in &fibers[b][asrc] {
                    let img = right_fn(f, b, e);
                    let p = dst.binary_search(&img).map_err(|_| ProfError::ActionImage {
                        b: target.cat.objects[b].clone(),
                        a: source.cat.objects[atgt].clone(),
                        elem: img.to_string(),
                    })?;
                    map.push(p as u32);
                }
                per_b.push(map);
            }
            right.push(per_b);
        }
        Ok(Arc::new(Profunctor {
            name: name.to_string(),
            source,
            target,
            chain_len,
            fibers,
            left,
            right,
        }))
    }

    /// Low-level constructor for code that already has consistent tables.
    pub fn from_raw(
        name: &str,
        source: ProductCat,
        target: ProductCat,
        chain_len: usize,
        fibers: Vec<Vec<Vec<Elem>>>,
        left: Vec<Vec<Vec<u32>>>,
        right: Vec<Vec<Vec<u32>>>,
    ) -> Prof {
        Arc::new(Profunctor {
            name: name.to_string(),
            source,
            target,
            chain_len,
            fibers,
            left,
            right,
        })
    }

    /// Exhaustive bimodule-law scan: identity actions are identities, actions
    /// are functorial in each variable, and the two actions commute.
    pub fn validate(&self) -> Result<(), ProfError> {
        let t = &self.target.cat;
        let s = &self.source.cat;
        let na = s.n_obj();
        let nb = t.n_obj();
        for b in 0..nb {
            for a in 0..na {
                let n = self.fibers[b][a].len() as u32;
                for p in 0..n {
                    if self.act_left(t.id_of(b), a, p) != p {
                        return Err(ProfError::BimoduleLaw(format!(
                            "left identity action not identity at ({}, {})",
                            t.objects[b], s.objects[a]
                        )));
                    }
                    if self.act_right(s.id_of(a), b, p) != p {
                        return Err(ProfError::BimoduleLaw(format!(
                            "right identity action not identity at ({}, {})",
                            t.objects[b], s.objects[a]
                        )));
                    }
                }
            }
        }
        // contravariant functoriality: (g2∘g1 acting) = (g1 then g2 backwards)
        for g2 in 0..t.n_mor() {
            for g1 in 0..t.n_mor() {
                if let Some(g21) = t.compose(g2, g1) {
                    // g21: src(g1) → tgt(g2); action E(tgt g2, a) → E(src g1, a)
                    for a in 0..na {
                        let bt = t.tgt(g2);
                        for p in 0..self.fibers[bt][a].len() as u32 {
                            let one = self.act_left(g21, a, p);
                            let two = self.act_left(g1, a, self.act_left(g2, a, p));
                            if one != two {
                                return Err(ProfError::BimoduleLaw(format!(
                                    "left action not functorial on (`{}`,`{}`)",
                                    t.mor_ids[g2], t.mor_ids[g1]
                                )));
                            }
                        }
                    }
                }
            }
        }
        for f2 in 0..s.n_mor() {
            for f1 in 0..s.n_mor() {
                if let Some(f21) = s.compose(f2, f1) {
                    for b in 0..nb {
                        let asrc = s.src(f1);
                        for p in 0..self.fibers[b][asrc].len() as u32 {
                            let one = self.act_right(f21, b, p);
                            let two = self.act_right(f2, b, self.act_right(f1, b, p));
                            if one != two {
                                return Err(ProfError::BimoduleLaw(format!(
                                    "right action not functorial on (`{}`,`{}`)",
                                    s.mor_ids[f2], s.mor_ids[f1]
                                )));
                            }
                        }
                    }
                }
            }
        }
        for g in 0..t.n_mor() {
            for f in 0..s.n_mor() {
                let bt = t.tgt(g);
                let asrc = s.src(f);
                for p in 0..self.fibers[bt][asrc].len() as u32 {
                    let lr = self.act_right(f, t.src(g), self.act_left(g, asrc, p));
                    let rl = self.act_left(g, s.tgt(f), self.act_right(f, bt, p));
                    if lr != rl {
                        return Err(ProfError::BimoduleLaw(format!(
                            "actions do not commute on (`{}`,`{}`)",
                            t.mor_ids[g], s.mor_ids[f]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Builders

fn single(c: &Arc<FinCategory>) -> ProductCat {
    ProductCat {
        factors: vec![c.clone()],
        cat: c.clone(),
    }
}

pub fn word_cat(factors: Vec<Arc<FinCategory>>, limits: &Limits) -> Result<ProductCat, ProfError> {
    Ok(ProductCat::new(factors, limits)?)
}

/// Hom profunctor of a word category: E(b, a) = Hom(b, a), actions are
/// pre/post-composition.
pub fn hom_w(w: &ProductCat, limits: &Limits) -> Result<Prof, ProfError> {
    let c = w.cat.clone();
    let c1 = c.clone();
    let c2 = c.clone();
    let c3 = c.clone();
    Profunctor::build(
        &format!("Hom({})", c.name),
        w.clone(),
        w.clone(),
        limits,
        1,
        move |b, a| c1.hom(b, a).into_iter().map(|m| Elem::atom(&c1.mor_ids[m])).collect(),
        move |g, _a, e| match e {
            Elem::Atom(id) => {
                let u = c2.mor_index(id).unwrap();
                Elem::atom(&c2.mor_ids[c2.compose(u, g).expect("precompose")])
            }
            _ => unreachable!(),
        },
        move |f, _b, e| match e {
            Elem::Atom(id) => {
                let u = c3.mor_index(id).unwrap();
                Elem::atom(&c3.mor_ids[c3.compose(f, u).expect("postcompose")])
            }
            _ => unreachable!(),
        },
    )
}

pub fn hom_profunctor(c: &Arc<FinCategory>, limits: &Limits) -> Result<Prof, ProfError> {
    hom_w(&single(c), limits)
}

/// n-ary tensor. Boundary factor lists concatenate (flat words); elements are
/// tuples of the factor elements.
pub fn tensor_many(ps: &[Prof], limits: &Limits) -> Result<Prof, ProfError> {
    if ps.len() == 1 {
        return Ok(ps[0].clone());
    }
    let src_factors: Vec<Arc<FinCategory>> = ps.iter().flat_map(|p| p.source.factors.iter().cloned()).collect();
    let tgt_factors: Vec<Arc<FinCategory>> = ps.iter().flat_map(|p| p.target.factors.iter().cloned()).collect();
    // Degenerate widths: if every factor is trivial-boundary this still works
    // through ProductCat (empty product = terminal).
    let source = ProductCat::new(src_factors, limits)?;
    let target = ProductCat::new(tgt_factors, limits)?;
    // ranges of each constituent inside the flat factor lists
    let mut src_ranges = Vec::new();
    let mut tgt_ranges = Vec::new();
    let (mut so, mut to) = (0usize, 0usize);
    for p in ps {
        let sw = p.source.factors.len();
        let tw = p.target.factors.len();
        src_ranges.push(so..so + sw);
        tgt_ranges.push(to..to + tw);
        so += sw;
        to += tw;
    }
    let name = format!(
        "({})",
        ps.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join("⊗")
    );
    let ps: Vec<Prof> = ps.to_vec();
    let source2 = source.clone();
    let target2 = target.clone();
    let sub_obj = |pc: &ProductCat, whole: &ProductCat, idx: usize, range: &std::ops::Range<usize>| -> usize {
        let multi = whole.obj_multi(idx);
        pc.obj_of(&multi[range.clone()])
    };
    let sub_mor = |pc: &ProductCat, whole: &ProductCat, idx: usize, range: &std::ops::Range<usize>| -> usize {
        let multi = whole.mor_multi(idx);
        pc.mor_of(&multi[range.clone()])
    };
    let ps1 = ps.clone();
    let ps2 = ps.clone();
    let ps3 = ps.clone();
    let (sr1, tr1) = (src_ranges.clone(), tgt_ranges.clone());
    let (sr2, tr2) = (src_ranges.clone(), tgt_ranges.clone());
    let (sr3, tr3) = (src_ranges, tgt_ranges);
    let s_a = source.clone();
    let t_a = target.clone();
    let s_b = source.clone();
    let t_b = target.clone();
    let s_c = source.clone();
    let t_c = target.clone();
    Profunctor::build(
        &name,
        source2,
        target2,
        limits,
        1,
        move |b, a| {
            let mut acc: Vec<Vec<Elem>> = vec![Vec::new()];
            for (i, p) in ps1.iter().enumerate() {
                let bb = sub_obj(&p.target, &t_a, b, &tr1[i]);
                let aa = sub_obj(&p.source, &s_a, a, &sr1[i]);
                let fib = p.fiber(bb, aa);
                let mut next = Vec::with_capacity(acc.len() * fib.len());
                for pre in &acc {
                    for e in fib {
                        let mut v = pre.clone();
                        v.push(e.clone());
                        next.push(v);
                    }
                }
                acc = next;
            }
            acc.into_iter().map(Elem::Tuple).collect()
        },
        move |g, a, e| {
            let comps = match e {
                Elem::Tuple(v) => v,
                _ => unreachable!(),
            };
            let out: Vec<Elem> = ps2
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let gg = sub_mor(&p.target, &t_b, g, &tr2[i]);
                    let aa = sub_obj(&p.source, &s_b, a, &sr2[i]);
                    p.act_left_elem(gg, aa, &comps[i])
                })
                .collect();
            Elem::Tuple(out)
        },
        move |f, b, e| {
            let comps = match e {
                Elem::Tuple(v) => v,
                _ => unreachable!(),
            };
            let out: Vec<Elem> = ps3
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let ff = sub_mor(&p.source, &s_c, f, &sr3[i]);
                    let bb = sub_obj(&p.target, &t_c, b, &tr3[i]);
                    p.act_right_elem(ff, bb, &comps[i])
                })
                .collect();
            Elem::Tuple(out)
        },
    )
}

pub fn tensor_prof(p: &Prof, q: &Prof, limits: &Limits) -> Result<Prof, ProfError> {
    tensor_many(&[p.clone(), q.clone()], limits)
}

/// Rainbow cup over a word: 1 ↛ w ++ rev-dual(w), with fiber at
/// ((x⃗, ŷ⃗ reversed), •) the hom-set Hom_W(x⃗, y⃗).
pub fn cup_w(w: &ProductCat, limits: &Limits) -> Result<Prof, ProfError> {
    let k = w.factors.len();
    let mut tgt_factors = w.factors.clone();
    for f in w.factors.iter().rev() {
        tgt_factors.push(f.opposite());
    }
    let target = ProductCat::new(tgt_factors, limits)?;
    let source = ProductCat::new(vec![], limits)?;
    let wc = w.clone();
    let wc2 = w.clone();
    let t1 = target.clone();
    let t2 = target.clone();
    Profunctor::build(
        &format!("Cup({})", w.cat.name),
        source,
        target,
        limits,
        1,
        move |b, _a| {
            let multi = t1.obj_multi(b);
            let x = wc.obj_of(&multi[..k]);
            let rev: Vec<usize> = multi[k..].iter().rev().copied().collect();
            let y = wc.obj_of(&rev);
            wc.cat.hom(x, y).into_iter().map(|m| Elem::atom(&wc.cat.mor_ids[m])).collect()
        },
        move |g, _a, e| {
            // g: (x', ŷ') → (x, y): components g1: x'→x in W, ĝ2 with
            // underlying g2: y→y' in W; u: x→y goes to g2∘u∘g1: x'→y'.
            let multi = t2.mor_multi(g);
            let g1 = wc2.mor_of(&multi[..k]);
            let rev: Vec<usize> = multi[k..].iter().rev().copied().collect();
            let g2 = wc2.mor_of(&rev);
            let u = wc2
                .cat
                .mor_index(match e {
                    Elem::Atom(s) => s,
                    _ => unreachable!(),
                })
                .unwrap();
            let out = wc2.cat.compose_chain(&[g2, u, g1]).expect("cup action");
            Elem::atom(&wc2.cat.mor_ids[out])
        },
        move |_f, _b, e| e.clone(),
    )
}

/// Rainbow cap over a word: rev-dual(w) ++ w ↛ 1, with fiber at
/// (•, (p̂⃗ reversed, q⃗)) the hom-set Hom_W(p⃗, q⃗).
pub fn cap_w(w: &ProductCat, limits: &Limits) -> Result<Prof, ProfError> {
    let k = w.factors.len();
    let mut src_factors: Vec<Arc<FinCategory>> = w.factors.iter().rev().map(|f| f.opposite()).collect();
    src_factors.extend(w.factors.iter().cloned());
    let source = ProductCat::new(src_factors, limits)?;
    let target = ProductCat::new(vec![], limits)?;
    let wc = w.clone();
    let wc2 = w.clone();
    let s1 = source.clone();
    let s2 = source.clone();
    Profunctor::build(
        &format!("Cap({})", w.cat.name),
        source,
        target,
        limits,
        1,
        move |_b, a| {
            let multi = s1.obj_multi(a);
            let rev: Vec<usize> = multi[..k].iter().rev().copied().collect();
            let p = wc.obj_of(&rev);
            let q = wc.obj_of(&multi[k..]);
            wc.cat.hom(p, q).into_iter().map(|m| Elem::atom(&wc.cat.mor_ids[m])).collect()
        },
        move |_g, _a, e| e.clone(),
        move |f, _b, e| {
            // f: (p̂, q) → (p̂', q'): underlying f1: p'→p in W, f2: q→q' in W;
            // u: p→q goes to f2∘u∘f1.
            let multi = s2.mor_multi(f);
            let rev: Vec<usize> = multi[..k].iter().rev().copied().collect();
            let f1 = wc2.mor_of(&rev);
            let f2 = wc2.mor_of(&multi[k..]);
            let u = wc2
                .cat
                .mor_index(match e {
                    Elem::Atom(s) => s,
                    _ => unreachable!(),
                })
                .unwrap();
            let out = wc2.cat.compose_chain(&[f2, u, f1]).expect("cap action");
            Elem::atom(&wc2.cat.mor_ids[out])
        },
    )
}

/// Exchange profunctor σ: w1 ++ w2 ↛ w2 ++ w1 with fibers
/// Hom_{W2}(y⃗, y⃗') × Hom_{W1}(x⃗, x⃗').
pub fn sym_w(w1: &ProductCat, w2: &ProductCat, limits: &Limits) -> Result<Prof, ProfError> {
    let mut src_factors = w1.factors.clone();
    src_factors.extend(w2.factors.iter().cloned());
    let mut tgt_factors = w2.factors.clone();
    tgt_factors.extend(w1.factors.iter().cloned());
    let source = ProductCat::new(src_factors, limits)?;
    let target = ProductCat::new(tgt_factors, limits)?;
    let k1 = w1.factors.len();
    let k2 = w2.factors.len();
    let (w1a, w2a) = (w1.clone(), w2.clone());
    let (w1b, w2b) = (w1.clone(), w2.clone());
    let (w1c, w2c) = (w1.clone(), w2.clone());
    let (sa, ta) = (source.clone(), target.clone());
    let tb = target.clone();
    let sc2 = source.clone();
    Profunctor::build(
        &format!("Sym({},{})", w1.cat.name, w2.cat.name),
        source,
        target,
        limits,
        1,
        move |b, a| {
            let bm = ta.obj_multi(b);
            let am = sa.obj_multi(a);
            let y = w2a.obj_of(&bm[..k2]);
            let x = w1a.obj_of(&bm[k2..]);
            let xp = w1a.obj_of(&am[..k1]);
            let yp = w2a.obj_of(&am[k1..]);
            let mut out = Vec::new();
            for h2 in w2a.cat.hom(y, yp) {
                for h1 in w1a.cat.hom(x, xp) {
                    out.push(Elem::Tuple(vec![
                        Elem::atom(&w2a.cat.mor_ids[h2]),
                        Elem::atom(&w1a.cat.mor_ids[h1]),
                    ]));
                }
            }
            out
        },
        move |g, _a, e| {
            let gm = tb.mor_multi(g);
            let u2 = w2b.mor_of(&gm[..k2]);
            let u1 = w1b.mor_of(&gm[k2..]);
            let (h2, h1) = match e {
                Elem::Tuple(v) => (
                    w2b.cat.mor_index(match &v[0] {
                        Elem::Atom(s) => s,
                        _ => unreachable!(),
                    })
                    .unwrap(),
                    w1b.cat.mor_index(match &v[1] {
                        Elem::Atom(s) => s,
                        _ => unreachable!(),
                    })
                    .unwrap(),
                ),
                _ => unreachable!(),
            };
            Elem::Tuple(vec![
                Elem::atom(&w2b.cat.mor_ids[w2b.cat.compose(h2, u2).unwrap()]),
                Elem::atom(&w1b.cat.mor_ids[w1b.cat.compose(h1, u1).unwrap()]),
            ])
        },
        move |f, _b, e| {
            let fm = sc2.mor_multi(f);
            let v1 = w1c.mor_of(&fm[..k1]);
            let v2 = w2c.mor_of(&fm[k1..]);
            let (h2, h1) = match e {
                Elem::Tuple(v) => (
                    w2c.cat.mor_index(match &v[0] {
                        Elem::Atom(s) => s,
                        _ => unreachable!(),
                    })
                    .unwrap(),
                    w1c.cat.mor_index(match &v[1] {
                        Elem::Atom(s) => s,
                        _ => unreachable!(),
                    })
                    .unwrap(),
                ),
                _ => unreachable!(),
            };
            Elem::Tuple(vec![
                Elem::atom(&w2c.cat.mor_ids[w2c.cat.compose(v2, h2).unwrap()]),
                Elem::atom(&w1c.cat.mor_ids[w1c.cat.compose(v1, h1).unwrap()]),
            ])
        },
    )
}

pub fn cup(c: &Arc<FinCategory>, limits: &Limits) -> Result<Prof, ProfError> {
    cup_w(&single(c), limits)
}

pub fn cap(c: &Arc<FinCategory>, limits: &Limits) -> Result<Prof, ProfError> {
    cap_w(&single(c), limits)
}

/// Right rotation (compact-structure dual): swaps boundaries and reverses
/// words with dualized factors. Fibers transpose; actions swap roles.
pub fn rot_r(p: &Prof, limits: &Limits) -> Result<Prof, ProfError> {
    let src_factors: Vec<Arc<FinCategory>> = p.target.factors.iter().rev().map(|f| f.opposite()).collect();
    let tgt_factors: Vec<Arc<FinCategory>> = p.source.factors.iter().rev().map(|f| f.opposite()).collect();
    let source = ProductCat::new(src_factors, limits)?;
    let target = ProductCat::new(tgt_factors, limits)?;
    let p1 = p.clone();
    let p2 = p.clone();
    let p3 = p.clone();
    let (s1, t1) = (source.clone(), target.clone());
    let (s2, t2) = (source.clone(), target.clone());
    let (s3, t3) = (source.clone(), target.clone());
    let unrev_obj = |pc: &ProductCat, orig: &ProductCat, idx: usize| -> usize {
        let rev: Vec<usize> = pc.obj_multi(idx).into_iter().rev().collect();
        orig.obj_of(&rev)
    };
    let unrev_mor = |pc: &ProductCat, orig: &ProductCat, idx: usize| -> usize {
        let rev: Vec<usize> = pc.mor_multi(idx).into_iter().rev().collect();
        orig.mor_of(&rev)
    };
    Profunctor::build(
        &format!("{}∨", p.name),
        source,
        target,
        limits,
        p.chain_len,
        move |b, a| {
            // b lives over rev-dual(source of p), a over rev-dual(target of p)
            let pb = unrev_obj(&t1, &p1.source, b);
            let pa = unrev_obj(&s1, &p1.target, a);
            p1.fiber(pa, pb).to_vec()
        },
        move |g, a, e| {
            // ĝ: b' → b in rev-dual(src p) is g: b → b' in src p; acts as the
            // right action of p.
            let pg = unrev_mor(&t2, &p2.source, g);
            let pa = unrev_obj(&s2, &p2.target, a);
            p2.act_right_elem(pg, pa, e)
        },
        move |f, b, e| {
            let pf = unrev_mor(&s3, &p3.target, f);
            let pb = unrev_obj(&t3, &p3.source, b);
            p3.act_left_elem(pf, pb, e)
        },
    )
}

/// Covariant embedding F^*: A ↛ B of F: A → B, fibers Hom_B(b, F a).
pub fn embed_cov_impl(f: &Functor, limits: &Limits) -> Result<Prof, ProfError> {
    embed_cov_pc(f, single(&f.source), single(&f.target), limits)
}

/// Covariant embedding with explicit boundary product structure (the
/// functor's source may itself be a product of word factors).
pub fn embed_cov_pc(
    f: &Functor,
    source: ProductCat,
    target: ProductCat,
    limits: &Limits,
) -> Result<Prof, ProfError> {
    assert_eq!(source.cat, f.source, "embedding source mismatch");
    assert_eq!(target.cat, f.target, "embedding target mismatch");
    let b = f.target.clone();
    let (b1, b2, b3) = (b.clone(), b.clone(), b.clone());
    let om = f.obj_map.clone();
    let mm = f.mor_map.clone();
    Profunctor::build(
        &format!("({})^*", f.name),
        source,
        target,
        limits,
        1,
        move |bb, aa| b1.hom(bb, om[aa]).into_iter().map(|m| Elem::atom(&b1.mor_ids[m])).collect(),
        move |g, _aa, e| match e {
            Elem::Atom(id) => {
                let u = b2.mor_index(id).unwrap();
                Elem::atom(&b2.mor_ids[b2.compose(u, g).unwrap()])
            }
            _ => unreachable!(),
        },
        move |ff, _bb, e| match e {
            Elem::Atom(id) => {
                let u = b3.mor_index(id).unwrap();
                Elem::atom(&b3.mor_ids[b3.compose(mm[ff], u).unwrap()])
            }
            _ => unreachable!(),
        },
    )
}

/// Contravariant embedding F_*: B ↛ A of F: A → B, fibers Hom_B(F a, b).
pub fn embed_contra_impl(f: &Functor, limits: &Limits) -> Result<Prof, ProfError> {
    embed_contra_pc(f, single(&f.target), single(&f.source), limits)
}

/// Contravariant embedding with explicit boundary product structure.
pub fn embed_contra_pc(
    f: &Functor,
    source: ProductCat,
    target: ProductCat,
    limits: &Limits,
) -> Result<Prof, ProfError> {
    assert_eq!(source.cat, f.target, "embedding source mismatch");
    assert_eq!(target.cat, f.source, "embedding target mismatch");
    let b = f.target.clone();
    let (b1, b2, b3) = (b.clone(), b.clone(), b.clone());
    let om = f.obj_map.clone();
    let mm = f.mor_map.clone();
    Profunctor::build(
        &format!("({})_*", f.name),
        source,
        target,
        limits,
        1,
        move |aa, bb| b1.hom(om[aa], bb).into_iter().map(|m| Elem::atom(&b1.mor_ids[m])).collect(),
        move |h, _bb, e| match e {
            // h: a' → a in A: precompose F h
            Elem::Atom(id) => {
                let u = b2.mor_index(id).unwrap();
                Elem::atom(&b2.mor_ids[b2.compose(u, mm[h]).unwrap()])
            }
            _ => unreachable!(),
        },
        move |k, _aa, e| match e {
            // k: b → b' in B: postcompose
            Elem::Atom(id) => {
                let u = b3.mor_index(id).unwrap();
                Elem::atom(&b3.mor_ids[b3.compose(k, u).unwrap()])
            }
            _ => unreachable!(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{walking_arrow, FinCategory};

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn hom_of_terminal_is_singleton() {
        let p = hom_profunctor(&FinCategory::terminal(), &limits()).unwrap();
        assert_eq!(p.total_elements(), 1);
        p.validate().unwrap();
    }

    #[test]
    fn hom_sizes_of_walking_arrow() {
        let p = hom_profunctor(&walking_arrow(), &limits()).unwrap();
        assert_eq!(p.fiber(0, 0).len(), 1);
        assert_eq!(p.fiber(0, 1).len(), 1);
        assert_eq!(p.fiber(1, 0).len(), 0);
        assert_eq!(p.fiber(1, 1).len(), 1);
        p.validate().unwrap();
    }

    #[test]
    fn tensor_sizes_multiply() {
        let two = walking_arrow();
        let h = hom_profunctor(&two, &limits()).unwrap();
        let t = tensor_prof(&h, &h, &limits()).unwrap();
        assert_eq!(t.total_elements(), h.total_elements() * h.total_elements());
        t.validate().unwrap();
    }

    #[test]
    fn cup_cap_of_terminal_are_singletons() {
        let one = FinCategory::terminal();
        let cu = cup(&one, &limits()).unwrap();
        let ca = cap(&one, &limits()).unwrap();
        assert_eq!(cu.total_elements(), 1);
        assert_eq!(ca.total_elements(), 1);
        cu.validate().unwrap();
        ca.validate().unwrap();
    }

    #[test]
    fn cup_cap_validate_on_arrow() {
        let two = walking_arrow();
        cup(&two, &limits()).unwrap().validate().unwrap();
        cap(&two, &limits()).unwrap().validate().unwrap();
        let w = word_cat(vec![two.clone(), two.opposite()], &limits()).unwrap();
        sym_w(&single(&two), &single(&two), &limits()).unwrap().validate().unwrap();
        cup_w(&w, &limits()).unwrap().validate().unwrap();
    }

    #[test]
    fn rotation_is_involutive_on_tables() {
        let two = walking_arrow();
        let h = hom_profunctor(&two, &limits()).unwrap();
        let r = rot_r(&h, &limits()).unwrap();
        r.validate().unwrap();
        let rr = rot_r(&r, &limits()).unwrap();
        assert_eq!(*rr, *h);
    }
}
