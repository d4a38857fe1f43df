//! Finite categories as explicit composition tables, with the Karoubi
//! envelope and idempotent-splitting checks.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::limits::Limits;

#[derive(Debug, thiserror::Error)]
pub enum CatError {
    #[error("dangling id `{0}` referenced by {1}")]
    DanglingId(String, String),
    #[error("composition undefined for composable pair g=`{g}`, f=`{f}`")]
    CompositionUndefined { g: String, f: String },
    #[error("composition listed for non-composable pair g=`{g}`, f=`{f}`")]
    CompositionIllTyped { g: String, f: String },
    #[error("composite of g=`{g}`, f=`{f}` has wrong boundary: got `{got}`")]
    CompositionBoundary { g: String, f: String, got: String },
    #[error("associativity fails on f=`{f}`, g=`{g}`, h=`{h}`: h(gf) = `{left}` but (hg)f = `{right}`")]
    AssociativityFail {
        f: String,
        g: String,
        h: String,
        left: String,
        right: String,
    },
    #[error("identity law fails at morphism `{f}`: composite with `{id}` gives `{got}`")]
    IdentityFail { f: String, id: String, got: String },
    #[error("object `{0}` has no identity assigned")]
    MissingIdentity(String),
    #[error("identity `{id}` of `{obj}` is not an endomorphism of `{obj}`")]
    IdentityBoundary { obj: String, id: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("size guard: {0} morphisms exceeds cap {1}")]
    SizeGuard(usize, usize),
    #[error("functor does not preserve {what}: {detail}")]
    FunctorLaw { what: String, detail: String },
    #[error("naturality fails at morphism `{0}`")]
    NaturalityFail(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A finite category: objects, morphisms and a total composition table for
/// the composable pairs. Identifiers are opaque strings; all structure is by
/// index internally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    pub name: String,
    pub objects: Vec<String>,
    pub mor_ids: Vec<String>,
    pub mor_src: Vec<usize>,
    pub mor_tgt: Vec<usize>,
    pub identity: Vec<usize>,
    /// compose[g * n + f] = g∘f (f acts first); None iff tgt(f) != src(g).
    compose: Vec<Option<u32>>,
    obj_index: HashMap<String, usize>,
    mor_index: HashMap<String, usize>,
}

impl fmt::Display for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} objects, {} morphisms)",
            self.name,
            self.objects.len(),
            self.mor_ids.len()
        )
    }
}

impl FinCategory {
    pub fn n_obj(&self) -> usize {
        self.objects.len()
    }

    pub fn n_mor(&self) -> usize {
        self.mor_ids.len()
    }

    pub fn obj_index(&self, id: &str) -> Option<usize> {
        self.obj_index.get(id).copied()
    }

    pub fn mor_index(&self, id: &str) -> Option<usize> {
        self.mor_index.get(id).copied()
    }

    pub fn src(&self, f: usize) -> usize {
        self.mor_src[f]
    }

    pub fn tgt(&self, f: usize) -> usize {
        self.mor_tgt[f]
    }

    pub fn id_of(&self, obj: usize) -> usize {
        self.identity[obj]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identity[self.mor_src[f]] == f && self.mor_src[f] == self.mor_tgt[f]
    }

    /// g∘f when tgt(f) = src(g).
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose[g * self.n_mor() + f].map(|x| x as usize)
    }

    /// Composes a chain of morphisms listed target-side first: `[h, g, f]`
    /// evaluates to h∘g∘f.
    pub fn compose_chain(&self, chain: &[usize]) -> Option<usize> {
        let mut it = chain.iter().rev();
        let mut acc = *it.next()?;
        for &g in it {
            acc = self.compose(g, acc)?;
        }
        Some(acc)
    }

    /// Morphisms from `b` to `a`, in index order.
    pub fn hom(&self, b: usize, a: usize) -> Vec<usize> {
        (0..self.n_mor())
            .filter(|&f| self.mor_src[f] == b && self.mor_tgt[f] == a)
            .collect()
    }

    fn rebuild_indexes(&mut self) {
        self.obj_index = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        self.mor_index = self
            .mor_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
    }

    /// Assembles a category from tables and runs the full law scan.
    pub fn new(
        name: &str,
        objects: Vec<String>,
        morphisms: Vec<(String, String, String)>,
        identities: BTreeMap<String, String>,
        composition: Vec<(String, String, String)>,
    ) -> Result<Arc<FinCategory>, CatError> {
        let mut cat = FinCategory {
            name: name.to_string(),
            objects,
            mor_ids: Vec::new(),
            mor_src: Vec::new(),
            mor_tgt: Vec::new(),
            identity: Vec::new(),
            compose: Vec::new(),
            obj_index: HashMap::new(),
            mor_index: HashMap::new(),
        };
        for (i, o) in cat.objects.iter().enumerate() {
            if cat.obj_index.insert(o.clone(), i).is_some() {
                return Err(CatError::DuplicateId(o.clone()));
            }
        }
        for (id, src, tgt) in morphisms {
            let s = *cat
                .obj_index
                .get(&src)
                .ok_or_else(|| CatError::DanglingId(src.clone(), format!("morphism `{id}`")))?;
            let t = *cat
                .obj_index
                .get(&tgt)
                .ok_or_else(|| CatError::DanglingId(tgt.clone(), format!("morphism `{id}`")))?;
            if cat.mor_index.insert(id.clone(), cat.mor_ids.len()).is_some() {
                return Err(CatError::DuplicateId(id));
            }
            cat.mor_ids.push(id);
            cat.mor_src.push(s);
            cat.mor_tgt.push(t);
        }
        let n = cat.n_mor();
        cat.identity = vec![usize::MAX; cat.n_obj()];
        for (obj, mor) in identities {
            let o = *cat
                .obj_index
                .get(&obj)
                .ok_or_else(|| CatError::DanglingId(obj.clone(), "identities".into()))?;
            let m = *cat
                .mor_index
                .get(&mor)
                .ok_or_else(|| CatError::DanglingId(mor.clone(), "identities".into()))?;
            if cat.mor_src[m] != o || cat.mor_tgt[m] != o {
                return Err(CatError::IdentityBoundary { obj, id: mor });
            }
            cat.identity[o] = m;
        }
        for (o, &i) in cat.objects.iter().zip(cat.identity.iter()) {
            if i == usize::MAX {
                return Err(CatError::MissingIdentity(o.clone()));
            }
        }
        cat.compose = vec![None; n * n];
        for (g, f, gf) in composition {
            let gi = *cat
                .mor_index
                .get(&g)
                .ok_or_else(|| CatError::DanglingId(g.clone(), "composition".into()))?;
            let fi = *cat
                .mor_index
                .get(&f)
                .ok_or_else(|| CatError::DanglingId(f.clone(), "composition".into()))?;
            let gfi = *cat
                .mor_index
                .get(&gf)
                .ok_or_else(|| CatError::DanglingId(gf.clone(), "composition".into()))?;
            if cat.mor_tgt[fi] != cat.mor_src[gi] {
                return Err(CatError::CompositionIllTyped { g, f });
            }
            cat.compose[gi * n + fi] = Some(gfi as u32);
        }
        cat.check_laws()?;
        Ok(Arc::new(cat))
    }

    /// Builds a category from closures; used by the derived constructions
    /// (products, opposites, envelopes) which are total by construction.
    pub fn from_tables(
        name: &str,
        objects: Vec<String>,
        morphisms: Vec<(String, usize, usize)>,
        identity: Vec<usize>,
        mut compose_fn: impl FnMut(usize, usize) -> usize,
    ) -> Arc<FinCategory> {
        let n = morphisms.len();
        let mut cat = FinCategory {
            name: name.to_string(),
            objects,
            mor_ids: morphisms.iter().map(|m| m.0.clone()).collect(),
            mor_src: morphisms.iter().map(|m| m.1).collect(),
            mor_tgt: morphisms.iter().map(|m| m.2).collect(),
            identity,
            compose: vec![None; n * n],
            obj_index: HashMap::new(),
            mor_index: HashMap::new(),
        };
        for g in 0..n {
            for f in 0..n {
                if cat.mor_tgt[f] == cat.mor_src[g] {
                    cat.compose[g * n + f] = Some(compose_fn(g, f) as u32);
                }
            }
        }
        cat.rebuild_indexes();
        Arc::new(cat)
    }

    /// Exhaustive scan of the category laws: totality and boundaries of
    /// composition, both identity laws, associativity on all triples.
    pub fn check_laws(&self) -> Result<(), CatError> {
        let n = self.n_mor();
        for g in 0..n {
            for f in 0..n {
                match (self.mor_tgt[f] == self.mor_src[g], self.compose(g, f)) {
                    (true, None) => {
                        return Err(CatError::CompositionUndefined {
                            g: self.mor_ids[g].clone(),
                            f: self.mor_ids[f].clone(),
                        })
                    }
                    (false, Some(_)) => {
                        return Err(CatError::CompositionIllTyped {
                            g: self.mor_ids[g].clone(),
                            f: self.mor_ids[f].clone(),
                        })
                    }
                    (true, Some(gf)) => {
                        if self.mor_src[gf] != self.mor_src[f] || self.mor_tgt[gf] != self.mor_tgt[g]
                        {
                            return Err(CatError::CompositionBoundary {
                                g: self.mor_ids[g].clone(),
                                f: self.mor_ids[f].clone(),
                                got: self.mor_ids[gf].clone(),
                            });
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for f in 0..n {
            let idt = self.identity[self.mor_tgt[f]];
            let ids = self.identity[self.mor_src[f]];
            let left = self.compose(idt, f).unwrap();
            if left != f {
                return Err(CatError::IdentityFail {
                    f: self.mor_ids[f].clone(),
                    id: self.mor_ids[idt].clone(),
                    got: self.mor_ids[left].clone(),
                });
            }
            let right = self.compose(f, ids).unwrap();
            if right != f {
                return Err(CatError::IdentityFail {
                    f: self.mor_ids[f].clone(),
                    id: self.mor_ids[ids].clone(),
                    got: self.mor_ids[right].clone(),
                });
            }
        }
        for h in 0..n {
            for g in 0..n {
                if self.mor_tgt[g] != self.mor_src[h] {
                    continue;
                }
                let hg = self.compose(h, g).unwrap();
                for f in 0..n {
                    if self.mor_tgt[f] != self.mor_src[g] {
                        continue;
                    }
                    let gf = self.compose(g, f).unwrap();
                    let left = self.compose(h, gf).unwrap();
                    let right = self.compose(hg, f).unwrap();
                    if left != right {
                        return Err(CatError::AssociativityFail {
                            f: self.mor_ids[f].clone(),
                            g: self.mor_ids[g].clone(),
                            h: self.mor_ids[h].clone(),
                            left: self.mor_ids[left].clone(),
                            right: self.mor_ids[right].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The opposite category. Ids are kept, so this is an involution on the
    /// nose; the name toggles an `^op` suffix.
    pub fn opposite(self: &Arc<Self>) -> Arc<FinCategory> {
        let name = match self.name.strip_suffix("^op") {
            Some(base) => base.to_string(),
            None => format!("{}^op", self.name),
        };
        let n = self.n_mor();
        let mut cat = FinCategory {
            name,
            objects: self.objects.clone(),
            mor_ids: self.mor_ids.clone(),
            mor_src: self.mor_tgt.clone(),
            mor_tgt: self.mor_src.clone(),
            identity: self.identity.clone(),
            compose: vec![None; n * n],
            obj_index: HashMap::new(),
            mor_index: HashMap::new(),
        };
        for g in 0..n {
            for f in 0..n {
                cat.compose[g * n + f] = self.compose[f * n + g];
            }
        }
        cat.rebuild_indexes();
        Arc::new(cat)
    }

    pub fn terminal() -> Arc<FinCategory> {
        FinCategory::from_tables(
            "1",
            vec!["*".into()],
            vec![("id_*".into(), 0, 0)],
            vec![0],
            |_, _| 0,
        )
    }
}

/// An n-ary product of categories with mixed-radix index bookkeeping.
/// The empty product is the terminal category.
#[derive(Debug, Clone)]
pub struct ProductCat {
    pub factors: Vec<Arc<FinCategory>>,
    pub cat: Arc<FinCategory>,
}

fn tuple_id(parts: &[&str]) -> String {
    format!("({})", parts.join(","))
}

impl ProductCat {
    pub fn new(factors: Vec<Arc<FinCategory>>, limits: &Limits) -> Result<ProductCat, CatError> {
        if factors.is_empty() {
            return Ok(ProductCat {
                factors,
                cat: FinCategory::terminal(),
            });
        }
        if factors.len() == 1 {
            let cat = factors[0].clone();
            return Ok(ProductCat { factors, cat });
        }
        let n_mor: usize = factors.iter().map(|c| c.n_mor()).product();
        if n_mor > limits.max_elements {
            return Err(CatError::SizeGuard(n_mor, limits.max_elements));
        }
        let k = factors.len();
        let n_obj: usize = factors.iter().map(|c| c.n_obj()).product();
        let mut objects = Vec::with_capacity(n_obj);
        for idx in 0..n_obj {
            let multi = Self::decode(idx, factors.iter().map(|c| c.n_obj()));
            let parts: Vec<&str> = (0..k).map(|i| factors[i].objects[multi[i]].as_str()).collect();
            objects.push(tuple_id(&parts));
        }
        let mut morphisms = Vec::with_capacity(n_mor);
        for idx in 0..n_mor {
            let multi = Self::decode(idx, factors.iter().map(|c| c.n_mor()));
            let parts: Vec<&str> = (0..k).map(|i| factors[i].mor_ids[multi[i]].as_str()).collect();
            let src = Self::encode(
                (0..k).map(|i| factors[i].mor_src[multi[i]]),
                factors.iter().map(|c| c.n_obj()),
            );
            let tgt = Self::encode(
                (0..k).map(|i| factors[i].mor_tgt[multi[i]]),
                factors.iter().map(|c| c.n_obj()),
            );
            morphisms.push((tuple_id(&parts), src, tgt));
        }
        let identity: Vec<usize> = (0..n_obj)
            .map(|o| {
                let multi = Self::decode(o, factors.iter().map(|c| c.n_obj()));
                Self::encode(
                    (0..k).map(|i| factors[i].identity[multi[i]]),
                    factors.iter().map(|c| c.n_mor()),
                )
            })
            .collect();
        let name = format!(
            "({})",
            factors.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join("×")
        );
        let fs = factors.clone();
        let cat = FinCategory::from_tables(&name, objects, morphisms, identity, |g, f| {
            let gm = Self::decode(g, fs.iter().map(|c| c.n_mor()));
            let fm = Self::decode(f, fs.iter().map(|c| c.n_mor()));
            Self::encode(
                (0..k).map(|i| fs[i].compose(gm[i], fm[i]).expect("componentwise composable")),
                fs.iter().map(|c| c.n_mor()),
            )
        });
        Ok(ProductCat { factors, cat })
    }

    fn decode(mut idx: usize, radices: impl DoubleEndedIterator<Item = usize>) -> Vec<usize> {
        let rs: Vec<usize> = radices.collect();
        let mut out = vec![0; rs.len()];
        for i in (0..rs.len()).rev() {
            out[i] = idx % rs[i];
            idx /= rs[i];
        }
        out
    }

    fn encode(
        multi: impl Iterator<Item = usize>,
        radices: impl Iterator<Item = usize>,
    ) -> usize {
        multi.zip(radices).fold(0, |acc, (m, r)| acc * r + m)
    }

    pub fn obj_multi(&self, idx: usize) -> Vec<usize> {
        if self.factors.len() == 1 {
            return vec![idx];
        }
        Self::decode(idx, self.factors.iter().map(|c| c.n_obj()))
    }

    pub fn obj_of(&self, multi: &[usize]) -> usize {
        if self.factors.len() == 1 {
            return multi[0];
        }
        Self::encode(multi.iter().copied(), self.factors.iter().map(|c| c.n_obj()))
    }

    pub fn mor_multi(&self, idx: usize) -> Vec<usize> {
        if self.factors.len() == 1 {
            return vec![idx];
        }
        Self::decode(idx, self.factors.iter().map(|c| c.n_mor()))
    }

    pub fn mor_of(&self, multi: &[usize]) -> usize {
        if self.factors.len() == 1 {
            return multi[0];
        }
        Self::encode(multi.iter().copied(), self.factors.iter().map(|c| c.n_mor()))
    }
}

/// Binary product, kept for the public operation surface.
pub fn product(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    limits: &Limits,
) -> Result<Arc<FinCategory>, CatError> {
    Ok(ProductCat::new(vec![a.clone(), b.clone()], limits)?.cat)
}

/// A functor between finite categories, given by its object and morphism
/// tables. `validate` checks preservation of boundaries, identities and all
/// composites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functor {
    pub name: String,
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub obj_map: Vec<usize>,
    pub mor_map: Vec<usize>,
}

impl Functor {
    pub fn identity(c: &Arc<FinCategory>) -> Functor {
        Functor {
            name: format!("Id_{}", c.name),
            source: c.clone(),
            target: c.clone(),
            obj_map: (0..c.n_obj()).collect(),
            mor_map: (0..c.n_mor()).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), CatError> {
        let (s, t) = (&self.source, &self.target);
        for f in 0..s.n_mor() {
            let ff = self.mor_map[f];
            if t.mor_src[ff] != self.obj_map[s.mor_src[f]] || t.mor_tgt[ff] != self.obj_map[s.mor_tgt[f]]
            {
                return Err(CatError::FunctorLaw {
                    what: "boundaries".into(),
                    detail: format!("morphism `{}`", s.mor_ids[f]),
                });
            }
        }
        for o in 0..s.n_obj() {
            if self.mor_map[s.identity[o]] != t.identity[self.obj_map[o]] {
                return Err(CatError::FunctorLaw {
                    what: "identities".into(),
                    detail: format!("object `{}`", s.objects[o]),
                });
            }
        }
        for g in 0..s.n_mor() {
            for f in 0..s.n_mor() {
                if let Some(gf) = s.compose(g, f) {
                    let lhs = self.mor_map[gf];
                    let rhs = t
                        .compose(self.mor_map[g], self.mor_map[f])
                        .ok_or_else(|| CatError::FunctorLaw {
                            what: "composites".into(),
                            detail: format!("pair (`{}`,`{}`)", s.mor_ids[g], s.mor_ids[f]),
                        })?;
                    if lhs != rhs {
                        return Err(CatError::FunctorLaw {
                            what: "composites".into(),
                            detail: format!("pair (`{}`,`{}`)", s.mor_ids[g], s.mor_ids[f]),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn compose(g: &Functor, f: &Functor) -> Functor {
        assert_eq!(f.target, g.source, "functor composition boundary");
        Functor {
            name: format!("{}∘{}", g.name, f.name),
            source: f.source.clone(),
            target: g.target.clone(),
            obj_map: f.obj_map.iter().map(|&o| g.obj_map[o]).collect(),
            mor_map: f.mor_map.iter().map(|&m| g.mor_map[m]).collect(),
        }
    }

    /// Every functor between two finite categories, in deterministic order.
    /// Enumerates object maps first, then extends morphism-wise with early
    /// pruning on boundaries and law checks at the end.
    pub fn enumerate(s: &Arc<FinCategory>, t: &Arc<FinCategory>) -> Vec<Functor> {
        let mut out = Vec::new();
        let n_obj = s.n_obj();
        let mut obj_map = vec![0usize; n_obj];
        loop {
            let mut mor_map = vec![0usize; s.n_mor()];
            let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(s.n_mor());
            let mut feasible = true;
            for f in 0..s.n_mor() {
                let cands = t.hom(obj_map[s.mor_src[f]], obj_map[s.mor_tgt[f]]);
                if cands.is_empty() {
                    feasible = false;
                    break;
                }
                candidates.push(cands);
            }
            if feasible {
                let mut stack = vec![0usize];
                while let Some(&top) = stack.last() {
                    let depth = stack.len() - 1;
                    if top >= candidates[depth].len() {
                        stack.pop();
                        if let Some(last) = stack.last_mut() {
                            *last += 1;
                        } else {
                            break;
                        }
                        continue;
                    }
                    mor_map[depth] = candidates[depth][top];
                    if depth + 1 == s.n_mor() {
                        let f = Functor {
                            name: format!("F{}", out.len()),
                            source: s.clone(),
                            target: t.clone(),
                            obj_map: obj_map.clone(),
                            mor_map: mor_map.clone(),
                        };
                        if f.validate().is_ok() {
                            out.push(f);
                        }
                        *stack.last_mut().unwrap() += 1;
                    } else {
                        stack.push(0);
                    }
                }
            }
            // next object map (mixed radix increment)
            let mut i = n_obj;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                obj_map[i] += 1;
                if obj_map[i] < t.n_obj() {
                    break;
                }
                obj_map[i] = 0;
            }
        }
    }
}

/// Natural transformation between parallel functors, one component per object.
#[derive(Debug, Clone)]
pub struct FunctorNatTrans {
    pub source: Functor,
    pub target: Functor,
    pub components: Vec<usize>,
}

impl FunctorNatTrans {
    pub fn validate(&self) -> Result<(), CatError> {
        let s = &self.source.source;
        let t = &self.source.target;
        for (o, &c) in self.components.iter().enumerate() {
            if t.mor_src[c] != self.source.obj_map[o] || t.mor_tgt[c] != self.target.obj_map[o] {
                return Err(CatError::NaturalityFail(format!(
                    "component at `{}` has wrong boundary",
                    s.objects[o]
                )));
            }
        }
        for f in 0..s.n_mor() {
            let lhs = t
                .compose(self.components[s.mor_tgt[f]], self.source.mor_map[f])
                .unwrap();
            let rhs = t
                .compose(self.target.mor_map[f], self.components[s.mor_src[f]])
                .unwrap();
            if lhs != rhs {
                return Err(CatError::NaturalityFail(s.mor_ids[f].clone()));
            }
        }
        Ok(())
    }
}

/// Idempotents of `c`, as morphism indices.
pub fn idempotents(c: &FinCategory) -> Vec<usize> {
    (0..c.n_mor())
        .filter(|&e| c.mor_src[e] == c.mor_tgt[e] && c.compose(e, e) == Some(e))
        .collect()
}

/// Karoubi envelope: objects are idempotents, hom((A,e),(B,e')) is the set of
/// f: A→B with e'∘f∘e = f, identity of (A,e) is e itself. Returns the
/// envelope and the canonical embedding A ↦ (A, id_A).
pub fn karoubi_envelope(c: &Arc<FinCategory>) -> (Arc<FinCategory>, Functor) {
    let idems = idempotents(c);
    let objects: Vec<String> = idems
        .iter()
        .map(|&e| format!("({}|{})", c.objects[c.mor_src[e]], c.mor_ids[e]))
        .collect();
    // morphisms: (i, j, f) with e_j ∘ f ∘ e_i = f
    let mut morphisms = Vec::new();
    let mut mor_table: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for (i, &ei) in idems.iter().enumerate() {
        for (j, &ej) in idems.iter().enumerate() {
            for f in c.hom(c.mor_src[ei], c.mor_src[ej]) {
                let fei = c.compose(f, ei).unwrap();
                let ejfei = c.compose(ej, fei).unwrap();
                if ejfei == f {
                    mor_table.insert((i, j, f), morphisms.len());
                    morphisms.push((format!("{}[{}→{}]", c.mor_ids[f], i, j), i, j));
                }
            }
        }
    }
    let mor_data: Vec<(usize, usize, usize)> = {
        let mut v = vec![(0usize, 0usize, 0usize); morphisms.len()];
        for (&(i, j, f), &idx) in &mor_table {
            v[idx] = (i, j, f);
        }
        v
    };
    let identity: Vec<usize> = idems
        .iter()
        .enumerate()
        .map(|(i, &e)| mor_table[&(i, i, e)])
        .collect();
    let c2 = c.clone();
    let mor_data2 = mor_data.clone();
    let env = FinCategory::from_tables(
        &format!("Kar({})", c.name),
        objects,
        morphisms,
        identity,
        move |g, f| {
            let (i, _jf, fm) = mor_data2[f];
            let (_jg, k, gm) = mor_data2[g];
            let gf = c2.compose(gm, fm).expect("karoubi composable");
            mor_table[&(i, k, gf)]
        },
    );
    let idem_index: HashMap<usize, usize> = idems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let obj_map: Vec<usize> = (0..c.n_obj()).map(|o| idem_index[&c.identity[o]]).collect();
    let mor_map: Vec<usize> = (0..c.n_mor())
        .map(|f| {
            let i = obj_map[c.mor_src[f]];
            let j = obj_map[c.mor_tgt[f]];
            let mut found = None;
            for (idx, &(ii, jj, ff)) in mor_data.iter().enumerate() {
                if ii == i && jj == j && ff == f {
                    found = Some(idx);
                    break;
                }
            }
            found.expect("embedding morphism present")
        })
        .collect();
    let embed = Functor {
        name: format!("η_{}", c.name),
        source: c.clone(),
        target: env.clone(),
        obj_map,
        mor_map,
    };
    (env, embed)
}

/// True iff every idempotent splits; on failure returns the first
/// non-splitting idempotent id as witness.
pub fn is_cauchy_complete(c: &FinCategory) -> Result<(), String> {
    'outer: for e in idempotents(c) {
        let a = c.mor_src[e];
        for b in 0..c.n_obj() {
            for r in c.hom(a, b) {
                for s in c.hom(b, a) {
                    if c.compose(s, r) == Some(e) && c.compose(r, s) == Some(c.identity[b]) {
                        continue 'outer;
                    }
                }
            }
        }
        return Err(c.mor_ids[e].clone());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON interchange

#[derive(Debug, Serialize, Deserialize)]
pub struct CategorySpec {
    pub name: Option<String>,
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismSpec>,
    pub identities: BTreeMap<String, String>,
    pub composition: Vec<(String, String, String)>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MorphismSpec {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Validates a raw category document into a checked `FinCategory`.
pub fn validate_category(spec: CategorySpec, limits: &Limits) -> Result<Arc<FinCategory>, CatError> {
    if spec.morphisms.len() > limits.max_morphisms {
        return Err(CatError::SizeGuard(spec.morphisms.len(), limits.max_morphisms));
    }
    FinCategory::new(
        spec.name.as_deref().unwrap_or("C"),
        spec.objects,
        spec.morphisms.into_iter().map(|m| (m.id, m.src, m.tgt)).collect(),
        spec.identities,
        spec.composition,
    )
}

pub fn category_to_spec(c: &FinCategory) -> CategorySpec {
    let mut composition = Vec::new();
    for g in 0..c.n_mor() {
        for f in 0..c.n_mor() {
            if let Some(gf) = c.compose(g, f) {
                composition.push((c.mor_ids[g].clone(), c.mor_ids[f].clone(), c.mor_ids[gf].clone()));
            }
        }
    }
    CategorySpec {
        name: Some(c.name.clone()),
        objects: c.objects.clone(),
        morphisms: (0..c.n_mor())
            .map(|f| MorphismSpec {
                id: c.mor_ids[f].clone(),
                src: c.objects[c.mor_src[f]].clone(),
                tgt: c.objects[c.mor_tgt[f]].clone(),
            })
            .collect(),
        identities: (0..c.n_obj())
            .map(|o| (c.objects[o].clone(), c.mor_ids[c.identity[o]].clone()))
            .collect(),
        composition,
    }
}

// ---------------------------------------------------------------------------
// Stock small categories used throughout the tests and the model zoo.

/// The walking arrow 0 → 1.
pub fn walking_arrow() -> Arc<FinCategory> {
    FinCategory::from_tables(
        "2",
        vec!["0".into(), "1".into()],
        vec![("id_0".into(), 0, 0), ("id_1".into(), 1, 1), ("a".into(), 0, 1)],
        vec![0, 1],
        |g, f| if g == 2 || f == 2 { 2 } else { g },
    )
}

/// The chain 0 → 1 → 2 (poset category).
pub fn chain3() -> Arc<FinCategory> {
    let le: Vec<(usize, usize)> = vec![(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];
    let le2 = le.clone();
    FinCategory::from_tables(
        "3chain",
        vec!["0".into(), "1".into(), "2".into()],
        le.iter().map(|&(s, t)| (format!("le_{s}{t}"), s, t)).collect(),
        vec![0, 1, 2],
        move |g, f| {
            let (s, _) = le2[f];
            let (_, t) = le2[g];
            le2.iter().position(|&(a, b)| a == s && b == t).unwrap()
        },
    )
}

/// Discrete category on n objects.
pub fn discrete(n: usize, name: &str) -> Arc<FinCategory> {
    FinCategory::from_tables(
        name,
        (0..n).map(|i| i.to_string()).collect(),
        (0..n).map(|i| (format!("id_{i}"), i, i)).collect(),
        (0..n).collect(),
        |g, _| g,
    )
}

/// One-object category on the monoid {1, e} with e·e = e.
pub fn idem_monoid_cat() -> Arc<FinCategory> {
    FinCategory::from_tables(
        "M1e",
        vec!["*".into()],
        vec![("1".into(), 0, 0), ("e".into(), 0, 0)],
        vec![0],
        |g, f| if g == 1 || f == 1 { 1 } else { 0 },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn terminal_is_valid() {
        let c = FinCategory::terminal();
        c.check_laws().unwrap();
        assert_eq!(c.n_obj(), 1);
        assert_eq!(c.n_mor(), 1);
    }

    #[test]
    fn walking_arrow_is_valid() {
        let c = walking_arrow();
        c.check_laws().unwrap();
        assert_eq!(c.hom(0, 1).len(), 1);
        assert_eq!(c.hom(1, 0).len(), 0);
    }

    #[test]
    fn broken_tables_report_witness() {
        // {1, e} with e∘1 deliberately set to 1: the right identity law
        // breaks at e, with the offending composite as witness.
        let r = FinCategory::new(
            "bad",
            vec!["*".into()],
            vec![("1".into(), "*".into(), "*".into()), ("e".into(), "*".into(), "*".into())],
            [("*".to_string(), "1".to_string())].into_iter().collect(),
            vec![
                ("1".into(), "1".into(), "1".into()),
                ("1".into(), "e".into(), "e".into()),
                ("e".into(), "1".into(), "1".into()),
                ("e".into(), "e".into(), "e".into()),
            ],
        );
        match r {
            Err(CatError::AssociativityFail { .. }) | Err(CatError::IdentityFail { .. }) => {}
            other => panic!("expected a law failure with witness, got {other:?}"),
        }
    }

    #[test]
    fn opposite_is_involution() {
        for c in [walking_arrow(), chain3(), idem_monoid_cat()] {
            let op = c.opposite();
            op.check_laws().unwrap();
            assert_eq!(*c.opposite().opposite(), *c);
            assert_eq!(op.name, format!("{}^op", c.name));
        }
        let c = walking_arrow();
        let op = c.opposite();
        assert_eq!(op.hom(1, 0).len(), 1);
        assert_eq!(op.hom(0, 1).len(), 0);
    }

    #[test]
    fn product_counts() {
        let two = walking_arrow();
        let p = product(&two, &two, &limits()).unwrap();
        p.check_laws().unwrap();
        assert_eq!(p.n_obj(), 4);
        assert_eq!(p.n_mor(), 9); // 3 morphisms in each factor
        let one = FinCategory::terminal();
        let q = product(&one, &two, &limits()).unwrap();
        assert_eq!(q.n_obj(), 2);
        assert_eq!(q.n_mor(), 3);
    }

    #[test]
    fn karoubi_of_terminal() {
        let (env, embed) = karoubi_envelope(&FinCategory::terminal());
        env.check_laws().unwrap();
        embed.validate().unwrap();
        assert_eq!(env.n_obj(), 1);
    }

    #[test]
    fn karoubi_of_idem_monoid_has_two_objects() {
        let c = idem_monoid_cat();
        // oracle: idempotents of {1,e} are exactly {1, e}
        assert_eq!(idempotents(&c).len(), 2);
        let (env, embed) = karoubi_envelope(&c);
        env.check_laws().unwrap();
        embed.validate().unwrap();
        assert_eq!(env.n_obj(), 2);
        assert!(is_cauchy_complete(&env).is_ok());
    }

    #[test]
    fn cauchy_witness_for_unsplit_idempotent() {
        // oracle: in {1,e}, a splitting through * needs r,s ∈ {1,e} with
        // r∘s = 1; both choices force s∘r ∈ {1} ≠ e or fail r∘s = 1.
        let c = idem_monoid_cat();
        assert_eq!(is_cauchy_complete(&c), Err("e".to_string()));
    }

    #[test]
    fn karoubi_idempotent_up_to_splitting() {
        for c in [walking_arrow(), idem_monoid_cat(), chain3()] {
            let (env, _) = karoubi_envelope(&c);
            assert!(is_cauchy_complete(&env).is_ok());
            let (env2, _) = karoubi_envelope(&env);
            // splitting adds no new idempotent classes: object counts agree
            // up to the splittings already present
            assert_eq!(idempotents(&env).len(), env2.n_obj());
        }
    }

    #[test]
    fn functor_enumeration_terminal_to_arrow() {
        let fs = Functor::enumerate(&FinCategory::terminal(), &walking_arrow());
        assert_eq!(fs.len(), 2); // pick 0 or pick 1
    }

    #[test]
    fn json_roundtrip() {
        let c = walking_arrow();
        let spec = category_to_spec(&c);
        let s = serde_json::to_string(&spec).unwrap();
        let spec2: CategorySpec = serde_json::from_str(&s).unwrap();
        let c2 = validate_category(spec2, &limits()).unwrap();
        assert_eq!(*c, *c2);
    }
}
