//! JSON interchange for profunctors: explicit fibers and action tables over
//! named categories.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::{Elem, Prof, ProfError, Profunctor};
use crate::fincat::{category_to_spec, validate_category, CategorySpec, ProductCat};
use crate::limits::Limits;

#[derive(Debug, Serialize, Deserialize)]
pub struct ProfunctorSpec {
    pub source: CategorySpec,
    pub target: CategorySpec,
    /// fiber key "b|a" → element ids (order defines positions)
    pub elements: BTreeMap<String, Vec<String>>,
    /// left action key "g|a" → image ids per fiber position
    pub left: BTreeMap<String, Vec<String>>,
    /// right action key "f|b" → image ids per fiber position
    pub right: BTreeMap<String, Vec<String>>,
}

pub fn profunctor_to_spec(p: &Prof) -> ProfunctorSpec {
    let (s, t) = (p.src_cat(), p.tgt_cat());
    let mut elements = BTreeMap::new();
    for b in 0..t.n_obj() {
        for a in 0..s.n_obj() {
            let fib = p.fiber(b, a);
            if !fib.is_empty() {
                elements.insert(
                    format!("{}|{}", t.objects[b], s.objects[a]),
                    fib.iter().map(|e| e.to_string()).collect(),
                );
            }
        }
    }
    let mut left = BTreeMap::new();
    for g in 0..t.n_mor() {
        for a in 0..s.n_obj() {
            let bt = t.tgt(g);
            let bs = t.src(g);
            if p.fiber(bt, a).is_empty() {
                continue;
            }
            let map = (0..p.fiber(bt, a).len() as u32)
                .map(|pos| p.fiber(bs, a)[p.act_left(g, a, pos) as usize].to_string())
                .collect();
            left.insert(format!("{}|{}", t.mor_ids[g], s.objects[a]), map);
        }
    }
    let mut right = BTreeMap::new();
    for f in 0..s.n_mor() {
        for b in 0..t.n_obj() {
            let asrc = s.src(f);
            if p.fiber(b, asrc).is_empty() {
                continue;
            }
            let map = (0..p.fiber(b, asrc).len() as u32)
                .map(|pos| p.fiber(b, s.tgt(f))[p.act_right(f, b, pos) as usize].to_string())
                .collect();
            right.insert(format!("{}|{}", s.mor_ids[f], t.objects[b]), map);
        }
    }
    ProfunctorSpec {
        source: category_to_spec(s),
        target: category_to_spec(t),
        elements,
        left,
        right,
    }
}

/// Validates a profunctor document: fibers, total actions, bimodule laws.
pub fn profunctor_from_spec(spec: ProfunctorSpec, limits: &Limits) -> Result<Prof, ProfError> {
    let s = validate_category(spec.source, limits)?;
    let t = validate_category(spec.target, limits)?;
    let src = ProductCat {
        factors: vec![s.clone()],
        cat: s.clone(),
    };
    let tgt = ProductCat {
        factors: vec![t.clone()],
        cat: t.clone(),
    };
    let fiber_of = |b: usize, a: usize| -> Vec<Elem> {
        spec.elements
            .get(&format!("{}|{}", t.objects[b], s.objects[a]))
            .map(|v| v.iter().map(Elem::atom).collect())
            .unwrap_or_default()
    };
    let look = |m: &BTreeMap<String, Vec<String>>,
                key: String,
                fiber: &[Elem],
                e: &Elem|
     -> Result<Elem, ProfError> {
        let map = m
            .get(&key)
            .ok_or_else(|| ProfError::TypeMismatch(format!("missing action `{key}`")))?;
        let pos = fiber
            .iter()
            .position(|x| x == e)
            .ok_or_else(|| ProfError::TypeMismatch(format!("element `{e}` missing from fiber")))?;
        Ok(Elem::atom(map.get(pos).ok_or_else(|| {
            ProfError::TypeMismatch(format!("action `{key}` too short"))
        })?))
    };
    let (t2, s2) = (t.clone(), s.clone());
    let (t3, s3) = (t.clone(), s.clone());
    let (lm, rm) = (spec.left.clone(), spec.right.clone());
    let fib2 = fiber_of;
    let p = Profunctor::build(
        "loaded",
        src,
        tgt,
        limits,
        1,
        fiber_of,
        move |g, a, e| {
            let bt = t2.tgt(g);
            look(
                &lm,
                format!("{}|{}", t2.mor_ids[g], s2.objects[a]),
                &fib2(bt, a),
                e,
            )
            .unwrap_or_else(|_| e.clone())
        },
        move |f, b, e| {
            let asrc = s3.src(f);
            look(
                &rm,
                format!("{}|{}", s3.mor_ids[f], t3.objects[b]),
                &fib2(b, asrc),
                e,
            )
            .unwrap_or_else(|_| e.clone())
        },
    )?;
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::walking_arrow;
    use crate::prof::hom_profunctor;

    #[test]
    fn profunctor_json_roundtrip() {
        let limits = Limits::default();
        let h = hom_profunctor(&walking_arrow(), &limits).unwrap();
        let spec = profunctor_to_spec(&h);
        let text = serde_json::to_string(&spec).unwrap();
        let back: ProfunctorSpec = serde_json::from_str(&text).unwrap();
        let h2 = profunctor_from_spec(back, &limits).unwrap();
        assert_eq!(*h, *h2);
    }
}
