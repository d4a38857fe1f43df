//! The model zoo and the JSON interchange format for models.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{DualData, ModelError, MonoidalModel, StarData, TraceFamily};
use crate::fincat::{self, CategorySpec, FinCategory};
use crate::limits::Limits;

/// Builds the unique tensor action on morphisms of a poset category from a
/// monotone object operation.
fn poset_tensor_mor(base: &Arc<FinCategory>, tobj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = base.n_mor();
    let mut out = vec![vec![0; n]; n];
    for f in 0..n {
        for g in 0..n {
            let s = tobj[base.src(f)][base.src(g)];
            let t = tobj[base.tgt(f)][base.tgt(g)];
            out[f][g] = *base
                .hom(s, t)
                .first()
                .expect("monotone tensor has a unique morphism action");
        }
    }
    out
}

/// Discrete abelian-group model Z/n: objects are residues, the tensor is
/// addition, duals are inverses, braiding and twist are trivial.
pub fn zmod(n: usize) -> MonoidalModel {
    let base = fincat::discrete(n, &format!("Z{n}"));
    let tobj: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let tmor = tobj.clone();
    let mut m = MonoidalModel::strict(&format!("Zmod({n})"), base.clone(), tobj.clone(), tmor, 0);
    m.braiding = Some(
        (0..n)
            .map(|a| (0..n).map(|b| base.id_of((a + b) % n)).collect())
            .collect(),
    );
    m.twist = Some((0..n).map(|a| base.id_of(a)).collect());
    m.duals = Some(DualData {
        dual: (0..n).map(|a| (n - a) % n).collect(),
        unit: (0..n).map(|_| base.id_of(0)).collect(),
        counit: (0..n).map(|_| base.id_of(0)).collect(),
    });
    m.star = Some(StarData {
        par_obj: tobj.clone(),
        par_mor: tobj.clone(),
        bottom: 0,
        par_associator: m.associator.clone(),
        par_lunitor: m.lunitor.clone(),
        par_runitor: m.runitor.clone(),
        neg_obj: (0..n).map(|a| (n - a) % n).collect(),
        neg_mor: (0..n).map(|a| (n - a) % n).collect(),
        pairing: (0..n).map(|_| base.id_of(0)).collect(),
        copairing: (0..n).map(|_| base.id_of(0)).collect(),
    });
    m
}

/// Discrete model on the symmetric group S3: autonomous (duals are
/// inverses) but not braided.
pub fn s3_discrete() -> MonoidalModel {
    // elements as permutations of {0,1,2} in one-line notation
    let perms: Vec<[usize; 3]> = vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
        // (p·q)(i) = p(q(i))
        [p[q[0]], p[q[1]], p[q[2]]]
    };
    let index_of = |r: &[usize; 3]| perms.iter().position(|p| p == r).unwrap();
    let n = perms.len();
    let base = fincat::discrete(n, "S3");
    let tobj: Vec<Vec<usize>> = (0..n)
        .map(|a| (0..n).map(|b| index_of(&compose(&perms[a], &perms[b]))).collect())
        .collect();
    let tmor = tobj.clone();
    let mut m = MonoidalModel::strict("S3_discrete", base.clone(), tobj, tmor, 0);
    let inv = |a: usize| {
        (0..n)
            .find(|&b| index_of(&compose(&perms[a], &perms[b])) == 0)
            .unwrap()
    };
    m.duals = Some(DualData {
        dual: (0..n).map(inv).collect(),
        unit: (0..n).map(|_| base.id_of(0)).collect(),
        counit: (0..n).map(|_| base.id_of(0)).collect(),
    });
    m
}

/// One-object model on a commutative monoid given by its multiplication
/// table; the tensor coincides with composition.
pub fn monoid_model(name: &str, table: Vec<Vec<usize>>) -> Result<MonoidalModel, ModelError> {
    let k = table.len();
    // commutativity is forced by functoriality of the tensor
    for a in 0..k {
        for b in 0..k {
            if table[a][b] != table[b][a] {
                return Err(ModelError::Law {
                    law: "monoid commutativity".into(),
                    witness: format!("({a},{b})"),
                });
            }
        }
    }
    let t2 = table.clone();
    let base = FinCategory::from_tables(
        name,
        vec!["*".into()],
        (0..k).map(|i| (format!("e{i}"), 0, 0)).collect(),
        vec![0],
        move |g, f| t2[g][f],
    );
    base.check_laws()?;
    let tobj = vec![vec![0]];
    let tmor: Vec<Vec<usize>> = (0..k).map(|f| (0..k).map(|g| table[f][g]).collect()).collect();
    let mut m = MonoidalModel::strict(name, base.clone(), tobj, tmor, 0);
    m.braiding = Some(vec![vec![base.id_of(0)]]);
    m.twist = Some(vec![base.id_of(0)]);
    Ok(m)
}

/// The Boolean 2-chain: ⊗ = ∧ with unit 1, ⅋ = ∨ with unit 0, negation the
/// complement. *-autonomous but not autonomous, and not traced.
pub fn bool_chain() -> MonoidalModel {
    let base = fincat::walking_arrow();
    let tobj = vec![vec![0, 0], vec![0, 1]]; // ∧
    let tmor = poset_tensor_mor(&base, &tobj);
    let mut m = MonoidalModel::strict("bool_chain", base.clone(), tobj, tmor, 1);
    m.braiding = Some(
        (0..2)
            .map(|a| (0..2).map(|b| base.id_of(m.tobj(a, b))).collect())
            .collect(),
    );
    m.twist = Some((0..2).map(|a| base.id_of(a)).collect());
    let par_obj = vec![vec![0, 1], vec![1, 1]]; // ∨
    let par_mor = poset_tensor_mor(&base, &par_obj);
    let par_assoc = (0..2)
        .map(|a| {
            (0..2)
                .map(|b| (0..2).map(|c| base.id_of(par_obj[par_obj[a][b]][c])).collect())
                .collect()
        })
        .collect();
    m.star = Some(StarData {
        par_lunitor: (0..2).map(|a| base.id_of(par_obj[0][a])).collect(),
        par_runitor: (0..2).map(|a| base.id_of(par_obj[a][0])).collect(),
        par_associator: par_assoc,
        par_obj,
        par_mor,
        bottom: 0,
        neg_obj: vec![1, 0],
        neg_mor: vec![1, 0, 2], // id_0 ↦ id_1, id_1 ↦ id_0, arrow ↦ arrow (reversed poset)
        pairing: (0..2).map(|_| base.id_of(0)).collect(),
        copairing: (0..2).map(|_| base.id_of(1)).collect(),
    });
    m
}

/// The Łukasiewicz 3-chain {0, ½, 1}: ⊗ = max(0, a+b−1), ⅋ = min(1, a+b),
/// negation 1−a, dualizing object 0.
pub fn lukasiewicz3() -> MonoidalModel {
    let base = fincat::chain3();
    // indices 0, 1, 2 stand for 0, ½, 1
    let tobj: Vec<Vec<usize>> = (0..3)
        .map(|a: usize| (0..3).map(|b| (a + b).saturating_sub(2)).collect())
        .collect();
    let tmor = poset_tensor_mor(&base, &tobj);
    let mut m = MonoidalModel::strict("lukasiewicz3", base.clone(), tobj, tmor, 2);
    m.braiding = Some(
        (0..3)
            .map(|a| (0..3).map(|b| base.id_of(m.tobj(a, b))).collect())
            .collect(),
    );
    m.twist = Some((0..3).map(|a| base.id_of(a)).collect());
    let par_obj: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b| (a + b).min(2)).collect()).collect();
    let par_mor = poset_tensor_mor(&base, &par_obj);
    let par_assoc = (0..3)
        .map(|a| {
            (0..3)
                .map(|b| (0..3).map(|c| base.id_of(par_obj[par_obj[a][b]][c])).collect())
                .collect()
        })
        .collect();
    m.star = Some(StarData {
        par_lunitor: (0..3).map(|a| base.id_of(par_obj[0][a])).collect(),
        par_runitor: (0..3).map(|a| base.id_of(par_obj[a][0])).collect(),
        par_associator: par_assoc,
        par_obj,
        par_mor,
        bottom: 0,
        neg_obj: vec![2, 1, 0],
        neg_mor: {
            // f: a→b maps to the unique ¬b → ¬a
            (0..base.n_mor())
                .map(|f| {
                    let (s, t) = (base.src(f), base.tgt(f));
                    *base.hom(2 - t, 2 - s).first().unwrap()
                })
                .collect()
        },
        pairing: (0..3).map(|_| base.id_of(0)).collect(),
        copairing: (0..3).map(|_| base.id_of(2)).collect(),
    });
    m
}

/// The terminal model: one object, one morphism, everything trivial.
pub fn terminal_model() -> MonoidalModel {
    let mut m = monoid_model("terminal", vec![vec![0]]).unwrap();
    m.name = "terminal".into();
    m.duals = Some(DualData {
        dual: vec![0],
        unit: vec![0],
        counit: vec![0],
    });
    m.star = Some(StarData {
        par_obj: vec![vec![0]],
        par_mor: vec![vec![0]],
        bottom: 0,
        par_associator: vec![vec![vec![0]]],
        par_lunitor: vec![0],
        par_runitor: vec![0],
        neg_obj: vec![0],
        neg_mor: vec![0],
        pairing: vec![0],
        copairing: vec![0],
    });
    m
}

/// Looks up a zoo model by name: terminal, Zmod(n), S3_discrete, monoid2,
/// bool_chain, lukasiewicz3.
pub fn builtin_model(name: &str) -> Result<MonoidalModel, ModelError> {
    if let Some(rest) = name.strip_prefix("Zmod(").and_then(|s| s.strip_suffix(")")) {
        let n: usize = rest.parse().map_err(|_| ModelError::UnknownName(name.into()))?;
        if n == 0 || n > 12 {
            return Err(ModelError::UnknownName(name.into()));
        }
        return Ok(zmod(n));
    }
    match name {
        "terminal" => Ok(terminal_model()),
        "S3_discrete" => Ok(s3_discrete()),
        "bool_chain" => Ok(bool_chain()),
        "lukasiewicz3" => Ok(lukasiewicz3()),
        // {1, z} with z·z = z: the smallest fat-hom commutative monoid
        "monoid2" => monoid_model("monoid2", vec![vec![0, 1], vec![1, 1]]),
        _ => Err(ModelError::UnknownName(name.into())),
    }
}

pub fn zoo_names() -> Vec<&'static str> {
    vec![
        "terminal",
        "Zmod(2)",
        "Zmod(3)",
        "S3_discrete",
        "monoid2",
        "bool_chain",
        "lukasiewicz3",
    ]
}

// ---------------------------------------------------------------------------
// JSON interchange

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelSpec {
    pub category: CategorySpec,
    pub tensor_obj: Vec<Vec<String>>,
    pub tensor_mor: Vec<Vec<String>>,
    pub unit: String,
    pub associator: Vec<Vec<Vec<String>>>,
    pub lunitor: Vec<String>,
    pub runitor: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub braiding: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<Vec<Vec<Vec<u32>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duals: Option<DualSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub par: Option<ParSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DualSpec {
    pub dual: Vec<String>,
    pub unit: Vec<String>,
    pub counit: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ParSpec {
    pub par_obj: Vec<Vec<String>>,
    pub par_mor: Vec<Vec<String>>,
    pub bottom: String,
    pub par_associator: Vec<Vec<Vec<String>>>,
    pub par_lunitor: Vec<String>,
    pub par_runitor: Vec<String>,
    pub neg_obj: Vec<String>,
    pub neg_mor: Vec<String>,
    pub pairing: Vec<String>,
    pub copairing: Vec<String>,
}

pub fn model_to_spec(m: &MonoidalModel) -> ModelSpec {
    let c = &m.base;
    let ob = |i: &usize| c.objects[*i].clone();
    let mo = |i: &usize| c.mor_ids[*i].clone();
    ModelSpec {
        category: fincat::category_to_spec(c),
        tensor_obj: m.tensor_obj.iter().map(|r| r.iter().map(ob).collect()).collect(),
        tensor_mor: m.tensor_mor.iter().map(|r| r.iter().map(mo).collect()).collect(),
        unit: c.objects[m.unit].clone(),
        associator: m
            .associator
            .iter()
            .map(|aa| aa.iter().map(|bb| bb.iter().map(mo).collect()).collect())
            .collect(),
        lunitor: m.lunitor.iter().map(mo).collect(),
        runitor: m.runitor.iter().map(mo).collect(),
        braiding: m
            .braiding
            .as_ref()
            .map(|br| br.iter().map(|r| r.iter().map(mo).collect()).collect()),
        twist: m.twist.as_ref().map(|t| t.iter().map(mo).collect()),
        trace: m.trace.as_ref().map(|t| t.maps.clone()),
        duals: m.duals.as_ref().map(|d| DualSpec {
            dual: d.dual.iter().map(ob).collect(),
            unit: d.unit.iter().map(mo).collect(),
            counit: d.counit.iter().map(mo).collect(),
        }),
        par: m.star.as_ref().map(|s| ParSpec {
            par_obj: s.par_obj.iter().map(|r| r.iter().map(ob).collect()).collect(),
            par_mor: s.par_mor.iter().map(|r| r.iter().map(mo).collect()).collect(),
            bottom: c.objects[s.bottom].clone(),
            par_associator: s
                .par_associator
                .iter()
                .map(|aa| aa.iter().map(|bb| bb.iter().map(mo).collect()).collect())
                .collect(),
            par_lunitor: s.par_lunitor.iter().map(mo).collect(),
            par_runitor: s.par_runitor.iter().map(mo).collect(),
            neg_obj: s.neg_obj.iter().map(ob).collect(),
            neg_mor: s.neg_mor.iter().map(mo).collect(),
            pairing: s.pairing.iter().map(mo).collect(),
            copairing: s.copairing.iter().map(mo).collect(),
        }),
    }
}

pub fn model_from_spec(spec: ModelSpec, limits: &Limits) -> Result<MonoidalModel, ModelError> {
    let base = fincat::validate_category(spec.category, limits)?;
    let ob = |s: &String| -> Result<usize, ModelError> {
        base.obj_index(s)
            .ok_or_else(|| ModelError::Parse(format!("unknown object `{s}`")))
    };
    let mo = |s: &String| -> Result<usize, ModelError> {
        base.mor_index(s)
            .ok_or_else(|| ModelError::Parse(format!("unknown morphism `{s}`")))
    };
    let obs = |v: &[String]| v.iter().map(ob).collect::<Result<Vec<_>, _>>();
    let mos = |v: &[String]| v.iter().map(mo).collect::<Result<Vec<_>, _>>();
    let ob2 = |v: &[Vec<String>]| v.iter().map(|r| obs(r)).collect::<Result<Vec<_>, _>>();
    let mo2 = |v: &[Vec<String>]| v.iter().map(|r| mos(r)).collect::<Result<Vec<_>, _>>();
    let mo3 = |v: &[Vec<Vec<String>>]| v.iter().map(|r| mo2(r)).collect::<Result<Vec<_>, _>>();
    let m = MonoidalModel {
        name: base.name.clone(),
        tensor_obj: ob2(&spec.tensor_obj)?,
        tensor_mor: mo2(&spec.tensor_mor)?,
        unit: ob(&spec.unit)?,
        associator: mo3(&spec.associator)?,
        lunitor: mos(&spec.lunitor)?,
        runitor: mos(&spec.runitor)?,
        braiding: spec.braiding.as_ref().map(|b| mo2(b)).transpose()?,
        twist: spec.twist.as_ref().map(|t| mos(t)).transpose()?,
        trace: spec.trace.map(|maps| TraceFamily { maps }),
        duals: spec
            .duals
            .as_ref()
            .map(|d| {
                Ok::<_, ModelError>(DualData {
                    dual: obs(&d.dual)?,
                    unit: mos(&d.unit)?,
                    counit: mos(&d.counit)?,
                })
            })
            .transpose()?,
        star: spec
            .par
            .as_ref()
            .map(|s| {
                Ok::<_, ModelError>(StarData {
                    par_obj: ob2(&s.par_obj)?,
                    par_mor: mo2(&s.par_mor)?,
                    bottom: ob(&s.bottom)?,
                    par_associator: mo3(&s.par_associator)?,
                    par_lunitor: mos(&s.par_lunitor)?,
                    par_runitor: mos(&s.par_runitor)?,
                    neg_obj: obs(&s.neg_obj)?,
                    neg_mor: mos(&s.neg_mor)?,
                    pairing: mos(&s.pairing)?,
                    copairing: mos(&s.copairing)?,
                })
            })
            .transpose()?,
        base,
    };
    let _ = BTreeMap::<u8, u8>::new();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zoo_validates() {
        for name in zoo_names() {
            let m = builtin_model(name).unwrap();
            if let Err(e) = m.validate() {
                panic!("model `{name}` invalid: {e}");
            }
        }
    }

    #[test]
    fn zmod2_is_strict_group_model() {
        let m = zmod(2);
        assert_eq!(m.base.n_obj(), 2);
        assert_eq!(m.base.n_mor(), 2);
        m.validate().unwrap();
        assert!(m.duals.is_some());
        assert!(m.braiding.is_some());
    }

    #[test]
    fn broken_associator_reports_pentagon_or_naturality() {
        let mut m = zmod(2);
        // retarget one associator component to a non-identity boundary: with
        // a discrete base any wrong entry breaks the boundary check
        m.associator[0][0][0] = m.base.id_of(1);
        assert!(m.validate().is_err());
    }

    #[test]
    fn model_spec_roundtrip() {
        let m = lukasiewicz3();
        let spec = model_to_spec(&m);
        let json = serde_json::to_string(&spec).unwrap();
        let back: ModelSpec = serde_json::from_str(&json).unwrap();
        let m2 = model_from_spec(back, &Limits::default()).unwrap();
        m2.validate().unwrap();
        assert_eq!(m.tensor_obj, m2.tensor_obj);
        assert_eq!(m.star.as_ref().unwrap().neg_obj, m2.star.as_ref().unwrap().neg_obj);
    }
}
