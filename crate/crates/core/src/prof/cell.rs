//! 2-cells of Prof: natural families of functions between parallel
//! profunctors, stored as position maps per fiber.

use super::{Elem, Prof, ProfError};

#[derive(Debug, Clone)]
pub struct ProfCell {
    pub name: String,
    pub source: Prof,
    pub target: Prof,
    /// maps[b][a][pos] = image position in the target fiber.
    pub maps: Vec<Vec<Vec<u32>>>,
}

impl PartialEq for ProfCell {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.maps == other.maps
    }
}

impl ProfCell {
    pub fn new(name: &str, source: Prof, target: Prof, maps: Vec<Vec<Vec<u32>>>) -> ProfCell {
        ProfCell {
            name: name.to_string(),
            source,
            target,
            maps,
        }
    }

    /// Builds a cell from an element-level map.
    pub fn from_fn(
        name: &str,
        source: Prof,
        target: Prof,
        mut f: impl FnMut(usize, usize, &Elem) -> Elem,
    ) -> Result<ProfCell, ProfError> {
        check_parallel(&source, &target)?;
        let nb = source.tgt_cat().n_obj();
        let na = source.src_cat().n_obj();
        let mut maps = Vec::with_capacity(nb);
        for b in 0..nb {
            let mut row = Vec::with_capacity(na);
            for a in 0..na {
                let mut m = Vec::with_capacity(source.fiber(b, a).len());
                for e in source.fiber(b, a) {
                    let img = f(b, a, e);
                    let p = target.pos(b, a, &img).ok_or_else(|| ProfError::ActionImage {
                        b: source.tgt_cat().objects[b].clone(),
                        a: source.src_cat().objects[a].clone(),
                        elem: img.to_string(),
                    })?;
                    m.push(p);
                }
                row.push(m);
            }
            maps.push(row);
        }
        Ok(ProfCell::new(name, source, target, maps))
    }

    pub fn identity(p: &Prof) -> ProfCell {
        let nb = p.tgt_cat().n_obj();
        let na = p.src_cat().n_obj();
        let maps = (0..nb)
            .map(|b| {
                (0..na)
                    .map(|a| (0..p.fiber(b, a).len() as u32).collect())
                    .collect()
            })
            .collect();
        ProfCell::new(&format!("1_{}", p.name), p.clone(), p.clone(), maps)
    }

    pub fn apply(&self, b: usize, a: usize, pos: u32) -> u32 {
        self.maps[b][a][pos as usize]
    }

    pub fn apply_elem(&self, b: usize, a: usize, e: &Elem) -> Elem {
        let p = self.source.pos(b, a, e).expect("element in source fiber");
        self.target.fiber(b, a)[self.apply(b, a, p) as usize].clone()
    }

    /// Vertical composition: `self` after `first`.
    pub fn after(&self, first: &ProfCell) -> Result<ProfCell, ProfError> {
        if first.target != self.source {
            return Err(ProfError::TypeMismatch(format!(
                "vertical composition boundary: `{}` then `{}`",
                first.name, self.name
            )));
        }
        let maps = first
            .maps
            .iter()
            .enumerate()
            .map(|(b, row)| {
                row.iter()
                    .enumerate()
                    .map(|(a, m)| m.iter().map(|&p| self.apply(b, a, p)).collect())
                    .collect()
            })
            .collect();
        Ok(ProfCell::new(
            &format!("({}·{})", self.name, first.name),
            first.source.clone(),
            self.target.clone(),
            maps,
        ))
    }

    pub fn is_bijective(&self) -> bool {
        for (b, row) in self.maps.iter().enumerate() {
            for (a, m) in row.iter().enumerate() {
                if m.len() != self.target.fiber(b, a).len() {
                    return false;
                }
                let mut seen = vec![false; m.len()];
                for &p in m {
                    if seen[p as usize] {
                        return false;
                    }
                    seen[p as usize] = true;
                }
            }
        }
        true
    }

    pub fn inverse(&self) -> Result<ProfCell, ProfError> {
        let nb = self.maps.len();
        let mut maps = Vec::with_capacity(nb);
        for (b, row) in self.maps.iter().enumerate() {
            let mut out_row = Vec::with_capacity(row.len());
            for (a, m) in row.iter().enumerate() {
                let n_tgt = self.target.fiber(b, a).len();
                let mut inv = vec![u32::MAX; n_tgt];
                for (p, &q) in m.iter().enumerate() {
                    inv[q as usize] = p as u32;
                }
                if m.len() != n_tgt || inv.iter().any(|&x| x == u32::MAX) {
                    return Err(ProfError::NotInvertible(
                        self.name.clone(),
                        self.source.tgt_cat().objects[b].clone(),
                        self.source.src_cat().objects[a].clone(),
                    ));
                }
                out_row.push(inv);
            }
            maps.push(out_row);
        }
        Ok(ProfCell::new(
            &format!("{}⁻¹", self.name),
            self.target.clone(),
            self.source.clone(),
            maps,
        ))
    }

    /// Equivariance scan: the components must commute with both actions.
    pub fn check_equivariance(&self) -> Result<(), ProfError> {
        let p = &self.source;
        let q = &self.target;
        let t = p.tgt_cat();
        let s = p.src_cat();
        for g in 0..t.n_mor() {
            let bt = t.tgt(g);
            for a in 0..s.n_obj() {
                for pos in 0..p.fiber(bt, a).len() as u32 {
                    let one = q.act_left(g, a, self.apply(bt, a, pos));
                    let two = self.apply(t.src(g), a, p.act_left(g, a, pos));
                    if one != two {
                        return Err(ProfError::Equivariance {
                            cell: self.name.clone(),
                            b: t.objects[bt].clone(),
                            a: s.objects[a].clone(),
                            elem: p.fiber(bt, a)[pos as usize].to_string(),
                            mor: t.mor_ids[g].clone(),
                        });
                    }
                }
            }
        }
        for f in 0..s.n_mor() {
            let asrc = s.src(f);
            for b in 0..t.n_obj() {
                for pos in 0..p.fiber(b, asrc).len() as u32 {
                    let one = q.act_right(f, b, self.apply(b, asrc, pos));
                    let two = self.apply(b, s.tgt(f), p.act_right(f, b, pos));
                    if one != two {
                        return Err(ProfError::Equivariance {
                            cell: self.name.clone(),
                            b: t.objects[b].clone(),
                            a: s.objects[asrc].clone(),
                            elem: p.fiber(b, asrc)[pos as usize].to_string(),
                            mor: s.mor_ids[f].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// First fiber where two parallel cells disagree, with the element.
    pub fn first_difference(&self, other: &ProfCell) -> Option<(usize, usize, Elem)> {
        for (b, row) in self.maps.iter().enumerate() {
            for (a, m) in row.iter().enumerate() {
                for (pos, &img) in m.iter().enumerate() {
                    if other.maps[b][a][pos] != img {
                        return Some((b, a, self.source.fiber(b, a)[pos].clone()));
                    }
                }
            }
        }
        None
    }
}

pub fn check_parallel(p: &Prof, q: &Prof) -> Result<(), ProfError> {
    if p.source.cat != q.source.cat || p.target.cat != q.target.cat {
        return Err(ProfError::NotParallel(format!(
            "`{}` has boundary {} ↛ {}, `{}` has {} ↛ {}",
            p.name, p.source.cat.name, p.target.cat.name, q.name, q.source.cat.name, q.target.cat.name
        )));
    }
    Ok(())
}

/// Canonical left unitor: Hom(B)∘P ⇒ P, collapsing the hom part into the
/// left action.
pub fn lunitor(composite: &Prof, p: &Prof) -> Result<ProfCell, ProfError> {
    let tcat = p.tgt_cat().clone();
    let p2 = p.clone();
    ProfCell::from_fn("λ", composite.clone(), p.clone(), move |_b, a, e| {
        let (outer, _mid, inner) = e.split(1);
        let g = match &outer {
            Elem::Atom(s) => tcat.mor_index(s).unwrap(),
            _ => unreachable!("hom layer is atomic"),
        };
        // g: b → mid; the left action carries E(mid, a) to E(b, a)
        p2.act_left_elem(g, a, &inner)
    })
}

/// Canonical right unitor: P∘Hom(A) ⇒ P.
pub fn runitor(composite: &Prof, p: &Prof) -> Result<ProfCell, ProfError> {
    let scat = p.src_cat().clone();
    let p2 = p.clone();
    ProfCell::from_fn("ρ", composite.clone(), p.clone(), move |b, _a, e| {
        let (outer, _mid, inner) = e.split(p2.chain_len);
        let u = match &inner {
            Elem::Atom(s) => scat.mor_index(s).unwrap(),
            _ => unreachable!("hom layer is atomic"),
        };
        p2.act_right_elem(u, b, &outer)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::walking_arrow;
    use crate::limits::Limits;
    use crate::prof::{compose_prof, hom_profunctor};

    #[test]
    fn identity_cell_is_equivariant() {
        let h = hom_profunctor(&walking_arrow(), &Limits::default()).unwrap();
        let id = ProfCell::identity(&h);
        id.check_equivariance().unwrap();
        assert!(id.is_bijective());
    }

    #[test]
    fn runitor_collapses_hom() {
        let limits = Limits::default();
        let h = hom_profunctor(&walking_arrow(), &limits).unwrap();
        let (hh, _) = compose_prof(&h, &h, &limits).unwrap();
        let rho = runitor(&hh, &h).unwrap();
        rho.check_equivariance().unwrap();
        assert!(rho.is_bijective());
    }
}
