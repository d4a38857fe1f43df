//! Coend composition of profunctors: a disjoint union of element pairs over
//! the middle objects, quotiented by the least equivalence relation generated
//! by the zig-zag moves (q·β, p) ∼ (q, β·p) for middle morphisms β.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Elem, Prof, ProfError, Profunctor};
use crate::limits::{Limits, Rng};

/// Union-find over raw pair indices, path-halving, union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

/// Per-fiber quotient data for one composite, kept for diagnostics, class
/// lookup and membership enumeration.
#[derive(Debug)]
pub struct FiberTable {
    /// All raw chains, in enumeration order.
    pub raw: Vec<Elem>,
    /// Class index (position in the sorted representative list) per raw chain.
    pub class_of_raw: Vec<u32>,
    /// Canonical representatives, sorted; identical to the composite fiber.
    pub reps: Vec<Elem>,
    lookup: HashMap<Elem, u32>,
}

impl FiberTable {
    pub fn class_of(&self, raw_chain: &Elem) -> Option<u32> {
        self.lookup.get(raw_chain).copied()
    }

    pub fn members(&self, class: u32) -> impl Iterator<Item = &Elem> {
        self.raw
            .iter()
            .zip(self.class_of_raw.iter())
            .filter(move |(_, &c)| c == class)
            .map(|(e, _)| e)
    }
}

/// The full coend bookkeeping of one composition: one [`FiberTable`] per
/// (target object, source object) pair, plus the split point for
/// decomposing representatives back into their outer and inner halves.
#[derive(Debug)]
pub struct CoendTable {
    pub outer_len: usize,
    pub tables: Vec<Vec<FiberTable>>,
}

impl CoendTable {
    pub fn table(&self, c: usize, a: usize) -> &FiberTable {
        &self.tables[c][a]
    }

    pub fn class_counts(&self) -> Vec<Vec<usize>> {
        self.tables
            .iter()
            .map(|row| row.iter().map(|t| t.reps.len()).collect())
            .collect()
    }
}

fn zigzag_edges(
    q: &Profunctor,
    p: &Profunctor,
    c: usize,
    a: usize,
    index_of: &HashMap<Elem, u32>,
) -> Vec<(u32, u32)> {
    let mid = q.src_cat();
    let mut edges = Vec::new();
    for beta in 0..mid.n_mor() {
        if mid.is_identity(beta) {
            continue;
        }
        let b = mid.src(beta);
        let b2 = mid.tgt(beta);
        for qe in q.fiber(c, b) {
            let q_moved = q.act_right_elem(beta, c, qe);
            for pe2 in p.fiber(b2, a) {
                let p_moved = p.act_left_elem(beta, a, pe2);
                let lhs = Elem::splice(&q_moved, &mid.objects[b2], pe2);
                let rhs = Elem::splice(qe, &mid.objects[b], &p_moved);
                let li = index_of[&lhs];
                let ri = index_of[&rhs];
                edges.push((li, ri));
            }
        }
    }
    edges
}

/// Composite Q∘P (p acts first). Returns the composite profunctor together
/// with its coend table. Fiber elements are the lexicographically least raw
/// chain of each class; chains flatten, so composition is associative on the
/// nose at the level of representations.
pub fn compose_prof(q: &Prof, p: &Prof, limits: &Limits) -> Result<(Prof, Arc<CoendTable>), ProfError> {
    if p.target.cat != q.source.cat {
        return Err(ProfError::MiddleMismatch(
            p.target.cat.name.clone(),
            q.source.cat.name.clone(),
        ));
    }
    let mid = q.src_cat().clone();
    let nb = q.tgt_cat().n_obj();
    let na = p.src_cat().n_obj();
    let mut tables: Vec<Vec<FiberTable>> = Vec::with_capacity(nb);
    let mut total = 0usize;
    for c in 0..nb {
        let mut row = Vec::with_capacity(na);
        for a in 0..na {
            let mut raw = Vec::new();
            let mut index_of = HashMap::new();
            for b in 0..mid.n_obj() {
                for qe in q.fiber(c, b) {
                    for pe in p.fiber(b, a) {
                        let chain = Elem::splice(qe, &mid.objects[b], pe);
                        index_of.insert(chain.clone(), raw.len() as u32);
                        raw.push(chain);
                    }
                }
            }
            total += raw.len();
            if total > limits.max_elements {
                return Err(ProfError::SizeGuard(total, limits.max_elements));
            }
            let mut uf = UnionFind::new(raw.len());
            for (x, y) in zigzag_edges(q, p, c, a, &index_of) {
                uf.union(x, y);
            }
            // canonical representative: least raw chain in each class
            let mut rep_of_root: HashMap<u32, Elem> = HashMap::new();
            for (i, chain) in raw.iter().enumerate() {
                let root = uf.find(i as u32);
                match rep_of_root.get_mut(&root) {
                    Some(best) if &*best <= chain => {}
                    _ => {
                        rep_of_root.insert(root, chain.clone());
                    }
                }
            }
            let mut reps: Vec<Elem> = rep_of_root.values().cloned().collect();
            reps.sort();
            let rep_pos: HashMap<&Elem, u32> =
                reps.iter().enumerate().map(|(i, e)| (e, i as u32)).collect();
            let mut class_of_raw = Vec::with_capacity(raw.len());
            let mut lookup = HashMap::with_capacity(raw.len());
            for (i, chain) in raw.iter().enumerate() {
                let root = uf.find(i as u32);
                let class = rep_pos[&rep_of_root[&root]];
                class_of_raw.push(class);
                lookup.insert(chain.clone(), class);
            }
            row.push(FiberTable {
                raw,
                class_of_raw,
                reps,
                lookup,
            });
        }
        tables.push(row);
    }
    let table = Arc::new(CoendTable {
        outer_len: q.chain_len,
        tables,
    });

    let fibers: Vec<Vec<Vec<Elem>>> = table
        .tables
        .iter()
        .map(|row| row.iter().map(|t| t.reps.clone()).collect())
        .collect();

    let outer_len = q.chain_len;
    // left action: act on the outer half through q, re-canonicalize
    let mut left = Vec::with_capacity(q.tgt_cat().n_mor());
    for g in 0..q.tgt_cat().n_mor() {
        let ct = q.tgt_cat().tgt(g);
        let cs = q.tgt_cat().src(g);
        let mut per_a = Vec::with_capacity(na);
        for a in 0..na {
            let mut map = Vec::with_capacity(fibers[ct][a].len());
            for rep in &fibers[ct][a] {
                let (outer, mid_obj, inner) = rep.split(outer_len);
                let moved = q.act_left_elem(g, mid.obj_index(&mid_obj).unwrap(), &outer);
                let chain = Elem::splice(&moved, &mid_obj, &inner);
                let class = table.tables[cs][a]
                    .class_of(&chain)
                    .expect("acted chain present in raw set");
                map.push(class);
            }
            per_a.push(map);
        }
        left.push(per_a);
    }
    // right action: act on the inner half through p
    let mut right = Vec::with_capacity(p.src_cat().n_mor());
    for f in 0..p.src_cat().n_mor() {
        let at = p.src_cat().tgt(f);
        let mut per_b = Vec::with_capacity(nb);
        for c in 0..nb {
            let asrc = p.src_cat().src(f);
            let mut map = Vec::with_capacity(fibers[c][asrc].len());
            for rep in &fibers[c][asrc] {
                let (outer, mid_obj, inner) = rep.split(outer_len);
                let moved = p.act_right_elem(f, mid.obj_index(&mid_obj).unwrap(), &inner);
                let chain = Elem::splice(&outer, &mid_obj, &moved);
                let class = table.tables[c][at]
                    .class_of(&chain)
                    .expect("acted chain present in raw set");
                map.push(class);
            }
            per_b.push(map);
        }
        right.push(per_b);
    }
    let prof = Profunctor::from_raw(
        &format!("({}∘{})", q.name, p.name),
        p.source.clone(),
        q.target.clone(),
        q.chain_len + p.chain_len,
        fibers,
        left,
        right,
    );
    Ok((prof, table))
}

/// Folds a list of layers bottom-to-top into their composite, returning the
/// intermediate composites and the coend tables of each step.
pub fn fold_layers(
    layers: &[Prof],
    limits: &Limits,
) -> Result<(Vec<Prof>, Vec<Option<Arc<CoendTable>>>), ProfError> {
    assert!(!layers.is_empty());
    let mut profs = vec![layers[0].clone()];
    let mut tables: Vec<Option<Arc<CoendTable>>> = vec![None];
    for layer in &layers[1..] {
        let (next, table) = compose_prof(layer, profs.last().unwrap(), limits)?;
        profs.push(next);
        tables.push(Some(table));
    }
    Ok((profs, tables))
}

/// Re-runs the quotient with the zig-zag unions applied in a shuffled order
/// and reports the per-fiber class counts. Union-find closure is independent
/// of union order, so the counts must match `compose_prof`'s.
pub fn shuffled_class_counts(q: &Prof, p: &Prof, limits: &Limits, seed: u64) -> Result<Vec<Vec<usize>>, ProfError> {
    if p.target.cat != q.source.cat {
        return Err(ProfError::MiddleMismatch(
            p.target.cat.name.clone(),
            q.source.cat.name.clone(),
        ));
    }
    let mid = q.src_cat().clone();
    let nb = q.tgt_cat().n_obj();
    let na = p.src_cat().n_obj();
    let mut rng = Rng::new(seed);
    let mut counts = Vec::with_capacity(nb);
    let mut total = 0usize;
    for c in 0..nb {
        let mut row = Vec::with_capacity(na);
        for a in 0..na {
            let mut raw = Vec::new();
            let mut index_of = HashMap::new();
            for b in 0..mid.n_obj() {
                for qe in q.fiber(c, b) {
                    for pe in p.fiber(b, a) {
                        let chain = Elem::splice(qe, &mid.objects[b], pe);
                        index_of.insert(chain.clone(), raw.len() as u32);
                        raw.push(chain);
                    }
                }
            }
            total += raw.len();
            if total > limits.max_elements {
                return Err(ProfError::SizeGuard(total, limits.max_elements));
            }
            let mut edges = zigzag_edges(q, p, c, a, &index_of);
            rng.shuffle(&mut edges);
            let mut uf = UnionFind::new(raw.len());
            let mut classes = raw.len();
            for (x, y) in edges {
                if uf.union(x, y) {
                    classes -= 1;
                }
            }
            row.push(classes);
        }
        counts.push(row);
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::walking_arrow;
    use crate::prof::{cap_w, cup, hom_profunctor};

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn hom_compose_hom_collapses_on_walking_arrow() {
        // oracle, by hand: at (0,1) the raw pairs are (a, id_0) via middle 0
        // and (id_1, a) via middle 1; the zig-zag over a identifies them.
        let two = walking_arrow();
        let h = hom_profunctor(&two, &limits()).unwrap();
        let (hh, table) = compose_prof(&h, &h, &limits()).unwrap();
        assert_eq!(table.table(0, 1).raw.len(), 2);
        assert_eq!(table.table(0, 1).reps.len(), 1);
        hh.validate().unwrap();
        for b in 0..2 {
            for a in 0..2 {
                assert_eq!(hh.fiber(b, a).len(), h.fiber(b, a).len());
            }
        }
    }

    #[test]
    fn class_counts_invariant_under_shuffles() {
        let two = walking_arrow();
        let h = hom_profunctor(&two, &limits()).unwrap();
        let (_, table) = compose_prof(&h, &h, &limits()).unwrap();
        let base = table.class_counts();
        for seed in 0..10 {
            assert_eq!(shuffled_class_counts(&h, &h, &limits(), seed).unwrap(), base);
        }
    }

    #[test]
    fn cap_after_cup_computes_trace_of_hom() {
        // ∫^c Hom(c, c) for the walking arrow has exactly 2 classes:
        // oracle by union-find over {(g: y→x, f: x→y)} — only (id_0,id_0)
        // and (id_1,id_1) exist, and no zig-zag merges them.
        let two = walking_arrow();
        let cu = cup(&two, &limits()).unwrap();
        // cap over the dual colour pairs with cup's boundary: Cap(ĉ) has
        // source (C, Ĉ) which matches cup's target.
        let ca = cap_w(
            &crate::fincat::ProductCat {
                factors: vec![two.opposite()],
                cat: two.opposite(),
            },
            &limits(),
        )
        .unwrap();
        assert_eq!(ca.src_cat().name, cu.tgt_cat().name);
        let (loop_prof, table) = compose_prof(&ca, &cu, &limits()).unwrap();
        assert_eq!(loop_prof.total_elements(), 2);
        assert_eq!(table.table(0, 0).reps.len(), 2);
    }

    #[test]
    fn flat_chains_make_composition_associative() {
        let two = walking_arrow();
        let h = hom_profunctor(&two, &limits()).unwrap();
        let (hh, _) = compose_prof(&h, &h, &limits()).unwrap();
        let (left, _) = compose_prof(&hh, &h, &limits()).unwrap();
        let (hh2, _) = compose_prof(&h, &h, &limits()).unwrap();
        let (right, _) = compose_prof(&h, &hh2, &limits()).unwrap();
        assert_eq!(*left, *right);
    }
}
