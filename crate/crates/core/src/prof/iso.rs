//! Backtracking search for an isomorphism of parallel profunctors, one
//! element at a time: every assignment is propagated through both actions,
//! so orbits of generated elements are forced and the search stays small
//! even on fat fibers.

use super::{cell::check_parallel, Prof, ProfCell, ProfError};
use crate::limits::Limits;

#[derive(Clone)]
struct Assignment {
    /// forward[b][a][pos] = image position (u32::MAX when unassigned)
    forward: Vec<Vec<Vec<u32>>>,
    /// used[b][a][pos] = image position already taken in the target fiber
    used: Vec<Vec<Vec<bool>>>,
}

/// Deterministic search for a natural family of bijections P ⇒ Q.
/// Returns the first isomorphism in assignment order, or None.
pub fn find_iso(p: &Prof, q: &Prof, limits: &Limits) -> Result<Option<ProfCell>, ProfError> {
    check_parallel(p, q)?;
    let t = p.tgt_cat().clone();
    let s = p.src_cat().clone();
    let nb = t.n_obj();
    let na = s.n_obj();
    for b in 0..nb {
        for a in 0..na {
            if p.fiber(b, a).len() != q.fiber(b, a).len() {
                return Ok(None);
            }
        }
    }
    let blank = Assignment {
        forward: (0..nb)
            .map(|b| (0..na).map(|a| vec![u32::MAX; p.fiber(b, a).len()]).collect())
            .collect(),
        used: (0..nb)
            .map(|b| (0..na).map(|a| vec![false; q.fiber(b, a).len()]).collect())
            .collect(),
    };

    // propagation: assign x ↦ y and close under both actions; returns false
    // on a contradiction
    let assign = |st: &mut Assignment,
                  budget: &mut u64,
                  b0: usize,
                  a0: usize,
                  x0: u32,
                  y0: u32|
     -> Result<bool, ProfError> {
        let mut stack = vec![(b0, a0, x0, y0)];
        while let Some((b, a, x, y)) = stack.pop() {
            if *budget == 0 {
                return Err(ProfError::Budget(limits.iso_budget));
            }
            *budget -= 1;
            let cur = st.forward[b][a][x as usize];
            if cur != u32::MAX {
                if cur != y {
                    return Ok(false);
                }
                continue;
            }
            if st.used[b][a][y as usize] {
                return Ok(false);
            }
            st.forward[b][a][x as usize] = y;
            st.used[b][a][y as usize] = true;
            // close under the left actions
            for g in 0..t.n_mor() {
                if t.tgt(g) != b {
                    continue;
                }
                let b2 = t.src(g);
                stack.push((b2, a, p.act_left(g, a, x), q.act_left(g, a, y)));
            }
            // close under the right actions
            for f in 0..s.n_mor() {
                if s.src(f) != a {
                    continue;
                }
                let a2 = s.tgt(f);
                stack.push((b, a2, p.act_right(f, b, x), q.act_right(f, b, y)));
            }
        }
        Ok(true)
    };

    // depth-first over the elements in fiber order with candidate images
    struct Frame {
        b: usize,
        a: usize,
        x: u32,
        next_candidate: u32,
        saved: Assignment,
    }
    let mut budget = limits.iso_budget;
    let mut state = blank;
    let mut stack: Vec<Frame> = Vec::new();
    let next_unassigned = |st: &Assignment| -> Option<(usize, usize, u32)> {
        for b in 0..nb {
            for a in 0..na {
                if let Some(x) = st.forward[b][a].iter().position(|&v| v == u32::MAX) {
                    return Some((b, a, x as u32));
                }
            }
        }
        None
    };
    loop {
        match next_unassigned(&state) {
            None => {
                let maps = state.forward;
                let cell =
                    ProfCell::new(&format!("iso({}≅{})", p.name, q.name), p.clone(), q.clone(), maps);
                return Ok(Some(cell));
            }
            Some((b, a, x)) => {
                stack.push(Frame {
                    b,
                    a,
                    x,
                    next_candidate: 0,
                    saved: state.clone(),
                });
            }
        }
        // try candidates for the top frame, backtracking on exhaustion
        'search: loop {
            let Some(frame) = stack.last_mut() else {
                return Ok(None);
            };
            let n_img = q.fiber(frame.b, frame.a).len() as u32;
            let mut y = frame.next_candidate;
            while y < n_img && frame.saved.used[frame.b][frame.a][y as usize] {
                y += 1;
            }
            if y >= n_img {
                stack.pop();
                if let Some(prev) = stack.last_mut() {
                    prev.next_candidate += 1;
                    continue 'search;
                }
                return Ok(None);
            }
            frame.next_candidate = y;
            state = frame.saved.clone();
            match assign(&mut state, &mut budget, frame.b, frame.a, frame.x, y)? {
                true => break 'search,
                false => {
                    frame.next_candidate += 1;
                    continue 'search;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::walking_arrow;
    use crate::limits::Limits;
    use crate::prof::{compose_prof, hom_profunctor};

    #[test]
    fn iso_with_itself_exists() {
        let limits = Limits::default();
        let h = hom_profunctor(&walking_arrow(), &limits).unwrap();
        let iso = find_iso(&h, &h, &limits).unwrap().unwrap();
        iso.check_equivariance().unwrap();
        assert!(iso.is_bijective());
    }

    #[test]
    fn unit_law_iso_found() {
        let limits = Limits::default();
        let h = hom_profunctor(&walking_arrow(), &limits).unwrap();
        let (hh, _) = compose_prof(&h, &h, &limits).unwrap();
        let iso = find_iso(&hh, &h, &limits).unwrap().unwrap();
        iso.check_equivariance().unwrap();
    }

    #[test]
    fn found_isos_are_natural_on_triple_composites() {
        let limits = Limits::default();
        let h = hom_profunctor(&walking_arrow(), &limits).unwrap();
        let (hh, _) = compose_prof(&h, &h, &limits).unwrap();
        let (hhh, _) = compose_prof(&h, &hh, &limits).unwrap();
        let iso = find_iso(&hhh, &h, &limits).unwrap().unwrap();
        iso.check_equivariance().unwrap();
        assert!(iso.is_bijective());
    }
}
