//! Shellings of balls and spheres, and the starring of a shellable ball by
//! Pachner moves.
//!
//! An elementary shelling removes a top simplex `T = A ⋆ B` (both parts
//! nonempty) from a ball `M` when `A ∩ ∂M = ∂A` and `B ⋆ ∂A ⊆ ∂M`. The first
//! condition says `A` is interior while all its proper faces are on the
//! boundary; the second says `T \ {a}` is a boundary facet for every `a ∈ A`.
//! The result is the closure of the remaining top simplexes.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::complex::{dim_lex_key, Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::pachner::{check_move, PachnerMove, Recorder};

/// Default ceiling on search nodes for [`find_shelling`].
pub const DEFAULT_NODE_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellingStep {
    #[serde(rename = "A")]
    pub a: Simplex,
    #[serde(rename = "B")]
    pub b: Simplex,
}

impl ShellingStep {
    pub fn top(&self) -> Simplex {
        self.a.union(&self.b)
    }
}

/// Steps reducing a ball to the single simplex `last`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shelling {
    pub steps: Vec<ShellingStep>,
    pub last: Simplex,
}

impl Shelling {
    /// Number of top simplexes of the shelled ball.
    pub fn len(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShellingOutcome {
    Found(Shelling),
    NotShellable,
    /// The node cap was reached before the search space was exhausted.
    Undecided {
        nodes: usize,
    },
}

impl ShellingOutcome {
    pub fn found(self) -> Option<Shelling> {
        match self {
            ShellingOutcome::Found(s) => Some(s),
            _ => None,
        }
    }
}

fn pure_tops(k: &Complex) -> Result<Vec<Simplex>> {
    if !k.is_pure() {
        return Err(Error::NotPure(format!("f-vector {:?}", k.f_vector())));
    }
    Ok(k.top_simplexes())
}

/// Closure of the codimension-one faces lying in exactly one top simplex.
pub fn boundary_complex(ball: &Complex) -> Result<Complex> {
    let tops = pure_tops(ball)?;
    let mut count: BTreeMap<Simplex, usize> = BTreeMap::new();
    for t in &tops {
        for f in t.facets() {
            *count.entry(f).or_default() += 1;
        }
    }
    Ok(Complex::from_maximal(
        count.into_iter().filter(|(_, c)| *c == 1).map(|(f, _)| f),
    ))
}

/// Incrementally maintained ball with boundary bookkeeping.
struct BallState {
    tops: Vec<Simplex>,
    alive: Vec<bool>,
    alive_count: usize,
    ridge_count: HashMap<Simplex, u32>,
    /// Number of boundary ridges containing each face (ridges included).
    boundary_count: HashMap<Simplex, u32>,
    vertex_tops: HashMap<VertexId, Vec<usize>>,
}

impl BallState {
    fn new(tops: Vec<Simplex>) -> Self {
        let mut st = BallState {
            alive: vec![true; tops.len()],
            alive_count: tops.len(),
            ridge_count: HashMap::new(),
            boundary_count: HashMap::new(),
            vertex_tops: HashMap::new(),
            tops,
        };
        for (i, t) in st.tops.iter().enumerate() {
            for v in t.vertices() {
                st.vertex_tops.entry(*v).or_default().push(i);
            }
            for r in t.facets() {
                *st.ridge_count.entry(r).or_default() += 1;
            }
        }
        let boundary: Vec<Simplex> = st
            .ridge_count
            .iter()
            .filter(|(_, &c)| c == 1)
            .map(|(r, _)| r.clone())
            .collect();
        for r in boundary {
            st.shift_boundary(&r, 1);
        }
        st
    }

    fn shift_boundary(&mut self, ridge: &Simplex, delta: i32) {
        for f in ridge.faces() {
            let e = self.boundary_count.entry(f).or_default();
            *e = (*e as i32 + delta) as u32;
        }
    }

    fn on_boundary(&self, s: &Simplex) -> bool {
        self.boundary_count.get(s).is_some_and(|&c| c > 0)
    }

    fn remove(&mut self, i: usize) {
        self.alive[i] = false;
        self.alive_count -= 1;
        for r in self.tops[i].facets() {
            let c = self.ridge_count.get_mut(&r).expect("ridge of a live top");
            *c -= 1;
            match *c {
                0 => self.shift_boundary(&r, -1),
                1 => self.shift_boundary(&r, 1),
                _ => {}
            }
        }
    }

    fn restore(&mut self, i: usize) {
        self.alive[i] = true;
        self.alive_count += 1;
        for r in self.tops[i].facets() {
            let c = self.ridge_count.get_mut(&r).expect("ridge known");
            *c += 1;
            match *c {
                1 => self.shift_boundary(&r, 1),
                2 => self.shift_boundary(&r, -1),
                _ => {}
            }
        }
    }

    /// Whether `(a, t \ a)` is an elementary shelling of the current ball.
    fn is_step(&self, t: &Simplex, a: &Simplex) -> bool {
        if self.on_boundary(a) {
            return false;
        }
        if !a.proper_faces().all(|f| self.on_boundary(&f)) {
            return false;
        }
        a.vertices().iter().all(|v| {
            t.without(*v)
                .is_some_and(|r| self.ridge_count.get(&r) == Some(&1))
        })
    }

    /// All valid steps removing top `i`, largest `A` first.
    fn steps_for(&self, i: usize) -> Vec<ShellingStep> {
        let t = &self.tops[i];
        let full = (1u32 << t.len()) - 1;
        let mut out: Vec<ShellingStep> = (1..full)
            .filter_map(|mask| {
                let a = t.subset(mask)?;
                if self.is_step(t, &a) {
                    Some(ShellingStep {
                        b: t.difference(&a).expect("proper subset"),
                        a,
                    })
                } else {
                    None
                }
            })
            .collect();
        out.sort_by(|x, y| y.a.dim().cmp(&x.a.dim()).then_with(|| x.a.cmp(&y.a)));
        out
    }

    fn best_step(&self, i: usize) -> Option<ShellingStep> {
        self.steps_for(i).into_iter().next()
    }

    fn key(&self) -> Vec<u64> {
        let mut bits = vec![0u64; self.tops.len().div_ceil(64)];
        for (i, &a) in self.alive.iter().enumerate() {
            if a {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        bits
    }

    fn touching(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.tops[i]
            .vertices()
            .iter()
            .flat_map(|v| self.vertex_tops[v].iter().copied())
            .filter(|&j| self.alive[j])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Every elementary shelling available on `ball`.
pub fn elementary_shellings(ball: &Complex) -> Result<Vec<ShellingStep>> {
    let tops = pure_tops(ball)?;
    if tops.len() <= 1 {
        return Ok(Vec::new());
    }
    let st = BallState::new(tops);
    Ok((0..st.tops.len()).flat_map(|i| st.steps_for(i)).collect())
}

type Candidate = (usize, ShellingStep);

fn order_candidates(c: &mut [Candidate]) {
    c.sort_by(|x, y| y.1.a.dim().cmp(&x.1.a.dim()).then(x.0.cmp(&y.0)));
}

/// Depth-first search for a shelling, preferring steps with the largest
/// free face and memoizing residual balls that were exhausted.
pub fn find_shelling(ball: &Complex, node_cap: usize) -> Result<ShellingOutcome> {
    let tops = pure_tops(ball)?;
    if tops.is_empty() {
        return Err(Error::Input("empty ball".into()));
    }
    if tops.len() == 1 {
        return Ok(ShellingOutcome::Found(Shelling {
            steps: Vec::new(),
            last: tops[0].clone(),
        }));
    }
    let mut st = BallState::new(tops);

    struct Frame {
        cands: Vec<Candidate>,
        next: usize,
        taken: Option<Candidate>,
    }
    let mut init: Vec<Candidate> = (0..st.tops.len())
        .filter_map(|i| st.best_step(i).map(|s| (i, s)))
        .collect();
    order_candidates(&mut init);
    let mut frames = vec![Frame {
        cands: init,
        next: 0,
        taken: None,
    }];
    let mut failed: HashSet<Vec<u64>> = HashSet::new();
    let mut nodes = 0usize;

    loop {
        let frame = frames.last_mut().expect("nonempty stack");
        if frame.next < frame.cands.len() {
            let (i, step) = frame.cands[frame.next].clone();
            frame.next += 1;
            st.remove(i);
            nodes += 1;
            if st.alive_count == 1 {
                let mut steps: Vec<ShellingStep> = frames
                    .iter()
                    .filter_map(|f| f.taken.as_ref().map(|c| c.1.clone()))
                    .collect();
                steps.push(step);
                let last = st.tops[st.alive.iter().position(|&a| a).expect("one left")].clone();
                return Ok(ShellingOutcome::Found(Shelling { steps, last }));
            }
            if nodes > node_cap {
                return Ok(ShellingOutcome::Undecided { nodes });
            }
            if failed.contains(&st.key()) {
                st.restore(i);
                continue;
            }
            let touched = st.touching(i);
            let mut cands: Vec<Candidate> = frame
                .cands
                .iter()
                .filter(|(j, _)| *j != i && touched.binary_search(j).is_err())
                .cloned()
                .collect();
            for j in touched {
                if let Some(s) = st.best_step(j) {
                    cands.push((j, s));
                }
            }
            order_candidates(&mut cands);
            frames.push(Frame {
                cands,
                next: 0,
                taken: Some((i, step)),
            });
        } else {
            failed.insert(st.key());
            let frame = frames.pop().expect("nonempty stack");
            match frame.taken {
                Some((i, _)) => st.restore(i),
                None => return Ok(ShellingOutcome::NotShellable),
            }
        }
    }
}

/// Removes one top simplex from a sphere and shells the rest, trying top
/// simplexes in lexicographic order.
pub fn find_sphere_shelling(
    sphere: &Complex,
    node_cap: usize,
) -> Result<Option<(Simplex, Shelling)>> {
    let tops = pure_tops(sphere)?;
    let mut undecided = false;
    for t in &tops {
        let ball = Complex::from_maximal(tops.iter().filter(|s| *s != t).cloned());
        match find_shelling(&ball, node_cap)? {
            ShellingOutcome::Found(sh) => return Ok(Some((t.clone(), sh))),
            ShellingOutcome::Undecided { .. } => undecided = true,
            ShellingOutcome::NotShellable => {}
        }
    }
    if undecided {
        return Err(Error::ResourceCap {
            what: "sphere shelling search nodes".into(),
            limit: node_cap,
        });
    }
    Ok(None)
}

/// Replays a shelling from scratch, recomputing the boundary at every step
/// without the incremental bookkeeping used by the search.
pub fn verify_shelling(ball: &Complex, shelling: &Shelling) -> Result<()> {
    let mut tops: Vec<Simplex> = pure_tops(ball)?;
    for (i, step) in shelling.steps.iter().enumerate() {
        let fail = |why: &str| Error::Verification(format!("shelling step {i}: {why}"));
        let t = step.top();
        if !step.a.is_disjoint(&step.b) {
            return Err(fail("A and B intersect"));
        }
        let pos = tops
            .iter()
            .position(|s| *s == t)
            .ok_or_else(|| fail("A ⋆ B is not a top simplex"))?;
        let current = Complex::from_maximal(tops.iter().cloned());
        let boundary = boundary_complex(&current)?;
        if boundary.contains(&step.a) {
            return Err(fail("A lies on the boundary"));
        }
        for f in step.a.proper_faces() {
            if !boundary.contains(&f) {
                return Err(fail("a proper face of A is interior"));
            }
        }
        // B ⋆ ∂A, with ∂ of a vertex taken as the empty face.
        let mut join = vec![step.b.clone()];
        join.extend(step.a.proper_faces().map(|f| f.union(&step.b)));
        for s in join {
            if !boundary.contains(&s) {
                return Err(fail("B ⋆ ∂A is not on the boundary"));
            }
        }
        tops.remove(pos);
    }
    if tops != [shelling.last.clone()] {
        return Err(Error::Verification(
            "shelling does not end at the stated simplex".into(),
        ));
    }
    Ok(())
}

/// Apex of a starring: a fresh label from the ambient counter, or a given
/// label not yet present in the ambient complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Apex {
    Fresh,
    Label(VertexId),
}

/// Replaces the shellable ball `ball` (a full-dimensional subcomplex of the
/// recorder's complex) by `v ⋆ ∂ball` using exactly one move per top simplex.
///
/// The first move cones the final simplex of the shelling; the remaining
/// steps are undone in reverse order by κ(A, v ⋆ B).
pub fn star_with_shelling(
    rec: &mut Recorder,
    ball: &Complex,
    shelling: &Shelling,
    apex: Apex,
) -> Result<VertexId> {
    let v = match apex {
        Apex::Fresh => rec.complex.next_vertex(),
        Apex::Label(v) => v,
    };
    if rec.complex.contains_vertex(v) {
        return Err(Error::AmbientLink(format!(
            "apex {v} already in the ambient complex"
        )));
    }
    let boundary = boundary_complex(ball)?;
    let mut moves = vec![PachnerMove::new(shelling.last.clone(), Simplex::vertex(v))];
    for step in shelling.steps.iter().rev() {
        moves.push(PachnerMove::new(step.a.clone(), step.b.with(v)));
    }
    for mv in moves {
        check_move(&rec.complex, &mv).map_err(|e| Error::AmbientLink(e.to_string()))?;
        rec.apply(mv)?;
    }
    let link = rec.complex.link(&Simplex::vertex(v))?;
    if link != boundary {
        return Err(Error::Verification(format!(
            "lk({v}) differs from the ball boundary"
        )));
    }
    Ok(v)
}

/// Finds a shelling of `ball` and stars it inside `ambient`.
pub fn star_via_shelling(
    ambient: &Complex,
    ball: &Complex,
    apex: Apex,
    node_cap: usize,
) -> Result<(Complex, crate::pachner::MoveSequence, VertexId)> {
    let shelling = match find_shelling(ball, node_cap)? {
        ShellingOutcome::Found(s) => s,
        ShellingOutcome::NotShellable => {
            return Err(Error::ShellingNotFound("ball is not shellable".into()))
        }
        ShellingOutcome::Undecided { nodes } => {
            return Err(Error::ResourceCap {
                what: "shelling search nodes".into(),
                limit: nodes,
            })
        }
    };
    if !ball.is_subcomplex_of(ambient) {
        return Err(Error::AmbientLink(
            "ball is not a subcomplex of the ambient complex".into(),
        ));
    }
    let mut rec = Recorder::new(ambient.clone());
    let v = star_with_shelling(&mut rec, ball, &shelling, apex)?;
    let (k, seq) = rec.finish();
    Ok((k, seq, v))
}

/// Top simplexes of `k` sorted in (dim, lex) order; used to name balls.
pub fn sorted_tops(k: &Complex) -> Vec<Simplex> {
    let mut t = k.top_simplexes();
    t.sort_by(|a, b| dim_lex_key(a).cmp(&dim_lex_key(b)));
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::close_under_faces;
    use crate::iso::find_isomorphism;
    use crate::subdivision::barycentric;

    fn s(v: &[u32]) -> Simplex {
        Simplex::of(v)
    }

    fn boundary_of(top: &[u32]) -> Complex {
        Complex::from_maximal(s(top).facets())
    }

    #[test]
    fn boundaries() {
        let tri = close_under_faces(&[s(&[1, 2, 3])]);
        assert_eq!(boundary_complex(&tri).unwrap().f_vector(), vec![3, 3]);
        let two = close_under_faces(&[s(&[1, 2, 3]), s(&[1, 2, 4])]);
        assert_eq!(
            boundary_complex(&two).unwrap(),
            close_under_faces(&[s(&[1, 3]), s(&[2, 3]), s(&[1, 4]), s(&[2, 4])])
        );
        let b = barycentric(&tri).complex;
        assert_eq!(boundary_complex(&b).unwrap().f_vector(), vec![6, 6]);
    }

    #[test]
    fn two_triangle_steps() {
        let two = close_under_faces(&[s(&[1, 2, 3]), s(&[1, 2, 4])]);
        let steps = elementary_shellings(&two).unwrap();
        // Enumeration oracle: the only interior simplex is the edge {1,2},
        // so A = {1,2} and B is the opposite vertex of either triangle.
        assert_eq!(
            steps,
            vec![
                ShellingStep {
                    a: s(&[1, 2]),
                    b: s(&[3])
                },
                ShellingStep {
                    a: s(&[1, 2]),
                    b: s(&[4])
                },
            ]
        );
        assert!(!steps.iter().any(|st| st.a == s(&[4])));
    }

    #[test]
    fn interior_triangle_not_listed() {
        // A central triangle with a flap glued on each edge: the center has
        // no boundary edge, so it cannot be shed first.
        let k = Complex::from_maximal([s(&[1, 2, 3]), s(&[1, 2, 4]), s(&[2, 3, 5]), s(&[1, 3, 6])]);
        let steps = elementary_shellings(&k).unwrap();
        assert!(!steps.iter().any(|st| st.top() == s(&[1, 2, 3])));
    }

    #[test]
    fn shells_balls_and_spheres() {
        let tri = close_under_faces(&[s(&[1, 2, 3])]);
        let b = barycentric(&barycentric(&tri).complex).complex;
        let sh = find_shelling(&b, DEFAULT_NODE_CAP)
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(sh.len(), 36);
        verify_shelling(&b, &sh).unwrap();

        let sphere = boundary_of(&[1, 2, 3, 4, 5]);
        let (removed, sh) = find_sphere_shelling(&sphere, DEFAULT_NODE_CAP)
            .unwrap()
            .unwrap();
        let ball =
            Complex::from_maximal(sphere.top_simplexes().into_iter().filter(|t| *t != removed));
        verify_shelling(&ball, &sh).unwrap();
    }

    #[test]
    fn sphere_is_not_a_shellable_ball() {
        let sphere = boundary_of(&[1, 2, 3, 4]);
        assert_eq!(
            find_shelling(&sphere, DEFAULT_NODE_CAP).unwrap(),
            ShellingOutcome::NotShellable
        );
    }

    #[test]
    fn verifier_rejects_bad_step() {
        let two = close_under_faces(&[s(&[1, 2, 3]), s(&[1, 2, 4])]);
        let bad = Shelling {
            steps: vec![ShellingStep {
                a: s(&[4]),
                b: s(&[1, 2]),
            }],
            last: s(&[1, 2, 3]),
        };
        assert!(verify_shelling(&two, &bad).is_err());
    }

    #[test]
    fn star_single_and_pair() {
        let ambient = boundary_of(&[1, 2, 3, 4]);
        let ball = close_under_faces(&[s(&[1, 2, 3])]);
        let (k, seq, v) =
            star_via_shelling(&ambient, &ball, Apex::Fresh, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(
            k.link(&Simplex::vertex(v)).unwrap(),
            boundary_complex(&ball).unwrap()
        );

        let ball = close_under_faces(&[s(&[1, 2, 3]), s(&[1, 2, 4])]);
        let (k, seq, v) =
            star_via_shelling(&ambient, &ball, Apex::Fresh, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(seq.len(), 2);
        let cone = close_under_faces(&[s(&[1, 3]), s(&[2, 3]), s(&[1, 4]), s(&[2, 4])])
            .join(&close_under_faces(&[Simplex::vertex(v)]))
            .unwrap();
        assert_eq!(k.star(&Simplex::vertex(v)).unwrap(), cone);
        assert_eq!(seq.replay(&ambient).unwrap(), k);
    }

    #[test]
    fn star_barycentric_triangle_in_subdivided_sphere() {
        let sphere = boundary_of(&[1, 2, 3, 4]);
        let b = barycentric(&sphere);
        let ball = b.restricted(&s(&[1, 2, 3])).unwrap();
        assert_eq!(ball.top_simplexes().len(), 6);
        let (k, seq, v) =
            star_via_shelling(&b.complex, &ball, Apex::Fresh, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(seq.len(), 6);
        let star = k.star(&Simplex::vertex(v)).unwrap();
        let hexagon_cone = {
            let cyc = Complex::from_maximal((0..6u32).map(|i| s(&[100 + i, 100 + (i + 1) % 6])));
            cyc.join(&close_under_faces(&[s(&[200])])).unwrap()
        };
        assert!(find_isomorphism(&star, &hexagon_cone).is_some());
        assert!(k.is_closed_pseudomanifold());
    }
}
