//! Pachner moves κ(A, B): detection, application, inversion and logging.
//!
//! κ(A, B) applies when `lk(A, K) = ∂B` and `B ∉ K`; it deletes every simplex
//! containing `A` and inserts `B ∪ F` for each proper face `F ⊊ A`, the empty
//! face included. Every inserted simplex contains `B`, so `B ∉ K` already
//! rules out re-creating an existing simplex.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::{dim_lex_key, Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::iso::{find_isomorphism, invariant_signature};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PachnerMove {
    #[serde(rename = "A")]
    pub a: Simplex,
    #[serde(rename = "B")]
    pub b: Simplex,
    /// Vertices introduced by the move: `B` itself when it is a vertex.
    #[serde(default)]
    pub fresh: Vec<VertexId>,
}

impl PachnerMove {
    pub fn new(a: Simplex, b: Simplex) -> Self {
        let fresh = if b.len() == 1 {
            b.vertices().to_vec()
        } else {
            Vec::new()
        };
        PachnerMove { a, b, fresh }
    }

    pub fn invert(&self) -> PachnerMove {
        PachnerMove::new(self.b.clone(), self.a.clone())
    }

    /// The vertex deleted by the move, if `A` is a vertex.
    pub fn removed_vertex(&self) -> Option<VertexId> {
        (self.a.len() == 1).then(|| self.a.vertices()[0])
    }

    pub fn added_vertex(&self) -> Option<VertexId> {
        (self.b.len() == 1).then(|| self.b.vertices()[0])
    }
}

/// `B` with `lk(A, K) = ∂B` and `B ∉ K`, if one exists. For a top simplex `A`
/// the answer is the next fresh vertex.
pub fn applicable(k: &Complex, a: &Simplex) -> Result<Option<Simplex>> {
    let link = k.link(a)?;
    let n = k.dimension().expect("nonempty: contains A");
    if a.dim() == n {
        return Ok(link.is_empty().then(|| Simplex::vertex(k.next_vertex())));
    }
    Ok(link_as_boundary(&link, n - a.dim() + 1).filter(|b| !k.contains(b)))
}

/// The simplex `B` on `size` vertices with `link = ∂B`, if the link has that
/// shape.
fn link_as_boundary(link: &Complex, size: usize) -> Option<Simplex> {
    if link.num_vertices() != size || size < 2 {
        return None;
    }
    let expected = (1usize << size) - 2;
    if link.len() != expected {
        return None;
    }
    let b = Simplex::new(link.vertices()).ok()?;
    (!link.contains(&b)).then_some(b)
}

/// Checks every precondition of κ(A, B) on `k`.
pub fn check_move(k: &Complex, mv: &PachnerMove) -> Result<()> {
    let n = k
        .dimension()
        .ok_or_else(|| Error::NotApplicable("empty complex".into()))?;
    if !k.contains(&mv.a) {
        return Err(Error::NotApplicable(format!("A = {} is not in K", mv.a)));
    }
    if !mv.a.is_disjoint(&mv.b) {
        return Err(Error::NotApplicable(format!(
            "A = {} meets B = {}",
            mv.a, mv.b
        )));
    }
    if mv.a.dim() + mv.b.dim() != n {
        return Err(Error::NotApplicable(format!(
            "dim A + dim B = {} differs from n = {n}",
            mv.a.dim() + mv.b.dim()
        )));
    }
    if k.contains(&mv.b) {
        return Err(Error::NotApplicable(format!("B = {} already in K", mv.b)));
    }
    let link = k.link(&mv.a)?;
    if mv.b.len() == 1 {
        if !link.is_empty() {
            return Err(Error::NotApplicable(format!(
                "{} is not a top simplex",
                mv.a
            )));
        }
        if k.contains_vertex(mv.b.vertices()[0]) {
            return Err(Error::NotApplicable(format!(
                "vertex {} is not fresh",
                mv.b
            )));
        }
    } else if link_as_boundary(&link, mv.b.len()).as_ref() != Some(&mv.b) {
        return Err(Error::NotApplicable(format!(
            "lk({}) is not ∂{}",
            mv.a, mv.b
        )));
    }
    Ok(())
}

/// Applies κ(A, B) in place after checking its preconditions.
pub fn apply_in_place(k: &mut Complex, mv: &PachnerMove) -> Result<()> {
    check_move(k, mv)?;
    let doomed: Vec<Simplex> = k.cofaces(&mv.a).into_iter().cloned().collect();
    for s in &doomed {
        k.remove_raw(s);
    }
    k.insert_raw(mv.b.clone());
    for f in mv.a.proper_faces() {
        k.insert_raw(mv.b.union(&f));
    }
    if let Some(v) = mv.added_vertex() {
        k.reserve_labels(VertexId(v.0 + 1));
    }
    Ok(())
}

pub fn apply(k: &Complex, mv: &PachnerMove) -> Result<Complex> {
    let mut out = k.clone();
    apply_in_place(&mut out, mv)?;
    Ok(out)
}

/// Ridge degrees around the simplexes inserted by `mv` (already applied):
/// each ridge of a new top simplex must lie in exactly two top simplexes.
pub fn check_local_pseudomanifold(k: &Complex, mv: &PachnerMove) -> Result<()> {
    let n = k.dimension().unwrap_or(0);
    if n == 0 {
        return k.check_closed_pseudomanifold();
    }
    for f in std::iter::once(None).chain(mv.a.proper_faces().map(Some)) {
        let top = match f {
            None => mv.b.clone(),
            Some(f) => mv.b.union(&f),
        };
        if top.dim() != n {
            continue;
        }
        for ridge in top.facets() {
            let d = k.top_degree(&ridge, n);
            if d != 2 {
                return Err(Error::NotPseudomanifold(format!(
                    "ridge {ridge} has degree {d}"
                )));
            }
        }
    }
    Ok(())
}

/// Every applicable move, ordered by (dim A, vertices of A).
pub fn enumerate_moves(k: &Complex) -> Vec<PachnerMove> {
    let mut simplexes: Vec<&Simplex> = k.iter().collect();
    simplexes.sort_by(|a, b| dim_lex_key(a).cmp(&dim_lex_key(b)));
    simplexes
        .into_iter()
        .filter_map(|a| {
            applicable(k, a)
                .ok()
                .flatten()
                .map(|b| PachnerMove::new(a.clone(), b))
        })
        .collect()
}

/// An ordered log of moves with digests of its endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveSequence {
    pub moves: Vec<PachnerMove>,
    pub start_digest: String,
    pub end_digest: String,
}

impl MoveSequence {
    /// Empty sequence anchored at `k`.
    pub fn empty(k: &Complex) -> Self {
        let d = k.digest();
        MoveSequence {
            moves: Vec::new(),
            start_digest: d.clone(),
            end_digest: d,
        }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Applies the moves to `start`, checking both digests.
    pub fn replay(&self, start: &Complex) -> Result<Complex> {
        self.replay_with(start, |_, _| Ok(()))
    }

    /// As [`MoveSequence::replay`], calling `check` after every move.
    pub fn replay_with<F>(&self, start: &Complex, mut check: F) -> Result<Complex>
    where
        F: FnMut(&Complex, &PachnerMove) -> Result<()>,
    {
        if start.digest() != self.start_digest {
            return Err(Error::Verification("start digest mismatch".into()));
        }
        let mut k = start.clone();
        for (i, mv) in self.moves.iter().enumerate() {
            apply_in_place(&mut k, mv)
                .map_err(|e| Error::Verification(format!("move {i}: {e}")))?;
            check(&k, mv).map_err(|e| Error::Verification(format!("after move {i}: {e}")))?;
        }
        if k.digest() != self.end_digest {
            return Err(Error::Verification("end digest mismatch".into()));
        }
        Ok(k)
    }

    pub fn inverse(&self) -> MoveSequence {
        MoveSequence {
            moves: self.moves.iter().rev().map(PachnerMove::invert).collect(),
            start_digest: self.end_digest.clone(),
            end_digest: self.start_digest.clone(),
        }
    }

    /// `self` followed by `other`; the endpoints must match.
    pub fn then(&self, other: &MoveSequence) -> Result<MoveSequence> {
        if self.end_digest != other.start_digest {
            return Err(Error::Verification("sequences do not chain".into()));
        }
        let mut moves = self.moves.clone();
        moves.extend(other.moves.iter().cloned());
        Ok(MoveSequence {
            moves,
            start_digest: self.start_digest.clone(),
            end_digest: other.end_digest.clone(),
        })
    }

    pub fn removed_vertices(&self) -> BTreeSet<VertexId> {
        self.moves
            .iter()
            .filter_map(PachnerMove::removed_vertex)
            .collect()
    }

    pub fn added_vertices(&self) -> BTreeSet<VertexId> {
        self.moves
            .iter()
            .filter_map(PachnerMove::added_vertex)
            .collect()
    }
}

/// Applies each move in order.
pub fn apply_sequence(k: &Complex, moves: &[PachnerMove]) -> Result<Complex> {
    let mut out = k.clone();
    for mv in moves {
        apply_in_place(&mut out, mv)?;
    }
    Ok(out)
}

/// Records moves applied to a working complex.
#[derive(Debug)]
pub struct Recorder {
    pub complex: Complex,
    start_digest: String,
    moves: Vec<PachnerMove>,
}

impl Recorder {
    pub fn new(k: Complex) -> Self {
        let start_digest = k.digest();
        Recorder {
            complex: k,
            start_digest,
            moves: Vec::new(),
        }
    }

    pub fn apply(&mut self, mv: PachnerMove) -> Result<()> {
        apply_in_place(&mut self.complex, &mv)?;
        self.moves.push(mv);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn finish(self) -> (Complex, MoveSequence) {
        let seq = MoveSequence {
            moves: self.moves,
            start_digest: self.start_digest,
            end_digest: self.complex.digest(),
        };
        (self.complex, seq)
    }
}

/// Breadth-first search for a shortest sequence from `k` to a complex
/// isomorphic to `l`. Visited states are bucketed by an isomorphism
/// invariant and compared by explicit isomorphism inside each bucket.
pub fn bfs_equivalence(
    k: &Complex,
    l: &Complex,
    max_depth: usize,
    state_cap: usize,
) -> Result<Option<MoveSequence>> {
    struct Node {
        complex: Complex,
        parent: Option<(usize, PachnerMove)>,
        depth: usize,
    }
    let target_sig = invariant_signature(l);
    let mut nodes = vec![Node {
        complex: k.clone(),
        parent: None,
        depth: 0,
    }];
    let mut buckets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    buckets.entry(invariant_signature(k)).or_default().push(0);
    let mut queue = VecDeque::from([0usize]);
    let path_to = |nodes: &[Node], mut i: usize| {
        let mut moves = Vec::new();
        while let Some((p, mv)) = &nodes[i].parent {
            moves.push(mv.clone());
            i = *p;
        }
        moves.reverse();
        moves
    };
    while let Some(i) = queue.pop_front() {
        let here = &nodes[i].complex;
        if invariant_signature(here) == target_sig && find_isomorphism(here, l).is_some() {
            let moves = path_to(&nodes, i);
            return Ok(Some(MoveSequence {
                moves,
                start_digest: k.digest(),
                end_digest: here.digest(),
            }));
        }
        if nodes[i].depth == max_depth {
            continue;
        }
        let depth = nodes[i].depth + 1;
        for mv in enumerate_moves(here) {
            let next = apply(&nodes[i].complex, &mv)?;
            let sig = invariant_signature(&next);
            let seen = buckets
                .get(&sig)
                .map(|b| {
                    b.iter()
                        .any(|&j| find_isomorphism(&nodes[j].complex, &next).is_some())
                })
                .unwrap_or(false);
            if seen {
                continue;
            }
            if nodes.len() >= state_cap {
                return Err(Error::ResourceCap {
                    what: "BFS states".into(),
                    limit: state_cap,
                });
            }
            nodes.push(Node {
                complex: next,
                parent: Some((i, mv)),
                depth,
            });
            let j = nodes.len() - 1;
            buckets.entry(sig).or_default().push(j);
            queue.push_back(j);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::close_under_faces;

    fn s(v: &[u32]) -> Simplex {
        Simplex::of(v)
    }

    fn boundary_tetra() -> Complex {
        Complex::from_maximal(s(&[1, 2, 3, 4]).facets())
    }

    #[test]
    fn detects_flip_and_rejects_existing_b() {
        let k = close_under_faces(&[s(&[1, 2, 3]), s(&[1, 2, 4])]);
        assert_eq!(applicable(&k, &s(&[1, 2])).unwrap(), Some(s(&[3, 4])));
        let k2 = close_under_faces(&[s(&[1, 2, 3]), s(&[1, 2, 4]), s(&[3, 4])]);
        assert_eq!(applicable(&k2, &s(&[1, 2])).unwrap(), None);
        assert_eq!(applicable(&k, &s(&[1, 2, 3])).unwrap(), Some(s(&[5])));
        assert!(applicable(&k, &s(&[3, 4])).is_err());
    }

    #[test]
    fn two_two_flip() {
        let k = close_under_faces(&[s(&[1, 2, 3]), s(&[1, 2, 4])]);
        let out = apply(&k, &PachnerMove::new(s(&[1, 2]), s(&[3, 4]))).unwrap();
        assert_eq!(out, close_under_faces(&[s(&[1, 3, 4]), s(&[2, 3, 4])]));
    }

    #[test]
    fn one_three_move_and_back() {
        let k = boundary_tetra();
        let mv = PachnerMove::new(s(&[1, 2, 3]), s(&[5]));
        let out = apply(&k, &mv).unwrap();
        for t in [s(&[1, 2, 5]), s(&[1, 3, 5]), s(&[2, 3, 5])] {
            assert!(out.contains(&t));
        }
        assert!(!out.contains(&s(&[1, 2, 3])));
        assert_eq!(out.f_vector(), vec![5, 9, 6]);
        check_local_pseudomanifold(&out, &mv).unwrap();
        assert_eq!(apply(&out, &mv.invert()).unwrap(), k);
    }

    #[test]
    fn edge_of_tetra_boundary_is_blocked() {
        let k = boundary_tetra();
        assert_eq!(applicable(&k, &s(&[1, 2])).unwrap(), None);
        assert!(apply(&k, &PachnerMove::new(s(&[1, 2]), s(&[3, 4]))).is_err());
    }

    #[test]
    fn inversion_is_involutive() {
        let mv = PachnerMove::new(s(&[1, 2]), s(&[3, 4]));
        assert_eq!(mv.invert(), PachnerMove::new(s(&[3, 4]), s(&[1, 2])));
        assert_eq!(mv.invert().invert(), mv);
    }

    #[test]
    fn bfs_finds_trivial_and_single_moves() {
        let k = boundary_tetra();
        let seq = bfs_equivalence(&k, &k, 2, 1000).unwrap().unwrap();
        assert!(seq.is_empty());
        let expanded = apply(&k, &PachnerMove::new(s(&[1, 2, 3]), s(&[5]))).unwrap();
        let seq = bfs_equivalence(&k, &expanded, 2, 1000).unwrap().unwrap();
        assert_eq!(seq.len(), 1);
        seq.replay(&k).unwrap();
    }

    #[test]
    fn sequence_inverse_round_trip() {
        let k = boundary_tetra();
        let mut rec = Recorder::new(k.clone());
        rec.apply(PachnerMove::new(s(&[1, 2, 3]), s(&[5]))).unwrap();
        rec.apply(PachnerMove::new(s(&[1, 2]), s(&[4, 5]))).unwrap();
        let (end, seq) = rec.finish();
        assert_eq!(seq.replay(&k).unwrap(), end);
        assert_eq!(seq.inverse().replay(&end).unwrap(), k);
        assert!(seq.removed_vertices().is_empty());
        assert_eq!(
            seq.inverse().removed_vertices(),
            BTreeSet::from([VertexId(5)])
        );
    }
}
