//! Isomorphism search between simplicial complexes.
//!
//! Vertices are first partitioned by iterated color refinement over the
//! coface structure, then matched by backtracking in an order that keeps
//! each new vertex adjacent to one already placed.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex::{Complex, Simplex, VertexId};
use crate::error::Result;

/// A vertex bijection inducing a bijection of simplex sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isomorphism {
    pub vertex_map: BTreeMap<VertexId, VertexId>,
}

impl Isomorphism {
    pub fn apply(&self, k: &Complex) -> Result<Complex> {
        k.relabel(&self.vertex_map)
    }

    pub fn inverse(&self) -> Isomorphism {
        Isomorphism {
            vertex_map: self.vertex_map.iter().map(|(a, b)| (*b, *a)).collect(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Isomorphism) -> Option<Isomorphism> {
        let mut m = BTreeMap::new();
        for (a, b) in &self.vertex_map {
            m.insert(*a, *other.vertex_map.get(b)?);
        }
        Some(Isomorphism { vertex_map: m })
    }
}

struct Indexed {
    labels: Vec<VertexId>,
    /// Simplexes of size ≥ 2 through each vertex, as sorted index vectors.
    cofaces: Vec<Vec<Vec<usize>>>,
    neighbors: Vec<Vec<usize>>,
    set: HashSet<Vec<usize>>,
}

impl Indexed {
    fn new(k: &Complex) -> Self {
        let labels: Vec<VertexId> = k.vertices().collect();
        let index: BTreeMap<VertexId, usize> =
            labels.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut cofaces = vec![Vec::new(); labels.len()];
        let mut neighbors = vec![Vec::new(); labels.len()];
        let mut set = HashSet::new();
        for s in k.iter().filter(|s| s.len() >= 2) {
            let idx: Vec<usize> = s.vertices().iter().map(|v| index[v]).collect();
            for &i in &idx {
                cofaces[i].push(idx.clone());
            }
            if idx.len() == 2 {
                neighbors[idx[0]].push(idx[1]);
                neighbors[idx[1]].push(idx[0]);
            }
            set.insert(idx);
        }
        Indexed {
            labels,
            cofaces,
            neighbors,
            set,
        }
    }
}

type RoundSignature = Vec<(u32, Vec<Vec<u32>>)>;

/// One refinement round; returns new colors and the sorted distinct
/// signatures (which two isomorphic complexes must share).
fn refine(ix: &Indexed, colors: &[u32]) -> (Vec<u32>, RoundSignature) {
    let sigs: Vec<(u32, Vec<Vec<u32>>)> = (0..ix.labels.len())
        .map(|v| {
            let mut around: Vec<Vec<u32>> = ix.cofaces[v]
                .iter()
                .map(|s| {
                    let mut c: Vec<u32> =
                        s.iter().filter(|&&u| u != v).map(|&u| colors[u]).collect();
                    c.sort_unstable();
                    c
                })
                .collect();
            around.sort_unstable();
            (colors[v], around)
        })
        .collect();
    let mut distinct = sigs.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let new = sigs
        .iter()
        .map(|s| distinct.binary_search(s).expect("present") as u32)
        .collect();
    (new, distinct)
}

/// Stable vertex colors plus the per-round signature trace.
fn stable_colors(ix: &Indexed) -> (Vec<u32>, Vec<RoundSignature>) {
    let mut colors = vec![0u32; ix.labels.len()];
    let mut classes = 1usize;
    let mut trace = Vec::new();
    loop {
        let (next, sig) = refine(ix, &colors);
        let next_classes = sig.len();
        trace.push(sig);
        colors = next;
        if next_classes <= classes {
            break;
        }
        classes = next_classes;
    }
    (colors, trace)
}

/// Isomorphism-invariant fingerprint: equal for isomorphic complexes.
pub fn invariant_signature(k: &Complex) -> String {
    let ix = Indexed::new(k);
    let (colors, trace) = stable_colors(&ix);
    let mut hist: BTreeMap<u32, usize> = BTreeMap::new();
    for c in colors {
        *hist.entry(c).or_default() += 1;
    }
    let mut h = Sha256::new();
    h.update(format!("{:?}", k.f_vector()));
    h.update(format!("{:?}", trace.last()));
    h.update(format!("{hist:?}"));
    hex::encode(h.finalize())
}

/// Searches for a vertex bijection carrying the simplexes of `k` exactly onto
/// those of `l`.
pub fn find_isomorphism(k: &Complex, l: &Complex) -> Option<Isomorphism> {
    if k.f_vector() != l.f_vector() || k.num_vertices() != l.num_vertices() {
        return None;
    }
    let n = k.num_vertices();
    if n == 0 {
        return Some(Isomorphism {
            vertex_map: BTreeMap::new(),
        });
    }
    let (ki, li) = (Indexed::new(k), Indexed::new(l));
    let (kc, ktrace) = stable_colors(&ki);
    let (lc, ltrace) = stable_colors(&li);
    if ktrace != ltrace {
        return None;
    }

    let mut class_size: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in &kc {
        *class_size.entry(c).or_default() += 1;
    }
    let mut l_by_color: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &c) in lc.iter().enumerate() {
        l_by_color.entry(c).or_default().push(i);
    }

    // Static order: greedily pick the unplaced vertex with most placed
    // neighbors, breaking ties by smaller color class.
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut placed_nbrs = vec![0usize; n];
    let mut anchor: Vec<Option<usize>> = vec![None; n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (std::cmp::Reverse(placed_nbrs[v]), class_size[&kc[v]], v))
            .expect("unplaced vertex");
        placed[v] = true;
        order.push(v);
        for &u in &ki.neighbors[v] {
            placed_nbrs[u] += 1;
            if anchor[u].is_none() {
                anchor[u] = Some(v);
            }
        }
    }

    let mut fwd: Vec<Option<usize>> = vec![None; n];
    let mut inv: Vec<Option<usize>> = vec![None; n];
    let candidates = |level: usize, fwd: &[Option<usize>]| -> Vec<usize> {
        let v = order[level];
        let pool = l_by_color.get(&kc[v]).cloned().unwrap_or_default();
        match anchor[v].and_then(|a| fwd[a]) {
            Some(w) => pool
                .into_iter()
                .filter(|c| li.neighbors[w].contains(c))
                .collect(),
            None => pool,
        }
    };
    let consistent = |v: usize, w: usize, fwd: &[Option<usize>], inv: &[Option<usize>]| -> bool {
        for s in &ki.cofaces[v] {
            let img: Option<Vec<usize>> = s.iter().map(|&u| fwd[u]).collect();
            if let Some(mut img) = img {
                img.sort_unstable();
                if !li.set.contains(&img) {
                    return false;
                }
            }
        }
        for t in &li.cofaces[w] {
            let pre: Option<Vec<usize>> = t.iter().map(|&u| inv[u]).collect();
            if let Some(mut pre) = pre {
                pre.sort_unstable();
                if !ki.set.contains(&pre) {
                    return false;
                }
            }
        }
        true
    };

    let mut cand_lists: Vec<Vec<usize>> = vec![candidates(0, &fwd)];
    let mut next = vec![0usize; n];
    let mut level = 0usize;
    loop {
        if level == n {
            let map: BTreeMap<VertexId, VertexId> = (0..n)
                .map(|v| (ki.labels[v], li.labels[fwd[v].expect("complete")]))
                .collect();
            let iso = Isomorphism { vertex_map: map };
            return match iso.apply(k) {
                Ok(img) if &img == l => Some(iso),
                _ => None,
            };
        }
        let v = order[level];
        if let Some(w) = fwd[v].take() {
            inv[w] = None;
        }
        let mut advanced = false;
        while next[level] < cand_lists[level].len() {
            let w = cand_lists[level][next[level]];
            next[level] += 1;
            if inv[w].is_some() {
                continue;
            }
            fwd[v] = Some(w);
            inv[w] = Some(v);
            if consistent(v, w, &fwd, &inv) {
                advanced = true;
                break;
            }
            fwd[v] = None;
            inv[w] = None;
        }
        if advanced {
            level += 1;
            if level < n {
                next[level] = 0;
                cand_lists.truncate(level);
                cand_lists.push(candidates(level, &fwd));
            }
        } else {
            if level == 0 {
                return None;
            }
            level -= 1;
            cand_lists.truncate(level + 1);
        }
    }
}

/// True when `iso` carries `k` exactly onto `l`.
pub fn verify_isomorphism(k: &Complex, l: &Complex, iso: &Isomorphism) -> bool {
    iso.apply(k).map(|img| &img == l).unwrap_or(false)
}

/// Relabels `k` by `f(v)`; convenience for tests.
pub fn relabel_with(k: &Complex, f: impl Fn(VertexId) -> VertexId) -> Result<Complex> {
    let map = k.vertices().map(|v| (v, f(v))).collect();
    k.relabel(&map)
}

/// Maximal simplexes of `k` mapped through `iso`.
pub fn image_of(iso: &Isomorphism, s: &Simplex) -> Option<Simplex> {
    let vs: Option<Vec<VertexId>> = s
        .vertices()
        .iter()
        .map(|v| iso.vertex_map.get(v).copied())
        .collect();
    Simplex::new(vs?).ok()
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

    fn octahedron() -> Complex {
        let mut tops = Vec::new();
        for a in [1, 2] {
            for b in [3, 4] {
                for c in [5, 6] {
                    tops.push(s(&[a, b, c]));
                }
            }
        }
        Complex::from_maximal(tops)
    }

    /// 7-vertex torus (Möbius–Császár).
    fn torus7() -> Complex {
        let mut tops = Vec::new();
        for i in 0..7u32 {
            tops.push(s(&[i, (i + 1) % 7, (i + 3) % 7]));
            tops.push(s(&[i, (i + 2) % 7, (i + 3) % 7]));
        }
        Complex::from_maximal(tops)
    }

    /// 9-vertex 3×3 grid torus with 18 triangles.
    fn torus9() -> Complex {
        let idx = |i: u32, j: u32| (i % 3) * 3 + (j % 3);
        let mut tops = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                tops.push(s(&[idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]));
                tops.push(s(&[idx(i, j), idx(i, j + 1), idx(i + 1, j + 1)]));
            }
        }
        Complex::from_maximal(tops)
    }

    #[test]
    fn identity_on_tetra_boundary() {
        let k = boundary_tetra();
        let iso = find_isomorphism(&k, &k).expect("self isomorphic");
        assert!(verify_isomorphism(&k, &k, &iso));
    }

    #[test]
    fn tetra_vs_octahedron_absent() {
        assert!(find_isomorphism(&boundary_tetra(), &octahedron()).is_none());
    }

    #[test]
    fn torus_relabelings_compose() {
        let t = torus9();
        let a = relabel_with(&t, |v| VertexId((v.0 * 5 + 2) % 9 + 100)).unwrap();
        let b = relabel_with(&t, |v| VertexId((v.0 * 7 + 4) % 9 + 200)).unwrap();
        let ia = find_isomorphism(&t, &a).unwrap();
        let ib = find_isomorphism(&t, &b).unwrap();
        let iab = find_isomorphism(&a, &b).unwrap();
        assert!(verify_isomorphism(&a, &b, &iab));
        // t → a → b is an isomorphism t → b, whatever maps were found.
        let composed = ia.then(&iab).unwrap();
        assert!(verify_isomorphism(&t, &b, &composed));
        assert!(verify_isomorphism(&t, &b, &ib));
        assert!(verify_isomorphism(&b, &t, &ib.inverse()));
    }

    #[test]
    fn same_f_vector_non_isomorphic() {
        // Both have f = (5, 6, 2): a pair of triangles glued along an edge with
        // a pendant edge, versus two triangles sharing one vertex.
        let a = close_under_faces(&[s(&[1, 2, 3]), s(&[1, 2, 4]), s(&[4, 5])]);
        let b = close_under_faces(&[s(&[1, 2, 3]), s(&[3, 4, 5])]);
        assert_eq!(a.f_vector(), b.f_vector());
        assert!(find_isomorphism(&a, &b).is_none());
    }

    #[test]
    fn seven_vertex_torus_is_not_the_grid() {
        assert!(find_isomorphism(&torus7(), &torus9()).is_none());
        let t = torus7();
        let r = relabel_with(&t, |v| VertexId(6 - v.0)).unwrap();
        assert!(find_isomorphism(&t, &r).is_some());
        assert_eq!(invariant_signature(&t), invariant_signature(&r));
    }
}
