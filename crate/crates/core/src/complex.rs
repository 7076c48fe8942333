//! Abstract simplicial complexes stored as full downward-closed simplex sets.
//!
//! A [`Complex`] keeps every face explicitly, together with an index from
//! each vertex to the simplexes containing it, so that links, stars and the
//! Pachner-move predicates reduce to set lookups. Vertex labels are plain
//! integers; each complex carries a monotone counter used to hand out fresh
//! labels, and that counter never moves backwards when vertices are removed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use smallvec::SmallVec;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

type VertexVec = SmallVec<[VertexId; 5]>;

/// A nonempty, strictly increasing tuple of vertex labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<VertexId>", into = "Vec<VertexId>")]
pub struct Simplex(VertexVec);

impl TryFrom<Vec<VertexId>> for Simplex {
    type Error = Error;

    fn try_from(v: Vec<VertexId>) -> Result<Self> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<VertexId> {
    fn from(s: Simplex) -> Self {
        s.0.into_vec()
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl Simplex {
    /// Builds a simplex from arbitrary-order labels; rejects empty input and
    /// repeated labels.
    pub fn new<I, V>(vertices: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: Into<VertexId>,
    {
        let mut vs: VertexVec = vertices.into_iter().map(Into::into).collect();
        if vs.is_empty() {
            return Err(Error::InvalidSimplex("empty vertex set".into()));
        }
        vs.sort_unstable();
        for w in vs.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidSimplex(format!("repeated vertex {}", w[0])));
            }
        }
        Ok(Simplex(vs))
    }

    /// Convenience constructor for literals in tests and fixtures.
    ///
    /// Panics on invalid input.
    pub fn of(vertices: &[u32]) -> Self {
        Simplex::new(vertices.iter().copied()).expect("valid simplex literal")
    }

    pub fn vertex(v: VertexId) -> Self {
        let mut vs = VertexVec::new();
        vs.push(v);
        Simplex(vs)
    }

    fn from_sorted(vs: VertexVec) -> Self {
        debug_assert!(!vs.is_empty() && vs.windows(2).all(|w| w[0] < w[1]));
        Simplex(vs)
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// True when every vertex of `self` is a vertex of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn is_disjoint(&self, other: &Simplex) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        let mut vs: VertexVec = self.0.iter().chain(other.0.iter()).copied().collect();
        vs.sort_unstable();
        vs.dedup();
        Simplex::from_sorted(vs)
    }

    /// The join `A ⋆ B`, defined only for disjoint simplexes.
    pub fn join(&self, other: &Simplex) -> Result<Simplex> {
        if !self.is_disjoint(other) {
            return Err(Error::InvalidSimplex(format!(
                "join of intersecting simplexes {self} and {other}"
            )));
        }
        Ok(self.union(other))
    }

    /// Vertices of `self` not in `other`; `None` when nothing is left.
    pub fn difference(&self, other: &Simplex) -> Option<Simplex> {
        let vs: VertexVec = self
            .0
            .iter()
            .copied()
            .filter(|v| !other.contains(*v))
            .collect();
        if vs.is_empty() {
            None
        } else {
            Some(Simplex::from_sorted(vs))
        }
    }

    pub fn without(&self, v: VertexId) -> Option<Simplex> {
        let vs: VertexVec = self.0.iter().copied().filter(|w| *w != v).collect();
        if vs.is_empty() {
            None
        } else {
            Some(Simplex::from_sorted(vs))
        }
    }

    pub fn with(&self, v: VertexId) -> Simplex {
        let mut vs = self.0.clone();
        match vs.binary_search(&v) {
            Ok(_) => {}
            Err(pos) => vs.insert(pos, v),
        }
        Simplex::from_sorted(vs)
    }

    /// The sub-simplex selected by the bits of `mask`; `None` for mask 0.
    pub fn subset(&self, mask: u32) -> Option<Simplex> {
        let vs: VertexVec = self
            .0
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| *v)
            .collect();
        if vs.is_empty() {
            None
        } else {
            Some(Simplex::from_sorted(vs))
        }
    }

    /// All nonempty faces, including the simplex itself.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let full = (1u32 << self.len()) - 1;
        (1..=full).filter_map(move |m| self.subset(m))
    }

    /// All nonempty proper faces (the simplexes of `∂A`).
    pub fn proper_faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let full = (1u32 << self.len()) - 1;
        (1..full).filter_map(move |m| self.subset(m))
    }

    /// Codimension-one faces; empty for a vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.len() == 1 {
            return Vec::new();
        }
        self.0.iter().filter_map(|v| self.without(*v)).collect()
    }

    pub fn labels(&self) -> Vec<u32> {
        self.0.iter().map(|v| v.0).collect()
    }
}

/// Orders simplexes by dimension first, then lexicographically.
pub fn dim_lex_key(s: &Simplex) -> (usize, &[VertexId]) {
    (s.dim(), s.vertices())
}

/// A finite abstract simplicial complex.
#[derive(Clone, Debug, Default)]
pub struct Complex {
    simplexes: BTreeSet<Simplex>,
    cofaces: BTreeMap<VertexId, BTreeSet<Simplex>>,
    dim_counts: Vec<u64>,
    next_vertex: u32,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.simplexes == other.simplexes
    }
}

impl Eq for Complex {}

/// Serialized form: the maximal simplexes plus redundant fields that the
/// loader cross-checks.
#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    dimension: Option<usize>,
    vertices: Vec<VertexId>,
    maximal_simplexes: Vec<Simplex>,
    /// Only present when the fresh-label counter is ahead of the labels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    next_vertex: Option<VertexId>,
}

impl Serialize for Complex {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let default_next = self.vertices().last().map_or(0, |v| v.0 + 1);
        ComplexRepr {
            dimension: self.dimension(),
            vertices: self.vertices().collect(),
            maximal_simplexes: self.maximal_simplexes(),
            next_vertex: (self.next_vertex > default_next).then_some(VertexId(self.next_vertex)),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ComplexRepr::deserialize(de)?;
        let mut k = Complex::from_maximal(r.maximal_simplexes);
        if k.dimension() != r.dimension {
            return Err(D::Error::custom(format!(
                "declared dimension {:?} but simplexes give {:?}",
                r.dimension,
                k.dimension()
            )));
        }
        let listed: BTreeSet<VertexId> = r.vertices.into_iter().collect();
        if !listed.iter().copied().eq(k.vertices()) {
            return Err(D::Error::custom("vertex list does not match the simplexes"));
        }
        if let Some(v) = r.next_vertex {
            k.reserve_labels(v);
        }
        Ok(k)
    }
}

/// Smallest downward-closed complex containing the given simplexes.
pub fn close_under_faces<'a, I>(maximal: I) -> Complex
where
    I: IntoIterator<Item = &'a Simplex>,
{
    let mut k = Complex::new();
    for s in maximal {
        k.insert_with_faces(s);
    }
    k
}

impl Complex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_maximal<I>(maximal: I) -> Self
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut k = Complex::new();
        for s in maximal {
            k.insert_with_faces(&s);
        }
        k
    }

    /// Builds from a set that the caller guarantees is downward closed.
    pub fn from_closed_set<I>(simplexes: I) -> Result<Self>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut k = Complex::new();
        for s in simplexes {
            k.insert_raw(s);
        }
        if !k.is_downward_closed() {
            return Err(Error::Input("simplex set is not closed under faces".into()));
        }
        Ok(k)
    }

    pub fn len(&self) -> usize {
        self.simplexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplexes.is_empty()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplexes.contains(s)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.cofaces.contains_key(&v)
    }

    /// Iterates simplexes in lexicographic order of their vertex tuples.
    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.simplexes.iter()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.cofaces.keys().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.cofaces.len()
    }

    /// Maximal simplex dimension; `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.dim_counts.iter().rposition(|&c| c > 0)
    }

    /// Label that the next call to [`Complex::fresh_vertex`] will hand out.
    pub fn next_vertex(&self) -> VertexId {
        VertexId(self.next_vertex)
    }

    pub fn fresh_vertex(&mut self) -> VertexId {
        let v = VertexId(self.next_vertex);
        self.next_vertex += 1;
        v
    }

    /// Moves the fresh-label counter to at least `label`.
    pub fn reserve_labels(&mut self, label: VertexId) {
        self.next_vertex = self.next_vertex.max(label.0);
    }

    /// Inserts one simplex without adding its faces. Returns false if present.
    pub fn insert_raw(&mut self, s: Simplex) -> bool {
        if self.simplexes.contains(&s) {
            return false;
        }
        let d = s.dim();
        if self.dim_counts.len() <= d {
            self.dim_counts.resize(d + 1, 0);
        }
        self.dim_counts[d] += 1;
        for v in s.vertices() {
            self.next_vertex = self.next_vertex.max(v.0 + 1);
            self.cofaces.entry(*v).or_default().insert(s.clone());
        }
        self.simplexes.insert(s);
        true
    }

    /// Removes one simplex, leaving its faces. Returns false if absent.
    pub fn remove_raw(&mut self, s: &Simplex) -> bool {
        if !self.simplexes.remove(s) {
            return false;
        }
        self.dim_counts[s.dim()] -= 1;
        for v in s.vertices() {
            if let Some(set) = self.cofaces.get_mut(v) {
                set.remove(s);
                if set.is_empty() {
                    self.cofaces.remove(v);
                }
            }
        }
        true
    }

    pub fn insert_with_faces(&mut self, s: &Simplex) {
        if self.contains(s) {
            return;
        }
        for f in s.faces() {
            self.insert_raw(f);
        }
    }

    /// Every simplex containing `a` (including `a` itself when present).
    pub fn cofaces(&self, a: &Simplex) -> Vec<&Simplex> {
        let mut best: Option<&BTreeSet<Simplex>> = None;
        for v in a.vertices() {
            match self.cofaces.get(v) {
                None => return Vec::new(),
                Some(set) => {
                    if best.map_or(true, |b| set.len() < b.len()) {
                        best = Some(set);
                    }
                }
            }
        }
        best.map(|set| set.iter().filter(|s| a.is_face_of(s)).collect())
            .unwrap_or_default()
    }

    /// Simplexes containing the vertex `v`.
    pub fn vertex_cofaces(&self, v: VertexId) -> impl Iterator<Item = &Simplex> {
        self.cofaces.get(&v).into_iter().flat_map(|s| s.iter())
    }

    /// Vertices joined to `v` by an edge.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.vertex_cofaces(v)
            .filter(|s| s.len() == 2)
            .map(|s| {
                if s.vertices()[0] == v {
                    s.vertices()[1]
                } else {
                    s.vertices()[0]
                }
            })
            .collect()
    }

    /// `lk(A, K) = { B ∈ K : A ∩ B = ∅, A ∪ B ∈ K }`.
    pub fn link(&self, a: &Simplex) -> Result<Complex> {
        if !self.contains(a) {
            return Err(Error::NotInComplex(a.clone()));
        }
        let mut l = Complex::new();
        for s in self.cofaces(a) {
            if let Some(b) = s.difference(a) {
                l.insert_raw(b);
            }
        }
        l.next_vertex = l.next_vertex.max(self.next_vertex);
        Ok(l)
    }

    /// Closed star `st(A, K) = A ⋆ lk(A, K)`.
    pub fn star(&self, a: &Simplex) -> Result<Complex> {
        if !self.contains(a) {
            return Err(Error::NotInComplex(a.clone()));
        }
        let mut st = Complex::new();
        for s in self.cofaces(a) {
            st.insert_with_faces(s);
        }
        st.next_vertex = st.next_vertex.max(self.next_vertex);
        Ok(st)
    }

    /// `{A ∪ B : A ∈ K ∪ {∅}, B ∈ L ∪ {∅}}` minus the empty simplex.
    pub fn join(&self, other: &Complex) -> Result<Complex> {
        let shared = self
            .vertices()
            .filter(|v| other.contains_vertex(*v))
            .count();
        if shared > 0 {
            return Err(Error::OverlappingJoin(shared));
        }
        let mut j = Complex::new();
        for a in self.iter() {
            j.insert_raw(a.clone());
        }
        for b in other.iter() {
            j.insert_raw(b.clone());
        }
        for a in self.iter() {
            for b in other.iter() {
                j.insert_raw(a.union(b));
            }
        }
        j.next_vertex = j.next_vertex.max(self.next_vertex).max(other.next_vertex);
        Ok(j)
    }

    /// Number of simplexes in each dimension `0..=dim`.
    pub fn f_vector(&self) -> Vec<u64> {
        match self.dimension() {
            None => Vec::new(),
            Some(n) => self.dim_counts[..=n].to_vec(),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Simplexes of dimension `d`, in lexicographic order.
    pub fn simplexes_of_dim(&self, d: usize) -> Vec<Simplex> {
        self.simplexes
            .iter()
            .filter(|s| s.dim() == d)
            .cloned()
            .collect()
    }

    /// Simplexes of the top dimension.
    pub fn top_simplexes(&self) -> Vec<Simplex> {
        match self.dimension() {
            None => Vec::new(),
            Some(n) => self.simplexes_of_dim(n),
        }
    }

    pub fn is_maximal(&self, s: &Simplex) -> bool {
        !self.cofaces(s).iter().any(|c| c.len() > s.len())
    }

    pub fn maximal_simplexes(&self) -> Vec<Simplex> {
        self.simplexes
            .iter()
            .filter(|s| self.is_maximal(s))
            .cloned()
            .collect()
    }

    pub fn is_pure(&self) -> bool {
        match self.dimension() {
            None => true,
            Some(n) => self
                .simplexes
                .iter()
                .all(|s| s.dim() == n || !self.is_maximal(s)),
        }
    }

    pub fn is_downward_closed(&self) -> bool {
        self.simplexes
            .iter()
            .all(|s| s.facets().iter().all(|f| self.contains(f)))
    }

    /// Pure, every ridge in exactly two top simplexes, and strongly connected
    /// through ridges. A pair of points counts as the closed 0-manifold.
    pub fn check_closed_pseudomanifold(&self) -> Result<()> {
        let n = self
            .dimension()
            .ok_or_else(|| Error::NotPseudomanifold("empty complex".into()))?;
        if n == 0 {
            return if self.num_vertices() == 2 {
                Ok(())
            } else {
                Err(Error::NotPseudomanifold(format!(
                    "0-dimensional with {} points",
                    self.num_vertices()
                )))
            };
        }
        if !self.is_pure() {
            return Err(Error::NotPseudomanifold("not pure".into()));
        }
        let tops = self.top_simplexes();
        let index: BTreeMap<&Simplex, usize> =
            tops.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut parent: Vec<usize> = (0..tops.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for ridge in self.simplexes.iter().filter(|s| s.dim() + 1 == n) {
            let around: Vec<&Simplex> = self
                .cofaces(ridge)
                .into_iter()
                .filter(|c| c.dim() == n)
                .collect();
            if around.len() != 2 {
                return Err(Error::NotPseudomanifold(format!(
                    "ridge {ridge} lies in {} top simplexes",
                    around.len()
                )));
            }
            let (a, b) = (
                find(&mut parent, index[around[0]]),
                find(&mut parent, index[around[1]]),
            );
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..tops.len()).any(|i| find(&mut parent, i) != root) {
            return Err(Error::NotPseudomanifold("not strongly connected".into()));
        }
        Ok(())
    }

    pub fn is_closed_pseudomanifold(&self) -> bool {
        self.check_closed_pseudomanifold().is_ok()
    }

    /// Number of top-dimensional simplexes (dimension `n`) containing `s`.
    pub fn top_degree(&self, s: &Simplex, n: usize) -> usize {
        self.cofaces(s).iter().filter(|c| c.dim() == n).count()
    }

    /// Applies a vertex relabeling. Every vertex must be mapped, injectively.
    pub fn relabel(&self, map: &BTreeMap<VertexId, VertexId>) -> Result<Complex> {
        let image: BTreeSet<VertexId> = self
            .vertices()
            .map(|v| {
                map.get(&v)
                    .copied()
                    .ok_or_else(|| Error::Input(format!("vertex {v} unmapped")))
            })
            .collect::<Result<_>>()?;
        if image.len() != self.num_vertices() {
            return Err(Error::Input("relabeling is not injective".into()));
        }
        let mut k = Complex::new();
        for s in self.iter() {
            k.insert_raw(Simplex::new(s.vertices().iter().map(|v| map[v]))?);
        }
        Ok(k)
    }

    /// Canonical text form: sorted maximal simplexes, one per line.
    pub fn canonical_string(&self) -> String {
        let mut out = String::new();
        let mut maximal = self.maximal_simplexes();
        maximal.sort_by(|a, b| dim_lex_key(a).cmp(&dim_lex_key(b)));
        for s in maximal {
            let labels: Vec<String> = s.vertices().iter().map(|v| v.0.to_string()).collect();
            out.push_str(&labels.join(" "));
            out.push('\n');
        }
        out
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_string().as_bytes()))
    }

    /// True when every simplex of `self` belongs to `other`.
    pub fn is_subcomplex_of(&self, other: &Complex) -> bool {
        self.simplexes.iter().all(|s| other.contains(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boundary_tetra() -> Complex {
        Complex::from_maximal(Simplex::of(&[1, 2, 3, 4]).facets())
    }

    /// Brute-force link: scan every subset of the vertex set.
    fn link_by_enumeration(k: &Complex, a: &Simplex) -> BTreeSet<Simplex> {
        let verts: Vec<u32> = k.vertices().map(|v| v.0).collect();
        let mut out = BTreeSet::new();
        for mask in 1u32..(1 << verts.len()) {
            let b: Vec<u32> = (0..verts.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| verts[i])
                .collect();
            let b = Simplex::of(&b);
            if b.is_disjoint(a) && k.contains(&b.union(a)) {
                out.insert(b);
            }
        }
        out
    }

    #[test]
    fn closure_counts() {
        assert_eq!(close_under_faces(&[Simplex::of(&[1, 2, 3])]).len(), 7);
        assert_eq!(close_under_faces(&[Simplex::of(&[1])]).len(), 1);
        assert_eq!(
            close_under_faces(&[Simplex::of(&[1, 2]), Simplex::of(&[2, 3])]).len(),
            5
        );
    }

    #[test]
    fn simplex_validation() {
        assert!(Simplex::new(Vec::<u32>::new()).is_err());
        assert!(Simplex::new([3u32, 1, 3]).is_err());
        assert_eq!(Simplex::new([3u32, 1, 2]).unwrap(), Simplex::of(&[1, 2, 3]));
        assert!(serde_json::from_str::<Simplex>("[2,2]").is_err());
    }

    #[test]
    fn links_of_triangle_and_tetra_boundary() {
        let tri = close_under_faces(&[Simplex::of(&[1, 2, 3])]);
        let l = tri.link(&Simplex::of(&[1])).unwrap();
        assert_eq!(l, close_under_faces(&[Simplex::of(&[2, 3])]));

        let k = boundary_tetra();
        let l = k.link(&Simplex::of(&[1])).unwrap();
        let oracle = link_by_enumeration(&k, &Simplex::of(&[1]));
        assert_eq!(l.iter().cloned().collect::<BTreeSet<_>>(), oracle);
        assert_eq!(l.f_vector(), vec![3, 3]);

        let l = k.link(&Simplex::of(&[1, 2])).unwrap();
        assert_eq!(
            l.iter().cloned().collect::<BTreeSet<_>>(),
            link_by_enumeration(&k, &Simplex::of(&[1, 2]))
        );
        assert_eq!(l.f_vector(), vec![2]);

        assert!(matches!(
            k.link(&Simplex::of(&[1, 2, 3, 4])),
            Err(Error::NotInComplex(_))
        ));
    }

    #[test]
    fn stars() {
        let tri = close_under_faces(&[Simplex::of(&[1, 2, 3])]);
        assert_eq!(tri.star(&Simplex::of(&[1])).unwrap(), tri);
        let two = close_under_faces(&[Simplex::of(&[1, 2, 3]), Simplex::of(&[2, 3, 4])]);
        assert_eq!(two.star(&Simplex::of(&[2, 3])).unwrap(), two);
        let k = boundary_tetra();
        let st = k.star(&Simplex::of(&[1])).unwrap();
        let expect = close_under_faces(&[
            Simplex::of(&[1, 2, 3]),
            Simplex::of(&[1, 2, 4]),
            Simplex::of(&[1, 3, 4]),
        ]);
        assert_eq!(st, expect);
    }

    #[test]
    fn joins() {
        let p = close_under_faces(&[Simplex::of(&[1])]);
        let q = close_under_faces(&[Simplex::of(&[2])]);
        assert_eq!(
            p.join(&q).unwrap(),
            close_under_faces(&[Simplex::of(&[1, 2])])
        );

        let cycle = close_under_faces(&[
            Simplex::of(&[2, 3]),
            Simplex::of(&[3, 4]),
            Simplex::of(&[2, 4]),
        ]);
        let cone = p.join(&cycle).unwrap();
        assert_eq!(cone.f_vector(), vec![4, 6, 3]);

        let e1 = close_under_faces(&[Simplex::of(&[1, 2])]);
        let e2 = close_under_faces(&[Simplex::of(&[3, 4])]);
        assert_eq!(
            e1.join(&e2).unwrap(),
            close_under_faces(&[Simplex::of(&[1, 2, 3, 4])])
        );
        assert!(matches!(e1.join(&e1), Err(Error::OverlappingJoin(2))));
    }

    #[test]
    fn f_vector_and_euler() {
        let k = boundary_tetra();
        assert_eq!(k.f_vector(), vec![4, 6, 4]);
        assert_eq!(k.euler_characteristic(), 2);
        assert!(k.is_closed_pseudomanifold());
        let tri = close_under_faces(&[Simplex::of(&[1, 2, 3])]);
        assert!(!tri.is_closed_pseudomanifold());
    }

    #[test]
    fn mobius_strip_euler() {
        // 5-triangle Möbius band on vertices 1..5.
        let strip = close_under_faces(&[
            Simplex::of(&[1, 2, 3]),
            Simplex::of(&[2, 3, 4]),
            Simplex::of(&[3, 4, 5]),
            Simplex::of(&[4, 5, 1]),
            Simplex::of(&[5, 1, 2]),
        ]);
        // Direct alternating sum over an explicit enumeration of the faces.
        let mut counts = [0i64; 3];
        for s in strip.iter() {
            counts[s.dim()] += 1;
        }
        assert_eq!(
            strip.euler_characteristic(),
            counts[0] - counts[1] + counts[2]
        );
        assert_eq!(strip.euler_characteristic(), 0);
        assert!(!strip.is_closed_pseudomanifold());
    }

    #[test]
    fn fresh_labels_are_monotone() {
        let mut k = boundary_tetra();
        assert_eq!(k.next_vertex(), VertexId(5));
        for s in k
            .cofaces(&Simplex::of(&[4]))
            .into_iter()
            .cloned()
            .collect::<Vec<_>>()
        {
            k.remove_raw(&s);
        }
        assert!(!k.contains_vertex(VertexId(4)));
        assert_eq!(k.fresh_vertex(), VertexId(5));
        assert_eq!(k.fresh_vertex(), VertexId(6));
    }

    #[test]
    fn digest_is_stable_and_label_sensitive() {
        let k = boundary_tetra();
        let k2 = Complex::from_maximal(k.maximal_simplexes().into_iter().rev());
        assert_eq!(k.digest(), k2.digest());
        let mut map = BTreeMap::new();
        for v in k.vertices() {
            map.insert(v, VertexId(v.0 + 10));
        }
        assert_ne!(k.digest(), k.relabel(&map).unwrap().digest());
    }
}
