//! Barycentric, iterated and partial subdivisions with carrier tracking.
//!
//! Carriers are stored per vertex: the carrier of a vertex is the smallest
//! parent simplex containing it, and the carrier of a simplex is the union of
//! its vertex carriers. Every subdivision built here refines each parent face
//! by a subcomplex, which is what makes the union rule exact.

use std::collections::BTreeMap;

use crate::complex::{dim_lex_key, Complex, Simplex, VertexId};
use crate::error::{Error, Result};

/// Default ceiling on the number of simplexes an iterated subdivision may
/// produce.
pub const DEFAULT_SIMPLEX_CAP: usize = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdividedComplex {
    pub complex: Complex,
    pub parent: Complex,
    /// Smallest parent simplex containing each vertex of `complex`.
    pub vertex_carrier: BTreeMap<VertexId, Simplex>,
}

/// Positive-dimensional simplexes of `k` in (dim, lex) order.
fn positive_simplexes(k: &Complex) -> Vec<Simplex> {
    let mut v: Vec<Simplex> = k.iter().filter(|s| s.dim() > 0).cloned().collect();
    v.sort_by(|a, b| dim_lex_key(a).cmp(&dim_lex_key(b)));
    v
}

/// Barycenter labels for every positive-dimensional simplex of `k`, assigned
/// consecutively from `base` in (dim, lex) order.
pub fn barycenter_labels(k: &Complex, base: VertexId) -> BTreeMap<Simplex, VertexId> {
    positive_simplexes(k)
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, VertexId(base.0 + i as u32)))
        .collect()
}

impl SubdividedComplex {
    /// The trivial subdivision of `k` by itself.
    pub fn identity(k: &Complex) -> Self {
        SubdividedComplex {
            complex: k.clone(),
            parent: k.clone(),
            vertex_carrier: k.vertices().map(|v| (v, Simplex::vertex(v))).collect(),
        }
    }

    pub fn carrier(&self, s: &Simplex) -> Result<Simplex> {
        let mut it = s.vertices().iter();
        let first = it.next().expect("nonempty simplex");
        let mut c = self
            .vertex_carrier
            .get(first)
            .ok_or_else(|| Error::Carrier(format!("vertex {first} has no carrier")))?
            .clone();
        for v in it {
            let cv = self
                .vertex_carrier
                .get(v)
                .ok_or_else(|| Error::Carrier(format!("vertex {v} has no carrier")))?;
            c = c.union(cv);
        }
        if !self.parent.contains(&c) {
            return Err(Error::Carrier(format!(
                "carrier {c} of {s} is not a parent simplex"
            )));
        }
        Ok(c)
    }

    /// Carrier of every simplex of the subdivision.
    pub fn carriers(&self) -> Result<BTreeMap<Simplex, Simplex>> {
        self.complex
            .iter()
            .map(|s| Ok((s.clone(), self.carrier(s)?)))
            .collect()
    }

    /// The subdivision of a single parent simplex: simplexes carried by `a`
    /// or one of its faces.
    pub fn restricted(&self, a: &Simplex) -> Result<Complex> {
        let mut out = Complex::new();
        for s in self.complex.iter() {
            if self.carrier(s)?.is_face_of(a) {
                out.insert_raw(s.clone());
            }
        }
        Ok(out)
    }

    /// Structural checks: carriers are parent simplexes of dimension at least
    /// that of the child, original vertices keep their labels, and every
    /// parent simplex carries a simplex of its own dimension.
    pub fn validate(&self) -> Result<()> {
        let carriers = self.carriers()?;
        for (s, c) in &carriers {
            if c.dim() < s.dim() {
                return Err(Error::Carrier(format!(
                    "{s} has lower-dimensional carrier {c}"
                )));
            }
            if s.len() == 1 && c.len() == 1 && s != c {
                return Err(Error::Carrier(format!(
                    "vertex {s} carried by different vertex {c}"
                )));
            }
        }
        let mut covered: BTreeMap<&Simplex, bool> =
            self.parent.iter().map(|a| (a, false)).collect();
        for (s, c) in &carriers {
            if s.dim() == c.dim() {
                covered.insert(c, true);
            }
        }
        if let Some((a, _)) = covered.iter().find(|(_, ok)| !**ok) {
            return Err(Error::Carrier(format!(
                "parent simplex {a} is not subdivided"
            )));
        }
        Ok(())
    }

    /// `s_i`: the number of `i`-simplexes carried by an `i`-simplex of the
    /// parent, for `i = 0..=n`.
    pub fn skeleton_counts(&self) -> Result<Vec<u64>> {
        let n = self.parent.dimension().unwrap_or(0);
        let mut s = vec![0u64; n + 1];
        for simplex in self.complex.iter() {
            let c = self.carrier(simplex)?;
            if c.dim() == simplex.dim() {
                s[c.dim()] += 1;
            }
        }
        Ok(s)
    }

    /// Re-expresses carriers of `self` (a subdivision of `outer.complex`) in
    /// terms of `outer.parent`.
    pub fn compose(&self, outer: &SubdividedComplex) -> Result<SubdividedComplex> {
        if self.parent != outer.complex {
            return Err(Error::Carrier(
                "composition of mismatched subdivisions".into(),
            ));
        }
        let mut vertex_carrier = BTreeMap::new();
        for (v, c) in &self.vertex_carrier {
            vertex_carrier.insert(*v, outer.carrier(c)?);
        }
        Ok(SubdividedComplex {
            complex: self.complex.clone(),
            parent: outer.parent.clone(),
            vertex_carrier,
        })
    }
}

/// `β K` with barycenter labels starting at the complex's fresh counter.
pub fn barycentric(k: &Complex) -> SubdividedComplex {
    barycentric_with_base(k, k.next_vertex())
}

/// `β K` with barycenters labeled from `base` in (dim, lex) order of the
/// simplexes of `K`. Original vertices keep their labels.
pub fn barycentric_with_base(k: &Complex, base: VertexId) -> SubdividedComplex {
    let labels = barycenter_labels(k, base);
    let label_of = |s: &Simplex| -> VertexId {
        if s.len() == 1 {
            s.vertices()[0]
        } else {
            labels[s]
        }
    };
    let mut out = Complex::new();
    for top in k.maximal_simplexes() {
        let verts = top.vertices().to_vec();
        let mut perm: Vec<usize> = (0..verts.len()).collect();
        loop {
            // Flag {v_p0} ⊂ {v_p0, v_p1} ⊂ … gives one top simplex of βK.
            let mut prefix = Simplex::vertex(verts[perm[0]]);
            let mut flag = vec![label_of(&prefix)];
            for &i in &perm[1..] {
                prefix = prefix.with(verts[i]);
                flag.push(label_of(&prefix));
            }
            out.insert_with_faces(&Simplex::new(flag).expect("distinct barycenters"));
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }
    let mut vertex_carrier: BTreeMap<VertexId, Simplex> =
        k.vertices().map(|v| (v, Simplex::vertex(v))).collect();
    for (s, v) in labels {
        vertex_carrier.insert(v, s);
    }
    out.reserve_labels(k.next_vertex());
    SubdividedComplex {
        complex: out,
        parent: k.clone(),
        vertex_carrier,
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// `β^m K` with carriers composed into `K`.
pub fn iterated_barycentric(k: &Complex, m: usize, cap: usize) -> Result<SubdividedComplex> {
    let mut acc = SubdividedComplex::identity(k);
    let n = k.dimension().unwrap_or(0);
    for _ in 0..m {
        let predicted = acc
            .complex
            .len()
            .saturating_mul(factorial(n + 1))
            .saturating_mul(1 << (n + 1));
        if predicted > cap {
            return Err(Error::ResourceCap {
                what: "iterated barycentric subdivision".into(),
                limit: cap,
            });
        }
        let step = barycentric(&acc.complex);
        acc = step.compose(&acc)?;
    }
    Ok(acc)
}

/// `β^α_r K`: keeps α on simplexes of dimension ≤ r and cones every higher
/// simplex over its already subdivided boundary, by increasing dimension.
///
/// Apex labels come from `apex_labels` when given; otherwise they are
/// allocated above both `K` and `α` in (dim, lex) order.
pub fn partial_relative(
    k: &Complex,
    alpha: &SubdividedComplex,
    r: usize,
    apex_labels: Option<&BTreeMap<Simplex, VertexId>>,
) -> Result<SubdividedComplex> {
    if alpha.parent != *k {
        return Err(Error::Carrier("α does not subdivide K".into()));
    }
    let n = k.dimension().unwrap_or(0);
    if r > n {
        return Err(Error::Input(format!("r = {r} exceeds dimension {n}")));
    }
    let mut out = Complex::new();
    let mut vertex_carrier = BTreeMap::new();
    let mut by_carrier: BTreeMap<Simplex, Vec<Simplex>> = BTreeMap::new();
    for s in alpha.complex.iter() {
        let c = alpha.carrier(s)?;
        if c.dim() <= r {
            if s.len() == 1 {
                vertex_carrier.insert(s.vertices()[0], c.clone());
            }
            out.insert_raw(s.clone());
            by_carrier.entry(c).or_default().push(s.clone());
        }
    }
    let mut next = VertexId(k.next_vertex().0.max(alpha.complex.next_vertex().0));
    let mut highers: Vec<Simplex> = k.iter().filter(|s| s.dim() > r).cloned().collect();
    highers.sort_by(|a, b| dim_lex_key(a).cmp(&dim_lex_key(b)));
    for a in highers {
        let apex = match apex_labels {
            Some(m) => *m
                .get(&a)
                .ok_or_else(|| Error::Carrier(format!("no apex label for {a}")))?,
            None => {
                let v = next;
                next = VertexId(next.0 + 1);
                v
            }
        };
        if out.contains_vertex(apex) {
            return Err(Error::Carrier(format!("apex label {apex} already in use")));
        }
        let mut cone = vec![Simplex::vertex(apex)];
        for f in a.proper_faces() {
            if let Some(list) = by_carrier.get(&f) {
                for s in list {
                    cone.push(s.with(apex));
                }
            }
        }
        for s in &cone {
            out.insert_raw(s.clone());
        }
        vertex_carrier.insert(apex, a.clone());
        by_carrier.insert(a, cone);
    }
    out.reserve_labels(next);
    Ok(SubdividedComplex {
        complex: out,
        parent: k.clone(),
        vertex_carrier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::close_under_faces;
    use crate::iso::find_isomorphism;

    fn s(v: &[u32]) -> Simplex {
        Simplex::of(v)
    }

    fn tri() -> Complex {
        close_under_faces(&[s(&[1, 2, 3])])
    }

    fn boundary_tetra() -> Complex {
        Complex::from_maximal(s(&[1, 2, 3, 4]).facets())
    }

    #[test]
    fn barycentric_counts() {
        let b = barycentric(&tri());
        assert_eq!(b.complex.f_vector(), vec![7, 12, 6]);
        b.validate().unwrap();
        let single = close_under_faces(&[s(&[5])]);
        assert_eq!(barycentric(&single).complex, single);
        assert_eq!(barycentric(&boundary_tetra()).complex.f_vector()[2], 24);
    }

    #[test]
    fn iterated_counts() {
        let k = boundary_tetra();
        assert_eq!(
            iterated_barycentric(&k, 0, DEFAULT_SIMPLEX_CAP)
                .unwrap()
                .complex,
            k
        );
        let b2 = iterated_barycentric(&tri(), 2, DEFAULT_SIMPLEX_CAP).unwrap();
        assert_eq!(b2.complex.f_vector()[2], 36);
        b2.validate().unwrap();
        let tet = close_under_faces(&[s(&[1, 2, 3, 4])]);
        assert_eq!(
            iterated_barycentric(&tet, 1, DEFAULT_SIMPLEX_CAP)
                .unwrap()
                .complex
                .f_vector()[3],
            24
        );
        assert!(matches!(
            iterated_barycentric(&tet, 3, 1000),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn skeleton_counts_follow_factorial_law() {
        let b = barycentric(&tri());
        assert_eq!(b.skeleton_counts().unwrap(), vec![3, 6, 6]);
        assert_eq!(
            SubdividedComplex::identity(&tri())
                .skeleton_counts()
                .unwrap(),
            vec![3, 3, 1]
        );
        let b2 = iterated_barycentric(&tri(), 2, DEFAULT_SIMPLEX_CAP).unwrap();
        assert_eq!(b2.skeleton_counts().unwrap()[1], 12);
    }

    #[test]
    fn partial_endpoints() {
        let k = boundary_tetra();
        let id = SubdividedComplex::identity(&k);
        assert_eq!(partial_relative(&k, &id, 2, None).unwrap().complex, k);

        let base = k.next_vertex();
        let labels = barycenter_labels(&k, base);
        let p0 = partial_relative(&k, &id, 0, Some(&labels)).unwrap();
        let b = barycentric_with_base(&k, base);
        assert_eq!(p0.complex, b.complex);
        assert_eq!(p0.vertex_carrier, b.vertex_carrier);

        let alpha = barycentric(&k);
        assert_eq!(
            partial_relative(&k, &alpha, 2, None).unwrap().complex,
            alpha.complex
        );
    }

    #[test]
    fn partial_cone_over_triangle_boundary() {
        let k = tri();
        let p = partial_relative(&k, &SubdividedComplex::identity(&k), 1, None).unwrap();
        // Direct construction: apex 4 coned over the three edges.
        let expect = close_under_faces(&[s(&[1, 2, 4]), s(&[1, 3, 4]), s(&[2, 3, 4])]);
        assert_eq!(p.complex, expect);
        p.validate().unwrap();
    }

    #[test]
    fn link_commutes_with_partial_subdivision() {
        let k = boundary_tetra();
        let id = SubdividedComplex::identity(&k);
        for r in 0..=2 {
            let p = partial_relative(&k, &id, r, None).unwrap();
            for a in k.simplexes_of_dim(r) {
                let lhs = p.complex.link(&a).unwrap();
                let rhs = barycentric(&k.link(&a).unwrap()).complex;
                if rhs.is_empty() {
                    assert!(lhs.is_empty());
                } else {
                    assert!(find_isomorphism(&lhs, &rhs).is_some(), "r = {r}, A = {a}");
                }
            }
        }
    }

    #[test]
    fn compose_matches_direct_carriers() {
        let k = tri();
        let b1 = barycentric(&k);
        let b2 = barycentric(&b1.complex);
        let composed = b2.compose(&b1).unwrap();
        for simplex in composed.complex.iter() {
            let via_middle = b1.carrier(&b2.carrier(simplex).unwrap()).unwrap();
            assert_eq!(composed.carrier(simplex).unwrap(), via_middle);
        }
    }
}
