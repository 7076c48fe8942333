//! Move generators turning a subdivision `αK` into `βK`, the `β²K′` bridge,
//! and the end-to-end relation of two geometric triangulations.
//!
//! For `r = n, …, 1` and each `r`-simplex `A` of `K`, the current complex is
//! `β^α_r K`, and the region `S(A) = αA ⋆ lk(A, β^α_r K)` is a ball. Starring
//! it from the barycenter label of `A` turns `β^α_r K` into `β^α_{r−1} K`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::bounds::{depth_mprime, induction_bound, mainlemma_bound, per_level_bound, total_bound};
use crate::complex::{Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::geometry::{geometric_barycentric, kappa, GeomComplex};
use crate::intersect::{align_labels, barycentric_polytopal, torus_intersect, CommonSubdivision};
use crate::pachner::{check_local_pseudomanifold, MoveSequence, Recorder};
use crate::shelling::{find_shelling, star_with_shelling, Apex, ShellingOutcome, DEFAULT_NODE_CAP};
use crate::subdivision::{
    barycenter_labels, barycentric, barycentric_with_base, partial_relative, SubdividedComplex,
};

#[derive(Clone, Debug)]
pub struct ReduceOptions {
    /// Node cap for each shelling search.
    pub node_cap: usize,
    /// Compare against an independently built `β^α_{r−1} K` after each level.
    pub check_levels: bool,
    /// First barycenter label; defaults to the smallest label above both `K`
    /// and `α`.
    pub apex_base: Option<VertexId>,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            node_cap: DEFAULT_NODE_CAP,
            check_levels: true,
            apex_base: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarRecord {
    pub r: usize,
    #[serde(rename = "A")]
    pub a: Simplex,
    /// Top simplexes of `S(A)`.
    pub ball_size: usize,
    pub moves: usize,
    pub apex: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub r: usize,
    pub moves: usize,
    /// `s_r` of the subdivision being reduced.
    pub s_r: u64,
    /// `(n−r)!·s_r·p_{n−r−1}` with the true face counts and `p_{−1} = 1`.
    pub bound: BigUint,
    pub matches_partial: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub n: usize,
    pub stars: Vec<StarRecord>,
    pub levels: Vec<LevelRecord>,
    pub total_moves: usize,
    /// `Σ (n−i)!·p_{n−i−1}·s_i` for the reduced subdivision.
    pub induction_bound: BigUint,
    /// Bridge bound when the subdivision is `β²K′`, evaluated with the
    /// conventions `p_0 = 2`, `p_{−1} = 1`.
    pub bridge_bound: Option<BigUint>,
    pub removed_vertices: BTreeSet<VertexId>,
    pub notes: Vec<String>,
}

/// Outcome of a reduction: the move log, its trace, the final complex and
/// the independently built target.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub sequence: MoveSequence,
    pub trace: ReductionTrace,
    pub result: Complex,
    pub target: SubdividedComplex,
}

/// Groups the top simplexes of `current` by the `r`-simplex `A` of `K` whose
/// region `S(A)` they belong to.
fn regions(
    current: &Complex,
    alpha: &SubdividedComplex,
    apex_of: &BTreeMap<VertexId, Simplex>,
    r: usize,
) -> Result<BTreeMap<Simplex, Vec<Simplex>>> {
    let mut out: BTreeMap<Simplex, Vec<Simplex>> = BTreeMap::new();
    for t in current.top_simplexes() {
        let mut carrier: Option<Simplex> = None;
        let mut apexes = Vec::new();
        for v in t.vertices() {
            if let Some(c) = apex_of.get(v) {
                apexes.push(c);
            } else {
                let c = alpha
                    .vertex_carrier
                    .get(v)
                    .ok_or_else(|| Error::Carrier(format!("vertex {v} has no carrier")))?;
                carrier = Some(match carrier {
                    None => c.clone(),
                    Some(acc) => acc.union(c),
                });
            }
        }
        let Some(carrier) = carrier else { continue };
        if carrier.dim() == r
            && apexes
                .iter()
                .all(|c| carrier.is_face_of(c) && **c != carrier)
        {
            out.entry(carrier).or_default().push(t);
        }
    }
    Ok(out)
}

fn face_counts(k: &Complex) -> Vec<u64> {
    k.f_vector()
}

/// Relates `αK` to `βK`. The sequence starts at `alpha.complex` and ends at
/// `β K` with barycenter labels allocated from the apex base.
pub fn alpha_to_beta(
    k: &Complex,
    alpha: &SubdividedComplex,
    opts: &ReduceOptions,
) -> Result<Reduction> {
    k.check_closed_pseudomanifold()?;
    if alpha.parent != *k {
        return Err(Error::Carrier("α does not subdivide K".into()));
    }
    let n = k.dimension().expect("pseudomanifold is nonempty");
    let base = opts
        .apex_base
        .unwrap_or_else(|| VertexId(k.next_vertex().0.max(alpha.complex.next_vertex().0)));
    if base.0 < alpha.complex.next_vertex().0 {
        return Err(Error::Input("apex base collides with labels of α".into()));
    }
    let labels = barycenter_labels(k, base);
    let apex_of: BTreeMap<VertexId, Simplex> =
        labels.iter().map(|(s, v)| (*v, s.clone())).collect();
    let p = face_counts(k);
    let s = alpha.skeleton_counts()?;

    let mut rec = Recorder::new(alpha.complex.clone());
    let mut stars = Vec::new();
    let mut levels = Vec::new();
    for r in (1..=n).rev() {
        let before = rec.len();
        let groups = regions(&rec.complex, alpha, &apex_of, r)?;
        for a in k.simplexes_of_dim(r) {
            let tops = groups
                .get(&a)
                .ok_or_else(|| Error::Carrier(format!("no region found for {a}")))?;
            let ball = Complex::from_maximal(tops.iter().cloned());
            let shelling = match find_shelling(&ball, opts.node_cap)? {
                ShellingOutcome::Found(sh) => sh,
                ShellingOutcome::NotShellable => {
                    return Err(Error::ShellingNotFound(format!(
                        "S({a}) at level {r} is not shellable; pre-subdivide with β²"
                    )))
                }
                ShellingOutcome::Undecided { nodes } => {
                    return Err(Error::ResourceCap {
                        what: format!("shelling search for S({a})"),
                        limit: nodes,
                    })
                }
            };
            let start = rec.len();
            let apex = star_with_shelling(&mut rec, &ball, &shelling, Apex::Label(labels[&a]))?;
            stars.push(StarRecord {
                r,
                a,
                ball_size: tops.len(),
                moves: rec.len() - start,
                apex,
            });
        }
        let matches_partial = if opts.check_levels {
            let expect = partial_relative(k, alpha, r - 1, Some(&labels))?;
            let ok = expect.complex == rec.complex;
            if !ok {
                return Err(Error::Verification(format!(
                    "level {r} does not produce β^α_{} K",
                    r - 1
                )));
            }
            Some(true)
        } else {
            None
        };
        let moves = rec.len() - before;
        let bound = per_level_bound(n, r, &p, s[r]);
        if BigUint::from(moves) > bound {
            return Err(Error::Verification(format!(
                "level {r}: {moves} moves exceed bound {bound}"
            )));
        }
        levels.push(LevelRecord {
            r,
            moves,
            s_r: s[r],
            bound,
            matches_partial,
        });
    }

    let target = barycentric_with_base(k, base);
    let (result, sequence) = rec.finish();
    if result.digest() != target.complex.digest() {
        return Err(Error::Verification("final complex differs from βK".into()));
    }
    let removed = sequence.removed_vertices();
    if let Some(v) = removed.iter().find(|v| k.contains_vertex(**v)) {
        return Err(Error::Verification(format!("vertex {v} of K was removed")));
    }
    let ib = induction_bound(n, &p, &s)?;
    if BigUint::from(sequence.len()) > ib {
        return Err(Error::Verification(
            "total exceeds the induction bound".into(),
        ));
    }
    let trace = ReductionTrace {
        n,
        total_moves: sequence.len(),
        stars,
        levels,
        induction_bound: ib,
        bridge_bound: None,
        removed_vertices: removed,
        notes: Vec::new(),
    };
    Ok(Reduction {
        sequence,
        trace,
        result,
        target,
    })
}

/// `β²K′` with carriers composed down to `K`.
pub fn second_derived(kprime: &SubdividedComplex) -> Result<SubdividedComplex> {
    let b1 = barycentric(&kprime.complex);
    let b2 = barycentric(&b1.complex);
    b2.compose(&b1)?.compose(kprime)
}

/// Relates `β²K′` to `βK`, for `K′` a subdivision of `K`.
pub fn beta2_bridge(
    k: &Complex,
    kprime: &SubdividedComplex,
    opts: &ReduceOptions,
) -> Result<Reduction> {
    let alpha = second_derived(kprime)?;
    let mut red = alpha_to_beta(k, &alpha, opts)?;
    let n = red.trace.n;
    let bound = mainlemma_bound(n, &face_counts(k), &kprime.skeleton_counts()?)?;
    if BigUint::from(red.sequence.len()) > bound {
        return Err(Error::Verification(format!(
            "{} moves exceed the β² bridge bound {bound}",
            red.sequence.len()
        )));
    }
    red.trace.bridge_bound = Some(bound);
    red.trace
        .notes
        .push("bridge bound evaluated with p_0 = 2 and p_{-1} = 1 as stated; per-level bounds use the true p_0".into());
    Ok(red)
}

/// Summary of a [`relate`] run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelateReport {
    pub n: usize,
    /// Top simplex counts of the two (pre-subdivided) inputs.
    pub p: u64,
    pub q: u64,
    /// Geometric pre-subdivision depth applied to both inputs.
    pub depth: u64,
    pub mprime: u64,
    pub cells: usize,
    pub discarded_cells: usize,
    pub kprime_tops: usize,
    pub beta2_tops: usize,
    pub bridge1_moves: usize,
    pub bridge2_moves: usize,
    pub total_moves: usize,
    pub total_bound: BigUint,
    pub common_vertices: BTreeSet<VertexId>,
    pub notes: Vec<String>,
}

/// A verified sequence from `βK1` to `βK2` through `β²K′`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub sequence: MoveSequence,
    pub start: Complex,
    pub end: Complex,
    pub k1: GeomComplex,
    pub k2: GeomComplex,
    pub common: CommonSubdivision,
    pub bridge1: ReductionTrace,
    pub bridge2: ReductionTrace,
    pub report: RelateReport,
}

/// Smallest `m` with `κ^m·Λ` below the torus diameter limit.
fn presubdivision_depth(k: &GeomComplex, limit: f64) -> Result<u64> {
    let lambda = k.max_edge()?;
    let kap = kappa(k.tag, k.dimension(), lambda)?;
    let mut m = 0;
    let mut l = lambda;
    while l >= limit {
        l *= kap;
        m += 1;
    }
    Ok(m)
}

/// Relates `βK1` to `βK2` for two triangulations of the same flat torus (or
/// circle): `βK1 → β²K′` is the inverse of the bridge for `K1` and
/// `β²K′ → βK2` the bridge for `K2`, where `K′ = β(K1 ∩ K2)`.
///
/// `K2` is relabeled first so that vertices shared with `K1` carry the same
/// label; the returned `k2` is the relabeled complex. When an input has edges
/// too long for the quotient, both inputs are replaced by geometric
/// barycentric subdivisions of the computed depth.
pub fn relate(k1: &GeomComplex, k2: &GeomComplex, opts: &ReduceOptions, cap: usize) -> Result<Relation> {
    let Some(periods) = k1.periods.clone() else {
        return Err(Error::Input("relate needs flat-torus inputs".into()));
    };
    if k2.periods.as_ref() != Some(&periods) {
        return Err(Error::Input("inputs are triangulations of different tori".into()));
    }
    let n = k1.dimension();
    if k2.dimension() != n {
        return Err(Error::Input("inputs have different dimensions".into()));
    }
    let limit = periods.iter().cloned().fold(f64::INFINITY, f64::min) / 2.0;
    let depth = presubdivision_depth(k1, limit)?.max(presubdivision_depth(k2, limit)?);
    let mut notes = vec![
        "K1 ∩ K2 is computed by enumerating period translates of each simplex pair".to_string(),
    ];
    let (g1, g2) = if depth == 0 {
        (k1.clone(), k2.clone())
    } else {
        notes.push(format!("both inputs pre-subdivided {depth} times"));
        (
            geometric_barycentric(k1, depth as usize, cap)?.geom,
            geometric_barycentric(k2, depth as usize, cap)?.geom,
        )
    };
    let g2 = align_labels(&g1, &g2)?;
    let (c1, c2) = (&g1.complex, &g2.complex);
    c1.check_closed_pseudomanifold()?;
    c2.check_closed_pseudomanifold()?;

    let poly = torus_intersect(&g1, &g2)?;
    poly.validate(&g1, &g2)?;
    let base = VertexId(c1.next_vertex().0.max(c2.next_vertex().0));
    let common = barycentric_polytopal(&poly, base)?;
    common.validate(&g1, &g2, &poly.chart)?;
    let kprime_tops = common.over1.complex.simplexes_of_dim(n).len();

    // Apex labels of the two bridges must not meet each other or β²K′.
    let beta2 = second_derived(&common.over1)?;
    let b1 = VertexId(beta2.complex.next_vertex().0.max(c1.next_vertex().0).max(c2.next_vertex().0));
    let b2 = VertexId(b1.0 + c1.len() as u32);
    let red1 = beta2_bridge(c1, &common.over1, &ReduceOptions { apex_base: Some(b1), ..opts.clone() })?;
    let red2 = beta2_bridge(c2, &common.over2, &ReduceOptions { apex_base: Some(b2), ..opts.clone() })?;
    let sequence = red1.sequence.inverse().then(&red2.sequence)?;

    let end = sequence.replay_with(&red1.result, check_local_pseudomanifold)?;
    if end != red2.result {
        return Err(Error::Verification("relation does not end at βK2".into()));
    }
    let common_vertices: BTreeSet<VertexId> = c1.vertices().filter(|v| c2.contains_vertex(*v)).collect();
    let removed = sequence.removed_vertices();
    if let Some(v) = removed.intersection(&common_vertices).next() {
        return Err(Error::Verification(format!("common vertex {v} was removed")));
    }
    let p = c1.simplexes_of_dim(n).len() as u64;
    let q = c2.simplexes_of_dim(n).len() as u64;
    let mprime = depth_mprime(depth, n);
    let bound = total_bound(n, p, q, mprime);
    if BigUint::from(sequence.len()) >= bound {
        return Err(Error::Verification(format!("{} moves reach the bound {bound}", sequence.len())));
    }
    let report = RelateReport {
        n,
        p,
        q,
        depth,
        mprime,
        cells: poly.cells.len(),
        discarded_cells: poly.discarded.len(),
        kprime_tops,
        beta2_tops: beta2.complex.simplexes_of_dim(n).len(),
        bridge1_moves: red1.sequence.len(),
        bridge2_moves: red2.sequence.len(),
        total_moves: sequence.len(),
        total_bound: bound,
        common_vertices,
        notes,
    };
    Ok(Relation {
        sequence,
        start: red1.result,
        end,
        k1: g1,
        k2: g2,
        common,
        bridge1: red1.trace,
        bridge2: red2.trace,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::find_isomorphism;

    fn s(v: &[u32]) -> Simplex {
        Simplex::of(v)
    }

    fn cycle(n: u32) -> Complex {
        Complex::from_maximal((0..n).map(|i| s(&[i, (i + 1) % n])))
    }

    #[test]
    fn tetra_boundary_identity() {
        let k = Complex::from_maximal(s(&[1, 2, 3, 4]).facets());
        let red = alpha_to_beta(
            &k,
            &SubdividedComplex::identity(&k),
            &ReduceOptions::default(),
        )
        .unwrap();
        assert_eq!(red.sequence.len(), 16);
        assert_eq!(red.trace.levels[0].moves, 4);
        assert_eq!(red.trace.levels[1].moves, 12);
        assert!(red.sequence.len() <= 576);
        assert!(find_isomorphism(&red.result, &barycentric(&k).complex).is_some());
        assert_eq!(red.sequence.replay(&k).unwrap(), red.result);
    }

    #[test]
    fn triangle_circle_takes_three_moves() {
        let k = cycle(3);
        let red = alpha_to_beta(
            &k,
            &SubdividedComplex::identity(&k),
            &ReduceOptions::default(),
        )
        .unwrap();
        assert_eq!(red.sequence.len(), 3);
        assert!(red
            .sequence
            .moves
            .iter()
            .all(|m| m.a.len() == 2 && m.b.len() == 1));
    }

    #[test]
    fn beta_as_alpha_ends_isomorphic() {
        let k = Complex::from_maximal(s(&[1, 2, 3, 4]).facets());
        let alpha = barycentric(&k);
        let red = alpha_to_beta(&k, &alpha, &ReduceOptions::default()).unwrap();
        assert!(find_isomorphism(&red.result, &alpha.complex).is_some());
    }

    #[test]
    fn bridge_on_split_four_cycle() {
        let k = cycle(4);
        // K′ splits edge {0,1} at a new vertex 4.
        let kp =
            Complex::from_maximal([s(&[0, 4]), s(&[1, 4]), s(&[1, 2]), s(&[2, 3]), s(&[0, 3])]);
        let mut vc: BTreeMap<VertexId, Simplex> =
            k.vertices().map(|v| (v, Simplex::vertex(v))).collect();
        vc.insert(VertexId(4), s(&[0, 1]));
        let sub = SubdividedComplex {
            complex: kp,
            parent: k.clone(),
            vertex_carrier: vc,
        };
        sub.validate().unwrap();
        let red = beta2_bridge(&k, &sub, &ReduceOptions::default()).unwrap();
        // 5 edges of K′ become 20 edges of β²K′, each shed once.
        assert_eq!(red.sequence.len(), 20);
        assert_eq!(red.trace.bridge_bound, Some(BigUint::from(20u32)));
        assert!(find_isomorphism(&red.result, &barycentric(&k).complex).is_some());
    }

    #[test]
    fn relate_circles_keeps_the_shared_vertex() {
        let k1 = crate::fixtures::circle(&[0.1, 0.45, 0.8], &[0, 1, 2]).unwrap();
        let k2 = crate::fixtures::circle(&[0.0, 0.2, 0.4, 0.6, 0.8], &[0, 1, 2, 3, 4]).unwrap();
        let rel = relate(&k1, &k2, &ReduceOptions::default(), 1_000_000).unwrap();
        assert_eq!(rel.report.common_vertices, BTreeSet::from([VertexId(2)]));
        assert_eq!(rel.report.depth, 0);
        assert_eq!(rel.sequence.replay(&rel.start).unwrap(), rel.end);
        assert!(find_isomorphism(&rel.start, &barycentric(&rel.k1.complex).complex).is_some());
        assert!(find_isomorphism(&rel.end, &barycentric(&rel.k2.complex).complex).is_some());
        // Cut points 0, .1, .2, .4, .45, .6, .8 give seven cells.
        assert_eq!(rel.report.cells, 7);
        assert_eq!(rel.report.kprime_tops, 14);
        assert_eq!(rel.report.beta2_tops, 56);
    }

    #[test]
    fn relate_identical_circles() {
        let k = crate::fixtures::circle(&[0.1, 0.45, 0.8], &[0, 1, 2]).unwrap();
        let rel = relate(&k, &k, &ReduceOptions::default(), 1_000_000).unwrap();
        // The two bridges use disjoint apex labels, so the endpoints agree
        // only up to relabeling.
        assert!(find_isomorphism(&rel.start, &rel.end).is_some());
        assert_eq!(rel.report.common_vertices.len(), 3);
        assert_eq!(rel.report.bridge1_moves, rel.report.bridge2_moves);
    }
}
