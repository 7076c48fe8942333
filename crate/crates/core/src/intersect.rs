//! Common subdivision of two geometric triangulations of the same region.
//!
//! Every pair of top simplexes `(A, B)` is intersected in a linear chart by
//! enumerating the vertices of `{λ^A ≥ 0} ∩ {λ^B ≥ 0}` with their tight
//! constraint sets. Faces of a cell are the nonempty intersections of facet
//! vertex sets, and faces of different cells are identified through globally
//! merged vertices. The barycentric subdivision of the resulting polytopal
//! complex is simplicial and carries into both triangulations.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bounds::commonsub_bound;
use crate::complex::{Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::geometry::{Chart, GeomComplex, GeomPoint, GeometryTag};
use crate::subdivision::SubdividedComplex;

/// Points closer than this are merged.
pub const MERGE_EPS: f64 = 1e-9;
/// Cells of smaller measure are discarded.
pub const MIN_MEASURE: f64 = 1e-12;

/// `w·x + c`.
#[derive(Clone, Debug)]
struct Affine {
    w: Vec<f64>,
    c: f64,
}

impl Affine {
    fn eval(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.c
    }
}

/// Barycentric coordinate functionals of an `n`-simplex in `R^n`.
fn barycentric_functionals(pts: &[Vec<f64>]) -> Result<Vec<Affine>> {
    let n = pts.len() - 1;
    let m = DMatrix::from_fn(n, n, |i, j| pts[j + 1][i] - pts[0][i]);
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::Intersection("degenerate simplex in chart".into()))?;
    let mut out = Vec::with_capacity(n + 1);
    let mut w0 = vec![0.0; n];
    for i in 0..n {
        let w: Vec<f64> = (0..n).map(|j| inv[(i, j)]).collect();
        let c = -w.iter().zip(&pts[0]).map(|(a, b)| a * b).sum::<f64>();
        for (acc, wi) in w0.iter_mut().zip(&w) {
            *acc -= wi;
        }
        out.push(Affine { w, c });
    }
    let c0 = 1.0 - out.iter().map(|f| f.c).sum::<f64>();
    out.insert(0, Affine { w: w0, c: c0 });
    Ok(out)
}

fn barycentric_coords(pts: &[Vec<f64>], x: &[f64]) -> Result<Vec<f64>> {
    Ok(barycentric_functionals(pts)?
        .iter()
        .map(|f| f.eval(x))
        .collect())
}

fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    sub(x, y).iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn average(pts: &[&Vec<f64>]) -> Vec<f64> {
    let mut c = vec![0.0; pts[0].len()];
    for p in pts {
        for (a, b) in c.iter_mut().zip(p.iter()) {
            *a += b;
        }
    }
    c.iter_mut().for_each(|a| *a /= pts.len() as f64);
    c
}

/// Dimension of the affine hull of `pts`.
fn affine_dim(pts: &[&Vec<f64>]) -> usize {
    if pts.len() < 2 {
        return 0;
    }
    let n = pts[0].len();
    let m = DMatrix::from_fn(pts.len() - 1, n, |i, j| pts[i + 1][j] - pts[0][j]);
    m.svd(false, false).rank(MERGE_EPS)
}

/// `n!·volume` of the simplex on `pts` in `R^n`.
fn scaled_volume(pts: &[Vec<f64>]) -> f64 {
    let n = pts.len() - 1;
    DMatrix::from_fn(n, n, |i, j| pts[j + 1][i] - pts[0][i])
        .determinant()
        .abs()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Shifts each point by whole periods towards the first one.
fn unwrap(points: &mut [Vec<f64>], periods: Option<&[f64]>) {
    let Some(per) = periods else { return };
    let base = points[0].clone();
    for p in points.iter_mut().skip(1) {
        for ((c, b), l) in p.iter_mut().zip(&base).zip(per) {
            *c -= ((*c - b) / l).round() * l;
        }
    }
}

fn wrap(x: &mut [f64], periods: Option<&[f64]>) {
    let Some(per) = periods else { return };
    for (c, l) in x.iter_mut().zip(per) {
        *c = c.rem_euclid(*l);
        if *c >= *l - MERGE_EPS {
            *c = 0.0;
        }
    }
}

/// Distance between the images of `x` and `y` in the quotient.
fn quotient_dist(x: &[f64], y: &[f64], periods: Option<&[f64]>) -> f64 {
    match periods {
        None => dist(x, y),
        Some(per) => x
            .iter()
            .zip(y)
            .zip(per)
            .map(|((a, b), l)| {
                let d = (a - b).rem_euclid(*l);
                d.min(l - d).powi(2)
            })
            .sum::<f64>()
            .sqrt(),
    }
}

/// A convex cell before global identification.
struct LocalCell {
    verts: Vec<Vec<f64>>,
    /// Vertex sets of all faces including the cell, with their dimensions.
    faces: Vec<(BTreeSet<usize>, usize)>,
    measure: f64,
}

/// Flags `F_0 ⊂ F_1 ⊂ … ⊂ F_d = top` of faces, as face indices.
fn flags(faces: &[(BTreeSet<usize>, usize)], top: usize) -> Vec<Vec<usize>> {
    let (set, d) = &faces[top];
    if *d == 0 {
        return vec![vec![top]];
    }
    let mut out = Vec::new();
    for (g, (gs, gd)) in faces.iter().enumerate() {
        if *gd + 1 == *d && gs.is_subset(set) {
            for mut f in flags(faces, g) {
                f.push(top);
                out.push(f);
            }
        }
    }
    out
}

/// Intersection of two `n`-simplexes of `R^n`, or `None` when it has empty
/// interior.
fn clip(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Option<LocalCell>> {
    let n = a.len() - 1;
    let mut cons = barycentric_functionals(a)?;
    cons.extend(barycentric_functionals(b)?);
    let k = cons.len();
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let mut tight: Vec<BTreeSet<usize>> = Vec::new();
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let rows: Vec<&Affine> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &cons[i])
            .collect();
        let w = DMatrix::from_fn(n, n, |i, j| rows[i].w[j]);
        if w.determinant().abs() < 1e-14 {
            continue;
        }
        let rhs = DVector::from_iterator(n, rows.iter().map(|r| -r.c));
        let Some(x) = w.lu().solve(&rhs) else {
            continue;
        };
        let x: Vec<f64> = x.iter().copied().collect();
        if x.iter().any(|c| !c.is_finite()) || cons.iter().any(|f| f.eval(&x) < -MERGE_EPS) {
            continue;
        }
        let t: BTreeSet<usize> = (0..k)
            .filter(|&i| cons[i].eval(&x).abs() <= MERGE_EPS)
            .collect();
        match verts.iter().position(|v| dist(v, &x) < MERGE_EPS) {
            Some(i) => tight[i].extend(t),
            None => {
                verts.push(x);
                tight.push(t);
            }
        }
    }
    let all: Vec<&Vec<f64>> = verts.iter().collect();
    if verts.len() < n + 1 || affine_dim(&all) < n {
        return Ok(None);
    }
    let mut sets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for c in 0..k {
        let s: BTreeSet<usize> = (0..verts.len())
            .filter(|&v| tight[v].contains(&c))
            .collect();
        let pts: Vec<&Vec<f64>> = s.iter().map(|&v| &verts[v]).collect();
        if !s.is_empty() && affine_dim(&pts) + 1 == n {
            sets.insert(s);
        }
    }
    // All proper faces are intersections of facets.
    let mut frontier: Vec<BTreeSet<usize>> = sets.iter().cloned().collect();
    let facets = frontier.clone();
    while let Some(f) = frontier.pop() {
        for g in &facets {
            let h: BTreeSet<usize> = f.intersection(g).copied().collect();
            if !h.is_empty() && sets.insert(h.clone()) {
                frontier.push(h);
            }
        }
    }
    for v in 0..verts.len() {
        sets.insert(BTreeSet::from([v]));
    }
    let mut faces: Vec<(BTreeSet<usize>, usize)> = sets
        .into_iter()
        .map(|s| {
            let pts: Vec<&Vec<f64>> = s.iter().map(|&v| &verts[v]).collect();
            let d = affine_dim(&pts);
            (s, d)
        })
        .collect();
    faces.push(((0..verts.len()).collect(), n));
    let centers: Vec<Vec<f64>> = faces
        .iter()
        .map(|(s, _)| average(&s.iter().map(|&v| &verts[v]).collect::<Vec<_>>()))
        .collect();
    let measure = flags(&faces, faces.len() - 1)
        .iter()
        .map(|f| scaled_volume(&f.iter().map(|&i| centers[i].clone()).collect::<Vec<_>>()))
        .sum::<f64>()
        / factorial(n);
    Ok(Some(LocalCell {
        verts,
        faces,
        measure,
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyVertex {
    /// Chart coordinates, reduced modulo the periods on a torus.
    pub coords: Vec<f64>,
    /// Label of the input vertex at this point, if any.
    pub label: Option<VertexId>,
    /// Smallest simplexes of the two inputs containing the point.
    pub carrier1: Simplex,
    pub carrier2: Simplex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyFace {
    /// Sorted global vertex indices.
    pub vertices: Vec<usize>,
    pub dim: usize,
    /// Chart centroid of the vertices, reduced modulo the periods.
    pub center: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexCell {
    /// Index of the cell itself in the face table.
    pub face: usize,
    pub provenance: (Simplex, Simplex),
    /// Period shift applied to the lift of the second simplex.
    pub translate: Vec<f64>,
    /// Lifted chart coordinates of the cell's vertices, in the order of the
    /// cell face's vertex list.
    pub coords: Vec<Vec<f64>>,
    /// All faces of the cell, the cell included.
    pub faces: Vec<usize>,
    pub measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopalComplex {
    pub n: usize,
    pub tag: GeometryTag,
    pub chart: Chart,
    pub periods: Option<Vec<f64>>,
    pub vertices: Vec<PolyVertex>,
    pub faces: Vec<PolyFace>,
    pub cells: Vec<ConvexCell>,
    /// Total measure of the first triangulation in the chart.
    pub region_measure: f64,
    /// One line per discarded sliver cell.
    pub discarded: Vec<String>,
    pub parent1: Complex,
    pub parent2: Complex,
}

struct Input {
    chart_coords: BTreeMap<VertexId, Vec<f64>>,
}

impl Input {
    fn new(k: &GeomComplex, chart: &Chart) -> Result<Self> {
        let chart_coords = k
            .coords
            .iter()
            .filter(|(v, _)| k.complex.contains_vertex(**v))
            .map(|(v, p)| Ok((*v, chart.forward(p)?)))
            .collect::<Result<_>>()?;
        Ok(Input { chart_coords })
    }

    fn lift(&self, s: &Simplex, periods: Option<&[f64]>) -> Vec<Vec<f64>> {
        let mut pts: Vec<Vec<f64>> = s
            .vertices()
            .iter()
            .map(|v| self.chart_coords[v].clone())
            .collect();
        unwrap(&mut pts, periods);
        pts
    }
}

fn bbox(pts: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = pts[0].len();
    let lo = (0..n)
        .map(|i| pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi = (0..n)
        .map(|i| pts.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    (lo, hi)
}

fn overlaps(a: &(Vec<f64>, Vec<f64>), b: &(Vec<f64>, Vec<f64>)) -> bool {
    (0..a.0.len()).all(|i| a.0[i] <= b.1[i] + MERGE_EPS && b.0[i] <= a.1[i] + MERGE_EPS)
}

fn support(labels: &Simplex, lambda: &[f64]) -> Simplex {
    Simplex::new(
        labels
            .vertices()
            .iter()
            .zip(lambda)
            .filter(|(_, l)| **l > MERGE_EPS)
            .map(|(v, _)| *v),
    )
    .expect("a point of a simplex has nonempty support")
}

fn check_inputs(k1: &GeomComplex, k2: &GeomComplex) -> Result<usize> {
    if k1.tag != k2.tag {
        return Err(Error::Intersection(
            "triangulations of different geometries".into(),
        ));
    }
    let n = k1.dimension();
    if n != k2.dimension() || !(1..=3).contains(&n) {
        return Err(Error::Intersection(format!(
            "need equal dimensions in 1..=3, got {n} and {}",
            k2.dimension()
        )));
    }
    if !k1.complex.is_pure() || !k2.complex.is_pure() {
        return Err(Error::Intersection("triangulations must be pure".into()));
    }
    Ok(n)
}

/// Intersection of two triangulations of one region of a model space, in a
/// shared chart.
pub fn intersect_linear(k1: &GeomComplex, k2: &GeomComplex) -> Result<PolytopalComplex> {
    check_inputs(k1, k2)?;
    if k1.periods.is_some() || k2.periods.is_some() {
        return Err(Error::Intersection(
            "use torus_intersect for periodic complexes".into(),
        ));
    }
    let pts: Vec<&GeomPoint> = k1.coords.values().chain(k2.coords.values()).collect();
    let chart = Chart::for_points(&pts)?;
    intersect_impl(k1, k2, chart, None)
}

/// Intersection of two flat-torus triangulations with the same periods.
/// Each simplex pair is tried against the period translates in `{−2..2}^n`;
/// more than one overlapping translate means the simplexes are too large
/// for the quotient.
pub fn torus_intersect(k1: &GeomComplex, k2: &GeomComplex) -> Result<PolytopalComplex> {
    let n = check_inputs(k1, k2)?;
    let (Some(p1), Some(p2)) = (&k1.periods, &k2.periods) else {
        return Err(Error::Intersection(
            "torus_intersect needs periodic complexes".into(),
        ));
    };
    if p1.len() != n || p1.iter().zip(p2).any(|(a, b)| (a - b).abs() > MERGE_EPS) {
        return Err(Error::Intersection("tori with different periods".into()));
    }
    // Convexity radius of the flat torus is a quarter of the shortest period.
    let limit = p1.iter().cloned().fold(f64::INFINITY, f64::min) / 2.0;
    for k in [k1, k2] {
        let l = k.max_edge()?;
        if l >= limit {
            return Err(Error::Intersection(format!(
                "edge length {l} is not below twice the convexity radius {limit}"
            )));
        }
    }
    intersect_impl(k1, k2, Chart::identity(n), Some(p1))
}

fn translates(n: usize, periods: Option<&[f64]>) -> Vec<Vec<f64>> {
    let Some(per) = periods else {
        return vec![vec![0.0; n]];
    };
    let mut out = vec![vec![]];
    for l in per.iter().take(n) {
        out = out
            .into_iter()
            .flat_map(|t: Vec<f64>| {
                (-2..=2).map(move |k| {
                    let mut t = t.clone();
                    t.push(k as f64 * l);
                    t
                })
            })
            .collect();
    }
    out
}

fn intersect_impl(
    k1: &GeomComplex,
    k2: &GeomComplex,
    chart: Chart,
    periods: Option<&[f64]>,
) -> Result<PolytopalComplex> {
    let n = k1.dimension();
    let in1 = Input::new(k1, &chart)?;
    let in2 = Input::new(k2, &chart)?;
    let tops1 = k1.complex.simplexes_of_dim(n);
    let tops2 = k2.complex.simplexes_of_dim(n);
    let lifts2: Vec<(Simplex, Vec<Vec<f64>>)> = tops2
        .iter()
        .map(|b| (b.clone(), in2.lift(b, periods)))
        .collect();
    let shifts = translates(n, periods);

    let mut out = PolytopalComplex {
        n,
        tag: k1.tag,
        chart: chart.clone(),
        periods: periods.map(|p| p.to_vec()),
        vertices: Vec::new(),
        faces: Vec::new(),
        cells: Vec::new(),
        region_measure: 0.0,
        discarded: Vec::new(),
        parent1: k1.complex.clone(),
        parent2: k2.complex.clone(),
    };
    let mut face_index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();

    for a in &tops1 {
        let pa = in1.lift(a, periods);
        out.region_measure += scaled_volume(&pa) / factorial(n);
        let box_a = bbox(&pa);
        for (b, pb0) in &lifts2 {
            let mut found = 0;
            for t in &shifts {
                let pb: Vec<Vec<f64>> = pb0
                    .iter()
                    .map(|p| p.iter().zip(t).map(|(x, s)| x + s).collect())
                    .collect();
                if !overlaps(&box_a, &bbox(&pb)) {
                    continue;
                }
                let Some(cell) = clip(&pa, &pb)? else {
                    continue;
                };
                if cell.measure < MIN_MEASURE {
                    out.discarded
                        .push(format!("{a} ∩ {b}: measure {:e}", cell.measure));
                    continue;
                }
                found += 1;
                if found > 1 {
                    return Err(Error::Intersection(format!(
                        "{a} meets several translates of {b}; simplexes are too large for the torus"
                    )));
                }
                add_cell(&mut out, &mut face_index, a, b, &pa, &pb, t, cell, periods)?;
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn add_cell(
    out: &mut PolytopalComplex,
    face_index: &mut BTreeMap<Vec<usize>, usize>,
    a: &Simplex,
    b: &Simplex,
    pa: &[Vec<f64>],
    pb: &[Vec<f64>],
    translate: &[f64],
    cell: LocalCell,
    periods: Option<&[f64]>,
) -> Result<()> {
    let mut gid = Vec::with_capacity(cell.verts.len());
    for x in &cell.verts {
        let mut key = x.clone();
        wrap(&mut key, periods);
        let found = out
            .vertices
            .iter()
            .position(|v| quotient_dist(&v.coords, &key, periods) < MERGE_EPS);
        let id = match found {
            Some(i) => i,
            None => {
                let carrier1 = support(a, &barycentric_coords(pa, x)?);
                let carrier2 = support(b, &barycentric_coords(pb, x)?);
                let label = match (carrier1.len(), carrier2.len()) {
                    (1, 1) if carrier1 != carrier2 => {
                        return Err(Error::Intersection(format!(
                            "vertices {carrier1} and {carrier2} coincide but have different labels"
                        )))
                    }
                    (1, _) => Some(carrier1.vertices()[0]),
                    (_, 1) => Some(carrier2.vertices()[0]),
                    _ => None,
                };
                out.vertices.push(PolyVertex {
                    coords: key,
                    label,
                    carrier1,
                    carrier2,
                });
                out.vertices.len() - 1
            }
        };
        gid.push(id);
    }
    let mut faces = Vec::with_capacity(cell.faces.len());
    for (set, d) in &cell.faces {
        let mut vs: Vec<usize> = set.iter().map(|&v| gid[v]).collect();
        vs.sort_unstable();
        let id = match face_index.get(&vs) {
            Some(&i) => i,
            None => {
                let mut center = average(&set.iter().map(|&v| &cell.verts[v]).collect::<Vec<_>>());
                wrap(&mut center, periods);
                out.faces.push(PolyFace {
                    vertices: vs.clone(),
                    dim: *d,
                    center,
                });
                face_index.insert(vs, out.faces.len() - 1);
                out.faces.len() - 1
            }
        };
        faces.push(id);
    }
    let own = *faces.last().expect("the cell is its own face");
    let order = &out.faces[own].vertices;
    let coords = order
        .iter()
        .map(|g| cell.verts[gid.iter().position(|x| x == g).expect("cell vertex")].clone())
        .collect();
    out.cells.push(ConvexCell {
        face: own,
        provenance: (a.clone(), b.clone()),
        translate: translate.to_vec(),
        coords,
        faces,
        measure: cell.measure,
    });
    Ok(())
}

impl PolytopalComplex {
    /// Relative difference between the total cell measure and the measure of
    /// the first triangulation.
    pub fn measure_defect(&self) -> f64 {
        let total: f64 = self.cells.iter().map(|c| c.measure).sum();
        (total - self.region_measure).abs() / self.region_measure
    }

    /// Checks that each cell lies in both of its provenance simplexes, and
    /// that faces shared between cells have matching dimensions.
    pub fn validate(&self, k1: &GeomComplex, k2: &GeomComplex) -> Result<()> {
        let periods = self.periods.as_deref();
        let in1 = Input::new(k1, &self.chart)?;
        let in2 = Input::new(k2, &self.chart)?;
        for cell in &self.cells {
            let (a, b) = &cell.provenance;
            let pa = in1.lift(a, periods);
            let pb: Vec<Vec<f64>> = in2
                .lift(b, periods)
                .iter()
                .map(|p| p.iter().zip(&cell.translate).map(|(x, s)| x + s).collect())
                .collect();
            for x in &cell.coords {
                for pts in [&pa, &pb] {
                    if barycentric_coords(pts, x)?.iter().any(|l| *l < -MERGE_EPS) {
                        return Err(Error::Intersection(format!(
                            "cell of {a} ∩ {b} leaves its provenance"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The cell faces by dimension: `counts[d]` faces of dimension `d`.
    pub fn face_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n + 1];
        for f in &self.faces {
            c[f.dim] += 1;
        }
        c
    }
}

/// `K′ = β(K1 ∩ K2)` as a subdivision of each input, with vertex positions.
#[derive(Clone, Debug)]
pub struct CommonSubdivision {
    pub over1: SubdividedComplex,
    pub over2: SubdividedComplex,
    pub geom: GeomComplex,
}

/// Cones each cell over its subdivided boundary. Vertices of the inputs keep
/// their labels; other vertices and face barycenters are labeled from `base`
/// in face-table order.
pub fn barycentric_polytopal(p: &PolytopalComplex, base: VertexId) -> Result<CommonSubdivision> {
    let mut next = base.0;
    let mut fresh = || {
        next += 1;
        VertexId(next - 1)
    };
    let used: BTreeSet<VertexId> = p.parent1.vertices().chain(p.parent2.vertices()).collect();
    if used.range(base..).next().is_some() {
        return Err(Error::Input("label base collides with input labels".into()));
    }
    let vertex_label: Vec<VertexId> = p
        .vertices
        .iter()
        .map(|v| v.label.unwrap_or_else(&mut fresh))
        .collect();
    let face_label: Vec<VertexId> = p
        .faces
        .iter()
        .map(|f| {
            if f.dim == 0 {
                vertex_label[f.vertices[0]]
            } else {
                fresh()
            }
        })
        .collect();

    let mut complex = Complex::new();
    for cell in &p.cells {
        let local: Vec<(BTreeSet<usize>, usize)> = cell
            .faces
            .iter()
            .map(|&f| {
                (
                    p.faces[f].vertices.iter().copied().collect(),
                    p.faces[f].dim,
                )
            })
            .collect();
        let top = cell.faces.len() - 1;
        for flag in flags(&local, top) {
            let s = Simplex::new(flag.iter().map(|&i| face_label[cell.faces[i]]))?;
            complex.insert_with_faces(&s);
        }
    }
    complex.reserve_labels(VertexId(next));

    let mut carrier1 = BTreeMap::new();
    let mut carrier2 = BTreeMap::new();
    let mut coords = BTreeMap::new();
    for (f, face) in p.faces.iter().enumerate() {
        let label = face_label[f];
        let mut c1 = p.vertices[face.vertices[0]].carrier1.clone();
        let mut c2 = p.vertices[face.vertices[0]].carrier2.clone();
        for &v in &face.vertices[1..] {
            c1 = c1.union(&p.vertices[v].carrier1);
            c2 = c2.union(&p.vertices[v].carrier2);
        }
        carrier1.insert(label, c1);
        carrier2.insert(label, c2);
        coords.insert(label, p.chart.inverse(&face.center)?);
    }
    let geom = GeomComplex {
        complex: complex.clone(),
        tag: p.tag,
        coords,
        periods: p.periods.clone(),
    };
    Ok(CommonSubdivision {
        over1: SubdividedComplex {
            complex: complex.clone(),
            parent: p.parent1.clone(),
            vertex_carrier: carrier1,
        },
        over2: SubdividedComplex {
            complex,
            parent: p.parent2.clone(),
            vertex_carrier: carrier2,
        },
        geom,
    })
}

impl CommonSubdivision {
    /// Combinatorial carrier checks on both sides, and the geometric check
    /// that every top simplex lies in its carrier simplexes.
    pub fn validate(&self, k1: &GeomComplex, k2: &GeomComplex, chart: &Chart) -> Result<()> {
        self.over1.validate()?;
        self.over2.validate()?;
        let periods = self.geom.periods.as_deref();
        let own = Input::new(&self.geom, chart)?;
        for (sub, k) in [(&self.over1, k1), (&self.over2, k2)] {
            let parent = Input::new(k, chart)?;
            let n = k.dimension();
            for t in self.geom.complex.simplexes_of_dim(n) {
                let carrier = sub.carrier(&t)?;
                let host = k
                    .complex
                    .cofaces(&carrier)
                    .into_iter()
                    .find(|s| s.dim() == n)
                    .ok_or_else(|| Error::Carrier(format!("{carrier} is in no top simplex")))?
                    .clone();
                let mut pts = own.lift(&t, periods);
                let mut hp = parent.lift(&host, periods);
                // Bring the host next to the simplex.
                let mut joined = vec![pts[0].clone()];
                joined.extend(hp.iter().cloned());
                unwrap(&mut joined, periods);
                hp = joined.split_off(1);
                unwrap(&mut pts, periods);
                for x in &pts {
                    let lam = barycentric_coords(&hp, x)?;
                    for (v, l) in host.vertices().iter().zip(&lam) {
                        let inside = if carrier.contains(*v) {
                            *l >= -MERGE_EPS
                        } else {
                            l.abs() <= MERGE_EPS
                        };
                        if !inside {
                            return Err(Error::Carrier(format!(
                                "{t} is not inside its carrier {carrier}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Count check: `s_i < (2^n − 1)(n+1)!² p_i q_n` for each `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub s: Vec<u64>,
    pub p: Vec<u64>,
    pub q_n: u64,
    pub bounds: Vec<String>,
    pub holds: Vec<bool>,
}

pub fn commonsub_count_check(over1: &SubdividedComplex, k2: &Complex) -> Result<CountReport> {
    let s = over1.skeleton_counts()?;
    let p = over1.parent.f_vector();
    let n = s.len() - 1;
    let q_n = k2.simplexes_of_dim(n).len() as u64;
    let mut bounds = Vec::new();
    let mut holds = Vec::new();
    for i in 0..=n {
        let b = commonsub_bound(n, p[i], q_n);
        holds.push(num_bigint::BigUint::from(s[i]) < b);
        bounds.push(b.to_string());
    }
    Ok(CountReport {
        s,
        p,
        q_n,
        bounds,
        holds,
    })
}

/// Relabels `k2` so that vertices at the position of a vertex of `k1` take
/// its label and all other vertices move above every label of `k1`.
pub fn align_labels(k1: &GeomComplex, k2: &GeomComplex) -> Result<GeomComplex> {
    if k1.tag != k2.tag || k1.periods != k2.periods {
        return Err(Error::Intersection("complexes live in different spaces".into()));
    }
    let periods = k1.periods.as_deref();
    let mut next = k1.complex.next_vertex().0;
    let mut map = BTreeMap::new();
    for v in k2.complex.vertices() {
        let p = &k2.coords[&v];
        let hit = k1.complex.vertices().find(|w| {
            let q = &k1.coords[w];
            let d = match periods {
                Some(_) => quotient_dist(&p.coords, &q.coords, periods),
                None => crate::geometry::dist(p, q),
            };
            d < MERGE_EPS
        });
        let label = hit.unwrap_or_else(|| {
            next += 1;
            VertexId(next - 1)
        });
        map.insert(v, label);
    }
    let complex = k2.complex.relabel(&map)?;
    let coords = map.iter().map(|(v, w)| (*w, k2.coords[v].clone())).collect();
    Ok(GeomComplex {
        complex,
        tag: k2.tag,
        coords,
        periods: k2.periods.clone(),
    })
}
