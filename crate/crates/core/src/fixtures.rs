//! Standard complexes and seeded random generators used by the test suites,
//! the CLI and the FFI.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::complex::{Complex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::geometry::{GeomComplex, GeomPoint, GeometryTag};
use crate::pachner::{apply_in_place, enumerate_moves};

fn s(v: &[u32]) -> Simplex {
    Simplex::of(v)
}

/// `∂Δ^{n+1}` on the labels `0..=n+1`.
pub fn sphere(n: usize) -> Complex {
    let all: Vec<u32> = (0..=n as u32 + 1).collect();
    Complex::from_maximal(s(&all).facets())
}

/// The `k`-gon, `k ≥ 3`.
pub fn cycle(k: u32) -> Complex {
    Complex::from_maximal((0..k).map(|i| s(&[i, (i + 1) % k])))
}

pub fn octahedron() -> Complex {
    let mut tops = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                tops.push(s(&[a, b, c]));
            }
        }
    }
    Complex::from_maximal(tops)
}

/// The 7-vertex torus.
pub fn torus7() -> Complex {
    Complex::from_maximal((0..7u32).flat_map(|i| {
        [s(&[i, (i + 1) % 7, (i + 3) % 7]), s(&[i, (i + 2) % 7, (i + 3) % 7])]
    }))
}

/// The 6-vertex projective plane.
pub fn rp2() -> Complex {
    let tops = [
        [0, 1, 3],
        [0, 1, 5],
        [0, 2, 3],
        [0, 2, 4],
        [0, 4, 5],
        [1, 2, 4],
        [1, 2, 5],
        [1, 3, 4],
        [2, 3, 5],
        [3, 4, 5],
    ];
    Complex::from_maximal(tops.iter().map(|t| s(t)))
}

fn grid_label(i: u32, j: u32, k: u32, offset: u32) -> u32 {
    offset + (i % k) * k + (j % k)
}

/// The `k × k` grid torus with each square cut along the same diagonal;
/// vertex `(i, j)` is labeled `offset + i·k + j`.
pub fn torus_grid_complex(k: u32, offset: u32) -> Complex {
    let mut tops = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let l = |a, b| grid_label(a, b, k, offset);
            tops.push(s(&[l(i, j), l(i + 1, j), l(i + 1, j + 1)]));
            tops.push(s(&[l(i, j), l(i, j + 1), l(i + 1, j + 1)]));
        }
    }
    Complex::from_maximal(tops)
}

/// [`torus_grid_complex`] on the unit torus, with vertex `(i, j)` at
/// `(i/k, j/k) + shift`.
pub fn torus_grid(k: u32, shift: [f64; 2], offset: u32) -> Result<GeomComplex> {
    let complex = torus_grid_complex(k, offset);
    let mut coords = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            let p = vec![i as f64 / k as f64 + shift[0], j as f64 / k as f64 + shift[1]];
            coords.insert(VertexId(grid_label(i, j, k, offset)), GeomPoint::new(GeometryTag::Euclidean, p)?);
        }
    }
    GeomComplex::torus(complex, coords, vec![1.0, 1.0])
}

/// The circle of length 1 cut at the given positions, labeled in order.
pub fn circle(points: &[f64], labels: &[u32]) -> Result<GeomComplex> {
    if points.len() != labels.len() || points.len() < 3 {
        return Err(Error::Input("a circle needs at least three labeled points".into()));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].rem_euclid(1.0).total_cmp(&points[b].rem_euclid(1.0)));
    let k = order.len();
    let complex = Complex::from_maximal((0..k).map(|i| s(&[labels[order[i]], labels[order[(i + 1) % k]]])));
    let coords = points
        .iter()
        .zip(labels)
        .map(|(p, l)| Ok((VertexId(*l), GeomPoint::new(GeometryTag::Euclidean, vec![*p])?)))
        .collect::<Result<_>>()?;
    GeomComplex::torus(complex, coords, vec![1.0])
}

/// Applies `steps` random applicable moves, never letting the number of top
/// simplexes exceed `max_tops`.
pub fn random_walk<R: Rng + ?Sized>(k: &Complex, steps: usize, max_tops: usize, rng: &mut R) -> Result<Complex> {
    let mut k = k.clone();
    let n = k.dimension().unwrap_or(0);
    for _ in 0..steps {
        let tops = k.simplexes_of_dim(n).len();
        let moves: Vec<_> = enumerate_moves(&k)
            .into_iter()
            .filter(|m| tops as i64 + m.a.len() as i64 - m.b.len() as i64 <= max_tops as i64)
            .collect();
        let Some(mv) = moves.choose(rng) else { break };
        apply_in_place(&mut k, mv)?;
    }
    Ok(k)
}

/// A random combinatorial `n`-sphere: `∂Δ^{n+1}` after a random walk.
pub fn fuzzed_sphere<R: Rng + ?Sized>(n: usize, steps: usize, max_tops: usize, rng: &mut R) -> Result<Complex> {
    random_walk(&sphere(n), steps, max_tops, rng)
}

/// A random closed surface: a sphere, torus or projective plane after a
/// random walk.
pub fn fuzzed_surface<R: Rng + ?Sized>(steps: usize, max_tops: usize, rng: &mut R) -> Result<Complex> {
    let seed = match rng.gen_range(0..3) {
        0 => octahedron(),
        1 => torus7(),
        _ => rp2(),
    };
    random_walk(&seed, steps, max_tops, rng)
}

/// Grows a ball of `size` top simplexes inside `ambient` by attaching one
/// top simplex at a time along between 1 and `n` of its facets and nowhere
/// else, so the reverse attachment order is a shelling.
pub fn grow_shellable_ball<R: Rng + ?Sized>(ambient: &Complex, size: usize, rng: &mut R) -> Option<Complex> {
    let n = ambient.dimension()?;
    let tops = ambient.simplexes_of_dim(n);
    let first = tops.choose(rng)?.clone();
    let mut chosen: BTreeSet<Simplex> = BTreeSet::from([first.clone()]);
    let mut ball = Complex::from_maximal([first]);
    while chosen.len() < size {
        let mut candidates: Vec<&Simplex> = tops
            .iter()
            .filter(|t| !chosen.contains(*t) && attaches_along_facets(&ball, t, n))
            .collect();
        candidates.sort();
        let t = (*candidates.choose(rng)?).clone();
        ball.insert_with_faces(&t);
        chosen.insert(t);
    }
    Some(ball)
}

/// Whether `t ∩ ball` is the closure of between 1 and `n` facets of `t`.
fn attaches_along_facets(ball: &Complex, t: &Simplex, n: usize) -> bool {
    let shared: Vec<Simplex> = t.facets().into_iter().filter(|f| ball.contains(f)).collect();
    if shared.is_empty() || shared.len() > n {
        return false;
    }
    t.proper_faces()
        .all(|f| ball.contains(&f) == shared.iter().any(|g| f.is_face_of(g)))
}

/// A triangulation of the unit square with corners labeled `0..4` and
/// `interior` random points labeled from `offset`, mixed by random flips.
pub fn random_square_triangulation<R: Rng + ?Sized>(interior: usize, flips: usize, offset: u32, rng: &mut R) -> Result<GeomComplex> {
    let mut pos: BTreeMap<u32, [f64; 2]> =
        [(0, [0.0, 0.0]), (1, [1.0, 0.0]), (2, [1.0, 1.0]), (3, [0.0, 1.0])].into_iter().collect();
    let mut tris: Vec<[u32; 3]> = if rng.gen_bool(0.5) {
        vec![[0, 1, 2], [0, 2, 3]]
    } else {
        vec![[0, 1, 3], [1, 2, 3]]
    };
    let bary = |p: [f64; 2], t: &[u32; 3], pos: &BTreeMap<u32, [f64; 2]>| {
        let (a, b, c) = (pos[&t[0]], pos[&t[1]], pos[&t[2]]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
        [1.0 - l1 - l2, l1, l2]
    };
    for i in 0..interior as u32 {
        loop {
            let p = [rng.gen_range(0.02..0.98), rng.gen_range(0.02..0.98)];
            let hit = tris.iter().position(|t| bary(p, t, &pos).iter().all(|l| *l > 0.05));
            if let Some(h) = hit {
                let t = tris.swap_remove(h);
                let v = offset + i;
                pos.insert(v, p);
                tris.extend([[t[0], t[1], v], [t[1], t[2], v], [t[0], t[2], v]]);
                break;
            }
        }
    }
    for _ in 0..flips {
        let i = rng.gen_range(0..tris.len());
        let j = rng.gen_range(0..tris.len());
        if i == j {
            continue;
        }
        let (ti, tj) = (tris[i], tris[j]);
        let shared: Vec<u32> = ti.iter().copied().filter(|v| tj.contains(v)).collect();
        if shared.len() != 2 {
            continue;
        }
        let a = *ti.iter().find(|v| !shared.contains(v)).expect("third vertex");
        let b = *tj.iter().find(|v| !shared.contains(v)).expect("third vertex");
        // Flip only inside a strictly convex quadrilateral.
        let cross = |o: [f64; 2], p: [f64; 2], q: [f64; 2]| (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
        let (pa, pb, p0, p1) = (pos[&a], pos[&b], pos[&shared[0]], pos[&shared[1]]);
        let sides_01 = cross(pa, pb, p0) * cross(pa, pb, p1);
        let sides_ab = cross(p0, p1, pa) * cross(p0, p1, pb);
        if sides_01 < -1e-3 && sides_ab < -1e-3 {
            tris[i] = [a, b, shared[0]];
            tris[j] = [a, b, shared[1]];
        }
    }
    let complex = Complex::from_maximal(tris.iter().map(|t| s(t)));
    let coords = pos
        .into_iter()
        .map(|(v, p)| Ok((VertexId(v), GeomPoint::new(GeometryTag::Euclidean, p.to_vec())?)))
        .collect::<Result<_>>()?;
    GeomComplex::new(complex, GeometryTag::Euclidean, coords)
}
