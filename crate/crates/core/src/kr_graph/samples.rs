//! Small height meshes of the standard closed surfaces, plus helpers to
//! punch boundary holes and form connected sums. Used by the tests, the
//! benchmarks and as CLI examples.
//!
//! Heights come from smooth formulas evaluated in floating point and rounded
//! to six decimals; the resulting rationals are what the meshes carry.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::HeightMesh;

fn rat(x: f64) -> BigRational {
    BigRational::new(BigInt::from((x * 1e6).round() as i64), BigInt::from(1_000_000))
}

fn build(orientable: bool, heights: Vec<BigRational>, triangles: Vec<[usize; 3]>) -> HeightMesh {
    let vertices = heights.into_iter().enumerate().map(|(i, h)| (i.to_string(), h)).collect();
    HeightMesh::new(orientable, vertices, triangles, Vec::new()).expect("sample mesh is valid")
}

/// Octahedron with height `z`, the four equator vertices nudged to distinct
/// heights so that no edge is flat.
pub fn octahedron() -> HeightMesh {
    let heights = vec![
        BigRational::from_integer((-1).into()),
        rat(0.1),
        rat(0.2),
        rat(0.3),
        rat(0.4),
        BigRational::from_integer(1.into()),
    ];
    // 0 = bottom, 1..=4 = equator in counter-clockwise order, 5 = top
    let mut triangles = Vec::new();
    for i in 0..4 {
        let (a, b) = (1 + i, 1 + (i + 1) % 4);
        triangles.push([a, b, 5]);
        triangles.push([b, a, 0]);
    }
    build(true, heights, triangles)
}

/// Geodesic sphere (subdivided icosahedron) with a tilted linear height.
pub fn icosphere(subdivisions: usize) -> HeightMesh {
    let (points, triangles) = geodesic_sphere(subdivisions);
    let heights = points.iter().map(|p| rat(p[2] + 0.0123 * p[0] + 0.0071 * p[1])).collect();
    build(true, heights, triangles)
}

fn grid_index(x: usize, y: usize, nx: usize) -> usize {
    y * nx + x
}

fn grid_triangles(nx: usize, ny: usize, wrap: impl Fn(usize, usize) -> (usize, usize)) -> Vec<[usize; 3]> {
    let mut triangles = Vec::new();
    for y in 0..ny {
        for x in 0..nx {
            let p = |dx: usize, dy: usize| {
                let (a, b) = wrap(x + dx, y + dy);
                grid_index(a, b, nx)
            };
            triangles.push([p(0, 0), p(1, 0), p(1, 1)]);
            triangles.push([p(0, 0), p(1, 1), p(0, 1)]);
        }
    }
    triangles
}

/// Torus standing on its rim, `nu × nv` grid: height
/// `(R + r cos v) cos u` with `R = 2`, `r = 1`.
pub fn torus_grid(nu: usize, nv: usize) -> HeightMesh {
    let mut heights = vec![BigRational::default(); nu * nv];
    for j in 0..nv {
        for i in 0..nu {
            let (u, v) = (2.0 * PI * i as f64 / nu as f64, 2.0 * PI * j as f64 / nv as f64);
            heights[grid_index(i, j, nu)] = rat((2.0 + v.cos()) * u.cos());
        }
    }
    build(true, heights, grid_triangles(nu, nv, |x, y| (x % nu, y % nv)))
}

/// The 80-vertex standard torus: minimum, two saddles, maximum.
pub fn torus() -> HeightMesh {
    torus_grid(10, 8)
}

/// Klein bottle from a `w × h` grid where crossing the vertical seam flips
/// the second coordinate. Height `cos(2πy/h) + cos(2πx/w)/3`; both saddles
/// sit where a level curve closes up only after passing the seam twice.
pub fn klein_bottle_grid(w: usize, h: usize) -> HeightMesh {
    let mut heights = vec![BigRational::default(); w * h];
    for y in 0..h {
        for x in 0..w {
            let (s, t) = (2.0 * PI * x as f64 / w as f64, 2.0 * PI * y as f64 / h as f64);
            heights[grid_index(x, y, w)] = rat(t.cos() + s.cos() / 3.0);
        }
    }
    let wrap = |x: usize, y: usize| {
        let y = y % h;
        if x >= w {
            (x - w, (h - y) % h)
        } else {
            (x, y)
        }
    };
    build(false, heights, grid_triangles(w, h, wrap))
}

pub fn klein_bottle() -> HeightMesh {
    klein_bottle_grid(8, 10)
}

/// Projective plane as the antipodal quotient of a geodesic sphere, with an
/// even quadratic height.
pub fn projective_plane() -> HeightMesh {
    let (points, triangles) = geodesic_sphere(1);
    let mut rep = vec![usize::MAX; points.len()];
    let mut kept = Vec::new();
    for i in 0..points.len() {
        if rep[i] != usize::MAX {
            continue;
        }
        rep[i] = kept.len();
        let j = (0..points.len())
            .find(|&j| (0..3).all(|k| (points[j][k] + points[i][k]).abs() < 1e-9))
            .expect("antipode exists");
        rep[j] = kept.len();
        kept.push(i);
    }
    let quad = |p: &[f64; 3]| {
        let [x, y, z] = *p;
        x * x + 2.2 * y * y + 3.5 * z * z + 0.6 * x * y + 0.2 * x * z + 1.4 * y * z
    };
    let heights = kept.iter().map(|&i| rat(quad(&points[i]))).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut tris = Vec::new();
    for t in triangles {
        let q = t.map(|v| rep[v]);
        let mut key = q;
        key.sort_unstable();
        if seen.insert(key) {
            tris.push(q);
        }
    }
    build(false, heights, tris)
}

/// Genus-two surface: connected sum of two tori, one above the other.
pub fn genus_two() -> HeightMesh {
    connected_sum(&torus(), &torus())
}

/// Cyclic order of the neighbours of `v` following the triangle orientation.
fn oriented_link(triangles: &[[usize; 3]], v: usize) -> Vec<usize> {
    let mut next = HashMap::new();
    for t in triangles {
        if let Some(k) = t.iter().position(|&x| x == v) {
            next.insert(t[(k + 1) % 3], t[(k + 2) % 3]);
        }
    }
    let start = *next.keys().min().expect("vertex is used");
    let mut order = vec![start];
    let mut cur = next[&start];
    while cur != start {
        order.push(cur);
        cur = next[&cur];
    }
    order
}

fn extreme_vertex(mesh: &HeightMesh, top: bool) -> usize {
    let hs = mesh.heights();
    let it = 0..hs.len();
    if top {
        it.max_by(|&a, &b| hs[a].cmp(&hs[b])).unwrap()
    } else {
        it.min_by(|&a, &b| hs[a].cmp(&hs[b])).unwrap()
    }
}

/// Removes the open star of the interior vertex `v` and replaces it by a ring
/// of new vertices at `v`'s height, which becomes the boundary cycle `label`.
/// If `v` is a local extremum the critical points of the other vertices are
/// unchanged.
pub fn punch_hole(mesh: &HeightMesh, v: usize, label: &str) -> HeightMesh {
    let link = mesh.link(v).to_vec();
    let pos: HashMap<usize, usize> = link.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let mut vertices: Vec<(String, BigRational)> = Vec::new();
    let mut map = vec![usize::MAX; mesh.vertex_count()];
    for (i, (id, h)) in mesh.ids().iter().zip(mesh.heights()).enumerate() {
        if i != v {
            map[i] = vertices.len();
            vertices.push((id.clone(), h.clone()));
        }
    }
    let ring0 = vertices.len();
    for i in 0..link.len() {
        vertices.push((format!("{label}:{i}"), mesh.heights()[v].clone()));
    }
    let mut triangles = Vec::new();
    for t in mesh.triangles() {
        match t.iter().position(|&x| x == v) {
            None => triangles.push(t.map(|x| map[x])),
            Some(k) => {
                let (a, b) = (t[(k + 1) % 3], t[(k + 2) % 3]);
                let (ra, rb) = (ring0 + pos[&a], ring0 + pos[&b]);
                triangles.push([ra, map[a], map[b]]);
                triangles.push([ra, map[b], rb]);
            }
        }
    }
    let mut boundary = mesh.boundary().iter().map(|(l, c)| (l.clone(), c.iter().map(|&x| map[x]).collect())).collect::<Vec<_>>();
    boundary.push((label.to_string(), (0..link.len()).map(|i| ring0 + i).collect()));
    HeightMesh::new(mesh.is_orientable(), vertices, triangles, boundary).expect("punched mesh is valid")
}

/// Boundary holes at the global minimum (label `"B-"`) and/or the global
/// maximum (label `"B+"`).
pub fn with_holes(mesh: &HeightMesh, bottom: bool, top: bool) -> HeightMesh {
    let mut m = mesh.clone();
    if bottom {
        m = punch_hole(&m, extreme_vertex(&m, false), "B-");
    }
    if top {
        m = punch_hole(&m, extreme_vertex(&m, true), "B+");
    }
    m
}

/// Connected sum of two orientable closed meshes: a tube joins the neighbourhood
/// of `lower`'s maximum to that of `upper`'s minimum, with `upper` lifted
/// above `lower`. Both extrema must have the same number of neighbours.
pub fn connected_sum(lower: &HeightMesh, upper: &HeightMesh) -> HeightMesh {
    let (va, vb) = (extreme_vertex(lower, true), extreme_vertex(upper, false));
    let (la, lb) = (oriented_link(lower.triangles(), va), oriented_link(upper.triangles(), vb));
    assert_eq!(la.len(), lb.len(), "extrema must have links of equal length");
    let k = la.len();
    let top = lower.heights()[va].clone();
    let one = BigRational::from_integer(1.into());
    let lift = &top + &one + &one - &upper.heights()[vb];

    let mut vertices = Vec::new();
    let mut map_a = vec![usize::MAX; lower.vertex_count()];
    for (i, (id, h)) in lower.ids().iter().zip(lower.heights()).enumerate() {
        if i != va {
            map_a[i] = vertices.len();
            vertices.push((format!("a{id}"), h.clone()));
        }
    }
    let mut map_b = vec![usize::MAX; upper.vertex_count()];
    for (i, (id, h)) in upper.ids().iter().zip(upper.heights()).enumerate() {
        if i != vb {
            map_b[i] = vertices.len();
            vertices.push((format!("b{id}"), h + &lift));
        }
    }
    // the tube: one ring of vertices with distinct heights between the halves
    let ring0 = vertices.len();
    for i in 0..k {
        let h = &top + BigRational::new(BigInt::from(i + 1), BigInt::from(k + 1));
        vertices.push((format!("s{i}"), h));
    }
    let pos_a: HashMap<usize, usize> = la.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let pos_b: HashMap<usize, usize> = lb.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let mut triangles = Vec::new();
    for t in lower.triangles() {
        match t.iter().position(|&x| x == va) {
            None => triangles.push(t.map(|x| map_a[x])),
            Some(p) => {
                let (a, b) = (t[(p + 1) % 3], t[(p + 2) % 3]);
                let (ra, rb) = (ring0 + pos_a[&a], ring0 + pos_a[&b]);
                triangles.push([ra, map_a[a], map_a[b]]);
                triangles.push([ra, map_a[b], rb]);
            }
        }
    }
    // the upper ring is glued with reversed orientation
    let ring_b = |u: usize| ring0 + (k - pos_b[&u]) % k;
    for t in upper.triangles() {
        match t.iter().position(|&x| x == vb) {
            None => triangles.push(t.map(|x| map_b[x])),
            Some(p) => {
                let (c, d) = (t[(p + 1) % 3], t[(p + 2) % 3]);
                triangles.push([ring_b(c), map_b[c], map_b[d]]);
                triangles.push([ring_b(c), map_b[d], ring_b(d)]);
            }
        }
    }
    HeightMesh::new(true, vertices, triangles, Vec::new()).expect("connected sum is valid")
}

/// Geodesic sphere: icosahedron with each face split into four, `n` times.
/// Faces are oriented outwards.
fn geodesic_sphere(n: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut points: Vec<[f64; 3]> = Vec::new();
    for &s1 in &[-1.0, 1.0] {
        for &s2 in &[-1.0, 1.0] {
            points.push([0.0, s1, s2 * phi]);
            points.push([s1, s2 * phi, 0.0]);
            points.push([s2 * phi, 0.0, s1]);
        }
    }
    let normalize = |p: [f64; 3]| {
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [p[0] / r, p[1] / r, p[2] / r]
    };
    let dist2 = |a: &[f64; 3], b: &[f64; 3]| (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>();
    let mut faces = Vec::new();
    for a in 0..12 {
        for b in a + 1..12 {
            for c in b + 1..12 {
                let (pa, pb, pc) = (&points[a], &points[b], &points[c]);
                if [dist2(pa, pb), dist2(pb, pc), dist2(pa, pc)].iter().all(|d| (d - 4.0).abs() < 1e-9) {
                    faces.push(orient_outwards(&points, [a, b, c]));
                }
            }
        }
    }
    let mut points: Vec<[f64; 3]> = points.into_iter().map(normalize).collect();
    for _ in 0..n {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, points: &mut Vec<[f64; 3]>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (pa, pb) = (points[a], points[b]);
                points.push(normalize([pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]]));
                points.len() - 1
            })
        };
        let mut next = Vec::new();
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut points);
            let bc = midpoint(b, c, &mut points);
            let ca = midpoint(c, a, &mut points);
            next.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        faces = next;
    }
    (points, faces)
}

fn orient_outwards(points: &[[f64; 3]], [a, b, c]: [usize; 3]) -> [usize; 3] {
    let (pa, pb, pc) = (points[a], points[b], points[c]);
    let u = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
    let v = [pc[0] - pa[0], pc[1] - pa[1], pc[2] - pa[2]];
    let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    if n[0] * pa[0] + n[1] * pa[1] + n[2] * pa[2] > 0.0 {
        [a, b, c]
    } else {
        [a, c, b]
    }
}

/// The named meshes used for corpus-wide checks: every standard closed
/// surface up to genus two, with and without boundary holes.
pub fn corpus() -> Vec<(&'static str, HeightMesh)> {
    let sphere = octahedron();
    let torus = torus();
    let g2 = genus_two();
    let rp2 = projective_plane();
    let klein = klein_bottle();
    vec![
        ("sphere", sphere.clone()),
        ("sphere-1-hole", with_holes(&sphere, false, true)),
        ("annulus", with_holes(&sphere, true, true)),
        ("icosphere", icosphere(2)),
        ("torus", torus.clone()),
        ("torus-1-hole", with_holes(&torus, false, true)),
        ("torus-2-holes", with_holes(&torus, true, true)),
        ("genus-2", g2.clone()),
        ("genus-2-1-hole", with_holes(&g2, true, false)),
        ("projective-plane", rp2.clone()),
        ("mobius-band", with_holes(&rp2, false, true)),
        ("klein-bottle", klein.clone()),
        ("klein-bottle-2-holes", with_holes(&klein, true, true)),
    ]
}
