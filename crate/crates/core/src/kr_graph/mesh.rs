use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;
use thiserror::Error;

use crate::surface::Surface;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing \"HMESH orientable|nonorientable\" header")]
    MissingHeader,
    #[error("mesh has no triangles")]
    Empty,
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),
    #[error("triangle {0} repeats a vertex")]
    DegenerateTriangle(usize),
    #[error("triangle {0} is listed twice")]
    DuplicateTriangle(usize),
    #[error("edge {0}-{1} borders more than two triangles")]
    NonManifoldEdge(String, String),
    #[error("edge {0}-{1} is on the mesh boundary but not on a declared boundary cycle, or the other way round")]
    BoundaryMismatch(String, String),
    #[error("boundary cycle {0:?} is malformed")]
    BadCycle(String),
    #[error("duplicate boundary label {0:?}")]
    DuplicateLabel(String),
    #[error("the neighbourhood of vertex {0:?} is not a disk")]
    NotManifoldAt(String),
    #[error("mesh is not connected")]
    Disconnected,
    #[error("mesh declared {declared} but its triangles are {actual}")]
    OrientationMismatch { declared: &'static str, actual: &'static str },
}

fn orientation_word(orientable: bool) -> &'static str {
    if orientable {
        "orientable"
    } else {
        "nonorientable"
    }
}

/// A triangulated compact surface with an exact height per vertex.
///
/// Construction checks that the triangles form a connected surface whose
/// boundary is exactly the declared cycles, and that the orientability flag
/// is right. Height conditions (constant on boundary cycles, no flat edges,
/// genericity) are checked by the extraction, which reports them as
/// properties of the mapping rather than of the mesh.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightMesh {
    orientable: bool,
    ids: Vec<String>,
    heights: Vec<BigRational>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<(String, Vec<usize>)>,
    // cyclic order of neighbours; a path for vertices on a boundary cycle
    links: Vec<Vec<usize>>,
    on_cycle: Vec<Option<usize>>,
    edges: Vec<(usize, usize)>,
}

impl HeightMesh {
    pub fn new(
        orientable: bool,
        vertices: Vec<(String, BigRational)>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<(String, Vec<usize>)>,
    ) -> Result<Self, MeshError> {
        let n = vertices.len();
        let mut ids = Vec::with_capacity(n);
        let mut heights = Vec::with_capacity(n);
        let mut seen_ids = BTreeSet::new();
        for (id, h) in vertices {
            if !seen_ids.insert(id.clone()) {
                return Err(MeshError::DuplicateVertex(id));
            }
            ids.push(id);
            heights.push(h);
        }
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let name = |v: usize| ids[v].clone();

        let mut tri_sets = BTreeSet::new();
        let mut edge_tris: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(MeshError::UnknownVertex(format!("#{}", tri.iter().max().unwrap())));
            }
            let [a, b, c] = *tri;
            if a == b || b == c || a == c {
                return Err(MeshError::DegenerateTriangle(t));
            }
            let mut key = *tri;
            key.sort_unstable();
            if !tri_sets.insert(key) {
                return Err(MeshError::DuplicateTriangle(t));
            }
            for (x, y) in [(a, b), (b, c), (c, a)] {
                edge_tris.entry((x.min(y), x.max(y))).or_default().push(t);
            }
        }
        for (&(a, b), ts) in &edge_tris {
            if ts.len() > 2 {
                return Err(MeshError::NonManifoldEdge(name(a), name(b)));
            }
        }

        let mut on_cycle = vec![None; n];
        let mut cycle_edges = BTreeSet::new();
        let mut labels = BTreeSet::new();
        for (c, (label, cycle)) in boundary.iter().enumerate() {
            if !labels.insert(label.clone()) {
                return Err(MeshError::DuplicateLabel(label.clone()));
            }
            if cycle.len() < 3 {
                return Err(MeshError::BadCycle(label.clone()));
            }
            for &v in cycle {
                if v >= n || on_cycle[v].is_some() {
                    return Err(MeshError::BadCycle(label.clone()));
                }
                on_cycle[v] = Some(c);
            }
            for k in 0..cycle.len() {
                let (x, y) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                cycle_edges.insert((x.min(y), x.max(y)));
            }
        }
        for (&(a, b), ts) in &edge_tris {
            if (ts.len() == 1) != cycle_edges.contains(&(a, b)) {
                return Err(MeshError::BoundaryMismatch(name(a), name(b)));
            }
        }
        if let Some(&(a, b)) = cycle_edges.iter().find(|e| !edge_tris.contains_key(e)) {
            return Err(MeshError::BoundaryMismatch(name(a), name(b)));
        }

        let mut link_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for &[a, b, c] in &triangles {
            link_edges[a].push((b, c));
            link_edges[b].push((c, a));
            link_edges[c].push((a, b));
        }
        let mut links = Vec::with_capacity(n);
        for v in 0..n {
            let link = order_link(&link_edges[v], on_cycle[v].is_some()).ok_or_else(|| MeshError::NotManifoldAt(name(v)))?;
            links.push(link);
        }

        let mut mesh = HeightMesh {
            orientable,
            ids,
            heights,
            triangles,
            boundary,
            links,
            on_cycle,
            edges: edge_tris.keys().copied().collect(),
        };
        let actual = mesh.check_connected_and_orientable(&edge_tris)?;
        if actual != orientable {
            return Err(MeshError::OrientationMismatch {
                declared: orientation_word(orientable),
                actual: orientation_word(actual),
            });
        }
        mesh.orientable = actual;
        Ok(mesh)
    }

    /// Breadth-first propagation of a triangle orientation. Returns whether a
    /// consistent orientation exists.
    fn check_connected_and_orientable(&self, edge_tris: &BTreeMap<(usize, usize), Vec<usize>>) -> Result<bool, MeshError> {
        let t = self.triangles.len();
        // +1: as listed, -1: reversed
        let mut sign = vec![0i8; t];
        let mut orientable = true;
        sign[0] = 1;
        let mut queue = VecDeque::from([0usize]);
        let directed = |tri: [usize; 3], s: i8| {
            let [a, b, c] = tri;
            let mut es = [(a, b), (b, c), (c, a)];
            if s < 0 {
                for e in &mut es {
                    *e = (e.1, e.0);
                }
            }
            es
        };
        while let Some(x) = queue.pop_front() {
            for (a, b) in directed(self.triangles[x], sign[x]) {
                for &y in &edge_tris[&(a.min(b), a.max(b))] {
                    if y == x {
                        continue;
                    }
                    // a consistent neighbour traverses the shared edge as b -> a
                    let agrees = directed(self.triangles[y], 1).contains(&(b, a));
                    let want = if agrees { 1 } else { -1 };
                    if sign[y] == 0 {
                        sign[y] = want;
                        queue.push_back(y);
                    } else if sign[y] != want {
                        orientable = false;
                    }
                }
            }
        }
        if sign.contains(&0) {
            return Err(MeshError::Disconnected);
        }
        Ok(orientable)
    }

    pub fn parse(text: &str) -> Result<Self, MeshError> {
        let mut orientable = None;
        let mut vertices = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut raw_tris = Vec::new();
        let mut raw_cycles = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| MeshError::Parse { line: lineno, message: message.to_string() };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if orientable.is_none() {
                orientable = match toks.as_slice() {
                    ["HMESH", "orientable"] => Some(true),
                    ["HMESH", "nonorientable"] => Some(false),
                    _ => return Err(MeshError::MissingHeader),
                };
                continue;
            }
            match toks[0] {
                "v" => {
                    let [_, id, h] = toks.as_slice() else {
                        return Err(err("expected \"v <id> <num>/<den>\""));
                    };
                    let h = BigRational::from_str(h).map_err(|_| err("height is not a rational p/q"))?;
                    if index.insert(id.to_string(), vertices.len()).is_some() {
                        return Err(MeshError::DuplicateVertex(id.to_string()));
                    }
                    vertices.push((id.to_string(), h));
                }
                "t" => {
                    if toks.len() != 4 {
                        return Err(err("expected \"t <v1> <v2> <v3>\""));
                    }
                    raw_tris.push((toks[1].to_string(), toks[2].to_string(), toks[3].to_string()));
                }
                "b" => {
                    if toks.len() < 3 {
                        return Err(err("expected \"b <label> <v1> ... <vk>\""));
                    }
                    raw_cycles.push((toks[1].to_string(), toks[2..].iter().map(|s| s.to_string()).collect::<Vec<_>>()));
                }
                other => return Err(err(&format!("unknown record {other:?}"))),
            }
        }
        let orientable = orientable.ok_or(MeshError::MissingHeader)?;
        let lookup = |id: &String| index.get(id).copied().ok_or_else(|| MeshError::UnknownVertex(id.clone()));
        let triangles = raw_tris
            .iter()
            .map(|(a, b, c)| Ok([lookup(a)?, lookup(b)?, lookup(c)?]))
            .collect::<Result<Vec<_>, MeshError>>()?;
        let boundary = raw_cycles
            .iter()
            .map(|(l, vs)| Ok((l.clone(), vs.iter().map(lookup).collect::<Result<Vec<_>, _>>()?)))
            .collect::<Result<Vec<_>, MeshError>>()?;
        HeightMesh::new(orientable, vertices, triangles, boundary)
    }

    /// Text form accepted by [`HeightMesh::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("HMESH {}\n", orientation_word(self.orientable));
        for (id, h) in self.ids.iter().zip(&self.heights) {
            let _ = writeln!(out, "v {id} {}/{}", h.numer(), h.denom());
        }
        for [a, b, c] in &self.triangles {
            let _ = writeln!(out, "t {} {} {}", self.ids[*a], self.ids[*b], self.ids[*c]);
        }
        for (label, cycle) in &self.boundary {
            let _ = write!(out, "b {label}");
            for v in cycle {
                let _ = write!(out, " {}", self.ids[*v]);
            }
            out.push('\n');
        }
        out
    }

    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangle_count() as i64
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn heights(&self) -> &[BigRational] {
        &self.heights
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Unordered edges as `(low index, high index)`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn boundary(&self) -> &[(String, Vec<usize>)] {
        &self.boundary
    }

    /// Neighbours of `v` in cyclic order around it (a path for vertices on a
    /// boundary cycle).
    pub fn link(&self, v: usize) -> &[usize] {
        &self.links[v]
    }

    /// Index of the boundary cycle through `v`, if any.
    pub fn cycle_of(&self, v: usize) -> Option<usize> {
        self.on_cycle[v]
    }

    /// The surface the mesh triangulates, with the cycle labels as boundary.
    pub fn surface(&self) -> Surface {
        let b = self.boundary.len() as i64;
        let chi = self.euler_characteristic();
        let labels = self.boundary.iter().map(|(l, _)| l.clone());
        if self.orientable {
            let genus = (2 - b - chi) / 2;
            Surface::new(true, genus as u32, labels).expect("labels are unique")
        } else {
            let genus = 2 - b - chi;
            Surface::new(false, genus as u32, labels).expect("non-orientable mesh has positive genus")
        }
    }

    /// Same mesh with heights replaced.
    pub fn with_heights(&self, heights: Vec<BigRational>) -> Self {
        assert_eq!(heights.len(), self.heights.len());
        HeightMesh { heights, ..self.clone() }
    }

    /// Same mesh with vertex ids renamed through `rename`.
    pub fn relabeled(&self, rename: impl Fn(usize, &str) -> String) -> Result<Self, MeshError> {
        let vertices = self.ids.iter().enumerate().map(|(i, id)| (rename(i, id), self.heights[i].clone())).collect();
        HeightMesh::new(self.orientable, vertices, self.triangles.clone(), self.boundary.clone())
    }
}

/// Chains the link edges of a vertex into a single cycle (interior vertex) or
/// a single path (boundary vertex). `None` if they do not form one.
fn order_link(edges: &[(usize, usize)], on_boundary: bool) -> Option<Vec<usize>> {
    if edges.is_empty() {
        return None;
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let ends: Vec<usize> = adj.iter().filter(|(_, ns)| ns.len() == 1).map(|(v, _)| *v).collect();
    if adj.values().any(|ns| ns.len() > 2) {
        return None;
    }
    let expected_ends = if on_boundary { 2 } else { 0 };
    if ends.len() != expected_ends {
        return None;
    }
    // walk undirected adjacency so that inconsistent triangle orientations
    // (non-orientable meshes) still give a well-defined order
    let start = ends.first().copied().unwrap_or_else(|| *adj.keys().next().unwrap());
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let step = adj[&cur].iter().copied().find(|&w| w != prev);
        let Some(w) = step else { break };
        if w == start {
            break;
        }
        if order.contains(&w) {
            return None;
        }
        order.push(w);
        prev = cur;
        cur = w;
    }
    if order.len() != adj.len() {
        return None;
    }
    Some(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TETRA: &str = "HMESH orientable
v a 0/1
v b 1/1
v c 2/1
v d 3/1
t a b c
t a d b
t b d c
t a c d
";

    #[test]
    fn tetrahedron_is_a_sphere() {
        let m = HeightMesh::parse(TETRA).unwrap();
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.surface(), Surface::orientable(0));
        assert_eq!(m.link(0).len(), 3);
        let again = HeightMesh::parse(&m.to_text()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn disk_boundary_must_be_declared() {
        let disk = "HMESH orientable\nv a 0\nv b 1\nv c 1\nv d 1\nt a b c\nt a c d\nt a d b\n";
        assert!(matches!(HeightMesh::parse(disk), Err(MeshError::BoundaryMismatch(..))));
        let declared = format!("{disk}b V1 b c d\n");
        let m = HeightMesh::parse(&declared).unwrap();
        assert_eq!(m.surface().boundary_count(), 1);
        assert_eq!(m.surface().genus(), 0);
    }

    #[test]
    fn parse_errors_are_specific() {
        assert_eq!(HeightMesh::parse("v a 0\n"), Err(MeshError::MissingHeader));
        assert!(matches!(HeightMesh::parse("HMESH orientable\nv a x\n"), Err(MeshError::Parse { line: 2, .. })));
        assert!(matches!(HeightMesh::parse("HMESH orientable\nv a 1/0\n"), Err(MeshError::Parse { .. })));
        assert!(matches!(HeightMesh::parse("HMESH orientable\nv a 0\nt a a b\n"), Err(MeshError::UnknownVertex(_))));
        assert!(matches!(HeightMesh::parse("HMESH orientable\nq\n"), Err(MeshError::Parse { .. })));
        assert_eq!(HeightMesh::parse("HMESH orientable\nv a 0\n"), Err(MeshError::Empty));
    }

    #[test]
    fn wrong_orientability_flag_is_rejected() {
        let text = TETRA.replace("HMESH orientable", "HMESH nonorientable");
        assert!(matches!(HeightMesh::parse(&text), Err(MeshError::OrientationMismatch { .. })));
    }

    #[test]
    fn non_manifold_edge() {
        let text = format!("{TETRA}v e 4\nt a b e\n");
        assert!(matches!(HeightMesh::parse(&text), Err(MeshError::NonManifoldEdge(..))));
    }
}
