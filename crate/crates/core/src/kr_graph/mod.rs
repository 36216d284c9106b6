//! Kronrod–Reeb graphs: the quotient of a surface by the connected components
//! of the level sets of a Morse mapping, with the induced height labeling.
//!
//! Vertices carry a kind, an exact rational height and, for boundary circles,
//! the label of the circle. Edges are directed upwards. For maps to the circle
//! heights live in `[0, 1)` and each edge carries a winding number so that its
//! lift to the real line has length `h(head) - h(tail) + winding > 0`; a
//! vertex-free cycle (the fibration of a torus over the circle) is a
//! [`Edge::Loop`].

mod cut;
mod extract;
mod mesh;
pub mod samples;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::surface::{validate_critical_type, BoundarySigns, CriticalType, CriticalTypeError, Sign, Surface, Target};

pub use cut::{cut_at_level, CutDecomposition, CutPiece, PieceClass};
pub use extract::{extract_kr_graph, ExtractError, Extraction};
pub use mesh::{HeightMesh, MeshError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Min,
    Max,
    /// Saddle where one level component splits into two or two merge.
    Saddle3,
    /// Saddle passing through a Möbius band: one component in, one out.
    Star2,
    BoundaryCircle,
}

impl VertexKind {
    pub fn is_critical(self) -> bool {
        self != VertexKind::BoundaryCircle
    }

    fn dot_shape(self) -> &'static str {
        match self {
            VertexKind::Min | VertexKind::Max => "point",
            VertexKind::Saddle3 => "triangle",
            VertexKind::Star2 => "star",
            VertexKind::BoundaryCircle => "doublecircle",
        }
    }
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub kind: VertexKind,
    pub height: BigRational,
    /// Boundary-circle label; `None` for interior critical points.
    pub label: Option<String>,
}

impl Vertex {
    pub fn critical(kind: VertexKind, height: BigRational) -> Self {
        Vertex { kind, height, label: None }
    }

    pub fn boundary(label: impl Into<String>, height: BigRational) -> Self {
        Vertex { kind: VertexKind::BoundaryCircle, height, label: Some(label.into()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Arc { tail: usize, head: usize, winding: u32 },
    /// A level-set component that sweeps the whole circle without meeting a
    /// vertex, `winding` times.
    Loop { winding: u32 },
}

impl Edge {
    pub fn arc(tail: usize, head: usize) -> Self {
        Edge::Arc { tail, head, winding: 0 }
    }

    pub fn winding(&self) -> u32 {
        match *self {
            Edge::Arc { winding, .. } | Edge::Loop { winding } => winding,
        }
    }

    pub fn ends(&self) -> Option<(usize, usize)> {
        match *self {
            Edge::Arc { tail, head, .. } => Some((tail, head)),
            Edge::Loop { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0} refers to a missing vertex")]
    BadEndpoint(usize),
    #[error("edge {0} does not go strictly upwards")]
    NotIncreasing(usize),
    #[error("edge {0} has a winding number not allowed for this target")]
    BadWinding(usize),
    #[error("vertex {0} has a height outside [0, 1) on a circle-valued graph")]
    HeightOutOfRange(usize),
    #[error("vertex {vertex} of kind {kind} has in-degree {indeg} and out-degree {outdeg}")]
    Degree { vertex: usize, kind: VertexKind, indeg: usize, outdeg: usize },
    #[error("vertex {0}: boundary circles need a label and critical points must not have one")]
    Label(usize),
    #[error("duplicate boundary label {0:?}")]
    DuplicateLabel(String),
    #[error("critical vertices {0} and {1} share a height")]
    NotGeneric(usize, usize),
    #[error("degree-2 saddle on an orientable surface")]
    StarOnOrientable,
    #[error(transparent)]
    Type(#[from] CriticalTypeError),
    #[error("level {0} is the height of a vertex")]
    NotRegular(BigRational),
    #[error("operation needs a circle-valued graph")]
    NeedsCircle,
    #[error("level {0} meets no edge of the graph")]
    EmptyFiber(BigRational),
}

/// A Kronrod–Reeb graph, validated on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KRGraph {
    target: Target,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl KRGraph {
    pub fn new(target: Target, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let n = vertices.len();
        if target == Target::Circle {
            if let Some(v) = vertices.iter().position(|v| v.height < BigRational::zero() || v.height >= BigRational::one()) {
                return Err(GraphError::HeightOutOfRange(v));
            }
        }
        let mut indeg = vec![0usize; n];
        let mut outdeg = vec![0usize; n];
        for (e, edge) in edges.iter().enumerate() {
            match *edge {
                Edge::Arc { tail, head, winding } => {
                    if tail >= n || head >= n {
                        return Err(GraphError::BadEndpoint(e));
                    }
                    let rise = &vertices[head].height - &vertices[tail].height;
                    match target {
                        Target::Line if winding != 0 => return Err(GraphError::BadWinding(e)),
                        _ => {}
                    }
                    if rise + BigRational::from_integer(winding.into()) <= BigRational::zero() {
                        return Err(GraphError::NotIncreasing(e));
                    }
                    outdeg[tail] += 1;
                    indeg[head] += 1;
                }
                Edge::Loop { winding } => {
                    if target == Target::Line || winding == 0 {
                        return Err(GraphError::BadWinding(e));
                    }
                }
            }
        }

        let mut labels = BTreeSet::new();
        for (v, vert) in vertices.iter().enumerate() {
            match (&vert.label, vert.kind) {
                (Some(l), VertexKind::BoundaryCircle) => {
                    if !labels.insert(l.clone()) {
                        return Err(GraphError::DuplicateLabel(l.clone()));
                    }
                }
                (None, k) if k.is_critical() => {}
                _ => return Err(GraphError::Label(v)),
            }
            let ok = match vert.kind {
                VertexKind::Min => (indeg[v], outdeg[v]) == (0, 1),
                VertexKind::Max => (indeg[v], outdeg[v]) == (1, 0),
                VertexKind::Saddle3 => matches!((indeg[v], outdeg[v]), (1, 2) | (2, 1)),
                VertexKind::Star2 => (indeg[v], outdeg[v]) == (1, 1),
                VertexKind::BoundaryCircle => indeg[v] + outdeg[v] == 1,
            };
            if !ok {
                return Err(GraphError::Degree { vertex: v, kind: vert.kind, indeg: indeg[v], outdeg: outdeg[v] });
            }
        }

        let mut seen: BTreeMap<&BigRational, usize> = BTreeMap::new();
        for (v, vert) in vertices.iter().enumerate() {
            if vert.kind.is_critical() {
                if let Some(&w) = seen.get(&vert.height) {
                    return Err(GraphError::NotGeneric(w, v));
                }
                seen.insert(&vert.height, v);
            }
        }

        Ok(KRGraph { target, vertices, edges })
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn count(&self, kind: VertexKind) -> usize {
        self.vertices.iter().filter(|v| v.kind == kind).count()
    }

    /// `(c0, c1, c2)`: minima, saddles of either kind, maxima.
    pub fn critical_counts(&self) -> (u64, u64, u64) {
        let c = |k| self.count(k) as u64;
        (c(VertexKind::Min), c(VertexKind::Saddle3) + c(VertexKind::Star2), c(VertexKind::Max))
    }

    /// A boundary circle whose edge leaves upwards is a local minimum of the
    /// map and gets sign −1; one entered from below gets +1.
    pub fn boundary_signs(&self) -> BoundarySigns {
        let mut signs = BoundarySigns::new();
        for edge in &self.edges {
            if let Some((tail, head)) = edge.ends() {
                if let Some(l) = &self.vertices[tail].label {
                    signs.insert(l.clone(), Sign::Negative);
                }
                if let Some(l) = &self.vertices[head].label {
                    signs.insert(l.clone(), Sign::Positive);
                }
            }
        }
        signs
    }

    /// Number of connected components (vertex-free loops count once each).
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut loops = 0;
        for e in &self.edges {
            match e.ends() {
                Some((a, b)) => {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
                None => loops += 1,
            }
        }
        let roots: BTreeSet<usize> = (0..self.vertices.len()).map(|v| find(&mut parent, v)).collect();
        roots.len() + loops
    }

    fn check_regular(&self, c: &BigRational) -> Result<(), GraphError> {
        let reduced = if self.target == Target::Circle { frac(c) } else { c.clone() };
        if self.vertices.iter().any(|v| v.height == reduced) {
            return Err(GraphError::NotRegular(c.clone()));
        }
        Ok(())
    }

    /// Number of times `edge` meets the level `c`.
    pub(crate) fn crossings(&self, edge: &Edge, c: &BigRational) -> u32 {
        match *edge {
            Edge::Loop { winding } => winding,
            Edge::Arc { tail, head, winding } => {
                let lo = &self.vertices[tail].height;
                let hi = &self.vertices[head].height + BigRational::from_integer(winding.into());
                match self.target {
                    Target::Line => u32::from(lo < c && c < &hi),
                    // integers k with lo < c + k < hi
                    Target::Circle => {
                        let first = (lo - c).floor() + BigRational::one();
                        let last = (&hi - c).ceil() - BigRational::one();
                        let n = last - first + BigRational::one();
                        if n <= BigRational::zero() {
                            0
                        } else {
                            u32::try_from(n.to_integer()).unwrap_or(u32::MAX)
                        }
                    }
                }
            }
        }
    }

    /// Graphviz rendering. Output depends only on the graph, so equal graphs
    /// give byte-identical text.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph kr {{");
        let _ = writeln!(out, "  rankdir=BT;");
        let _ = writeln!(out, "  target=\"{}\";", self.target);
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = write!(out, "  v{i} [kind=\"{}\", shape={}, height=\"{}\"", v.kind, v.kind.dot_shape(), v.height);
            if let Some(l) = &v.label {
                let _ = write!(out, ", label=\"{}\"", l.replace('"', "\\\""));
            }
            let _ = writeln!(out, "];");
        }
        for (i, e) in self.edges.iter().enumerate() {
            match *e {
                Edge::Arc { tail, head, winding } => {
                    let _ = write!(out, "  v{tail} -> v{head} [id={i}");
                    if winding > 0 {
                        let _ = write!(out, ", winding={winding}");
                    }
                    let _ = writeln!(out, "];");
                }
                Edge::Loop { winding } => {
                    let _ = writeln!(out, "  l{i} [kind=\"Loop\", shape=none, label=\"\"];");
                    let _ = writeln!(out, "  l{i} -> l{i} [id={i}, winding={winding}];");
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Isomorphism respecting kinds, boundary labels, windings and the order
    /// of heights (heights may differ by an order-preserving change).
    pub fn equivalent_to(&self, other: &KRGraph) -> bool {
        if self.target != other.target || self.vertices.len() != other.vertices.len() {
            return false;
        }
        let (a, b) = (self.normal_form(), other.normal_form());
        a == b
    }

    #[allow(clippy::type_complexity)]
    fn normal_form(&self) -> (Vec<(usize, VertexKind, Option<String>)>, Vec<(usize, usize, u32)>, Vec<u32>) {
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by(|&x, &y| {
            let (vx, vy) = (&self.vertices[x], &self.vertices[y]);
            (&vx.height, &vx.label, vx.kind).cmp(&(&vy.height, &vy.label, vy.kind))
        });
        let mut pos = vec![0; order.len()];
        let mut verts = Vec::with_capacity(order.len());
        let mut rank = 0;
        for (p, &v) in order.iter().enumerate() {
            if p > 0 && self.vertices[order[p - 1]].height != self.vertices[v].height {
                rank += 1;
            }
            pos[v] = p;
            verts.push((rank, self.vertices[v].kind, self.vertices[v].label.clone()));
        }
        let mut arcs = Vec::new();
        let mut loops = Vec::new();
        for e in &self.edges {
            match *e {
                Edge::Arc { tail, head, winding } => arcs.push((pos[tail], pos[head], winding)),
                Edge::Loop { winding } => loops.push(winding),
            }
        }
        arcs.sort();
        loops.sort();
        (verts, arcs, loops)
    }
}

/// Fractional part in `[0, 1)`.
pub(crate) fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

#[cfg(test)]
pub(crate) fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Critical type of the mapping whose KR-graph is `g`, living on `s` with
/// homotopy vector `q`.
pub fn critical_type_of(g: &KRGraph, s: &Surface, q: &[i64]) -> Result<CriticalType, GraphError> {
    if s.is_orientable() && g.count(VertexKind::Star2) > 0 {
        return Err(GraphError::StarOnOrientable);
    }
    let (c0, c1, c2) = g.critical_counts();
    let k = CriticalType { target: g.target(), q: q.to_vec(), c0, c1, c2, eps: g.boundary_signs() };
    validate_critical_type(s, &k)?;
    Ok(k)
}

/// Number of components of the level set over the regular value `c`.
pub fn regular_fiber_components(g: &KRGraph, c: &BigRational) -> Result<u32, GraphError> {
    g.check_regular(c)?;
    Ok(g.edges().iter().map(|e| g.crossings(e, c)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        rational(n, 1)
    }

    fn sphere() -> KRGraph {
        KRGraph::new(
            Target::Line,
            vec![Vertex::critical(VertexKind::Min, r(0)), Vertex::critical(VertexKind::Max, r(1))],
            vec![Edge::arc(0, 1)],
        )
        .unwrap()
    }

    pub(crate) fn theta() -> KRGraph {
        let v = |k, h| Vertex::critical(k, r(h));
        KRGraph::new(
            Target::Line,
            vec![v(VertexKind::Min, 0), v(VertexKind::Saddle3, 1), v(VertexKind::Saddle3, 2), v(VertexKind::Max, 3)],
            vec![Edge::arc(0, 1), Edge::arc(1, 2), Edge::arc(1, 2), Edge::arc(2, 3)],
        )
        .unwrap()
    }

    #[test]
    fn sphere_type() {
        let k = critical_type_of(&sphere(), &Surface::orientable(0), &[]).unwrap();
        assert_eq!((k.c0, k.c1, k.c2), (1, 0, 1));
        assert_eq!(regular_fiber_components(&sphere(), &rational(1, 2)).unwrap(), 1);
    }

    #[test]
    fn theta_type_and_fibers() {
        let g = theta();
        let k = critical_type_of(&g, &Surface::orientable(1), &[0, 0]).unwrap();
        assert_eq!((k.c0, k.c1, k.c2), (1, 2, 1));
        assert_eq!(regular_fiber_components(&g, &rational(3, 2)).unwrap(), 2);
        assert_eq!(regular_fiber_components(&g, &rational(5, 2)).unwrap(), 1);
        assert_eq!(regular_fiber_components(&g, &r(1)), Err(GraphError::NotRegular(r(1))));
        assert!(critical_type_of(&g, &Surface::orientable(1), &[0]).is_err());
        assert!(critical_type_of(&g, &Surface::orientable(1), &[1, 0]).is_err());
    }

    #[test]
    fn torus_fibration_loop() {
        let g = KRGraph::new(Target::Circle, vec![], vec![Edge::Loop { winding: 1 }]).unwrap();
        let k = critical_type_of(&g, &Surface::orientable(1), &[1, 0]).unwrap();
        assert_eq!((k.c0, k.c1, k.c2), (0, 0, 0));
        assert_eq!(regular_fiber_components(&g, &rational(1, 3)).unwrap(), 1);
    }

    #[test]
    fn construction_errors() {
        let v = |k, h| Vertex::critical(k, r(h));
        assert!(matches!(
            KRGraph::new(Target::Line, vec![v(VertexKind::Min, 1), v(VertexKind::Max, 0)], vec![Edge::arc(0, 1)]),
            Err(GraphError::NotIncreasing(0))
        ));
        assert!(matches!(
            KRGraph::new(Target::Line, vec![v(VertexKind::Min, 0), v(VertexKind::Saddle3, 1)], vec![Edge::arc(0, 1)]),
            Err(GraphError::Degree { vertex: 1, .. })
        ));
        assert!(matches!(
            KRGraph::new(Target::Circle, vec![v(VertexKind::Min, 1), v(VertexKind::Max, 0)], vec![Edge::arc(0, 1)]),
            Err(GraphError::HeightOutOfRange(0))
        ));
        let twin = vec![
            v(VertexKind::Min, 0),
            v(VertexKind::Saddle3, 1),
            v(VertexKind::Saddle3, 1),
            v(VertexKind::Max, 3),
        ];
        assert!(matches!(
            KRGraph::new(Target::Line, twin, vec![Edge::arc(0, 1), Edge::arc(1, 2), Edge::arc(1, 2), Edge::arc(2, 3)]),
            Err(GraphError::NotIncreasing(_)) | Err(GraphError::NotGeneric(..))
        ));
        let unlabeled = Vertex { kind: VertexKind::BoundaryCircle, height: r(0), label: None };
        assert!(matches!(
            KRGraph::new(Target::Line, vec![unlabeled, v(VertexKind::Max, 1)], vec![Edge::arc(0, 1)]),
            Err(GraphError::Label(0))
        ));
    }

    #[test]
    fn star_needs_non_orientable_surface() {
        let v = |k, h| Vertex::critical(k, r(h));
        let g = KRGraph::new(
            Target::Line,
            vec![v(VertexKind::Min, 0), v(VertexKind::Star2, 1), v(VertexKind::Max, 2)],
            vec![Edge::arc(0, 1), Edge::arc(1, 2)],
        )
        .unwrap();
        assert_eq!(critical_type_of(&g, &Surface::orientable(0), &[]), Err(GraphError::StarOnOrientable));
        let k = critical_type_of(&g, &Surface::non_orientable(1).unwrap(), &[]).unwrap();
        assert_eq!((k.c0, k.c1, k.c2), (1, 1, 1));
    }

    #[test]
    fn boundary_signs_follow_edge_direction() {
        let g = KRGraph::new(
            Target::Line,
            vec![Vertex::boundary("V1", r(0)), Vertex::boundary("V2", r(1))],
            vec![Edge::arc(0, 1)],
        )
        .unwrap();
        let eps = g.boundary_signs();
        assert_eq!(eps.get("V1"), Some(Sign::Negative));
        assert_eq!(eps.get("V2"), Some(Sign::Positive));
        let annulus = Surface::new(true, 0, ["V1", "V2"]).unwrap();
        let k = critical_type_of(&g, &annulus, &[]).unwrap();
        assert_eq!(k.total_critical(), 0);
    }

    #[test]
    fn circle_crossings_count_windings() {
        let v = |k, n, d| Vertex::critical(k, rational(n, d));
        // a saddle with a self-arc around the circle, plus a min and a max lobe
        let g = KRGraph::new(
            Target::Circle,
            vec![v(VertexKind::Min, 1, 10), v(VertexKind::Saddle3, 3, 10), v(VertexKind::Max, 5, 10)],
            vec![Edge::arc(0, 1), Edge::Arc { tail: 1, head: 1, winding: 2 }, Edge::arc(1, 2)],
        );
        // in-degree 2 (min arc + self arc), out-degree 2: not a valid saddle
        assert!(g.is_err());
        let g = KRGraph::new(
            Target::Circle,
            vec![v(VertexKind::Saddle3, 3, 10), v(VertexKind::Max, 5, 10)],
            vec![Edge::Arc { tail: 0, head: 0, winding: 2 }, Edge::arc(0, 1)],
        )
        .unwrap();
        assert_eq!(regular_fiber_components(&g, &rational(1, 10)).unwrap(), 2);
        assert_eq!(regular_fiber_components(&g, &rational(4, 10)).unwrap(), 3);
        assert_eq!(regular_fiber_components(&g, &rational(7, 10)).unwrap(), 2);
        assert!(regular_fiber_components(&g, &rational(13, 10)).is_err());
    }

    #[test]
    fn equivalence_ignores_height_scale_and_vertex_order() {
        let g = theta();
        let v = |k, h| Vertex::critical(k, r(h));
        let h = KRGraph::new(
            Target::Line,
            vec![v(VertexKind::Max, 30), v(VertexKind::Saddle3, 20), v(VertexKind::Saddle3, 5), v(VertexKind::Min, -4)],
            vec![Edge::arc(1, 0), Edge::arc(2, 1), Edge::arc(3, 2), Edge::arc(2, 1)],
        )
        .unwrap();
        assert!(g.equivalent_to(&h));
        assert!(!g.equivalent_to(&sphere()));
    }

    #[test]
    fn dot_output_is_stable() {
        let dot = sphere().to_dot();
        assert_eq!(dot, sphere().to_dot());
        assert!(dot.contains("v0 [kind=\"Min\", shape=point, height=\"0\"]"));
        assert!(dot.contains("v0 -> v1 [id=0]"));
    }
}
