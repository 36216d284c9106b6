use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{frac, Edge, GraphError, KRGraph, Vertex};
use crate::surface::Target;

/// Which sides of the cut a piece touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PieceClass {
    /// Only the lower copy `B0` of the cut level.
    Q0,
    /// Both copies.
    Q01,
    /// Only the upper copy `B1`.
    Q1,
}

/// A connected piece of a circle-valued graph cut open along a level.
///
/// The piece is a line-valued graph with heights measured from the cut level,
/// so they lie in `[0, 1]`. Each severed edge end becomes a boundary vertex
/// labelled `B0[i]` at height 0 or `B1[i]` at height 1, where `i` numbers the
/// points where the level meets the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutPiece {
    pub graph: KRGraph,
    pub class: PieceClass,
    pub lower: Vec<String>,
    pub upper: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutDecomposition {
    pub level: BigRational,
    pub pieces: Vec<CutPiece>,
}

impl CutDecomposition {
    pub fn count(&self, class: PieceClass) -> usize {
        self.pieces.iter().filter(|p| p.class == class).count()
    }
}

/// Cuts the circle-valued graph `g` along the regular level `c`.
pub fn cut_at_level(g: &KRGraph, c: &BigRational) -> Result<CutDecomposition, GraphError> {
    if g.target() != Target::Circle {
        return Err(GraphError::NeedsCircle);
    }
    g.check_regular(c)?;
    let c = frac(c);
    let zero = BigRational::zero();
    let one = BigRational::one();

    let mut vertices: Vec<Vertex> = g
        .vertices()
        .iter()
        .map(|v| Vertex { height: frac(&(&v.height - &c)), ..v.clone() })
        .collect();
    let mut edges = Vec::new();
    let mut crossing = 0usize;
    let attach = |vertices: &mut Vec<Vertex>, side: u8, i: usize| {
        let (label, h) = if side == 0 { (format!("B0[{i}]"), zero.clone()) } else { (format!("B1[{i}]"), one.clone()) };
        vertices.push(Vertex::boundary(label, h));
        vertices.len() - 1
    };
    for e in g.edges() {
        match *e {
            Edge::Arc { tail, head, winding } => {
                let start = vertices[tail].height.clone();
                let length = &g.vertices()[head].height - &g.vertices()[tail].height + BigRational::from_integer(winding.into());
                let k = (start + length).floor().to_integer().to_usize().unwrap_or(0);
                if k == 0 {
                    edges.push(Edge::arc(tail, head));
                    continue;
                }
                let mut from = tail;
                for _ in 0..k {
                    let top = attach(&mut vertices, 1, crossing);
                    edges.push(Edge::arc(from, top));
                    from = attach(&mut vertices, 0, crossing);
                    crossing += 1;
                }
                edges.push(Edge::arc(from, head));
            }
            Edge::Loop { winding } => {
                let w = winding as usize;
                let first = crossing;
                for j in 0..w {
                    let bottom = attach(&mut vertices, 0, first + j);
                    let top = attach(&mut vertices, 1, first + (j + 1) % w);
                    edges.push(Edge::arc(bottom, top));
                }
                crossing += w;
            }
        }
    }
    if crossing == 0 {
        return Err(GraphError::EmptyFiber(c));
    }

    // connected components of the severed graph
    let n = vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in &edges {
        if let Some((a, b)) = e.ends() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        members.entry(r).or_default().push(v);
    }

    let mut pieces = Vec::new();
    for (root, vs) in members {
        let local: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let pverts: Vec<Vertex> = vs.iter().map(|&v| vertices[v].clone()).collect();
        let pedges: Vec<Edge> = edges
            .iter()
            .filter_map(|e| e.ends())
            .filter(|&(a, _)| find(&mut parent, a) == root)
            .map(|(a, b)| Edge::arc(local[&a], local[&b]))
            .collect();
        let label_with = |prefix: &str| -> Vec<String> {
            vs.iter()
                .filter(|&&v| v >= g.vertices().len())
                .filter_map(|&v| vertices[v].label.clone())
                .filter(|l| l.starts_with(prefix))
                .collect()
        };
        let (lower, upper) = (label_with("B0["), label_with("B1["));
        let class = match (lower.is_empty(), upper.is_empty()) {
            (false, false) => PieceClass::Q01,
            (false, true) => PieceClass::Q0,
            (true, false) => PieceClass::Q1,
            (true, true) => return Err(GraphError::EmptyFiber(c)),
        };
        let graph = KRGraph::new(Target::Line, pverts, pedges)?;
        pieces.push(CutPiece { graph, class, lower, upper });
    }
    Ok(CutDecomposition { level: c, pieces })
}
