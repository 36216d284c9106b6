//! Canonical Kronrod–Reeb graphs: one normal form per critical type.
//!
//! The line-valued form is read bottom-up:
//!
//! * sources: the negative boundary circles, then the `c0` minima, merged into
//!   a single edge by a chain of saddles;
//! * the spine: per handle, a saddle splitting the edge in two and a saddle
//!   merging them back (orientable), or one degree-2 saddle per crosscap
//!   (non-orientable);
//! * sinks: a chain of saddles splitting the edge off to the `c2` maxima and
//!   then the positive boundary circles.
//!
//! Boundary circles are ordered by label, except that the labels `B0[i]` and
//! `B1[i]` produced by [`cut_at_level`](crate::kr_graph::cut_at_level) are kept
//! outermost (lowest and highest). Heights are consecutive integers.
//!
//! A circle-valued form with `q ≠ 0` is the line-valued form of the surface
//! cut along one fiber, with the two copies `B0[0]` and `B1[0]` of the fiber
//! glued back across height `0 ≡ 1`. Cutting it at level 0 therefore gives
//! back exactly the line-valued form of the cut surface.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use thiserror::Error;

use crate::kr_graph::{Edge, GraphError, KRGraph, Vertex, VertexKind};
use crate::surface::{validate_critical_type, BoundarySigns, CriticalType, CriticalTypeError, Sign, Surface, Target};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error(transparent)]
    Type(#[from] CriticalTypeError),
    #[error("infeasible: {0}")]
    Infeasible(&'static str),
    #[error("homotopy vector has gcd {0}; the canonical circle-valued form needs an onto map (gcd 1)")]
    NotOnto(i64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Label of the lower copy of the cut fiber.
pub const CUT_LOWER: &str = "B0[0]";
/// Label of the upper copy of the cut fiber.
pub const CUT_UPPER: &str = "B1[0]";

fn is_cut_label(label: &str, side: &str) -> bool {
    label.strip_prefix(side).and_then(|r| r.strip_prefix('[')).is_some_and(|r| r.ends_with(']'))
}

/// The surface obtained by cutting `s` along a non-separating two-sided
/// circle, with the two new boundary circles labelled `B0[0]` and `B1[0]`.
/// Needs a positive first Betti number.
pub fn cut_surface(s: &Surface) -> Option<Surface> {
    let g = s.genus();
    let (orientable, genus) = if s.is_orientable() {
        (true, g.checked_sub(1)?)
    } else if g >= 2 && g.is_multiple_of(2) {
        (true, (g - 2) / 2)
    } else if g >= 3 {
        (false, g - 2)
    } else {
        return None;
    };
    let labels = s.boundary().iter().cloned().chain([CUT_LOWER.to_string(), CUT_UPPER.to_string()]);
    Surface::new(orientable, genus, labels).ok()
}

struct Builder {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl Builder {
    fn add(&mut self, kind: VertexKind, label: Option<String>) -> usize {
        let height = BigRational::from_integer(BigInt::from(self.vertices.len()));
        self.vertices.push(Vertex { kind, height, label });
        self.vertices.len() - 1
    }
}

/// Line-valued normal form, vertices listed in increasing height.
fn line_form(s: &Surface, eps: &BoundarySigns, c0: u64, c2: u64) -> Result<(Vec<Vertex>, Vec<Edge>), CanonicalError> {
    let with_sign = |sign: Sign| eps.iter().filter(move |(_, s)| *s == sign).map(|(l, _)| l);
    let mut negative: Vec<&str> = with_sign(Sign::Negative).collect();
    negative.sort_by_key(|l| (!is_cut_label(l, "B0"), *l));
    let mut positive: Vec<&str> = with_sign(Sign::Positive).collect();
    positive.sort_by_key(|l| (is_cut_label(l, "B1"), *l));

    let sources = negative.len() + c0 as usize;
    let sinks = positive.len() + c2 as usize;
    if sources == 0 {
        return Err(CanonicalError::Infeasible("a line-valued map needs a minimum or a negative boundary circle"));
    }
    if sinks == 0 {
        return Err(CanonicalError::Infeasible("a line-valued map needs a maximum or a positive boundary circle"));
    }

    let mut b = Builder { vertices: Vec::new(), edges: Vec::new() };
    let mut leaves = Vec::new();
    for l in &negative {
        leaves.push(b.add(VertexKind::BoundaryCircle, Some(l.to_string())));
    }
    for _ in 0..c0 {
        leaves.push(b.add(VertexKind::Min, None));
    }
    let mut current = leaves[0];
    for &leaf in &leaves[1..] {
        let m = b.add(VertexKind::Saddle3, None);
        b.edges.push(Edge::arc(current, m));
        b.edges.push(Edge::arc(leaf, m));
        current = m;
    }

    for _ in 0..s.genus() {
        if s.is_orientable() {
            let split = b.add(VertexKind::Saddle3, None);
            let merge = b.add(VertexKind::Saddle3, None);
            b.edges.push(Edge::arc(current, split));
            b.edges.push(Edge::arc(split, merge));
            b.edges.push(Edge::arc(split, merge));
            current = merge;
        } else {
            let star = b.add(VertexKind::Star2, None);
            b.edges.push(Edge::arc(current, star));
            current = star;
        }
    }

    let mut splits = Vec::new();
    for _ in 1..sinks {
        let d = b.add(VertexKind::Saddle3, None);
        b.edges.push(Edge::arc(current, d));
        splits.push(d);
        current = d;
    }
    let mut tops = Vec::new();
    for _ in 0..c2 {
        tops.push(b.add(VertexKind::Max, None));
    }
    for l in &positive {
        tops.push(b.add(VertexKind::BoundaryCircle, Some(l.to_string())));
    }
    // the first split feeds the highest leaf, the last split its two leaves
    splits.push(current);
    for (leaf, feeder) in tops.iter().rev().zip(splits) {
        b.edges.push(Edge::arc(feeder, *leaf));
    }
    Ok((b.vertices, b.edges))
}

/// Builds the canonical Kronrod–Reeb graph of the given critical type on `s`;
/// `c1` is whatever the Morse equality forces.
pub fn canonical_kr_graph(
    s: &Surface,
    eps: &BoundarySigns,
    c0: u64,
    c2: u64,
    target: Target,
    q: &[i64],
) -> Result<KRGraph, CanonicalError> {
    let c1 = c0 as i64 + c2 as i64 - s.euler_characteristic();
    if c1 < 0 {
        return Err(CanonicalError::Infeasible("the Morse equality would need a negative number of saddles"));
    }
    let k = CriticalType { target, q: q.to_vec(), c0, c1: c1 as u64, c2, eps: eps.clone() };
    validate_critical_type(s, &k)?;

    if target == Target::Line {
        let (vertices, edges) = line_form(s, eps, c0, c2)?;
        return Ok(KRGraph::new(Target::Line, vertices, edges)?);
    }

    let d = q.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if d == 0 {
        // null-homotopic: the line-valued form squeezed into (0, 1)
        let (vertices, edges) = line_form(s, eps, c0, c2)?;
        let vertices = squeeze(vertices);
        return Ok(KRGraph::new(Target::Circle, vertices, edges)?);
    }
    if d != 1 {
        return Err(CanonicalError::NotOnto(d));
    }
    let cut = cut_surface(s).expect("q != 0 implies positive rank");
    let mut cut_eps = eps.clone();
    cut_eps.insert(CUT_LOWER, Sign::Negative);
    cut_eps.insert(CUT_UPPER, Sign::Positive);
    let (vertices, edges) = line_form(&cut, &cut_eps, c0, c2)?;

    let is = |v: &Vertex, l: &str| v.label.as_deref() == Some(l);
    let lower = vertices.iter().position(|v| is(v, CUT_LOWER)).expect("cut boundary present");
    let upper = vertices.iter().position(|v| is(v, CUT_UPPER)).expect("cut boundary present");
    let mut above_lower = None;
    let mut below_upper = None;
    let mut kept_edges = Vec::new();
    for e in edges {
        let (t, h) = e.ends().expect("line form has only arcs");
        match (t == lower, h == upper) {
            (true, true) => {}
            (true, false) => above_lower = Some(h),
            (false, true) => below_upper = Some(t),
            (false, false) => kept_edges.push((t, h)),
        }
    }
    let keep: Vec<usize> = (0..vertices.len()).filter(|&v| v != lower && v != upper).collect();
    if keep.is_empty() {
        return Ok(KRGraph::new(Target::Circle, Vec::new(), vec![Edge::Loop { winding: 1 }])?);
    }
    let index = |v: usize| keep.iter().position(|&x| x == v).expect("kept vertex");
    let mut out_edges: Vec<Edge> = kept_edges.into_iter().map(|(t, h)| Edge::arc(index(t), index(h))).collect();
    let (x, y) = (above_lower.expect("B0 has an edge"), below_upper.expect("B1 has an edge"));
    out_edges.push(Edge::Arc { tail: index(y), head: index(x), winding: 1 });
    let vertices = squeeze(keep.iter().map(|&v| vertices[v].clone()).collect());
    Ok(KRGraph::new(Target::Circle, vertices, out_edges)?)
}

/// Replaces the heights of vertices listed in increasing height by
/// `(k + 1) / (n + 1)`, keeping ties.
fn squeeze(mut vertices: Vec<Vertex>) -> Vec<Vertex> {
    let n = vertices.len();
    let den = BigInt::from(n + 1);
    for (k, v) in vertices.iter_mut().enumerate() {
        v.height = BigRational::new(BigInt::from(k + 1), den.clone());
    }
    vertices
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kr_graph::{critical_type_of, cut_at_level, regular_fiber_components, PieceClass};
    use num_traits::Zero;

    fn no_eps() -> BoundarySigns {
        BoundarySigns::new()
    }

    #[test]
    fn sphere_is_one_edge() {
        let g = canonical_kr_graph(&Surface::orientable(0), &no_eps(), 1, 1, Target::Line, &[]).unwrap();
        assert_eq!(g.vertices().len(), 2);
        assert_eq!(g.edges(), &[Edge::arc(0, 1)]);
    }

    #[test]
    fn torus_is_theta() {
        let g = canonical_kr_graph(&Surface::orientable(1), &no_eps(), 1, 1, Target::Line, &[0, 0]).unwrap();
        assert_eq!(g.critical_counts(), (1, 2, 1));
        assert_eq!(g.edges().len(), 4);
    }

    #[test]
    fn torus_fibration_is_a_loop() {
        let g = canonical_kr_graph(&Surface::orientable(1), &no_eps(), 0, 0, Target::Circle, &[1, 0]).unwrap();
        assert!(g.vertices().is_empty());
        assert_eq!(g.edges(), &[Edge::Loop { winding: 1 }]);
    }

    #[test]
    fn infeasible_requests() {
        let s = Surface::orientable(0);
        assert!(matches!(canonical_kr_graph(&s, &no_eps(), 0, 2, Target::Line, &[]), Err(CanonicalError::Infeasible(_))));
        assert!(matches!(canonical_kr_graph(&s, &no_eps(), 0, 0, Target::Line, &[]), Err(CanonicalError::Infeasible(_))));
        let t = Surface::orientable(1);
        assert_eq!(canonical_kr_graph(&t, &no_eps(), 0, 0, Target::Circle, &[2, 4]), Err(CanonicalError::NotOnto(2)));
        assert!(matches!(canonical_kr_graph(&t, &no_eps(), 1, 1, Target::Line, &[1, 0]), Err(CanonicalError::Type(_))));
    }

    #[test]
    fn circle_form_cuts_back_to_line_form() {
        let s = Surface::new(true, 2, ["V1", "V2"]).unwrap();
        let eps: BoundarySigns = [("V1", Sign::Positive), ("V2", Sign::Negative)].into_iter().collect();
        let g = canonical_kr_graph(&s, &eps, 1, 0, Target::Circle, &[0, 1, 0, 0]).unwrap();
        let k = critical_type_of(&g, &s, &[0, 1, 0, 0]).unwrap();
        assert_eq!((k.c0, k.c2), (1, 0));
        let zero = BigRational::zero();
        assert_eq!(regular_fiber_components(&g, &zero).unwrap(), 1);
        let cut = cut_at_level(&g, &zero).unwrap();
        assert_eq!(cut.pieces.len(), 1);
        assert_eq!(cut.pieces[0].class, PieceClass::Q01);
        let mut cut_eps = eps.clone();
        cut_eps.insert(CUT_LOWER, Sign::Negative);
        cut_eps.insert(CUT_UPPER, Sign::Positive);
        let line = canonical_kr_graph(&cut_surface(&s).unwrap(), &cut_eps, 1, 0, Target::Line, &[0, 0]).unwrap();
        assert!(cut.pieces[0].graph.equivalent_to(&line));
    }

    #[test]
    fn non_orientable_spine_uses_degree_two_saddles() {
        let s = Surface::non_orientable(3).unwrap();
        let g = canonical_kr_graph(&s, &no_eps(), 1, 1, Target::Line, &[0, 0]).unwrap();
        assert_eq!(g.count(VertexKind::Star2), 3);
        assert_eq!(critical_type_of(&g, &s, &[0, 0]).unwrap().c1, 3);
    }

    #[test]
    fn output_is_deterministic() {
        let s = Surface::new(true, 1, ["b", "a", "c"]).unwrap();
        let eps: BoundarySigns = [("a", Sign::Positive), ("b", Sign::Negative), ("c", Sign::Positive)].into_iter().collect();
        let g1 = canonical_kr_graph(&s, &eps, 2, 1, Target::Line, &[0, 0]).unwrap();
        let g2 = canonical_kr_graph(&s, &eps, 2, 1, Target::Line, &[0, 0]).unwrap();
        assert_eq!(g1.to_dot(), g2.to_dot());
    }
}
