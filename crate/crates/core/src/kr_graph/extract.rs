//! Reeb-graph extraction from a [`HeightMesh`].
//!
//! Critical vertices are found from their links. The distinct vertex heights
//! `H_0 < … < H_m` are then swept: at a sample height between each pair of
//! neighbours the level set is the union of the segments cut out of each
//! triangle, and its components are found by union-find over crossing edges.
//! The slab around `H_j` is glued together triangle by triangle; each of its
//! components either holds an event (critical vertex or boundary cycle),
//! which becomes a graph vertex, or is a product cylinder that just carries an
//! edge through.
//!
//! All comparisons use the rank of a height among the distinct heights, so
//! the sweep is exact and never touches rational arithmetic.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::BigRational;
use thiserror::Error;

use super::{Edge, GraphError, HeightMesh, KRGraph, Vertex, VertexKind};
use crate::surface::{BoundarySigns, CriticalType, Sign, Surface, Target};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("not Morse: {0}")]
    NotMorse(String),
    #[error("not generic: {0}")]
    NotGeneric(String),
    #[error("not a Morse mapping: height is not constant on boundary cycle {0:?}")]
    NotMorseMapping(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Result of [`extract_kr_graph`]: the graph, the surface the mesh
/// triangulates and the counts read off the sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub graph: KRGraph,
    pub surface: Surface,
    pub c0: u64,
    pub c1: u64,
    pub c2: u64,
    pub eps: BoundarySigns,
}

impl Extraction {
    /// The full critical type; mappings to the line have `q = 0`.
    pub fn critical_type(&self) -> CriticalType {
        CriticalType {
            target: Target::Line,
            q: vec![0; self.surface.rank()],
            c0: self.c0,
            c1: self.c1,
            c2: self.c2,
            eps: self.eps.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Local {
    Min,
    Max,
    Regular,
    Saddle,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn classify_vertex(mesh: &HeightMesh, rank: &[usize], v: usize) -> Result<Local, ExtractError> {
    let link = mesh.link(v);
    let lower: Vec<bool> = link.iter().map(|&w| rank[w] < rank[v]).collect();
    let n = lower.len();
    let n_lower = lower.iter().filter(|&&x| x).count();
    if n_lower == 0 {
        return Ok(Local::Min);
    }
    if n_lower == n {
        return Ok(Local::Max);
    }
    let runs = (0..n).filter(|&i| lower[i] && !lower[(i + n - 1) % n]).count();
    match runs {
        1 => Ok(Local::Regular),
        2 => Ok(Local::Saddle),
        k => Err(ExtractError::NotMorse(format!(
            "vertex {:?} is a monkey saddle ({k} lower link components)",
            mesh.ids()[v]
        ))),
    }
}

/// Builds the Kronrod–Reeb graph of the height function on `mesh`.
pub fn extract_kr_graph(mesh: &HeightMesh) -> Result<Extraction, ExtractError> {
    let heights = mesh.heights();
    let ids = mesh.ids();
    let n = heights.len();

    for (label, cycle) in mesh.boundary() {
        if cycle.iter().any(|&v| heights[v] != heights[cycle[0]]) {
            return Err(ExtractError::NotMorseMapping(label.clone()));
        }
    }
    let cycle_edge = |a: usize, b: usize| match (mesh.cycle_of(a), mesh.cycle_of(b)) {
        (Some(x), Some(y)) if x == y => {
            let cyc = &mesh.boundary()[x].1;
            let k = cyc.len();
            (0..k).any(|i| {
                let (p, q) = (cyc[i], cyc[(i + 1) % k]);
                (p, q) == (a, b) || (q, p) == (a, b)
            })
        }
        _ => false,
    };
    for &(a, b) in mesh.edges() {
        if heights[a] == heights[b] && !cycle_edge(a, b) {
            return Err(ExtractError::NotGeneric(format!("flat edge {}-{}", ids[a], ids[b])));
        }
    }

    let distinct: Vec<&BigRational> = heights.iter().collect::<BTreeSet<_>>().into_iter().collect();
    let rank_of: HashMap<&BigRational, usize> = distinct.iter().enumerate().map(|(i, h)| (*h, i)).collect();
    let rank: Vec<usize> = heights.iter().map(|h| rank_of[h]).collect();
    let m = distinct.len();

    // events, keyed by height rank
    let mut critical: Vec<(usize, Local)> = Vec::new();
    for v in 0..n {
        if mesh.cycle_of(v).is_none() {
            let kind = classify_vertex(mesh, &rank, v)?;
            if kind != Local::Regular {
                critical.push((v, kind));
            }
        }
    }
    let mut cycle_sign = Vec::new();
    for (c, (label, cycle)) in mesh.boundary().iter().enumerate() {
        let r = rank[cycle[0]];
        let mut below = false;
        let mut above = false;
        for &v in cycle {
            for &w in mesh.link(v) {
                if mesh.cycle_of(w) != Some(c) {
                    below |= rank[w] < r;
                    above |= rank[w] > r;
                }
            }
        }
        let sign = match (below, above) {
            (true, false) => Sign::Positive,
            (false, true) => Sign::Negative,
            _ => return Err(ExtractError::NotMorse(format!("boundary cycle {label:?} is not a regular level"))),
        };
        cycle_sign.push(sign);
    }

    let mut event_at: BTreeMap<usize, Vec<EventRef>> = BTreeMap::new();
    for &(v, kind) in &critical {
        event_at.entry(rank[v]).or_default().push(EventRef::Vertex(v, kind));
    }
    for (c, (_, cycle)) in mesh.boundary().iter().enumerate() {
        event_at.entry(rank[cycle[0]]).or_default().push(EventRef::Cycle(c));
    }
    for (r, evs) in &event_at {
        let crit: Vec<_> = evs.iter().filter(|e| matches!(e, EventRef::Vertex(..))).collect();
        if !crit.is_empty() && evs.len() > 1 {
            let names: Vec<String> = evs
                .iter()
                .map(|e| match e {
                    EventRef::Vertex(v, _) => format!("vertex {:?}", ids[*v]),
                    EventRef::Cycle(c) => format!("boundary {:?}", mesh.boundary()[*c].0),
                })
                .collect();
            return Err(ExtractError::NotGeneric(format!("{} share the height {}", names.join(", "), distinct[*r])));
        }
    }

    // level-set components at the sample between rank j and j + 1
    let edge_index: HashMap<(usize, usize), usize> = mesh.edges().iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let tri_edges: Vec<[usize; 3]> = mesh
        .triangles()
        .iter()
        .map(|&[a, b, c]| [(a, b), (b, c), (c, a)].map(|(x, y)| edge_index[&(x.min(y), x.max(y))]))
        .collect();
    let edge_span: Vec<(usize, usize)> = mesh.edges().iter().map(|&(a, b)| (rank[a].min(rank[b]), rank[a].max(rank[b]))).collect();
    let crosses = |e: usize, j: usize| edge_span[e].0 <= j && j < edge_span[e].1;
    let tri_span: Vec<(usize, usize)> = mesh
        .triangles()
        .iter()
        .map(|t| (t.iter().map(|&v| rank[v]).min().unwrap(), t.iter().map(|&v| rank[v]).max().unwrap()))
        .collect();

    // levels[j]: crossing edge -> component index at sample j
    let mut levels: Vec<HashMap<usize, usize>> = Vec::with_capacity(m.saturating_sub(1));
    let mut level_sizes = Vec::new();
    for j in 0..m.saturating_sub(1) {
        let crossing: Vec<usize> = (0..mesh.edges().len()).filter(|&e| crosses(e, j)).collect();
        let local: HashMap<usize, usize> = crossing.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut uf = UnionFind::new(crossing.len());
        for (t, es) in tri_edges.iter().enumerate() {
            if tri_span[t].0 <= j && j < tri_span[t].1 {
                let cut: Vec<usize> = es.iter().copied().filter(|&e| crosses(e, j)).collect();
                if let [x, y] = cut[..] {
                    uf.union(local[&x], local[&y]);
                }
            }
        }
        let mut comp_id: HashMap<usize, usize> = HashMap::new();
        let mut assign = HashMap::new();
        for (i, &e) in crossing.iter().enumerate() {
            let root = uf.find(i);
            let next = comp_id.len();
            let c = *comp_id.entry(root).or_insert(next);
            assign.insert(e, c);
        }
        level_sizes.push(comp_id.len());
        levels.push(assign);
    }
    let mut offsets = vec![0usize; level_sizes.len() + 1];
    for j in 0..level_sizes.len() {
        offsets[j + 1] = offsets[j] + level_sizes[j];
    }
    let mut arcs = UnionFind::new(offsets[level_sizes.len()]);

    struct Found {
        event: EventRef,
        below: Vec<usize>,
        above: Vec<usize>,
    }
    let mut found: Vec<Found> = Vec::new();

    for j in 0..m {
        // nodes: lower comps, upper comps, then vertices at rank j
        let n_lo = if j > 0 { level_sizes[j - 1] } else { 0 };
        let n_hi = if j + 1 < m { level_sizes[j] } else { 0 };
        let at_level: Vec<usize> = (0..n).filter(|&v| rank[v] == j).collect();
        let vert_node: HashMap<usize, usize> = at_level.iter().enumerate().map(|(i, &v)| (v, n_lo + n_hi + i)).collect();
        let mut uf = UnionFind::new(n_lo + n_hi + at_level.len());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            if !(tri_span[t].0 <= j && j <= tri_span[t].1) {
                continue;
            }
            let mut nodes = Vec::new();
            for &e in &tri_edges[t] {
                if j > 0 && crosses(e, j - 1) {
                    nodes.push(levels[j - 1][&e]);
                }
                if j + 1 < m && crosses(e, j) {
                    nodes.push(n_lo + levels[j][&e]);
                }
            }
            for v in tri {
                if let Some(&x) = vert_node.get(v) {
                    nodes.push(x);
                }
            }
            for w in nodes.windows(2) {
                uf.union(w[0], w[1]);
            }
        }

        let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for x in 0..n_lo {
            groups.entry(uf.find(x)).or_default().0.push(x);
        }
        for x in 0..n_hi {
            groups.entry(uf.find(n_lo + x)).or_default().1.push(x);
        }
        let events = event_at.get(&j).cloned().unwrap_or_default();
        let mut event_root: HashMap<usize, EventRef> = HashMap::new();
        for ev in &events {
            let v = match *ev {
                EventRef::Vertex(v, _) => v,
                EventRef::Cycle(c) => mesh.boundary()[c].1[0],
            };
            let root = uf.find(vert_node[&v]);
            if event_root.insert(root, *ev).is_some() {
                return Err(ExtractError::NotGeneric(format!("two events in one slab at height {}", distinct[j])));
            }
            groups.entry(root).or_default();
        }
        for (root, (lo, hi)) in groups {
            let below: Vec<usize> = lo.iter().map(|&x| offsets[j - 1] + x).collect();
            let above: Vec<usize> = hi.iter().map(|&x| offsets[j] + x).collect();
            match event_root.get(&root) {
                Some(&event) => found.push(Found { event, below, above }),
                None => {
                    if below.len() != 1 || above.len() != 1 {
                        return Err(ExtractError::NotMorse(format!(
                            "level set changes topology at height {} without a critical vertex",
                            distinct[j]
                        )));
                    }
                    arcs.union(below[0], above[0]);
                }
            }
        }
    }

    // vertices ordered by height, then boundary label
    found.sort_by_key(|f| match f.event {
        EventRef::Vertex(v, _) => (rank[v], String::new()),
        EventRef::Cycle(c) => (rank[mesh.boundary()[c].1[0]], mesh.boundary()[c].0.clone()),
    });
    let mut vertices = Vec::new();
    let mut tails: BTreeMap<usize, usize> = BTreeMap::new();
    let mut heads: BTreeMap<usize, usize> = BTreeMap::new();
    let mut eps = BoundarySigns::new();
    for (idx, f) in found.iter().enumerate() {
        let shape = (f.below.len(), f.above.len());
        let vertex = match f.event {
            EventRef::Vertex(v, local) => {
                let kind = match (local, shape) {
                    (Local::Min, (0, 1)) => VertexKind::Min,
                    (Local::Max, (1, 0)) => VertexKind::Max,
                    (Local::Saddle, (1, 2) | (2, 1)) => VertexKind::Saddle3,
                    (Local::Saddle, (1, 1)) => VertexKind::Star2,
                    _ => {
                        return Err(ExtractError::NotMorse(format!(
                            "vertex {:?} joins {} level components below to {} above",
                            ids[v], shape.0, shape.1
                        )))
                    }
                };
                Vertex::critical(kind, heights[v].clone())
            }
            EventRef::Cycle(c) => {
                let (label, cycle) = &mesh.boundary()[c];
                let expected = match cycle_sign[c] {
                    Sign::Positive => (1, 0),
                    Sign::Negative => (0, 1),
                };
                if shape != expected {
                    return Err(ExtractError::NotMorse(format!("boundary cycle {label:?} is not a regular level")));
                }
                eps.insert(label.clone(), cycle_sign[c]);
                Vertex::boundary(label.clone(), heights[cycle[0]].clone())
            }
        };
        for &x in &f.below {
            heads.insert(arcs.find(x), idx);
        }
        for &x in &f.above {
            tails.insert(arcs.find(x), idx);
        }
        vertices.push(vertex);
    }
    let mut edges = Vec::new();
    for (class, &tail) in &tails {
        let head = heads
            .get(class)
            .copied()
            .ok_or_else(|| ExtractError::NotMorse("level component without an upper end".to_string()))?;
        edges.push(Edge::arc(tail, head));
    }
    if heads.len() != tails.len() {
        return Err(ExtractError::NotMorse("level component without a lower end".to_string()));
    }
    edges.sort();

    let graph = KRGraph::new(Target::Line, vertices, edges)?;
    let (c0, c1, c2) = graph.critical_counts();
    Ok(Extraction { graph, surface: mesh.surface(), c0, c1, c2, eps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EventRef {
    Vertex(usize, Local),
    Cycle(usize),
}
