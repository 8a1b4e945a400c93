//! Weighted planar graphs and the knot diagrams they encode.
//!
//! Each edge of the graph is a band carrying `|w|` crossings stacked from its
//! first end to its second end. Crossing halves are named by compass points,
//! with the band running north. Within a band the NW half of crossing `j`
//! meets the SW half of crossing `j + 1`, and NE meets SE. At a vertex the
//! left corner of each half-edge joins the right corner of the next half-edge
//! in counterclockwise order.

use std::collections::{BTreeMap, HashMap};

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// One end of an edge as seen from a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub edge: usize,
    /// 0 for the edge's first end, 1 for its second.
    pub end: usize,
}

/// A twist region: a signed weight between two (possibly equal) vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: [usize; 2],
    pub weight: i64,
}

/// A side of an edge, traversed from `ends[dir]` to `ends[1 - dir]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Side {
    pub edge: usize,
    pub dir: usize,
}

/// Validated planar graph with a rotation system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedPlanarGraph {
    pub vertex_ids: Vec<String>,
    pub edges: Vec<Edge>,
    /// Counterclockwise order of half-edges around each vertex.
    pub rotations: Vec<Vec<HalfEdge>>,
    /// Side lying on the unbounded face.
    pub outer_side: Side,
}

/// Face of the graph as a cyclic list of edge sides (face on the left).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub sides: Vec<Side>,
    pub unbounded: bool,
}

#[derive(Deserialize)]
struct RawEdge {
    id: Value,
    ends: [Value; 2],
    weight: i64,
}

#[derive(Deserialize)]
struct RawOuter {
    edge: Value,
    #[serde(default)]
    side: usize,
}

#[derive(Deserialize)]
struct RawGraph {
    vertices: Vec<Value>,
    rotations: BTreeMap<String, Vec<Value>>,
    edges: Vec<RawEdge>,
    #[serde(default)]
    outer_face: Option<RawOuter>,
}

fn id_string(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::Parse(format!("identifier must be a string or number, got {other}"))),
    }
}

/// Parse and validate the JSON graph format.
pub fn parse_graph(text: &str) -> Result<WeightedPlanarGraph> {
    let raw: RawGraph = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let vertex_ids = raw.vertices.iter().map(id_string).collect::<Result<Vec<_>>>()?;
    let vindex: HashMap<&str, usize> = vertex_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    if vindex.len() != vertex_ids.len() {
        return Err(Error::Validation("duplicate vertex id".into()));
    }
    let mut edges = Vec::new();
    let mut eindex = HashMap::new();
    for e in &raw.edges {
        let id = id_string(&e.id)?;
        let mut ends = [0; 2];
        for (k, v) in e.ends.iter().enumerate() {
            let name = id_string(v)?;
            ends[k] = *vindex.get(name.as_str()).ok_or_else(|| Error::Validation(format!("edge {id}: unknown vertex {name}")))?;
        }
        if eindex.insert(id.clone(), edges.len()).is_some() {
            return Err(Error::Validation(format!("duplicate edge id {id}")));
        }
        edges.push(Edge { id, ends, weight: e.weight });
    }
    let mut rotations = vec![Vec::new(); vertex_ids.len()];
    for (vname, list) in &raw.rotations {
        let v = *vindex.get(vname.as_str()).ok_or_else(|| Error::Validation(format!("rotation for unknown vertex {vname}")))?;
        let mut seen_loop: HashMap<usize, usize> = HashMap::new();
        for item in list {
            let name = id_string(item)?;
            let e = *eindex.get(&name).ok_or_else(|| Error::Validation(format!("rotation lists unknown edge {name}")))?;
            let ends = edges[e].ends;
            let end = if ends[0] == ends[1] {
                // A loop appears twice; the first occurrence is its first end.
                let c = seen_loop.entry(e).or_insert(0);
                *c += 1;
                *c - 1
            } else if ends[0] == v {
                0
            } else if ends[1] == v {
                1
            } else {
                return Err(Error::Validation(format!("edge {name} is not incident to vertex {vname}")));
            };
            if end > 1 {
                return Err(Error::Validation(format!("loop {name} listed more than twice")));
            }
            rotations[v].push(HalfEdge { edge: e, end });
        }
    }
    let outer_side = match &raw.outer_face {
        None => Side { edge: 0, dir: 0 },
        Some(o) => {
            let name = id_string(&o.edge)?;
            let e = *eindex.get(&name).ok_or_else(|| Error::Validation(format!("outer face names unknown edge {name}")))?;
            if o.side > 1 {
                return Err(Error::Validation("outer face side must be 0 or 1".into()));
            }
            Side { edge: e, dir: o.side }
        }
    };
    WeightedPlanarGraph::new(vertex_ids, edges, rotations, outer_side)
}

impl WeightedPlanarGraph {
    /// Build and validate a graph from already-indexed data.
    pub fn new(vertex_ids: Vec<String>, edges: Vec<Edge>, rotations: Vec<Vec<HalfEdge>>, outer_side: Side) -> Result<Self> {
        let g = WeightedPlanarGraph { vertex_ids, edges, rotations, outer_side };
        g.validate()?;
        Ok(g)
    }

    /// Convenience constructor used by fixtures: edges as `(u, v, w)` and
    /// rotations as lists of `(edge, end)`.
    pub fn from_parts(nv: usize, edges: &[(usize, usize, i64)], rotations: &[Vec<(usize, usize)>]) -> Result<Self> {
        let vertex_ids = (0..nv).map(|v| v.to_string()).collect();
        let edges = edges.iter().enumerate().map(|(i, &(u, v, w))| Edge { id: i.to_string(), ends: [u, v], weight: w }).collect();
        let rotations = rotations.iter().map(|r| r.iter().map(|&(edge, end)| HalfEdge { edge, end }).collect()).collect();
        Self::new(vertex_ids, edges, rotations, Side { edge: 0, dir: 0 })
    }

    fn validate(&self) -> Result<()> {
        if self.vertex_ids.is_empty() {
            return Err(Error::Validation("graph has no vertices".into()));
        }
        if self.rotations.len() != self.vertex_ids.len() {
            return Err(Error::Validation("rotation table size mismatch".into()));
        }
        for e in &self.edges {
            if e.weight == 0 {
                return Err(Error::Validation(format!("zero weight on edge {}", e.id)));
            }
        }
        let mut count = HashMap::new();
        for (v, rot) in self.rotations.iter().enumerate() {
            for h in rot {
                if h.edge >= self.edges.len() || h.end > 1 || self.edges[h.edge].ends[h.end] != v {
                    return Err(Error::Validation(format!("inconsistent rotation at vertex {}", self.vertex_ids[v])));
                }
                *count.entry(*h).or_insert(0) += 1;
            }
        }
        for e in 0..self.edges.len() {
            for end in 0..2 {
                if count.get(&HalfEdge { edge: e, end }) != Some(&1) {
                    return Err(Error::Validation(format!(
                        "half-edge ({}, {end}) must appear exactly once in the rotations",
                        self.edges[e].id
                    )));
                }
            }
        }
        // Connectivity.
        let n = self.vertex_ids.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.ends[0]), find(&mut parent, e.ends[1]));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..n).any(|v| find(&mut parent, v) != root) {
            return Err(Error::Validation("disconnected graph".into()));
        }
        if self.outer_side.edge >= self.edges.len().max(1) {
            return Err(Error::Validation("outer face side out of range".into()));
        }
        let f = self.face_cycles().len();
        let chi = n as i64 - self.edges.len() as i64 + f as i64;
        if chi != 2 {
            return Err(Error::Validation(format!("non-planar rotation data: V - E + F = {chi}, expected 2")));
        }
        Ok(())
    }

    /// Position of a half-edge in its vertex rotation.
    fn slot(&self, h: HalfEdge) -> (usize, usize) {
        let v = self.edges[h.edge].ends[h.end];
        let p = self.rotations[v].iter().position(|x| *x == h).expect("validated rotation");
        (v, p)
    }

    /// The side that follows `s` along the face on its left.
    pub fn next_side(&self, s: Side) -> Side {
        let arrive = HalfEdge { edge: s.edge, end: 1 - s.dir };
        let (w, p) = self.slot(arrive);
        let d = self.rotations[w].len();
        let h = self.rotations[w][(p + d - 1) % d];
        Side { edge: h.edge, dir: h.end }
    }

    fn face_cycles(&self) -> Vec<Vec<Side>> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for e in 0..self.edges.len() {
            for dir in 0..2 {
                let start = Side { edge: e, dir };
                if seen.contains(&start) {
                    continue;
                }
                let mut cyc = Vec::new();
                let mut s = start;
                loop {
                    seen.insert(s);
                    cyc.push(s);
                    s = self.next_side(s);
                    if s == start {
                        break;
                    }
                }
                out.push(cyc);
            }
        }
        if self.edges.is_empty() {
            // A single vertex bounds one face on the sphere.
            out.push(Vec::new());
        }
        out
    }

    /// Faces of the embedding, with the unbounded face flagged.
    pub fn compute_faces(&self) -> Vec<Face> {
        let cycles = self.face_cycles();
        let outer = if self.edges.is_empty() { 0 } else { cycles.iter().position(|c| c.contains(&self.outer_side)).unwrap_or(0) };
        cycles.into_iter().enumerate().map(|(i, sides)| Face { sides, unbounded: i == outer }).collect()
    }

    /// The same graph with every weight negated.
    pub fn mirror(&self) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.weight = -e.weight;
        }
        g
    }

    /// Half-edges at vertex `v` in rotation order.
    pub fn rotation(&self, v: usize) -> &[HalfEdge] {
        &self.rotations[v]
    }
}

/// Compass halves of a crossing; labels 1..4 counterclockwise from NE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Half {
    NE,
    NW,
    SW,
    SE,
}

impl Half {
    pub const ALL: [Half; 4] = [Half::NE, Half::NW, Half::SW, Half::SE];

    /// Octahedron label 1..4.
    pub fn label(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_label(l: u8) -> Half {
        Half::ALL[(l - 1) as usize]
    }

    /// The half on the same strand across the crossing.
    pub fn opposite(self) -> Half {
        Half::ALL[(self as usize + 2) % 4]
    }

    /// Counterclockwise neighbour.
    pub fn ccw(self) -> Half {
        Half::ALL[(self as usize + 1) % 4]
    }

    /// Clockwise neighbour.
    pub fn cw(self) -> Half {
        Half::ALL[(self as usize + 3) % 4]
    }

    /// Planar position used for orientation signs.
    pub fn position(self) -> (i64, i64) {
        match self {
            Half::NE => (1, 1),
            Half::NW => (-1, 1),
            Half::SW => (-1, -1),
            Half::SE => (1, -1),
        }
    }

    /// True for the halves on the north side of the crossing.
    pub fn is_north(self) -> bool {
        matches!(self, Half::NE | Half::NW)
    }
}

/// A crossing placed in a band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub edge: usize,
    /// Position in the band, 0-based from the edge's first end.
    pub index: usize,
    pub weight: i64,
}

impl Crossing {
    /// Positive weight puts the NW-SE strand on top, negative the NE-SW strand.
    pub fn is_over(&self, h: Half) -> bool {
        if self.weight > 0 {
            matches!(h, Half::NW | Half::SE)
        } else {
            matches!(h, Half::NE | Half::SW)
        }
    }
}

/// A point where a strand leaves a crossing.
pub type Port = (usize, Half);

/// Resolution of a single crossing relative to its band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smoothing {
    /// Arcs SW-NW and SE-NE: strands continue along the band.
    Continue,
    /// Arcs SW-SE and NW-NE: strands turn back across the band.
    Cut,
}

impl Smoothing {
    /// The other half joined to `h` by this smoothing.
    pub fn partner(self, h: Half) -> Half {
        match (self, h) {
            (Smoothing::Continue, Half::SW) => Half::NW,
            (Smoothing::Continue, Half::NW) => Half::SW,
            (Smoothing::Continue, Half::SE) => Half::NE,
            (Smoothing::Continue, Half::NE) => Half::SE,
            (Smoothing::Cut, Half::SW) => Half::SE,
            (Smoothing::Cut, Half::SE) => Half::SW,
            (Smoothing::Cut, Half::NW) => Half::NE,
            (Smoothing::Cut, Half::NE) => Half::NW,
        }
    }
}

/// Diagram obtained as the boundary of the band surface.
#[derive(Debug, Clone)]
pub struct KnotDiagram {
    pub graph: WeightedPlanarGraph,
    pub crossings: Vec<Crossing>,
    /// Crossing ids of each twist region, ordered along the edge.
    pub regions: Vec<Vec<usize>>,
    /// `conn[c][h]` is the port joined to half `h` of crossing `c`.
    pub conn: Vec<[Port; 4]>,
    /// Crossing visits in knot order: `(crossing, entry half)`.
    pub traversal: Vec<(usize, Half)>,
}

/// Corner port of a band end: `left` as seen from the vertex looking into the band.
fn corner(regions: &[Vec<usize>], h: HalfEdge, left: bool) -> Port {
    let cs = &regions[h.edge];
    match (h.end, left) {
        (0, true) => (cs[0], Half::SW),
        (0, false) => (cs[0], Half::SE),
        (_, true) => (*cs.last().unwrap(), Half::NE),
        (_, false) => (*cs.last().unwrap(), Half::NW),
    }
}

/// Replace each edge by a twisted band and read off the boundary diagram.
pub fn build_diagram(g: &WeightedPlanarGraph) -> Result<KnotDiagram> {
    let mut crossings = Vec::new();
    let mut regions = Vec::new();
    for (e, edge) in g.edges.iter().enumerate() {
        let ids: Vec<usize> = (0..edge.weight.unsigned_abs() as usize)
            .map(|j| {
                crossings.push(Crossing { edge: e, index: j, weight: edge.weight });
                crossings.len() - 1
            })
            .collect();
        regions.push(ids);
    }
    let unset = (usize::MAX, Half::NE);
    let mut conn = vec![[unset; 4]; crossings.len()];
    let mut join = |a: Port, b: Port| {
        conn[a.0][a.1 as usize] = b;
        conn[b.0][b.1 as usize] = a;
    };
    for ids in &regions {
        for w in ids.windows(2) {
            join((w[0], Half::NW), (w[1], Half::SW));
            join((w[0], Half::NE), (w[1], Half::SE));
        }
    }
    for rot in &g.rotations {
        for (i, &h) in rot.iter().enumerate() {
            let h2 = rot[(i + 1) % rot.len()];
            join(corner(&regions, h, true), corner(&regions, h2, false));
        }
    }
    if conn.iter().flatten().any(|p| p.0 == usize::MAX) {
        return Err(Error::Construction("diagram connectivity error".into()));
    }
    let mut d = KnotDiagram { graph: g.clone(), crossings, regions, conn, traversal: Vec::new() };
    let comps = d.component_count();
    if comps != 1 {
        return Err(Error::Validation(format!("not a knot: band boundary has {comps} components")));
    }
    d.traversal = d.walk_knot();
    Ok(d)
}

impl KnotDiagram {
    /// Number of crossings c(D).
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    /// Number of boundary components of the band surface.
    pub fn component_count(&self) -> usize {
        if self.crossings.is_empty() {
            return 1;
        }
        let mut seen = vec![[false; 4]; self.crossings.len()];
        let mut comps = 0;
        for c in 0..self.crossings.len() {
            for h in Half::ALL {
                if seen[c][h as usize] {
                    continue;
                }
                comps += 1;
                let mut x = (c, h);
                while !seen[x.0][x.1 as usize] {
                    seen[x.0][x.1 as usize] = true;
                    let out = x.1.opposite();
                    seen[x.0][out as usize] = true;
                    x = self.conn[x.0][out as usize];
                }
            }
        }
        comps
    }

    fn walk_knot(&self) -> Vec<(usize, Half)> {
        let mut out = Vec::new();
        if self.crossings.is_empty() {
            return out;
        }
        let start = (0, Half::SW);
        let mut x = start;
        loop {
            out.push(x);
            x = self.conn[x.0][x.1.opposite() as usize];
            if x == start {
                break;
            }
        }
        out
    }

    /// Entry half of the over and under visit of each crossing.
    pub fn entry_halves(&self) -> Vec<(Half, Half)> {
        let mut over = vec![None; self.crossings.len()];
        let mut under = vec![None; self.crossings.len()];
        for &(c, h) in &self.traversal {
            if self.crossings[c].is_over(h) {
                over[c] = Some(h);
            } else {
                under[c] = Some(h);
            }
        }
        over.into_iter().zip(under).map(|(o, u)| (o.unwrap(), u.unwrap())).collect()
    }

    /// Oriented crossing signs (+1 / -1) under the canonical orientation.
    pub fn crossing_signs(&self) -> Vec<i64> {
        self.entry_halves()
            .into_iter()
            .map(|(o, u)| {
                let (a, b) = (o.position(), u.position());
                (a.0 * b.1 - a.1 * b.0).signum()
            })
            .collect()
    }

    pub fn writhe(&self) -> i64 {
        self.crossing_signs().iter().sum()
    }

    /// The smoothing that follows the knot orientation at each crossing.
    pub fn oriented_smoothings(&self) -> Vec<Smoothing> {
        self.entry_halves()
            .into_iter()
            .map(|(o, u)| {
                let target = u.opposite();
                if Smoothing::Continue.partner(o) == target {
                    Smoothing::Continue
                } else {
                    Smoothing::Cut
                }
            })
            .collect()
    }
}

/// Global switch for which saddles raise the slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SaddleSign {
    /// A positive crossing's oriented resolution raises the slope.
    Plus,
    /// The opposite convention.
    Minus,
}

impl SaddleSign {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(SaddleSign::Plus),
            "-" | "minus" => Ok(SaddleSign::Minus),
            _ => Err(Error::Parse(format!("saddle sign must be + or -, got {s}"))),
        }
    }
}

/// Twist number `2(s_- - s_+)` of the state surface built from `smoothings`.
pub fn state_surface_twist(d: &KnotDiagram, smoothings: &[Smoothing], sign: SaddleSign) -> i64 {
    let signs = d.crossing_signs();
    let oriented = d.oriented_smoothings();
    let mut s_plus = 0;
    let mut s_minus = 0;
    for c in 0..d.crossings.len() {
        let raises = (smoothings[c] == oriented[c]) == (signs[c] > 0);
        let raises = raises == (sign == SaddleSign::Plus);
        if raises {
            s_plus += 1;
        } else {
            s_minus += 1;
        }
    }
    2 * (s_minus - s_plus)
}

/// Twist number of the Seifert surface (every crossing resolved along the orientation).
pub fn seifert_twist(d: &KnotDiagram, sign: SaddleSign) -> i64 {
    state_surface_twist(d, &d.oriented_smoothings(), sign)
}
