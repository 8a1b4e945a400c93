//! Octahedral ideal triangulation of a knot exterior and its inflation.
//!
//! Each crossing carries an octahedron with vertices 0 (point on the over
//! strand), 1..4 (the crossing halves NE, NW, SW, SE) and 5 (point on the
//! under strand), split into five tetrahedra `z, u_f, u_b, l_f, l_b`. Outer
//! faces slide along the knot strands to merge neighbouring octahedra, two
//! pillows join the poles into one ideal vertex, and inflation along a frame
//! on the boundary torus produces a genuine triangulation with two free faces.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::diagram::{Half, KnotDiagram};
use crate::error::{Error, Result};
use crate::linalg;

/// Vertex map of a face gluing: local vertex `i` goes to `perm[i]`.
pub type Perm = [u8; 4];

/// Face of a tetrahedron named by the vertex it omits.
pub type FaceIx = usize;

/// Ordered vertices of the face opposite `f`.
pub fn face_vertices(f: FaceIx) -> [u8; 3] {
    let mut out = [0u8; 3];
    let mut k = 0;
    for v in 0..4u8 {
        if v as usize != f {
            out[k] = v;
            k += 1;
        }
    }
    out
}

/// Face index from its three vertices.
pub fn face_from(vs: [u8; 3]) -> FaceIx {
    (0..4).find(|v| !vs.contains(&(*v as u8))).expect("three distinct vertices")
}

fn complete(pairs: [(u8, u8); 3]) -> Perm {
    let src: Vec<u8> = pairs.iter().map(|p| p.0).collect();
    let dst: Vec<u8> = pairs.iter().map(|p| p.1).collect();
    let a = (0..4u8).find(|v| !src.contains(v)).unwrap();
    let b = (0..4u8).find(|v| !dst.contains(v)).unwrap();
    let mut p = [0u8; 4];
    for (s, d) in pairs {
        p[s as usize] = d;
    }
    p[a as usize] = b;
    p
}

fn inverse(p: Perm) -> Perm {
    let mut q = [0u8; 4];
    for i in 0..4 {
        q[p[i] as usize] = i as u8;
    }
    q
}

/// Sign of a permutation given as a vertex sequence.
pub fn perm_sign(p: &[u8]) -> i32 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// A face pairing seen from one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub tet: usize,
    pub perm: Perm,
}

/// Tetrahedron of an octahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OctRole {
    Z,
    Uf,
    Ub,
    Lf,
    Lb,
}

impl OctRole {
    pub const ALL: [OctRole; 5] = [OctRole::Z, OctRole::Uf, OctRole::Ub, OctRole::Lf, OctRole::Lb];

    pub fn name(self) -> &'static str {
        match self {
            OctRole::Z => "z",
            OctRole::Uf => "u_f",
            OctRole::Ub => "u_b",
            OctRole::Lf => "l_f",
            OctRole::Lb => "l_b",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        OctRole::ALL.into_iter().find(|r| r.name() == s)
    }
}

/// Role tag of a tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TetLabel {
    Oct {
        crossing: usize,
        role: OctRole,
    },
    Pillow {
        pillow: usize,
        part: usize,
    },
    /// Inflation tetrahedron of the longitude branch edge `x_j` (1-based).
    Frame {
        index: usize,
    },
    /// Inflation tetrahedron of the meridian edge `y_1`.
    Meridian,
    /// One of the two tetrahedra subdividing the branch cone.
    Cone {
        part: usize,
    },
}

/// Construction stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Octahedra,
    WithPillows,
    Inflated,
}

impl Stage {
    fn name(self) -> &'static str {
        match self {
            Stage::Octahedra => "octahedra",
            Stage::WithPillows => "pillows",
            Stage::Inflated => "inflated",
        }
    }
}

/// A frame edge on the boundary torus: the link edge at `corner` of face
/// `face` of tetrahedron `tet`, directed from the end on `tail` to the end on `head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameEdge {
    pub tet: usize,
    pub face: FaceIx,
    pub corner: u8,
    pub tail: u8,
    pub head: u8,
}

/// Index-4 frame: a longitude cycle `x_1..x_m` and a meridian loop `y_1`
/// meeting it at the branch vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub x: Vec<FrameEdge>,
    pub y: FrameEdge,
    /// Crossing whose octahedron contains the meridian edge.
    pub branch_crossing: usize,
}

/// Labelled tetrahedra with face pairings.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub labels: Vec<TetLabel>,
    pub adj: Vec<[Option<Gluing>; 4]>,
    pub stage: Stage,
    /// Octahedron vertex of each local vertex, for octahedron tetrahedra.
    pub oct_vertices: Vec<Option<[u8; 4]>>,
    /// For each inflated frame face of T*, the inflation tetrahedron.
    pub inflated_faces: HashMap<(usize, FaceIx), usize>,
    pub frame: Option<Frame>,
}

// Internal pairings of an octahedron, as printed: (tet, face, tet, image).
type TableRow = (OctRole, [u8; 3], OctRole, [u8; 3]);

use OctRole::{Lb, Lf, Ub, Uf, Z};

/// Octahedron gluing used for positive twist weight (over strand NW-SE).
pub const TABLE_NEG: [TableRow; 12] = [
    (Z, [0, 1, 2], Uf, [0, 3, 2]),
    (Z, [0, 1, 3], Lf, [3, 1, 2]),
    (Z, [0, 2, 3], Ub, [0, 2, 3]),
    (Z, [1, 2, 3], Lb, [0, 2, 1]),
    (Uf, [0, 1, 2], Ub, [0, 1, 2]),
    (Uf, [0, 2, 3], Z, [0, 2, 1]),
    (Ub, [0, 1, 2], Uf, [0, 1, 2]),
    (Ub, [0, 2, 3], Z, [0, 2, 3]),
    (Lf, [0, 1, 2], Lb, [3, 0, 1]),
    (Lf, [1, 2, 3], Z, [1, 3, 0]),
    (Lb, [0, 1, 2], Z, [1, 3, 2]),
    (Lb, [0, 1, 3], Lf, [1, 2, 0]),
];

/// Octahedron gluing used for negative twist weight (over strand NE-SW).
pub const TABLE_POS: [TableRow; 12] = [
    (Z, [0, 1, 2], Uf, [2, 3, 1]),
    (Z, [0, 1, 3], Lf, [3, 2, 0]),
    (Z, [0, 2, 3], Ub, [1, 0, 2]),
    (Z, [1, 2, 3], Lb, [2, 3, 0]),
    (Uf, [0, 1, 2], Ub, [3, 0, 1]),
    (Uf, [1, 2, 3], Z, [2, 0, 1]),
    (Ub, [0, 1, 2], Z, [2, 0, 3]),
    (Ub, [0, 1, 3], Uf, [1, 2, 0]),
    (Lf, [0, 1, 2], Lb, [0, 1, 2]),
    (Lf, [0, 2, 3], Z, [3, 1, 0]),
    (Lb, [0, 1, 2], Lf, [0, 1, 2]),
    (Lb, [0, 2, 3], Z, [3, 1, 2]),
];

/// Octahedron vertex of each tetrahedron vertex for `TABLE_NEG`.
pub const PHI_NEG: [[u8; 4]; 5] = [[1, 2, 3, 4], [1, 0, 3, 2], [1, 0, 3, 4], [5, 2, 4, 1], [2, 4, 3, 5]];
/// Octahedron vertex of each tetrahedron vertex for `TABLE_POS`.
pub const PHI_POS: [[u8; 4]; 5] = [[2, 1, 4, 3], [0, 4, 2, 1], [4, 2, 3, 0], [3, 5, 1, 2], [3, 5, 1, 4]];

// Pillow internal pairings (Table 3): tetrahedron 0 then tetrahedron 1.
const PILLOW: [(usize, [u8; 3], usize, [u8; 3]); 6] = [
    (0, [0, 1, 2], 1, [0, 1, 3]),
    (0, [1, 2, 3], 1, [0, 1, 2]),
    (1, [0, 1, 3], 0, [0, 1, 2]),
    (1, [0, 1, 2], 0, [1, 2, 3]),
    (1, [0, 2, 3], 1, [1, 2, 3]),
    (1, [1, 2, 3], 1, [0, 2, 3]),
];

/// Role of a tetrahedron vertex relative to the diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum VRole {
    Knot,
    North,
    South,
    Other,
}

fn table_for(weight: i64) -> (&'static [TableRow; 12], &'static [[u8; 4]; 5]) {
    if weight > 0 {
        (&TABLE_NEG, &PHI_NEG)
    } else {
        (&TABLE_POS, &PHI_POS)
    }
}

/// True if `(role, face)` is an internal face of the octahedron table.
fn is_internal(weight: i64, role: OctRole, f: FaceIx) -> bool {
    let (tab, _) = table_for(weight);
    tab.iter().any(|r| r.0 == role && face_from(r.1) == f)
}

struct UnionFind {
    p: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { p: (0..n).collect() }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.p[x] != x {
            self.p[x] = self.p[self.p[x]];
            x = self.p[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.p[a] = b;
    }
}

impl Triangulation {
    fn empty(stage: Stage) -> Self {
        Triangulation { labels: Vec::new(), adj: Vec::new(), stage, oct_vertices: Vec::new(), inflated_faces: HashMap::new(), frame: None }
    }

    pub fn tet_count(&self) -> usize {
        self.labels.len()
    }

    fn add_tet(&mut self, label: TetLabel, phi: Option<[u8; 4]>) -> usize {
        self.labels.push(label);
        self.adj.push([None; 4]);
        self.oct_vertices.push(phi);
        self.labels.len() - 1
    }

    /// Pair face `f` of `t` with `t2` via `perm`, checking consistency with any existing pairing.
    fn set_pair(&mut self, t: usize, perm: Perm, f: FaceIx, t2: usize) -> Result<()> {
        let f2 = perm[f] as usize;
        let g = Gluing { tet: t2, perm };
        let back = Gluing { tet: t, perm: inverse(perm) };
        for (a, fa, gl) in [(t, f, g), (t2, f2, back)] {
            match self.adj[a][fa] {
                Some(old) if old != gl => {
                    return Err(Error::Construction(format!("conflicting pairing on {}:{}", self.labels[a].render(false), face_name(fa))))
                }
                _ => self.adj[a][fa] = Some(gl),
            }
        }
        Ok(())
    }

    /// Pair the listed vertices of `t` with those of `t2`.
    fn pair(&mut self, t: usize, pairs: [(u8, u8); 3], t2: usize) -> Result<()> {
        let p = complete(pairs);
        let f = face_from([pairs[0].0, pairs[1].0, pairs[2].0]);
        self.set_pair(t, p, f, t2)
    }

    fn unpair(&mut self, t: usize, f: FaceIx) -> Gluing {
        let g = self.adj[t][f].take().expect("face is paired");
        self.adj[g.tet][g.perm[f] as usize] = None;
        g
    }

    /// Faces without a partner.
    pub fn free_faces(&self) -> Vec<(usize, FaceIx)> {
        let mut out = Vec::new();
        for t in 0..self.tet_count() {
            for f in (0..4).rev() {
                if self.adj[t][f].is_none() {
                    out.push((t, f));
                }
            }
        }
        out
    }

    /// Remove one pairing (used for fault injection in audits).
    pub fn delete_pairing(&mut self, t: usize, f: FaceIx) {
        if self.adj[t][f].is_some() {
            self.unpair(t, f);
        }
    }

    /// Orientation signs of the tetrahedra if the triangulation is orientable.
    pub fn orientation(&self) -> Option<Vec<i32>> {
        let n = self.tet_count();
        let mut eps = vec![0i32; n];
        for s in 0..n {
            if eps[s] != 0 {
                continue;
            }
            eps[s] = 1;
            let mut stack = vec![s];
            while let Some(t) = stack.pop() {
                for f in 0..4 {
                    if let Some(g) = self.adj[t][f] {
                        let want = -eps[t] * perm_sign(&g.perm);
                        if eps[g.tet] == 0 {
                            eps[g.tet] = want;
                            stack.push(g.tet);
                        } else if eps[g.tet] != want {
                            return None;
                        }
                    }
                }
            }
        }
        Some(eps)
    }

    /// Union-find over edge ends `(t, a, b)`: the end at vertex `a` of edge `ab`.
    fn end_classes(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.tet_count() * 16);
        for t in 0..self.tet_count() {
            for f in 0..4 {
                if let Some(g) = self.adj[t][f] {
                    let vs = face_vertices(f);
                    for &a in &vs {
                        for &b in &vs {
                            if a != b {
                                uf.union(end_id(t, a, b), end_id(g.tet, g.perm[a as usize], g.perm[b as usize]));
                            }
                        }
                    }
                }
            }
        }
        uf
    }

    /// Canonical id of the boundary link edge at corner `x` of face `f` of `t`.
    fn link_edge(&self, t: usize, x: u8, f: FaceIx) -> (usize, FaceIx, u8) {
        let a = (t, f, x);
        match self.adj[t][f] {
            None => a,
            Some(g) => a.min((g.tet, g.perm[f] as usize, g.perm[x as usize])),
        }
    }
}

fn end_id(t: usize, a: u8, b: u8) -> usize {
    t * 16 + a as usize * 4 + b as usize
}

/// Name of a face as its ordered vertex triple.
pub fn face_name(f: FaceIx) -> String {
    face_vertices(f).iter().map(|v| char::from(b'0' + v)).collect()
}

impl TetLabel {
    /// Text form; octahedron labels drop the crossing index when `single` is set.
    pub fn render(&self, single: bool) -> String {
        match *self {
            TetLabel::Oct { crossing, role } if single && crossing == 0 => role.name().to_string(),
            TetLabel::Oct { crossing, role } => format!("{}.{}", role.name(), crossing),
            TetLabel::Pillow { pillow, part } => format!("p{pillow}.{part}"),
            TetLabel::Frame { index } => format!("x{index}"),
            TetLabel::Meridian => "y1".to_string(),
            TetLabel::Cone { part } => format!("b*.{part}"),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown tetrahedron label {s}"));
        if let Some(r) = OctRole::from_name(s) {
            return Ok(TetLabel::Oct { crossing: 0, role: r });
        }
        if s == "y1" {
            return Ok(TetLabel::Meridian);
        }
        if let Some(rest) = s.strip_prefix("b*.") {
            return Ok(TetLabel::Cone { part: rest.parse().map_err(|_| bad())? });
        }
        if let Some(rest) = s.strip_prefix('x') {
            return Ok(TetLabel::Frame { index: rest.parse().map_err(|_| bad())? });
        }
        if let Some(rest) = s.strip_prefix('p') {
            let (a, b) = rest.split_once('.').ok_or_else(bad)?;
            return Ok(TetLabel::Pillow { pillow: a.parse().map_err(|_| bad())?, part: b.parse().map_err(|_| bad())? });
        }
        let (a, b) = s.rsplit_once('.').ok_or_else(bad)?;
        let role = OctRole::from_name(a).ok_or_else(bad)?;
        Ok(TetLabel::Oct { crossing: b.parse().map_err(|_| bad())?, role })
    }
}

/// The five tetrahedra of one crossing's octahedron with their internal pairings.
pub fn crossing_octahedron(weight: i64, crossing: usize) -> Triangulation {
    let mut t = Triangulation::empty(Stage::Octahedra);
    add_octahedron(&mut t, weight, crossing).expect("tables are consistent");
    t
}

fn add_octahedron(t: &mut Triangulation, weight: i64, crossing: usize) -> Result<usize> {
    let (tab, phi) = table_for(weight);
    let base = t.tet_count();
    for (i, role) in OctRole::ALL.iter().enumerate() {
        t.add_tet(TetLabel::Oct { crossing, role: *role }, Some(phi[i]));
    }
    let ix = |r: OctRole| base + r as usize;
    for &(a, fa, b, fb) in tab.iter() {
        t.pair(ix(a), [(fa[0], fb[0]), (fa[1], fb[1]), (fa[2], fb[2])], ix(b))?;
    }
    Ok(base)
}

/// Builder state shared by the construction stages.
struct Builder<'d> {
    d: &'d KnotDiagram,
    t: Triangulation,
    roles: Vec<[VRole; 4]>,
}

impl<'d> Builder<'d> {
    fn oct_tet(&self, c: usize) -> std::ops::Range<usize> {
        5 * c..5 * c + 5
    }

    fn weight(&self, c: usize) -> i64 {
        self.d.crossings[c].weight
    }

    /// Octahedron boundary face of crossing `c` spanned by octahedron vertices `vs`.
    fn boundary_face(&self, c: usize, vs: [u8; 3]) -> Result<(usize, FaceIx)> {
        for t in self.oct_tet(c) {
            let phi = self.t.oct_vertices[t].unwrap();
            if vs.iter().all(|v| phi.contains(v)) {
                let local: Vec<u8> = vs.iter().map(|v| phi.iter().position(|x| x == v).unwrap() as u8).collect();
                let f = face_from([local[0], local[1], local[2]]);
                let role = OctRole::ALL[t - 5 * c];
                if !is_internal(self.weight(c), role, f) {
                    return Ok((t, f));
                }
            }
        }
        Err(Error::Construction(format!("no octahedron face {vs:?} at crossing {c}")))
    }

    fn role_of(&self, c: usize, ov: u8) -> VRole {
        match ov {
            0 | 5 => VRole::Knot,
            h => {
                if self.d.crossings[c].is_over(Half::from_label(h)) {
                    VRole::North
                } else {
                    VRole::South
                }
            }
        }
    }

    fn octahedra(d: &'d KnotDiagram) -> Result<Self> {
        let mut t = Triangulation::empty(Stage::Octahedra);
        let mut roles = Vec::new();
        let mut b = Builder { d, t: Triangulation::empty(Stage::Octahedra), roles: Vec::new() };
        for (c, cr) in d.crossings.iter().enumerate() {
            add_octahedron(&mut t, cr.weight, c)?;
        }
        b.t = t;
        for tet in 0..b.t.tet_count() {
            let c = match b.t.labels[tet] {
                TetLabel::Oct { crossing, .. } => crossing,
                _ => unreachable!(),
            };
            let phi = b.t.oct_vertices[tet].unwrap();
            roles.push([0, 1, 2, 3].map(|x| b.role_of(c, phi[x])));
        }
        b.roles = roles;
        b.merge_strands()?;
        Ok(b)
    }

    /// Slide each outer face along its knot strand onto the neighbouring octahedron.
    fn merge_strands(&mut self) -> Result<()> {
        let d = self.d;
        for c in 0..d.crossings.len() {
            for k in [0u8, 5u8] {
                for i in 1..=4u8 {
                    let j = i % 4 + 1;
                    let (t, f) = self.boundary_face(c, [k, i, j])?;
                    let (hi, hj) = (Half::from_label(i), Half::from_label(j));
                    let want_over = k == 0;
                    let h = if d.crossings[c].is_over(hi) == want_over { hi } else { hj };
                    let other = if h == hi { hj } else { hi };
                    let (c2, h2) = d.conn[c][h as usize];
                    let k2 = if d.crossings[c2].is_over(h2) { 0 } else { 5 };
                    // The strand arrives head-on, so the side swaps orientation.
                    let other2 = if other == h.ccw() { h2.cw() } else { h2.ccw() };
                    let (t2, f2) = self.boundary_face(c2, [k2, h2.label(), other2.label()])?;
                    let r2: HashMap<VRole, u8> = face_vertices(f2).iter().map(|&y| (self.roles[t2][y as usize], y)).collect();
                    let vs = face_vertices(f);
                    let pairs = vs.map(|x| (x, r2[&self.roles[t][x as usize]]));
                    self.t.pair(t, pairs, t2)?;
                }
            }
        }
        Ok(())
    }

    /// Insert one pillow on the face `(t, f)`, `pole` naming the pole vertex.
    fn add_pillow(&mut self, t: usize, f: FaceIx, pole: VRole, index: usize) -> Result<()> {
        let g = self.t.unpair(t, f);
        let b = self.t.add_tet(TetLabel::Pillow { pillow: index, part: 0 }, None);
        self.t.add_tet(TetLabel::Pillow { pillow: index, part: 1 }, None);
        self.roles.push([VRole::Other; 4]);
        self.roles.push([VRole::Other; 4]);
        for (a, fa, k, fb) in PILLOW {
            self.t.pair(b + a, [(fa[0], fb[0]), (fa[1], fb[1]), (fa[2], fb[2])], b + k)?;
        }
        let vs = face_vertices(f);
        let find = |r: VRole| vs.iter().copied().find(|&x| self.roles[t][x as usize] == r);
        let kv = find(VRole::Knot).ok_or_else(|| Error::Construction("pillow placement failure".into()))?;
        let pv = find(pole).ok_or_else(|| Error::Construction("pillow placement failure".into()))?;
        let qv = vs.iter().copied().find(|&x| x != kv && x != pv).unwrap();
        self.t.pair(t, [(kv, 0), (pv, 1), (qv, 3)], b)?;
        let m = g.perm;
        self.t.pair(b, [(0, m[kv as usize]), (2, m[pv as usize]), (3, m[qv as usize])], g.tet)?;
        Ok(())
    }

    fn insert_pillows(&mut self) -> Result<()> {
        let (t1, f1) = self.boundary_face(0, [0, 2, 3])?;
        let (t2, f2) = self.boundary_face(0, [5, 2, 3])?;
        self.add_pillow(t1, f1, VRole::North, 0)?;
        self.add_pillow(t2, f2, VRole::South, 1)?;
        self.t.stage = Stage::WithPillows;
        Ok(())
    }

    /// Longitude branch: corner edges of outer faces where the strand changes level.
    fn longitude_edges(&self) -> Result<Vec<(usize, FaceIx, u8)>> {
        let d = self.d;
        let mut out = Vec::new();
        for &(c, hin) in &d.traversal {
            let hout = hin.opposite();
            let (c2, h2) = d.conn[c][hout as usize];
            let o1 = d.crossings[c].is_over(hout);
            let o2 = d.crossings[c2].is_over(h2);
            if o1 == o2 {
                continue;
            }
            let k = if o1 { 0 } else { 5 };
            let cor = if hout.is_north() { [1, 2] } else { [3, 4] };
            let (t, f) = self.boundary_face(c, [k, cor[0], cor[1]])?;
            let phi = self.t.oct_vertices[t].unwrap();
            let x = phi.iter().position(|&v| v == k).unwrap() as u8;
            out.push((t, f, x));
        }
        Ok(out)
    }

    /// Octahedron-internal link edges at knot corners whose two ends coincide.
    fn meridian_candidates(&self) -> Vec<(usize, FaceIx, u8)> {
        let mut uf = self.t.end_classes();
        let mut out = Vec::new();
        for t in 0..self.t.tet_count() {
            let (c, role) = match self.t.labels[t] {
                TetLabel::Oct { crossing, role } => (crossing, role),
                _ => continue,
            };
            let phi = self.t.oct_vertices[t].unwrap();
            for f in (0..4).rev() {
                if !is_internal(self.weight(c), role, f) {
                    continue;
                }
                for x in face_vertices(f) {
                    if phi[x as usize] == 0 || phi[x as usize] == 5 {
                        let o: Vec<u8> = face_vertices(f).into_iter().filter(|&y| y != x).collect();
                        if uf.find(end_id(t, x, o[0])) == uf.find(end_id(t, x, o[1])) {
                            out.push((t, f, x));
                        }
                    }
                }
            }
        }
        out
    }

    /// Link edges around the boundary vertex `end(t, x, y)`, in rotation order,
    /// with the triangle preceding each edge and the entry data.
    fn rotation(&self, t: usize, x: u8, y: u8) -> Result<Vec<RotStep>> {
        let z1 = (0..4u8).find(|v| *v != x && *v != y).unwrap();
        let start = (t, x, y, z1);
        let mut cur = start;
        let mut out = Vec::new();
        loop {
            let (tc, xc, yc, zin) = cur;
            let zout = (0..4u8).find(|v| ![xc, yc, zin].contains(v)).unwrap();
            let f = face_from([xc, yc, zout]);
            out.push(RotStep { edge: self.t.link_edge(tc, xc, f), tri: (tc, xc), y: yc, zin });
            let g = self.t.adj[tc][f].ok_or_else(|| Error::Construction("rotation hits a free face".into()))?;
            cur = (g.tet, g.perm[xc as usize], g.perm[yc as usize], g.perm[zout as usize]);
            if cur == start {
                return Ok(out);
            }
            if out.len() > 64 * self.t.tet_count() {
                return Err(Error::Construction("rotation does not close".into()));
            }
        }
    }

    fn choose_frame(&self, flip_y: bool) -> Result<Frame> {
        let mut uf = self.t.end_classes();
        let raw = self.longitude_edges()?;
        if raw.is_empty() {
            return Err(Error::Construction("frame placement failure: no longitude edges".into()));
        }
        let mut xs: Vec<FrameEdge> = raw
            .iter()
            .map(|&(t, f, x)| {
                let o: Vec<u8> = face_vertices(f).into_iter().filter(|&y| y != x).collect();
                FrameEdge { tet: t, face: f, corner: x, tail: o[0], head: o[1] }
            })
            .collect();
        let n = xs.len();
        let mut e = |t: usize, a: u8, b: u8| uf.find(end_id(t, a, b));
        for j in 0..n {
            let cur = xs[j];
            let nx = xs[(j + 1) % n];
            let nxt = [e(nx.tet, nx.corner, nx.tail), e(nx.tet, nx.corner, nx.head)];
            let (ht, tt) = (e(cur.tet, cur.corner, cur.head), e(cur.tet, cur.corner, cur.tail));
            if nxt.contains(&ht) && !nxt.contains(&tt) {
            } else if nxt.contains(&tt) && !nxt.contains(&ht) {
                xs[j] = FrameEdge { tail: cur.head, head: cur.tail, ..cur };
            } else {
                return Err(Error::Construction("frame placement failure: longitude is not a simple chain".into()));
            }
        }
        for (t, f, x) in self.meridian_candidates() {
            let o: Vec<u8> = face_vertices(f).into_iter().filter(|&y| y != x).collect();
            let bv = e(t, x, o[0]);
            for j in 0..n {
                let xj = xs[j];
                if e(xj.tet, xj.corner, xj.head) != bv {
                    continue;
                }
                let rot = self.rotation(t, x, o[0])?;
                let ids: Vec<_> = rot.iter().map(|s| s.edge).collect();
                let yid = self.t.link_edge(t, x, f);
                let jj = (j + 1) % n;
                let e_in = self.t.link_edge(xj.tet, xj.corner, xj.face);
                let xo = xs[jj];
                let e_out = self.t.link_edge(xo.tet, xo.corner, xo.face);
                let py: Vec<usize> = (0..ids.len()).filter(|&i| ids[i] == yid).collect();
                let (Some(pi), Some(po)) = (ids.iter().position(|&i| i == e_in), ids.iter().position(|&i| i == e_out)) else {
                    continue;
                };
                if py.len() == 2 {
                    let (lo, hi) = (py[0], py[1]);
                    if (lo < pi && pi < hi) != (lo < po && po < hi) {
                        xs.rotate_left(jj);
                        let y = if flip_y {
                            FrameEdge { tet: t, face: f, corner: x, tail: o[1], head: o[0] }
                        } else {
                            FrameEdge { tet: t, face: f, corner: x, tail: o[0], head: o[1] }
                        };
                        let branch_crossing = match self.t.labels[t] {
                            TetLabel::Oct { crossing, .. } => crossing,
                            _ => 0,
                        };
                        return Ok(Frame { x: xs, y, branch_crossing });
                    }
                }
            }
        }
        Err(Error::Construction("frame placement failure: no meridian crossing the longitude".into()))
    }
}

#[derive(Debug, Clone, Copy)]
struct RotStep {
    edge: (usize, FaceIx, u8),
    tri: (usize, u8),
    y: u8,
    zin: u8,
}

/// Assemble the octahedra with strand merges (stage T°).
pub fn assemble_ideal(d: &KnotDiagram) -> Result<Triangulation> {
    if d.crossings.is_empty() {
        return Err(Error::Validation("diagram has no crossings".into()));
    }
    Ok(Builder::octahedra(d)?.t)
}

/// Octahedra plus the two pillows (stage T*).
pub fn insert_pillows(d: &KnotDiagram) -> Result<Triangulation> {
    if d.crossings.is_empty() {
        return Err(Error::Validation("diagram has no crossings".into()));
    }
    let mut b = Builder::octahedra(d)?;
    b.insert_pillows()?;
    Ok(b.t)
}

/// Frame on the boundary torus of T*.
pub fn choose_frame(d: &KnotDiagram) -> Result<Frame> {
    let mut b = Builder::octahedra(d)?;
    b.insert_pillows()?;
    b.choose_frame(false)
}

/// Build the inflated triangulation T of the knot exterior.
pub fn build_inflated(d: &KnotDiagram) -> Result<Triangulation> {
    if d.crossings.len() <= 2 {
        return Err(Error::Validation("inflation needs a diagram with more than two crossings".into()));
    }
    let mut last = None;
    for flip in [false, true] {
        let mut b = Builder::octahedra(d)?;
        b.insert_pillows()?;
        let frame = b.choose_frame(flip)?;
        match inflate(&mut b, frame) {
            Ok(()) => return Ok(b.t),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

fn cone_local(vs: &[u8]) -> (usize, Vec<u8>) {
    const A: [u8; 4] = [0, 1, 2, 4];
    const B: [u8; 4] = [0, 2, 3, 4];
    if vs.iter().all(|v| A.contains(v)) {
        (0, vs.iter().map(|v| A.iter().position(|a| a == v).unwrap() as u8).collect())
    } else {
        (1, vs.iter().map(|v| B.iter().position(|a| a == v).unwrap() as u8).collect())
    }
}

fn inflate(b: &mut Builder, frame: Frame) -> Result<()> {
    let pre = b.t.clone();
    let eps = b.t.orientation().ok_or_else(|| Error::Construction("T* is not orientable".into()))?;
    let mut tail_tri: HashMap<(usize, FaceIx, u8), (usize, u8)> = HashMap::new();
    let mut inflate_edge = |b: &mut Builder, e: FrameEdge, label: TetLabel| -> Result<usize> {
        let (t, f, a, c, bb) = (e.tet, e.face, e.corner, e.tail, e.head);
        let g = b.t.unpair(t, f);
        let d = (0..4u8).find(|v| ![a, bb, c].contains(v)).unwrap();
        let left = perm_sign(&[a, c, bb, d]) * eps[t] == 1;
        let x = b.t.add_tet(label, None);
        b.roles.push([VRole::Other; 4]);
        b.t.inflated_faces.insert((t, f), x);
        b.t.inflated_faces.insert((g.tet, g.perm[f] as usize), x);
        let m = g.perm;
        if left {
            tail_tri.insert((t, f, a), (t, a));
            b.t.pair(t, [(a, 0), (bb, 3), (c, 2)], x)?;
            b.t.pair(x, [(1, m[a as usize]), (3, m[bb as usize]), (2, m[c as usize])], g.tet)?;
        } else {
            tail_tri.insert((t, f, a), (g.tet, m[a as usize]));
            b.t.pair(g.tet, [(m[a as usize], 0), (m[bb as usize], 3), (m[c as usize], 2)], x)?;
            b.t.pair(x, [(1, a), (3, bb), (2, c)], t)?;
        }
        Ok(x)
    };
    let mut xt = Vec::new();
    for (j, e) in frame.x.iter().enumerate() {
        xt.push(inflate_edge(b, *e, TetLabel::Frame { index: j + 1 })?);
    }
    let yt = inflate_edge(b, frame.y, TetLabel::Meridian)?;
    for j in 0..xt.len() - 1 {
        b.t.pair(xt[j], [(0, 0), (1, 1), (3, 2)], xt[j + 1])?;
    }
    let ca = b.t.add_tet(TetLabel::Cone { part: 0 }, None);
    b.t.add_tet(TetLabel::Cone { part: 1 }, None);
    b.roles.push([VRole::Other; 4]);
    b.roles.push([VRole::Other; 4]);
    b.t.pair(ca, [(0, 0), (2, 1), (3, 3)], ca + 1)?;

    // Sectors of the rotation at the branch vertex, read on T*.
    let y = frame.y;
    let pb = Builder { d: b.d, t: pre, roles: Vec::new() };
    let rot = pb.rotation(y.tet, y.corner, y.head)?;
    let n = rot.len();
    let x1 = frame.x[0];
    let xm = *frame.x.last().unwrap();
    let id = |e: &FrameEdge| pb.t.link_edge(e.tet, e.corner, e.face);
    let fids = [id(&x1), id(&xm), id(&y)];
    let fpos: Vec<usize> = (0..n).filter(|&i| fids.contains(&rot[i].edge)).collect();
    if fpos.len() != 4 {
        return Err(Error::Construction(format!("branch vertex has {} frame edge ends, expected 4", fpos.len())));
    }
    let occ_at = |eid: (usize, FaceIx, u8), tet: usize, corner: u8, endv: u8| -> Result<usize> {
        for i in (0..n).filter(|&i| rot[i].edge == eid) {
            let s = rot[i];
            let (tc, xc) = s.tri;
            if (tc, xc) == (tet, corner) {
                if s.y == endv {
                    return Ok(i);
                }
                continue;
            }
            let zout = (0..4u8).find(|v| ![xc, s.y, s.zin].contains(v)).unwrap();
            let g = pb.t.adj[tc][face_from([xc, s.y, zout])].unwrap();
            if (g.tet, g.perm[xc as usize]) != (tet, corner) {
                return Err(Error::Construction("inconsistent rotation at branch vertex".into()));
            }
            if g.perm[s.y as usize] == endv {
                return Ok(i);
            }
        }
        Err(Error::Construction("frame edge end not found at branch vertex".into()))
    };
    let sectors = |i: usize, e: &FrameEdge| -> Result<(usize, usize)> {
        let before = rot[i].tri;
        let after = rot[(i + 1) % n].tri;
        let tt = tail_tri[&(e.tet, e.face, e.corner)];
        let k = fpos.iter().position(|&p| p == i).unwrap();
        let (sb, sa) = ((k + 3) % 4, k);
        if before == tt {
            Ok((sb, sa))
        } else if after == tt {
            Ok((sa, sb))
        } else {
            Err(Error::Construction("tail triangle not adjacent to frame edge".into()))
        }
    };
    let s_x1 = sectors(occ_at(id(&x1), x1.tet, x1.corner, x1.tail)?, &x1)?;
    let s_xm = sectors(occ_at(id(&xm), xm.tet, xm.corner, xm.head)?, &xm)?;
    let s_ys = sectors(occ_at(id(&y), y.tet, y.corner, y.tail)?, &y)?;
    let s_ye = sectors(occ_at(id(&y), y.tet, y.corner, y.head)?, &y)?;
    if s_x1.1 != s_ye.1 {
        return Err(Error::Construction("meridian direction disagrees with the branch sectors".into()));
    }
    let mut lab = [0u8; 4];
    lab[s_x1.1] = 1;
    lab[s_x1.0] = 4;
    lab[s_ye.0] = 2;
    let rest = (0..4).find(|&s| lab[s] == 0).unwrap();
    lab[rest] = 3;
    let cone = |b: &mut Builder, xt: usize, face: [u8; 3], mp: [u8; 3]| -> Result<()> {
        let (o, loc) = cone_local(&mp);
        b.t.pair(xt, [(face[0], loc[0]), (face[1], loc[1]), (face[2], loc[2])], ca + o)
    };
    cone(b, xt[0], [0, 1, 2], [lab[s_x1.0], lab[s_x1.1], 0])?;
    cone(b, yt, [0, 1, 3], [lab[s_ye.0], lab[s_ye.1], 0])?;
    cone(b, *xt.last().unwrap(), [0, 1, 3], [lab[s_xm.0], lab[s_xm.1], 0])?;
    cone(b, yt, [0, 1, 2], [lab[s_ys.0], lab[s_ys.1], 0])?;
    b.t.stage = Stage::Inflated;
    b.t.frame = Some(frame);
    let rep = validate_triangulation(&b.t);
    if rep.free_faces != 2 || !rep.failures.is_empty() {
        return Err(Error::Construction(format!("inflation audit failure: {:?}", rep.failures)));
    }
    Ok(())
}

/// One preimage of an edge class: tetrahedron `tet`, edge `a b`, entered
/// through the face omitting `d` and left through the face omitting `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeOccurrence {
    pub tet: usize,
    pub a: u8,
    pub b: u8,
    pub c: u8,
    pub d: u8,
}

/// An edge class with its cyclic (interior) or linear (boundary) list of preimages.
#[derive(Debug, Clone)]
pub struct EdgeClass {
    pub interior: bool,
    pub occurrences: Vec<EdgeOccurrence>,
}

/// Edge classes and the class of every tetrahedron edge.
#[derive(Debug, Clone)]
pub struct EdgeClasses {
    pub classes: Vec<EdgeClass>,
    /// `index[t][k]` is the class of edge `k` of tetrahedron `t` (order 01,02,03,12,13,23).
    pub index: Vec<[usize; 6]>,
    /// Set when a walk came back with the edge reversed.
    pub reversed: bool,
}

/// Position of edge `ab` in the order 01, 02, 03, 12, 13, 23.
pub fn edge_slot(a: u8, b: u8) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        _ => 5,
    }
}

pub const EDGES: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Walk around every edge of the triangulation.
pub fn edge_classes(t: &Triangulation) -> EdgeClasses {
    let n = t.tet_count();
    let mut index = vec![[usize::MAX; 6]; n];
    let mut classes = Vec::new();
    let mut reversed = false;
    let walk = |tet: usize, a: u8, b: u8, c: u8| -> (Vec<EdgeOccurrence>, bool, bool) {
        let mut occ = Vec::new();
        let mut cur = (tet, a, b, c);
        loop {
            let (tc, ac, bc, cc) = cur;
            let dc = (0..4u8).find(|v| ![ac, bc, cc].contains(v)).unwrap();
            occ.push(EdgeOccurrence { tet: tc, a: ac, b: bc, c: cc, d: dc });
            let g = match t.adj[tc][cc as usize] {
                None => return (occ, false, false),
                Some(g) => g,
            };
            let p = g.perm;
            cur = (g.tet, p[ac as usize], p[bc as usize], p[dc as usize]);
            if cur == (tet, a, b, c) {
                return (occ, true, false);
            }
            if cur == (tet, b, a, c) {
                return (occ, true, true);
            }
            if occ.len() > 6 * n + 6 {
                return (occ, false, true);
            }
        }
    };
    for tet in 0..n {
        for (k, &(a, b)) in EDGES.iter().enumerate() {
            if index[tet][k] != usize::MAX {
                continue;
            }
            let c = (0..4u8).find(|v| *v != a && *v != b).unwrap();
            let (mut occ, closed, rev) = walk(tet, a, b, c);
            reversed |= rev;
            if !closed {
                let last = *occ.last().unwrap();
                let (o2, _, rev2) = walk(last.tet, last.a, last.b, last.d);
                reversed |= rev2;
                occ = o2;
            }
            let id = classes.len();
            for o in &occ {
                index[o.tet][edge_slot(o.a, o.b)] = id;
            }
            classes.push(EdgeClass { interior: closed, occurrences: occ });
        }
    }
    EdgeClasses { classes, index, reversed }
}

/// Audit of a triangulation stage.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ValidationReport {
    pub tetrahedra: usize,
    pub triangles: usize,
    pub edges: usize,
    pub vertices: usize,
    pub free_faces: usize,
    pub euler_characteristic: i64,
    /// Euler characteristic and boundary edge count of each vertex link.
    pub vertex_links: Vec<(i64, usize)>,
    pub orientable: bool,
    /// Free rank and torsion of H_1.
    pub h1_rank: usize,
    pub h1_torsion: Vec<i64>,
    pub failures: Vec<String>,
}

/// Check pairings, edge classes, vertex links and homology.
pub fn validate_triangulation(t: &Triangulation) -> ValidationReport {
    let n = t.tet_count();
    let mut failures = Vec::new();
    for a in 0..n {
        for f in 0..4 {
            if let Some(g) = t.adj[a][f] {
                let back = t.adj[g.tet][g.perm[f] as usize];
                if back != Some(Gluing { tet: a, perm: inverse(g.perm) }) {
                    failures.push(format!("pairing not involutive at {}:{}", t.labels[a].render(false), face_name(f)));
                }
                if g.tet == a && g.perm[f] as usize == f {
                    failures.push("face glued to itself".into());
                }
            }
        }
    }
    let free = t.free_faces();
    let expected_free = if t.stage == Stage::Inflated { 2 } else { 0 };
    if free.len() != expected_free {
        failures.push(format!("unpaired face count {} (expected {expected_free})", free.len()));
    }
    let ec = edge_classes(t);
    if ec.reversed {
        failures.push("edge class closes with reversed orientation".into());
    }
    // Vertex classes and links.
    let mut vuf = UnionFind::new(4 * n);
    let mut euf = t.end_classes();
    for a in 0..n {
        for f in 0..4 {
            if let Some(g) = t.adj[a][f] {
                for x in face_vertices(f) {
                    vuf.union(4 * a + x as usize, 4 * g.tet + g.perm[x as usize] as usize);
                }
            }
        }
    }
    let mut link: BTreeMap<usize, (i64, std::collections::BTreeSet<usize>, i64, usize)> = BTreeMap::new();
    for a in 0..n {
        for x in 0..4u8 {
            let vc = vuf.find(4 * a + x as usize);
            let entry = link.entry(vc).or_default();
            entry.0 += 1;
            for y in (0..4u8).filter(|&y| y != x) {
                let e = euf.find(end_id(a, x, y));
                entry.1.insert(e);
            }
            for f in (0..4).filter(|&f| f != x as usize) {
                if t.adj[a][f].is_some() {
                    entry.2 += 1;
                } else {
                    entry.2 += 2;
                    entry.3 += 1;
                }
            }
        }
    }
    let vertex_links: Vec<(i64, usize)> =
        link.values().map(|(faces, verts, twice_edges, bd)| (verts.len() as i64 - twice_edges / 2 + faces, *bd)).collect();
    let triangles = (4 * n + free.len()) / 2;
    let vertices = link.len();
    let edges = ec.classes.len();
    let chi = vertices as i64 - edges as i64 + triangles as i64 - n as i64;
    let orientable = t.orientation().is_some();
    let (h1_rank, h1_torsion) = homology_h1(t, &ec);
    ValidationReport {
        tetrahedra: n,
        triangles,
        edges,
        vertices,
        free_faces: free.len(),
        euler_characteristic: chi,
        vertex_links,
        orientable,
        h1_rank,
        h1_torsion,
        failures,
    }
}

/// H_1 from the dual cell structure: generators are interior faces, relations
/// come from interior edges, modulo the boundaries of tetrahedra.
fn homology_h1(t: &Triangulation, ec: &EdgeClasses) -> (usize, Vec<i64>) {
    let n = t.tet_count();
    let mut face_ix: HashMap<(usize, FaceIx), (usize, i64)> = HashMap::new();
    let mut pairs = Vec::new();
    for a in 0..n {
        for f in 0..4 {
            if let Some(g) = t.adj[a][f] {
                if face_ix.contains_key(&(a, f)) {
                    continue;
                }
                let i = pairs.len();
                pairs.push((a, g.tet));
                face_ix.insert((a, f), (i, 1));
                face_ix.insert((g.tet, g.perm[f] as usize), (i, -1));
            }
        }
    }
    let mut rows = Vec::new();
    for cl in ec.classes.iter().filter(|c| c.interior) {
        let mut row = vec![0i64; pairs.len()];
        for o in &cl.occurrences {
            let (i, s) = face_ix[&(o.tet, o.c as usize)];
            row[i] += s;
        }
        rows.push(row);
    }
    let mut d1 = vec![vec![0i64; pairs.len()]; n];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        d1[a][i] -= 1;
        d1[b][i] += 1;
    }
    let r1 = linalg::rank(&d1);
    let ker = pairs.len() - r1;
    let divisors = linalg::elementary_divisors(&rows);
    let torsion: Vec<i64> = divisors.iter().copied().filter(|d| *d != 1).collect();
    (ker - divisors.len(), torsion)
}

/// Render the deterministic gluing table.
pub fn export_gluing_table(t: &Triangulation) -> String {
    let crossings: std::collections::BTreeSet<usize> = t
        .labels
        .iter()
        .filter_map(|l| match l {
            TetLabel::Oct { crossing, .. } => Some(*crossing),
            _ => None,
        })
        .collect();
    let single = crossings.len() == 1 && crossings.contains(&0);
    let name = |i: usize| t.labels[i].render(single);
    let mut out = String::new();
    out.push_str(&format!("#tets {}\n", t.tet_count()));
    out.push_str(&format!("#stage {}\n", t.stage.name()));
    let free: Vec<String> = t.free_faces().iter().map(|&(a, f)| format!("{}:{}", name(a), face_name(f))).collect();
    out.push_str(&format!("#free {}\n", free.join(" ")));
    for i in 0..t.tet_count() {
        out.push_str(&format!("#tet {} {}\n", i, name(i)));
    }
    for a in 0..t.tet_count() {
        for f in (0..4).rev() {
            if let Some(g) = t.adj[a][f] {
                let f2 = g.perm[f] as usize;
                if (g.tet, f2) < (a, f) {
                    continue;
                }
                let img: String = face_vertices(f).iter().map(|&v| char::from(b'0' + g.perm[v as usize])).collect();
                out.push_str(&format!("{}:{} -> {}:{}\n", name(a), face_name(f), name(g.tet), img));
            }
        }
    }
    out
}

/// Parse a gluing table produced by [`export_gluing_table`].
pub fn parse_gluing_table(text: &str) -> Result<Triangulation> {
    let mut t = Triangulation::empty(Stage::Octahedra);
    let mut by_name: HashMap<String, usize> = HashMap::new();
    let digits = |s: &str| -> Result<[u8; 3]> {
        let b = s.as_bytes();
        if b.len() != 3 || b.iter().any(|c| !(b'0'..=b'3').contains(c)) {
            return Err(Error::Parse(format!("bad face {s}")));
        }
        Ok([b[0] - b'0', b[1] - b'0', b[2] - b'0'])
    };
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#stage ") {
            t.stage = match rest {
                "octahedra" => Stage::Octahedra,
                "pillows" => Stage::WithPillows,
                "inflated" => Stage::Inflated,
                _ => return Err(Error::Parse(format!("unknown stage {rest}"))),
            };
        } else if let Some(rest) = line.strip_prefix("#tet ") {
            let (_, label) = rest.split_once(' ').ok_or_else(|| Error::Parse(line.into()))?;
            let i = t.add_tet(TetLabel::parse(label)?, None);
            by_name.insert(label.to_string(), i);
        } else if line.starts_with('#') {
            continue;
        } else {
            let (l, r) = line.split_once(" -> ").ok_or_else(|| Error::Parse(format!("bad pairing line {line}")))?;
            let (ln, lf) = l.rsplit_once(':').ok_or_else(|| Error::Parse(line.into()))?;
            let (rn, rf) = r.rsplit_once(':').ok_or_else(|| Error::Parse(line.into()))?;
            let a = *by_name.get(ln).ok_or_else(|| Error::Parse(format!("unknown tet {ln}")))?;
            let b = *by_name.get(rn).ok_or_else(|| Error::Parse(format!("unknown tet {rn}")))?;
            let (fa, fb) = (digits(lf)?, digits(rf)?);
            t.pair(a, [(fa[0], fb[0]), (fa[1], fb[1]), (fa[2], fb[2])], b)?;
        }
    }
    Ok(t)
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&export_gluing_table(self))
    }
}
