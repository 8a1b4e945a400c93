//! Colored Kauffman states, flows on the planar graph, degree formulas,
//! surface assignment, verification records and the n = 1 Khovanov checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use serde::Serialize;

use crate::diagram::{seifert_twist, state_surface_twist, Half, KnotDiagram, SaddleSign, Smoothing};
use crate::error::{Error, Result};
use crate::linalg::{elementary_divisors, rank};
use crate::normal::{is_admissible, qmatching_matrix, RegionContext, SurfaceKind};
use crate::skein::{bracket, Convention, LaurentPoly};
use crate::slope::{twist_contribution, Rational};
use crate::triangulation::build_inflated;

// ---------------------------------------------------------------------------
// Degree formulas

/// Lowest homological degree `k(n - r - k - ℓ)` of the skein element `J^n_{ℓ,r,k}`.
pub fn skein_degree(l: i64, r: i64, k: i64, n: i64) -> Result<i64> {
    if l < 0 || r < 0 || k < 0 || l + 2 * k + r > n {
        return Err(Error::Parameter(format!("skein degree needs ℓ+2k+r <= n, got ℓ={l} r={r} k={k} n={n}")));
    }
    Ok(k * (n - r - k - l))
}

/// Lowest homological degree of the term `J(k)` at one colored crossing.
pub fn crossing_degree(k: i64, n: i64, sign: i64) -> Result<i64> {
    twist_degree(k, n, 1, sign)
}

/// Lowest homological degree of `S(k)` in a twist region of `c` crossings:
/// `c(n^2 - k^2)` if positive, `c k^2` if negative.
pub fn twist_degree(k: i64, n: i64, c: i64, sign: i64) -> Result<i64> {
    if n < 1 || k < 0 || k > n || c < 1 || sign == 0 {
        return Err(Error::Parameter(format!("twist degree with k={k} n={n} c={c}")));
    }
    Ok(if sign > 0 { c * (n * n - k * k) } else { c * k * k })
}

// ---------------------------------------------------------------------------
// Colored Kauffman states

/// Term `J^m_{ℓ,r,k}` chosen at one projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ProjectorTerm {
    pub l: i64,
    pub r: i64,
    pub k: i64,
}

impl ProjectorTerm {
    pub const IDENTITY: ProjectorTerm = ProjectorTerm { l: 0, r: 0, k: 0 };
}

/// Parameter per twist region plus one expansion term per framing projector
/// (four per region).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoredKauffmanState {
    pub n: usize,
    pub k: Vec<usize>,
    pub expansions: Vec<[ProjectorTerm; 4]>,
}

impl ColoredKauffmanState {
    /// State with identity expansions at every projector.
    pub fn new(n: usize, k: Vec<usize>) -> Result<Self> {
        if n == 0 || k.iter().any(|&x| x > n) {
            return Err(Error::Parameter(format!("state values {k:?} out of range for n={n}")));
        }
        let expansions = vec![[ProjectorTerm::IDENTITY; 4]; k.len()];
        Ok(Self { n, k, expansions })
    }

    /// The reference state `k = 0`.
    pub fn reference(d: &KnotDiagram, n: usize) -> Self {
        Self::new(n, vec![0; d.graph.edges.len()]).expect("zero state is valid")
    }

    /// Kauffman smoothings when every value is `0` (Cut) or `n` (Continue).
    pub fn kauffman_smoothings(&self, d: &KnotDiagram) -> Option<Vec<Smoothing>> {
        let mut out = Vec::with_capacity(d.crossing_count());
        for cr in &d.crossings {
            match self.k[cr.edge] {
                0 => out.push(Smoothing::Cut),
                x if x == self.n => out.push(Smoothing::Continue),
                _ => return None,
            }
        }
        Some(out)
    }
}

/// One passage of a state circle through a band along a through strand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Traversal {
    pub edge: usize,
    /// End of the band where the passage starts (0 or 1).
    pub from: usize,
}

/// A closed curve of a colored state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateCircle {
    /// Through-strand passages in circle order.
    pub traversals: Vec<Traversal>,
    /// Band ends where the circle turns back, as `(edge, end)`.
    pub turnbacks: Vec<(usize, usize)>,
    /// Band points on the circle, as `(edge, end, position)`.
    pub points: Vec<(usize, usize, usize)>,
}

impl StateCircle {
    /// Vertices visited by the closed walk in `G`, one per passage.
    pub fn walk_vertices(&self, d: &KnotDiagram) -> Vec<usize> {
        self.traversals.iter().map(|t| d.graph.edges[t.edge].ends[t.from]).collect()
    }

    /// True if the closed walk repeats neither a vertex nor an edge.
    pub fn is_path(&self, d: &KnotDiagram) -> bool {
        let vs = self.walk_vertices(d);
        let es: BTreeSet<usize> = self.traversals.iter().map(|t| t.edge).collect();
        let vset: BTreeSet<usize> = vs.iter().copied().collect();
        vset.len() == vs.len() && es.len() == self.traversals.len()
    }
}

/// State circles of a colored state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateCircles {
    pub circles: Vec<StateCircle>,
    /// Indices of circles whose walk in `G` is not a path.
    pub walk_failures: Vec<usize>,
}

/// Position across the band (west to east, `0..2n`) of depth `i` at a band corner.
fn corner_position(n: usize, end: usize, left: bool, i: usize) -> usize {
    match (end, left) {
        (0, true) | (1, false) => i,
        _ => 2 * n - 1 - i,
    }
}

/// Apply the state to the `n`-cable of the band surface and read off the circles.
///
/// Region `E` with parameter `k` keeps the outer `k` strands of each side as
/// through strands and closes the inner `n - k` pairs by nested turnbacks at
/// both ends.
pub fn state_circles(d: &KnotDiagram, state: &ColoredKauffmanState) -> Result<StateCircles> {
    let g = &d.graph;
    let n = state.n;
    if state.k.len() != g.edges.len() {
        return Err(Error::Parameter("state size does not match the graph".into()));
    }
    if g.edges.is_empty() {
        let circles = (0..n).map(|_| StateCircle { traversals: vec![], turnbacks: vec![], points: vec![] }).collect();
        return Ok(StateCircles { circles, walk_failures: vec![] });
    }
    let id = |e: usize, t: usize, p: usize| (e * 2 + t) * 2 * n + p;
    let total = g.edges.len() * 4 * n;
    let mut band = vec![usize::MAX; total];
    let mut vertex = vec![usize::MAX; total];
    for (e, &k) in state.k.iter().enumerate() {
        for p in (0..k).chain(2 * n - k..2 * n) {
            band[id(e, 0, p)] = id(e, 1, p);
            band[id(e, 1, p)] = id(e, 0, p);
        }
        for t in 0..2 {
            for i in 0..n - k {
                let (a, b) = (id(e, t, k + i), id(e, t, 2 * n - k - 1 - i));
                band[a] = b;
                band[b] = a;
            }
        }
    }
    for rot in &g.rotations {
        for (i, h) in rot.iter().enumerate() {
            let h2 = rot[(i + 1) % rot.len()];
            for depth in 0..n {
                let a = id(h.edge, h.end, corner_position(n, h.end, true, depth));
                let b = id(h2.edge, h2.end, corner_position(n, h2.end, false, depth));
                vertex[a] = b;
                vertex[b] = a;
            }
        }
    }
    let decode = |x: usize| (x / (4 * n), (x / (2 * n)) % 2, x % (2 * n));
    let mut seen = vec![false; total];
    let mut circles = Vec::new();
    for start in 0..total {
        if seen[start] {
            continue;
        }
        let mut c = StateCircle { traversals: vec![], turnbacks: vec![], points: vec![] };
        let mut x = start;
        loop {
            seen[x] = true;
            let y = band[x];
            seen[y] = true;
            let (e, t, _) = decode(x);
            let (_, t2, _) = decode(y);
            c.points.push(decode(x));
            c.points.push(decode(y));
            if t == t2 {
                c.turnbacks.push((e, t));
            } else {
                c.traversals.push(Traversal { edge: e, from: t });
            }
            x = vertex[y];
            if x == start {
                break;
            }
        }
        circles.push(c);
    }
    let walk_failures = circles.iter().enumerate().filter(|(_, c)| !c.is_path(d)).map(|(i, _)| i).collect();
    Ok(StateCircles { circles, walk_failures })
}

// ---------------------------------------------------------------------------
// Flows and conditions

/// Orientation and value on every edge of `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flow {
    /// `(tail, head)` per edge.
    pub orientation: Vec<(usize, usize)>,
    pub value: Vec<usize>,
}

/// Why a state fails to induce a flow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FlowFailure {
    /// Some circle gives a walk that is not a path.
    NotPaths(Vec<usize>),
    /// Two passages orient the same edge oppositely.
    OrientationConflict(usize),
    /// In-sum differs from out-sum at a vertex.
    Unbalanced { vertex: usize, inflow: usize, outflow: usize },
}

/// Largest number of flow-carrying edges whose orientations are searched.
pub const MAX_FLOW_EDGES: usize = 20;

/// Edge orientation (index of the tail end) forced by a passage when the
/// circle is read forwards (`forward`) or backwards.
fn passage_tail(d: &KnotDiagram, t: &Traversal, forward: bool) -> usize {
    let along = if forward { t.from } else { 1 - t.from };
    if d.graph.edges[t.edge].weight > 0 {
        along
    } else {
        1 - along
    }
}

/// A circle crossing bands `E_1..E_m` gives, for each `E_j`, the path formed by
/// the other passages. With `m >= 3` these paths overlap, so one direction of
/// the circle orients all its bands; with `m <= 2` the paths are disjoint and
/// impose nothing. Search the orientations of the bands with `k > 0` that
/// agree with every circle and keep the first one conserving `k`.
pub fn induces_flow(d: &KnotDiagram, state: &ColoredKauffmanState, circles: &StateCircles) -> std::result::Result<Flow, FlowFailure> {
    let g = &d.graph;
    if !circles.walk_failures.is_empty() {
        return Err(FlowFailure::NotPaths(circles.walk_failures.clone()));
    }
    let active: Vec<usize> = (0..g.edges.len()).filter(|&e| state.k[e] > 0).collect();
    if active.len() > MAX_FLOW_EDGES {
        return Err(FlowFailure::OrientationConflict(active[MAX_FLOW_EDGES]));
    }
    let default_tail = |e: usize| if g.edges[e].weight > 0 { 0 } else { 1 };
    let mut first_unbalanced = None;
    let mut conflict = None;
    for mask in 0..1usize << active.len() {
        let mut tail: Vec<usize> = (0..g.edges.len()).map(default_tail).collect();
        for (i, &e) in active.iter().enumerate() {
            tail[e] = mask >> i & 1;
        }
        let consistent = circles
            .circles
            .iter()
            .filter(|c| c.traversals.len() >= 3)
            .all(|c| [true, false].iter().any(|&fw| c.traversals.iter().all(|t| passage_tail(d, t, fw) == tail[t.edge])));
        if !consistent {
            if conflict.is_none() {
                conflict = circles
                    .circles
                    .iter()
                    .filter(|c| c.traversals.len() >= 3)
                    .find(|c| !c.traversals.iter().all(|t| passage_tail(d, t, true) == tail[t.edge]))
                    .map(|c| c.traversals[0].edge);
            }
            continue;
        }
        let orientation: Vec<(usize, usize)> =
            g.edges.iter().enumerate().map(|(e, edge)| (edge.ends[tail[e]], edge.ends[1 - tail[e]])).collect();
        let unbalanced = (0..g.vertex_ids.len()).find_map(|v| {
            let inflow: usize = (0..g.edges.len()).filter(|&e| orientation[e].1 == v).map(|e| state.k[e]).sum();
            let outflow: usize = (0..g.edges.len()).filter(|&e| orientation[e].0 == v).map(|e| state.k[e]).sum();
            (inflow != outflow).then_some(FlowFailure::Unbalanced { vertex: v, inflow, outflow })
        });
        match unbalanced {
            None => return Ok(Flow { orientation, value: state.k.clone() }),
            Some(u) => {
                first_unbalanced.get_or_insert(u);
            }
        }
    }
    Err(first_unbalanced.unwrap_or(FlowFailure::OrientationConflict(conflict.unwrap_or(0))))
}

/// Edges incident to each vertex, loops listed once.
fn incident_edges(d: &KnotDiagram) -> Vec<BTreeSet<usize>> {
    d.graph.rotations.iter().map(|rot| rot.iter().map(|h| h.edge).collect()).collect()
}

/// Connected component of every vertex in the graph of negative edges.
fn negative_components(d: &KnotDiagram) -> Vec<usize> {
    let g = &d.graph;
    let mut comp: Vec<usize> = (0..g.vertex_ids.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in g.edges.iter().filter(|e| e.weight < 0) {
        let (a, b) = (find(&mut comp, e.ends[0]), find(&mut comp, e.ends[1]));
        comp[a] = b;
    }
    (0..comp.len()).map(|v| find(&mut comp, v)).collect()
}

/// Outcome of Conditions (1)-(5).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub positive_sum: bool,
    pub negative_zeroing: bool,
    pub single_in_or_out: bool,
    pub negative_full: bool,
    pub negative_components: bool,
}

impl ConditionReport {
    pub fn all(&self) -> bool {
        self.positive_sum && self.negative_zeroing && self.single_in_or_out && self.negative_full && self.negative_components
    }
}

/// Conditions (1)-(5) for a state with its flow.
///
/// (3) is vacuous at vertices without flow, and (4) asks `k_E = n` only of
/// negative edges carrying flow, so that the zero state passes.
pub fn check_conditions(d: &KnotDiagram, state: &ColoredKauffmanState, circles: &StateCircles, flow: &Flow) -> ConditionReport {
    let g = &d.graph;
    let n = state.n;
    let inc = incident_edges(d);
    let neg = |e: usize| g.edges[e].weight < 0;
    let positive_sum = inc.iter().all(|es| es.iter().filter(|&&e| !neg(e)).map(|&e| state.k[e]).sum::<usize>() <= n);
    let negative_zeroing = inc.iter().all(|es| es.iter().filter(|&&e| neg(e) && state.k[e] != 0).count() <= 1);
    let single_in_or_out = (0..g.vertex_ids.len()).all(|v| {
        let ins = (0..g.edges.len()).filter(|&e| flow.orientation[e].1 == v && flow.value[e] > 0).count();
        let outs = (0..g.edges.len()).filter(|&e| flow.orientation[e].0 == v && flow.value[e] > 0).count();
        (ins == 0 && outs == 0) || ins == 1 || outs == 1
    });
    let negative_full = (0..g.edges.len()).filter(|&e| neg(e)).all(|e| state.k[e] == 0 || state.k[e] == n);
    let comp = negative_components(d);
    let negative_components = circles.circles.iter().all(|c| {
        let negs: Vec<usize> = c.traversals.iter().map(|t| t.edge).filter(|&e| neg(e)).collect();
        let distinct: BTreeSet<usize> = negs.iter().copied().collect();
        let comps: BTreeSet<usize> = negs.iter().map(|&e| comp[g.edges[e].ends[0]]).collect();
        distinct.len() == negs.len() && comps.len() <= 1
    });
    ConditionReport { positive_sum, negative_zeroing, single_in_or_out, negative_full, negative_components }
}

/// Local surface family assigned to a region with parameter `k`.
pub fn surface_kind(k: usize, n: usize) -> SurfaceKind {
    if k == 0 {
        SurfaceKind::III
    } else if k < n {
        SurfaceKind::I
    } else {
        SurfaceKind::II
    }
}

// ---------------------------------------------------------------------------
// Kauffman states on D (n = 1)

/// Circle label of every port `(crossing, half)` under the given smoothings.
pub fn kauffman_circles(d: &KnotDiagram, smoothings: &[Smoothing]) -> (Vec<[usize; 4]>, usize) {
    let c = d.crossing_count();
    let mut label = vec![[usize::MAX; 4]; c];
    let mut count = 0;
    for x in 0..c {
        for h in Half::ALL {
            if label[x][h as usize] != usize::MAX {
                continue;
            }
            let mut p = (x, h);
            loop {
                label[p.0][p.1 as usize] = count;
                let q = (p.0, smoothings[p.0].partner(p.1));
                label[q.0][q.1 as usize] = count;
                p = d.conn[q.0][q.1 as usize];
                if p == (x, h) {
                    break;
                }
            }
            count += 1;
        }
    }
    (label, count.max(if c == 0 { 1 } else { 0 }))
}

/// Every crossing joins two distinct state circles.
pub fn is_adequate(d: &KnotDiagram, smoothings: &[Smoothing]) -> bool {
    let (label, _) = kauffman_circles(d, smoothings);
    (0..d.crossing_count()).all(|x| {
        let s = smoothings[x];
        let a = label[x][Half::SW as usize];
        let other = if s.partner(Half::SW) == Half::NW { Half::SE } else { Half::NW };
        a != label[x][other as usize]
    })
}

// ---------------------------------------------------------------------------
// Surface states and verification

/// Everything decided about one colored state.
#[derive(Debug, Clone, Serialize)]
pub struct StateAnalysis {
    pub k_vector: Vec<usize>,
    pub flow: Option<Flow>,
    pub flow_failure: Option<FlowFailure>,
    pub conditions: Option<ConditionReport>,
    /// Proposition criteria: face sums and vertex sums.
    pub face_sums_vanish: bool,
    pub vertex_sums_vanish: bool,
    /// Comes from an adequate Kauffman state on `D`.
    pub from_adequate_state: bool,
    pub surface_kinds: Vec<SurfaceKind>,
    /// Conditions hold but some circle is only a walk (literal rejection).
    pub walk_only: bool,
}

impl StateAnalysis {
    /// Flow state meeting the Conditions and the Proposition criteria.
    pub fn is_flow_surface_state(&self) -> bool {
        self.k_vector.iter().any(|&k| k > 0)
            && self.flow.is_some()
            && self.conditions.is_some_and(|c| c.all())
            && self.face_sums_vanish
            && self.vertex_sums_vanish
    }

    pub fn is_colored_surface_state(&self) -> bool {
        self.is_flow_surface_state() || self.from_adequate_state
    }
}

/// Triangulation data shared by every state of one diagram.
/// Vectors `v` and `a` of a region's local basis.
type FragmentBasis = (BTreeMap<usize, i64>, BTreeMap<usize, i64>);

pub struct Verifier<'a> {
    pub diagram: &'a KnotDiagram,
    pub tri: crate::triangulation::Triangulation,
    pub sys: crate::normal::QMatchingSystem,
    bases: HashMap<(usize, SurfaceKind), FragmentBasis>,
    pub saddle: SaddleSign,
}

/// Record of one colored surface state.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationRecord {
    pub k_vector: Vec<usize>,
    pub n: usize,
    /// `Σ twist_degree + Σ skein_degree`.
    pub h: i64,
    /// `Σ_i ((Σ_{E∈p_i} w(E)) - 1) k²_{E_i}` over the circle paths.
    pub h_paths: Option<i64>,
    pub degree_defect: bool,
    /// `h / n²`.
    pub a: String,
    pub tau: String,
    pub tau_seifert: String,
    pub slope: String,
    pub verdict: bool,
    /// `normal` for `N_σ`, `state` for a state surface.
    pub surface: String,
    pub surface_kinds: Vec<SurfaceKind>,
    /// The assembled quad vector satisfies Q-matching and admissibility.
    pub normal: bool,
    pub qmatching_violations: usize,
    pub admissible: bool,
    /// `Σ k_{E_i} = n` over paths sharing a negative component (flow states).
    pub negative_component_sums: Option<bool>,
    #[serde(skip)]
    pub quads: Vec<i64>,
    #[serde(skip)]
    pub values: (Rational, Rational, Rational, Rational),
}

fn fmt_rat(r: Rational) -> String {
    crate::slope::format_rational(r)
}

impl<'a> Verifier<'a> {
    pub fn new(diagram: &'a KnotDiagram, saddle: SaddleSign) -> Result<Self> {
        let tri = build_inflated(diagram)?;
        let sys = qmatching_matrix(&tri);
        Ok(Self { diagram, tri, sys, bases: HashMap::new(), saddle })
    }

    fn ctx(&self) -> RegionContext<'_> {
        RegionContext::new(self.diagram, &self.tri, &self.sys)
    }

    fn basis(&mut self, region: usize, kind: SurfaceKind) -> (BTreeMap<usize, i64>, BTreeMap<usize, i64>) {
        if let Some(b) = self.bases.get(&(region, kind)) {
            return b.clone();
        }
        let b = self.ctx().local_basis(region, kind, [0, 1, 2]);
        let out = (b.v, b.a);
        self.bases.insert((region, kind), out.clone());
        out
    }

    /// Quads of the region's fragment: `k Σ v + (n - k) Σ a`.
    fn fragment(&mut self, region: usize, kind: SurfaceKind, n: usize, k: usize) -> BTreeMap<usize, i64> {
        let (v, a) = self.basis(region, kind);
        let mut q: BTreeMap<usize, i64> = BTreeMap::new();
        for (c, x) in v {
            *q.entry(c).or_default() += k as i64 * x;
        }
        for (c, x) in a {
            *q.entry(c).or_default() += (n - k) as i64 * x;
        }
        q.retain(|_, x| *x != 0);
        q
    }

    fn fragments(&mut self, state: &ColoredKauffmanState) -> Vec<BTreeMap<usize, i64>> {
        (0..state.k.len()).map(|e| self.fragment(e, surface_kind(state.k[e], state.n), state.n, state.k[e])).collect()
    }

    /// Decide whether `state` is a colored surface state.
    pub fn analyse(&mut self, state: &ColoredKauffmanState) -> Result<StateAnalysis> {
        let d = self.diagram;
        let g = &d.graph;
        let circles = state_circles(d, state)?;
        let kinds: Vec<SurfaceKind> = state.k.iter().map(|&k| surface_kind(k, state.n)).collect();
        let from_adequate_state = state.kauffman_smoothings(d).is_some_and(|s| is_adequate(d, &s));
        let (flow, flow_failure) = match induces_flow(d, state, &circles) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e)),
        };
        let conditions = flow.as_ref().map(|f| check_conditions(d, state, &circles, f));
        let walk_only = matches!(flow_failure, Some(FlowFailure::NotPaths(_)));
        let frags = self.fragments(state);
        let ctx = self.ctx();
        let coords: Vec<[i64; 4]> = (0..g.edges.len()).map(|e| ctx.boundary_coordinates(e, &frags[e])).collect();
        let face_sums_vanish = g
            .compute_faces()
            .iter()
            .all(|f| f.sides.iter().map(|s| if s.dir == 0 { coords[s.edge][3] } else { coords[s.edge][2] }).sum::<i64>() == 0);
        let sgn = |e: usize| g.edges[e].weight.signum();
        let vertex_sums_vanish = incident_edges(d).iter().all(|es| es.iter().map(|&e| sgn(e) * state.k[e] as i64).sum::<i64>() == 0);
        Ok(StateAnalysis {
            k_vector: state.k.clone(),
            flow,
            flow_failure,
            conditions,
            face_sums_vanish,
            vertex_sums_vanish,
            from_adequate_state,
            surface_kinds: kinds,
            walk_only,
        })
    }

    /// Build the record of a colored surface state.
    pub fn record(&mut self, state: &ColoredKauffmanState, analysis: &StateAnalysis) -> Result<VerificationRecord> {
        let d = self.diagram;
        let g = &d.graph;
        let n = state.n as i64;
        let (h, h_paths) = state_degree(d, state)?;
        let flow_state = analysis.is_flow_surface_state();
        let tau = if flow_state {
            let mut t = Ratio::from_integer(0);
            for (e, &k) in state.k.iter().enumerate() {
                t += twist_contribution(analysis.surface_kinds[e], n, k as i64, 0, g.edges[e].weight)?;
            }
            t
        } else {
            let sm = state.kauffman_smoothings(d).ok_or_else(|| Error::Parameter("not a Kauffman state".into()))?;
            Ratio::from_integer(state_surface_twist(d, &sm, self.saddle))
        };
        let tau_seifert = Ratio::from_integer(seifert_twist(d, self.saddle));
        let slope = tau - tau_seifert;
        let a = Ratio::new(h, n * n);
        let frags = self.fragments(state);
        let mut quads = vec![0i64; self.sys.columns];
        for f in &frags {
            for (&c, &x) in f {
                quads[c] += x;
            }
        }
        let violations = self.sys.residual(&quads)?.len();
        let admissible = is_admissible(&quads);
        let negative_component_sums = flow_state.then(|| negative_component_check(d, state));
        Ok(VerificationRecord {
            k_vector: state.k.clone(),
            n: state.n,
            h,
            h_paths,
            degree_defect: flow_state && h_paths != Some(h),
            a: fmt_rat(a),
            tau: fmt_rat(tau),
            tau_seifert: fmt_rat(tau_seifert),
            slope: fmt_rat(slope),
            verdict: a == slope,
            surface: if flow_state { "normal".into() } else { "state".into() },
            surface_kinds: analysis.surface_kinds.clone(),
            normal: violations == 0 && admissible,
            qmatching_violations: violations,
            admissible,
            negative_component_sums,
            quads,
            values: (a, tau, tau_seifert, slope),
        })
    }
}

/// Paths `p_i` of the circles: the lead band `E_i` (lowest id crossed) and
/// the bands of the rest of the circle.
fn circle_paths(d: &KnotDiagram, state: &ColoredKauffmanState) -> Result<Vec<(Vec<usize>, usize)>> {
    let circles = state_circles(d, state)?;
    Ok(circles
        .circles
        .iter()
        .filter(|c| !c.traversals.is_empty())
        .map(|c| {
            let lead = c.traversals.iter().map(|t| t.edge).min().unwrap();
            let rest: Vec<usize> = c.traversals.iter().map(|t| t.edge).filter(|&e| e != lead).collect();
            (rest, lead)
        })
        .collect())
}

fn negative_component_check(d: &KnotDiagram, state: &ColoredKauffmanState) -> bool {
    let g = &d.graph;
    let comp = negative_components(d);
    let Ok(paths) = circle_paths(d, state) else { return false };
    let mut sums: BTreeMap<usize, usize> = BTreeMap::new();
    for (edges, lead) in &paths {
        if let Some(&e) = edges.iter().chain(std::iter::once(lead)).find(|&&e| g.edges[e].weight < 0) {
            *sums.entry(comp[g.edges[e].ends[0]]).or_default() += state.k[*lead];
        }
    }
    sums.values().all(|&s| s == state.n)
}

/// `h_σ` by twist-region aggregation, and by the path formula when every
/// circle gives a path.
pub fn state_degree(d: &KnotDiagram, state: &ColoredKauffmanState) -> Result<(i64, Option<i64>)> {
    let g = &d.graph;
    let n = state.n as i64;
    let mut h = 0;
    for (e, &k) in state.k.iter().enumerate() {
        let w = g.edges[e].weight;
        h += twist_degree(k as i64, n, w.abs(), w.signum())?;
        for t in &state.expansions[e] {
            h += skein_degree(t.l, t.r, t.k, n)?;
        }
    }
    let circles = state_circles(d, state)?;
    let h_paths = circles.walk_failures.is_empty().then(|| {
        circle_paths(d, state)
            .unwrap_or_default()
            .iter()
            .map(|(edges, lead)| {
                let w: i64 = edges.iter().map(|&e| g.edges[e].weight).sum();
                let k = state.k[*lead] as i64;
                (w - 1) * k * k
            })
            .sum()
    });
    Ok((h, h_paths))
}

/// Default cap on enumerated states.
pub const STATE_LIMIT: usize = 1_000_000;

/// True if the diagram has no crossings or its Jones polynomial is trivial.
pub fn looks_unknotted(d: &KnotDiagram) -> Result<bool> {
    Ok(d.crossing_count() == 0 || bracket(d, Convention::Classical)? == LaurentPoly::circle())
}

/// Full report of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub states_examined: usize,
    pub records: Vec<VerificationRecord>,
    /// States rejected only because a circle is a walk rather than a path.
    pub walk_rejections: usize,
}

impl VerificationReport {
    pub fn all_verdicts(&self) -> bool {
        self.records.iter().all(|r| r.verdict)
    }
}

/// Enumerate `k ∈ {0..n}^E` lexicographically and record every colored surface state.
pub fn verify_main_theorem(d: &KnotDiagram, n: usize, saddle: SaddleSign, limit: usize) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if looks_unknotted(d)? {
        return Err(Error::Validation("the theorem needs a nontrivial knot".into()));
    }
    let edges = d.graph.edges.len();
    let total = (n + 1).checked_pow(edges as u32).unwrap_or(usize::MAX);
    if total > limit {
        return Err(Error::Resource(format!("{total} states exceed the limit {limit}")));
    }
    let mut v = Verifier::new(d, saddle)?;
    let mut records = Vec::new();
    let mut walk_rejections = 0;
    let mut k = vec![0usize; edges];
    for _ in 0..total {
        let state = ColoredKauffmanState::new(n, k.clone())?;
        let an = v.analyse(&state)?;
        if an.is_colored_surface_state() {
            records.push(v.record(&state, &an)?);
        } else if an.walk_only {
            walk_rejections += 1;
        }
        // Lexicographic successor, last entry fastest.
        for i in (0..edges).rev() {
            k[i] += 1;
            if k[i] <= n {
                break;
            }
            k[i] = 0;
        }
    }
    Ok(VerificationReport { n, states_examined: total, records, walk_rejections })
}

/// The reference record `σ₀` under a saddle-sign setting.
pub fn reference_record(d: &KnotDiagram, n: usize, saddle: SaddleSign) -> Result<VerificationRecord> {
    let mut v = Verifier::new(d, saddle)?;
    let s0 = ColoredKauffmanState::reference(d, n);
    let mut an = v.analyse(&s0)?;
    // σ₀ is always given the state surface.
    an.from_adequate_state = true;
    an.flow = None;
    v.record(&s0, &an)
}

/// Saddle-sign setting fixed by the calibration self-test.
pub const PINNED_SADDLE_SIGN: SaddleSign = SaddleSign::Plus;

/// Settings under which `a_{σ₀} = s(N₀)` holds on `d`.
pub fn calibrate(d: &KnotDiagram, n: usize) -> Result<Vec<SaddleSign>> {
    let mut ok = Vec::new();
    for s in [SaddleSign::Plus, SaddleSign::Minus] {
        if reference_record(d, n, s)?.verdict {
            ok.push(s);
        }
    }
    Ok(ok)
}

// ---------------------------------------------------------------------------
// Khovanov homology for n = 1

/// Resolution of each crossing in homological degree 0 of the complex:
/// the oriented smoothing at positive crossings, the other at negative ones.
fn zero_resolutions(d: &KnotDiagram) -> Vec<Smoothing> {
    let signs = d.crossing_signs();
    d.oriented_smoothings()
        .into_iter()
        .zip(signs)
        .map(|(o, s)| {
            if s > 0 {
                o
            } else if o == Smoothing::Continue {
                Smoothing::Cut
            } else {
                Smoothing::Continue
            }
        })
        .collect()
}

fn flip(s: Smoothing) -> Smoothing {
    match s {
        Smoothing::Continue => Smoothing::Cut,
        Smoothing::Cut => Smoothing::Continue,
    }
}

/// Enhanced-state chain complex of `D` built from the Frobenius maps on
/// `V = <v+, v->`: merges use `m`, splits use `s`.
#[derive(Debug, Clone)]
pub struct KhovanovComplex {
    pub crossings: usize,
    pub negative: usize,
    pub positive: usize,
    /// Circle count per resolution bitmask.
    pub circles: Vec<usize>,
    /// First generator index per resolution.
    pub offsets: Vec<usize>,
    /// Sparse differential: `(source, target, coefficient)`.
    pub entries: Vec<(usize, usize, i64)>,
}

/// Largest crossing number for building the complex.
pub const MAX_COMPLEX_CROSSINGS: usize = 12;
/// Largest crossing number for computing homology.
pub const MAX_HOMOLOGY_CROSSINGS: usize = 12;

impl KhovanovComplex {
    pub fn new(d: &KnotDiagram) -> Result<Self> {
        let c = d.crossing_count();
        if c > MAX_COMPLEX_CROSSINGS {
            return Err(Error::Resource(format!("{c} crossings exceed the complex bound {MAX_COMPLEX_CROSSINGS}")));
        }
        let signs = d.crossing_signs();
        let positive = signs.iter().filter(|&&s| s > 0).count();
        let negative = c - positive;
        let zero = zero_resolutions(d);
        let smoothing =
            |mask: usize| -> Vec<Smoothing> { (0..c).map(|x| if mask >> x & 1 == 1 { flip(zero[x]) } else { zero[x] }).collect() };
        let labels: Vec<(Vec<[usize; 4]>, usize)> = (0..1usize << c).map(|m| kauffman_circles(d, &smoothing(m))).collect();
        let circles: Vec<usize> = labels.iter().map(|l| l.1).collect();
        let mut offsets = Vec::with_capacity(circles.len() + 1);
        let mut acc = 0;
        for &m in &circles {
            offsets.push(acc);
            acc += 1 << m;
        }
        offsets.push(acc);
        let mut entries = Vec::new();
        for mask in 0..1usize << c {
            let (lab, m) = &labels[mask];
            for x in (0..c).filter(|x| mask >> x & 1 == 0) {
                let target = mask | 1 << x;
                let (lab2, m2) = &labels[target];
                let sign = if (mask & ((1 << x) - 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                // Circle correspondence through ports away from crossing x.
                let mut map = vec![usize::MAX; *m2];
                let mut back = vec![Vec::new(); *m];
                for y in (0..c).filter(|&y| y != x) {
                    for h in Half::ALL {
                        let (a, b) = (lab[y][h as usize], lab2[y][h as usize]);
                        map[b] = a;
                        if !back[a].contains(&b) {
                            back[a].push(b);
                        }
                    }
                }
                // Circles through crossing x in the source and target.
                let src: BTreeSet<usize> = Half::ALL.iter().map(|&h| lab[x][h as usize]).collect();
                let dst: BTreeSet<usize> = Half::ALL.iter().map(|&h| lab2[x][h as usize]).collect();
                for bits in 0..1usize << m {
                    let minus = |i: usize| bits >> i & 1 == 1;
                    let from = offsets[mask] + bits;
                    if src.len() == 2 && dst.len() == 1 {
                        // Merge: v+v+ -> v+, v+v- -> v-, v-v+ -> v-, v-v- -> 0.
                        let mut it = src.iter();
                        let (a, b) = (*it.next().unwrap(), *it.next().unwrap());
                        let c0 = *dst.iter().next().unwrap();
                        if minus(a) && minus(b) {
                            continue;
                        }
                        let mut out = 0usize;
                        for j in 0..*m2 {
                            let v = if j == c0 { minus(a) || minus(b) } else { minus(map[j]) };
                            if v {
                                out |= 1 << j;
                            }
                        }
                        entries.push((from, offsets[target] + out, sign));
                    } else if src.len() == 1 && dst.len() == 2 {
                        // Split: v+ -> v+v- + v-v+, v- -> v-v-.
                        let a = *src.iter().next().unwrap();
                        let mut it = dst.iter();
                        let (b1, b2) = (*it.next().unwrap(), *it.next().unwrap());
                        let base = (0..*m2).filter(|&j| j != b1 && j != b2 && minus(map[j])).fold(0usize, |o, j| o | 1 << j);
                        if minus(a) {
                            entries.push((from, offsets[target] + (base | 1 << b1 | 1 << b2), sign));
                        } else {
                            entries.push((from, offsets[target] + (base | 1 << b2), sign));
                            entries.push((from, offsets[target] + (base | 1 << b1), sign));
                        }
                    } else {
                        return Err(Error::Construction("saddle neither merges nor splits".into()));
                    }
                }
            }
        }
        Ok(Self { crossings: c, negative, positive, circles, offsets, entries })
    }

    pub fn generators(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Resolution mask and label bits (1 = `v-`) of a generator.
    fn locate(&self, g: usize) -> (usize, usize) {
        let mask = self.offsets.partition_point(|&o| o <= g) - 1;
        (mask, g - self.offsets[mask])
    }

    /// Homological degree `|s| - n_-` and quantum degree `#v+ - #v- + |s| + n_+ - 2 n_-`.
    pub fn degrees(&self, g: usize) -> (i64, i64) {
        let (mask, bits) = self.locate(g);
        let r = mask.count_ones() as i64;
        let m = self.circles[mask] as i64;
        let minus = bits.count_ones() as i64;
        let h = r - self.negative as i64;
        let j = (m - 2 * minus) + r + self.positive as i64 - 2 * self.negative as i64;
        (h, j)
    }

    /// Nonzero entries of `d ∘ d`.
    pub fn d_squared_defects(&self) -> usize {
        let mut out: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
        for &(s, t, v) in &self.entries {
            out.entry(s).or_default().push((t, v));
        }
        let mut bad = 0;
        for (&s, firsts) in &out {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(t, v) in firsts {
                for &(u, w) in out.get(&t).map(|x| x.as_slice()).unwrap_or(&[]) {
                    *acc.entry(u).or_default() += v * w;
                }
            }
            let _ = s;
            bad += acc.values().filter(|&&x| x != 0).count();
        }
        bad
    }

    /// `d(x)` for a single generator.
    pub fn apply(&self, g: usize) -> BTreeMap<usize, i64> {
        let mut acc = BTreeMap::new();
        for &(s, t, v) in self.entries.iter().filter(|e| e.0 == g) {
            *acc.entry(t).or_insert(0) += v;
            let _ = s;
        }
        acc.retain(|_, v| *v != 0);
        acc
    }

    /// Graded Euler characteristic of the chain groups, `Σ (-1)^h q^j`.
    pub fn chain_euler(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for g in 0..self.generators() {
            let (h, j) = self.degrees(g);
            p.add_term(j, if h % 2 == 0 { 1 } else { -1 });
        }
        p
    }
}

/// Homology ranks and torsion, keyed by `(i, j)` with the quantum grading
/// shifted so that `Σ (-1)^i q^{i+j} rank` is the Euler characteristic.
#[derive(Debug, Clone, Serialize)]
pub struct KhovanovHomology {
    pub ranks: BTreeMap<String, usize>,
    pub torsion: BTreeMap<String, Vec<i64>>,
    #[serde(skip)]
    pub graded: BTreeMap<(i64, i64), usize>,
    pub euler: LaurentPoly,
    pub d_squared_zero: bool,
}

/// Khovanov homology of `D` over `Z` by elementary divisors of each graded block.
pub fn khovanov_homology(d: &KnotDiagram) -> Result<KhovanovHomology> {
    let c = d.crossing_count();
    if c > MAX_HOMOLOGY_CROSSINGS {
        return Err(Error::Resource(format!("{c} crossings exceed the homology bound {MAX_HOMOLOGY_CROSSINGS}")));
    }
    let cx = KhovanovComplex::new(d)?;
    let d_squared_zero = cx.d_squared_defects() == 0;
    let degree: Vec<(i64, i64)> = (0..cx.generators()).map(|g| cx.degrees(g)).collect();
    let (alive, out) = cancel_units(cx.generators(), &cx.entries);
    // Surviving generators by (h, j) with a local index.
    let mut blocks: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for g in (0..cx.generators()).filter(|&g| alive[g]) {
        blocks.entry(degree[g]).or_default().push(g);
    }
    let index: HashMap<usize, usize> = blocks.values().flat_map(|gs| gs.iter().enumerate().map(|(i, &g)| (g, i))).collect();
    // Dense block matrices of the reduced differential: (h, j) -> (h + 1, j).
    let mut mats: BTreeMap<(i64, i64), Vec<Vec<i64>>> = BTreeMap::new();
    for (&s, targets) in &out {
        for (&t, &v) in targets {
            let (h, j) = degree[s];
            let rows = blocks.get(&(h + 1, j)).map_or(0, |b| b.len());
            let cols = blocks[&(h, j)].len();
            let m = mats.entry((h, j)).or_insert_with(|| vec![vec![0; cols]; rows]);
            m[index[&t]][index[&s]] += v;
        }
    }
    let mut ranks_of: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut divisors: BTreeMap<(i64, i64), Vec<i64>> = BTreeMap::new();
    for (&key, m) in &mats {
        ranks_of.insert(key, rank(m));
        divisors.insert(key, elementary_divisors(m));
    }
    let mut graded = BTreeMap::new();
    let mut ranks = BTreeMap::new();
    let mut torsion = BTreeMap::new();
    let mut euler = LaurentPoly::zero();
    for (&(h, j), gs) in &blocks {
        let out_rank = ranks_of.get(&(h, j)).copied().unwrap_or(0);
        let in_rank = ranks_of.get(&(h - 1, j)).copied().unwrap_or(0);
        let free = gs.len() - out_rank - in_rank;
        let tors: Vec<i64> = divisors.get(&(h - 1, j)).map_or(vec![], |v| v.iter().copied().filter(|&x| x > 1).collect());
        let jp = j - h;
        if free > 0 {
            graded.insert((h, jp), free);
            ranks.insert(format!("{h},{jp}"), free);
            euler.add_term(h + jp, if h % 2 == 0 { free as i64 } else { -(free as i64) });
        }
        if !tors.is_empty() {
            torsion.insert(format!("{h},{jp}"), tors);
        }
    }
    if c == 0 {
        graded.insert((0, 1), 1);
        graded.insert((0, -1), 1);
        ranks.insert("0,1".into(), 1);
        ranks.insert("0,-1".into(), 1);
        euler = LaurentPoly::circle();
    }
    Ok(KhovanovHomology { ranks, torsion, graded, euler, d_squared_zero })
}

/// Gaussian elimination of a based complex: repeatedly cancel a pair `x -> y`
/// with coefficient `±1`, correcting `d(a -> b)` by `-d(a->y) d(x->b) / d(x->y)`.
/// Preserves homology over `Z`. Returns the surviving generators and the
/// reduced differential.
fn cancel_units(size: usize, entries: &[(usize, usize, i64)]) -> (Vec<bool>, BTreeMap<usize, BTreeMap<usize, i64>>) {
    let mut out: BTreeMap<usize, BTreeMap<usize, i64>> = BTreeMap::new();
    let mut inn: BTreeMap<usize, BTreeMap<usize, i64>> = BTreeMap::new();
    for &(s, t, v) in entries {
        *out.entry(s).or_default().entry(t).or_insert(0) += v;
        *inn.entry(t).or_default().entry(s).or_insert(0) += v;
    }
    for m in [&mut out, &mut inn] {
        for row in m.values_mut() {
            row.retain(|_, v| *v != 0);
        }
        m.retain(|_, row| !row.is_empty());
    }
    let mut alive = vec![true; size];
    for x in 0..size {
        while alive[x] {
            let Some((y, c)) = out.get(&x).and_then(|r| r.iter().find(|(_, v)| v.abs() == 1).map(|(&y, &c)| (y, c))) else {
                break;
            };
            let sources: Vec<(usize, i64)> =
                inn.get(&y).map_or(vec![], |r| r.iter().filter(|(&a, _)| a != x).map(|(&a, &v)| (a, v)).collect());
            let targets: Vec<(usize, i64)> =
                out.get(&x).map_or(vec![], |r| r.iter().filter(|(&b, _)| b != y).map(|(&b, &v)| (b, v)).collect());
            // Detach x and y.
            for g in [x, y] {
                if let Some(r) = out.remove(&g) {
                    for t in r.keys() {
                        if let Some(col) = inn.get_mut(t) {
                            col.remove(&g);
                        }
                    }
                }
                if let Some(r) = inn.remove(&g) {
                    for s in r.keys() {
                        if let Some(row) = out.get_mut(s) {
                            row.remove(&g);
                        }
                    }
                }
                alive[g] = false;
            }
            for &(a, ay) in &sources {
                for &(b, xb) in &targets {
                    let delta = -ay * xb * c;
                    let row = out.entry(a).or_default();
                    let v = row.entry(b).or_insert(0);
                    *v += delta;
                    let nv = *v;
                    if nv == 0 {
                        row.remove(&b);
                        inn.entry(b).or_default().remove(&a);
                    } else {
                        inn.entry(b).or_default().insert(a, nv);
                    }
                }
            }
        }
    }
    out.retain(|_, r| !r.is_empty());
    (alive, out)
}

/// Euler characteristic the verbatim bracket predicts: `(-1)^{n_-} <D>`.
pub fn expected_euler(d: &KnotDiagram) -> Result<LaurentPoly> {
    let neg = d.crossing_signs().iter().filter(|&&s| s < 0).count();
    let b = bracket(d, Convention::Verbatim)?;
    Ok(if neg % 2 == 0 { b } else { b.scale(-1) })
}

/// Outcome of the cycle test for `X_σ = v- ⊗ ... ⊗ v-`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleCheck {
    /// Every single resolution change merges two distinct circles.
    pub all_merges: bool,
    /// `d(X_σ) = 0` in the complex.
    pub is_cycle: bool,
}

/// Cycle test for a Kauffman state on `D` (n = 1).
pub fn cycle_check(d: &KnotDiagram, smoothings: &[Smoothing]) -> Result<CycleCheck> {
    let c = d.crossing_count();
    if smoothings.len() != c {
        return Err(Error::Parameter("one smoothing per crossing expected".into()));
    }
    let (label, _) = kauffman_circles(d, smoothings);
    let zero = zero_resolutions(d);
    let all_merges = (0..c).filter(|&x| smoothings[x] == zero[x]).all(|x| {
        let s = smoothings[x];
        let other = if s.partner(Half::SW) == Half::NW { Half::SE } else { Half::NW };
        label[x][Half::SW as usize] != label[x][other as usize]
    });
    let cx = KhovanovComplex::new(d)?;
    let mask = (0..c).filter(|&x| smoothings[x] != zero[x]).fold(0usize, |m, x| m | 1 << x);
    let all_minus = (1usize << cx.circles[mask]) - 1;
    let is_cycle = cx.apply(cx.offsets[mask] + all_minus).is_empty();
    Ok(CycleCheck { all_merges, is_cycle })
}

/// Cycle obstruction on the twist-region window for a colored state.
///
/// Changing one expansion term or one cable resolution is a saddle between
/// neighbouring points at a band end, except that the innermost turnbacks
/// of a band with `k < n` are joined by a saddle across the band. Every such
/// saddle must join two distinct circles.
pub fn window_cycle_check(d: &KnotDiagram, state: &ColoredKauffmanState) -> Result<bool> {
    let circles = state_circles(d, state)?;
    let mut owner: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for (i, c) in circles.circles.iter().enumerate() {
        for &p in &c.points {
            owner.insert(p, i);
        }
    }
    let n = state.n;
    let distinct = |a: (usize, usize, usize), b: (usize, usize, usize)| owner.get(&a) != owner.get(&b);
    for e in 0..d.graph.edges.len() {
        let capped = state.k[e] < n;
        if capped && !distinct((e, 0, n - 1), (e, 1, n - 1)) {
            return Ok(false);
        }
        for t in 0..2 {
            for p in 0..2 * n - 1 {
                if capped && p == n - 1 {
                    continue;
                }
                if !distinct((e, t, p), (e, t, p + 1)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
