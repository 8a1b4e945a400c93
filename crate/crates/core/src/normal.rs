//! Quadrilateral coordinates, Q-matching equations and local quad assignments.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::KnotDiagram;
use crate::error::{Error, Result};
use crate::triangulation::{edge_classes, edge_slot, face_from, EdgeClasses, Triangulation};

/// Quad type separating the pair `{a, b}` from the other two vertices.
/// Type 0 is {0,1}|{2,3}, type 1 is {0,2}|{1,3}, type 2 is {0,3}|{1,2}.
pub fn quad_type(a: u8, b: u8) -> usize {
    let partner = if a == 0 {
        b
    } else if b == 0 {
        a
    } else {
        (1..4u8).find(|v| *v != a && *v != b).unwrap()
    };
    partner as usize - 1
}

/// Column of quad type `kind` in tetrahedron `tet`.
pub fn quad_column(tet: usize, kind: usize) -> usize {
    3 * tet + kind
}

/// Q-matching system: one sparse row of total slopes per edge class.
#[derive(Debug, Clone)]
pub struct QMatchingSystem {
    pub classes: EdgeClasses,
    /// `slopes[e][col]` is the total slope `s_e(q)` of quad column `col` at class `e`.
    pub slopes: Vec<BTreeMap<usize, i64>>,
    pub columns: usize,
}

/// Total slope of quad column `col` at edge class `e` (0 if it misses the edge).
pub fn total_slope(sys: &QMatchingSystem, col: usize, e: usize) -> i64 {
    sys.slopes[e].get(&col).copied().unwrap_or(0)
}

/// Build the Q-matching matrix of a triangulation.
pub fn qmatching_matrix(t: &Triangulation) -> QMatchingSystem {
    let classes = edge_classes(t);
    let slopes = classes
        .classes
        .iter()
        .map(|cl| {
            let mut row: BTreeMap<usize, i64> = BTreeMap::new();
            for o in &cl.occurrences {
                *row.entry(quad_column(o.tet, quad_type(o.a, o.c))).or_default() += 1;
                *row.entry(quad_column(o.tet, quad_type(o.a, o.d))).or_default() -= 1;
            }
            row.retain(|_, v| *v != 0);
            row
        })
        .collect();
    QMatchingSystem { classes, slopes, columns: 3 * t.tet_count() }
}

impl QMatchingSystem {
    /// Edge classes that give equations: those not lying on the boundary.
    pub fn equation_rows(&self) -> Vec<usize> {
        (0..self.slopes.len()).filter(|&e| self.classes.classes[e].interior).collect()
    }

    /// Dense matrix of the equations.
    pub fn dense(&self) -> Vec<Vec<i64>> {
        self.equation_rows()
            .into_iter()
            .map(|e| {
                let mut r = vec![0; self.columns];
                for (&c, &v) in &self.slopes[e] {
                    r[c] = v;
                }
                r
            })
            .collect()
    }

    /// Value of the equation at class `e` on a sparse vector.
    pub fn row_value(&self, e: usize, v: &BTreeMap<usize, i64>) -> i64 {
        self.slopes[e].iter().map(|(c, s)| s * v.get(c).copied().unwrap_or(0)).sum()
    }

    /// Equations violated by `v`, as `(class, value)`.
    pub fn residual(&self, v: &[i64]) -> Result<Vec<(usize, i64)>> {
        if v.len() != self.columns {
            return Err(Error::Parameter(format!("vector length {} does not match {} columns", v.len(), self.columns)));
        }
        Ok(self
            .equation_rows()
            .into_iter()
            .map(|e| (e, self.slopes[e].iter().map(|(c, s)| s * v[*c]).sum::<i64>()))
            .filter(|x| x.1 != 0)
            .collect())
    }

    /// Sparse triplets `row col value`, one per line, rows numbered by edge class.
    pub fn to_triplets(&self) -> String {
        let mut out = format!("#rows {} #cols {}\n", self.slopes.len(), self.columns);
        for e in self.equation_rows() {
            for (c, v) in &self.slopes[e] {
                out.push_str(&format!("{e} {c} {v}\n"));
            }
        }
        out
    }
}

/// Nonnegative with at most one nonzero quad type per tetrahedron.
pub fn is_admissible(v: &[i64]) -> bool {
    v.iter().all(|x| *x >= 0) && v.chunks(3).all(|c| c.iter().filter(|x| **x != 0).count() <= 1)
}

/// Admissible solution of the Q-matching equations.
pub fn is_normal(v: &[i64], sys: &QMatchingSystem) -> Result<bool> {
    Ok(sys.residual(v)?.is_empty() && is_admissible(v))
}

/// Local surface family in a twist region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum SurfaceKind {
    I,
    II,
    III,
}

/// Everything needed to read the octahedra of a twist region.
pub struct RegionContext<'a> {
    pub diagram: &'a KnotDiagram,
    pub tri: &'a Triangulation,
    pub sys: &'a QMatchingSystem,
}

/// The two summands of a local assignment and their support.
#[derive(Debug, Clone, Default)]
pub struct LocalBasis {
    /// Σ_j v_j as quad column counts.
    pub v: BTreeMap<usize, i64>,
    /// Σ_j a_j as quad column counts.
    pub a: BTreeMap<usize, i64>,
    /// Tetrahedra associated to the region.
    pub tets: BTreeSet<usize>,
    /// Selector lookups that did not return exactly one quad.
    pub warnings: Vec<String>,
}

/// A quad vector fragment supported on one twist region.
#[derive(Debug, Clone)]
pub struct LocalSurface {
    pub region: usize,
    pub kind: SurfaceKind,
    pub quads: BTreeMap<usize, i64>,
    pub tets: BTreeSet<usize>,
    pub warnings: Vec<String>,
}

impl<'a> RegionContext<'a> {
    pub fn new(diagram: &'a KnotDiagram, tri: &'a Triangulation, sys: &'a QMatchingSystem) -> Self {
        RegionContext { diagram, tri, sys }
    }

    /// Octahedron vertex after the mirror used for positive regions.
    fn mv(&self, region: usize, v: u8) -> u8 {
        if self.diagram.graph.edges[region].weight > 0 {
            match v {
                0 => 5,
                5 => 0,
                x => x,
            }
        } else {
            v
        }
    }

    fn phi(&self, t: usize) -> [u8; 4] {
        self.tri.oct_vertices[t].expect("octahedron tetrahedron")
    }

    /// Tetrahedron of crossing `c` spanned by octahedron vertices `vs`.
    fn oct_tet(&self, c: usize, vs: [u8; 4]) -> usize {
        (5 * c..5 * c + 5)
            .find(|&t| {
                let p = self.phi(t);
                vs.iter().all(|v| p.contains(v))
            })
            .expect("octahedron tetrahedron with these vertices")
    }

    /// Edge class of octahedron edge `ab` at crossing `c`.
    pub fn edge_class(&self, c: usize, a: u8, b: u8) -> usize {
        for t in 5 * c..5 * c + 5 {
            let p = self.phi(t);
            if let (Some(i), Some(j)) = (p.iter().position(|&x| x == a), p.iter().position(|&x| x == b)) {
                return self.sys.classes.index[t][edge_slot(i as u8, j as u8)];
            }
        }
        panic!("octahedron edge {a}{b} missing")
    }

    /// Inflation tetrahedron on the octahedron face `vs` of crossing `c`, if that face was inflated.
    fn inflation_tet(&self, c: usize, vs: [u8; 3]) -> Option<usize> {
        for t in 5 * c..5 * c + 5 {
            let p = self.phi(t);
            if vs.iter().all(|v| p.contains(v)) {
                let loc = vs.map(|v| p.iter().position(|&x| x == v).unwrap() as u8);
                if let Some(&x) = self.tri.inflated_faces.get(&(t, face_from(loc))) {
                    return Some(x);
                }
            }
        }
        None
    }

    fn select(&self, e: usize, x: usize, q: Option<usize>, targets: &[i64]) -> Vec<usize> {
        let Some(q) = q else { return Vec::new() };
        let s = |c: usize| total_slope(self.sys, c, e);
        (0..3).map(|i| quad_column(x, i)).filter(|&c| targets.contains(&(s(q) + s(c)))).collect()
    }

    /// Tetrahedra associated to a twist region.
    pub fn region_tets(&self, region: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &c in &self.diagram.regions[region] {
            out.extend(5 * c..5 * c + 5);
            for vs in [[5, 1, 2], [0, 1, 2], [5, 3, 4], [0, 3, 4]] {
                if let Some(x) = self.inflation_tet(c, vs.map(|v| self.mv(region, v))) {
                    out.insert(x);
                }
            }
        }
        out
    }

    /// The Type I/II/III vectors `Σ v_j` and `Σ a_j` of a region. `perm` assigns
    /// quad types of the centre tetrahedron to `(q', q'', q''')`.
    pub fn local_basis(&self, region: usize, kind: SurfaceKind, perm: [usize; 3]) -> LocalBasis {
        let mut out = LocalBasis { tets: self.region_tets(region), ..Default::default() };
        let m = |v: u8| self.mv(region, v);
        for (jj, &c) in self.diagram.regions[region].iter().enumerate() {
            let j = jj + 1;
            let mut warn = |what: &str, got: &[usize]| -> Option<usize> {
                if got.len() != 1 {
                    out.warnings.push(format!("crossing {c}: selector {what} matched {} quads", got.len()));
                }
                got.first().copied()
            };
            let z = self.oct_tet(c, [1, 2, 3, 4]);
            let q = perm.map(|p| quad_column(z, p));
            let e24 = self.edge_class(c, m(2), m(4));
            let e13 = self.edge_class(c, m(1), m(3));
            let tet = |vs: [u8; 4]| self.oct_tet(c, vs.map(m));
            let t0124 = tet([0, 1, 2, 4]);
            let t1345 = tet([1, 3, 4, 5]);
            let t0234 = tet([0, 2, 3, 4]);
            let t1235 = tet([1, 2, 3, 5]);
            let tj = self.inflation_tet(c, [5, 1, 2].map(m));
            let tpj = self.inflation_tet(c, [0, 1, 2].map(m));
            let (vs, a_s): (Vec<Option<usize>>, Vec<Option<usize>>) = match kind {
                SurfaceKind::I | SurfaceKind::II => {
                    let qk = if kind == SurfaceKind::I { q[0] } else { q[1] };
                    let order = if kind == SurfaceKind::I { [t0124, t1345, t0234, t1235] } else { [t0234, t1345, t0124, t1235] };
                    let es = [e24, e13, e24, e13];
                    let v: Vec<Option<usize>> =
                        (0..4).map(|i| warn(&format!("n{}", i + 1), &self.select(es[i], order[i], Some(qk), &[0]))).collect();
                    let chosen = if j % 2 == 1 { vec![Some(qk), v[0], v[1]] } else { vec![Some(qk), v[2], v[3]] };
                    // a'' equals a', which is built from the Type I selectors.
                    let v1 = if kind == SurfaceKind::I {
                        v.clone()
                    } else {
                        [t0124, t1345].iter().zip([e24, e13]).map(|(&x, e)| self.select(e, x, Some(q[0]), &[0]).first().copied()).collect()
                    };
                    let mut a = Vec::new();
                    if let Some(x) = tj {
                        a.push(warn("m15", &self.select(self.edge_class(c, m(1), m(5)), x, v1[0], &[2, -2])));
                    }
                    if let Some(x) = tpj {
                        a.push(warn("m02", &self.select(self.edge_class(c, m(0), m(2)), x, v1[1], &[2, -2])));
                    }
                    (chosen, a)
                }
                SurfaceKind::III => {
                    let a = vec![
                        warn("n1", &self.select(e24, t0124, Some(q[2]), &[0])),
                        warn("n3", &self.select(e13, t1235, Some(q[2]), &[0])),
                    ];
                    (vec![Some(q[2])], a)
                }
            };
            let vset: BTreeSet<usize> = vs.into_iter().flatten().collect();
            let aset: BTreeSet<usize> = a_s.into_iter().flatten().collect();
            for x in vset {
                *out.v.entry(x).or_default() += 1;
            }
            for x in aset {
                *out.a.entry(x).or_default() += 1;
            }
        }
        out
    }

    /// `k Σ v_j + (n - k) Σ a_j` for the region.
    pub fn local_surface(&self, region: usize, kind: SurfaceKind, n: i64, k: i64, r: i64) -> Result<LocalSurface> {
        let w = self.diagram.graph.edges[region].weight.abs();
        let ok = match kind {
            SurfaceKind::I => 0 <= k && k < n,
            SurfaceKind::II | SurfaceKind::III => 0 <= k && k <= n,
        };
        if n < 1 || !ok || r < 0 || r > w {
            return Err(Error::Parameter(format!("local surface {kind:?} with n={n} k={k} r={r} w={w}")));
        }
        let b = self.local_basis(region, kind, [0, 1, 2]);
        let mut quads: BTreeMap<usize, i64> = BTreeMap::new();
        for (c, x) in &b.v {
            *quads.entry(*c).or_default() += k * x;
        }
        for (c, x) in &b.a {
            *quads.entry(*c).or_default() += (n - k) * x;
        }
        quads.retain(|_, x| *x != 0);
        Ok(LocalSurface { region, kind, quads, tets: b.tets, warnings: b.warnings })
    }

    /// Interior edge classes of the region's tetrahedra where a fragment fails Q-matching.
    pub fn interior_violations(&self, quads: &BTreeMap<usize, i64>, tets: &BTreeSet<usize>) -> Vec<(usize, i64)> {
        self.sys
            .equation_rows()
            .into_iter()
            .filter(|&e| self.sys.classes.classes[e].occurrences.iter().all(|o| tets.contains(&o.tet)))
            .map(|e| (e, self.sys.row_value(e, quads)))
            .filter(|x| x.1 != 0)
            .collect()
    }

    /// Boundary coordinates `(C_1, C_2, B_1, B_2)` of a fragment on region `region`.
    pub fn boundary_coordinates(&self, region: usize, quads: &BTreeMap<usize, i64>) -> [i64; 4] {
        let cs = &self.diagram.regions[region];
        let (first, last) = (cs[0], *cs.last().unwrap());
        let m = |v: u8| self.mv(region, v);
        let s = |e: usize| self.sys.row_value(e, quads);
        [
            s(self.edge_class(first, m(3), m(4))),
            s(self.edge_class(last, m(1), m(2))),
            s(self.edge_class(first, m(1), m(4))),
            s(self.edge_class(first, m(2), m(3))),
        ]
    }
}

/// Outcome of the vertex and face sum conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaMainReport {
    /// `(vertex, Σ C_1, Σ C_2)` for vertices with a nonzero sum.
    pub vertex_failures: Vec<(usize, i64, i64)>,
    /// `(face, Σ B_1, Σ B_2)` for faces with a nonzero sum.
    pub face_failures: Vec<(usize, i64, i64)>,
}

impl LemmaMainReport {
    pub fn holds(&self) -> bool {
        self.vertex_failures.is_empty() && self.face_failures.is_empty()
    }
}

/// Vertex sums of C_1, C_2 and face sums of B_1, B_2 over the graph.
pub fn lemma_main_check(ctx: &RegionContext, fragments: &[BTreeMap<usize, i64>]) -> LemmaMainReport {
    let g = &ctx.diagram.graph;
    let coords: Vec<[i64; 4]> = (0..g.edges.len()).map(|r| ctx.boundary_coordinates(r, &fragments[r])).collect();
    let mut vertex_failures = Vec::new();
    for (v, rot) in g.rotations.iter().enumerate() {
        let (c1, c2) = rot.iter().fold((0, 0), |(a, b), h| (a + coords[h.edge][0], b + coords[h.edge][1]));
        if c1 != 0 || c2 != 0 {
            vertex_failures.push((v, c1, c2));
        }
    }
    let mut face_failures = Vec::new();
    for (fi, face) in g.compute_faces().iter().enumerate() {
        let edges: BTreeSet<usize> = face.sides.iter().map(|s| s.edge).collect();
        let (b1, b2) = edges.iter().fold((0, 0), |(a, b), &e| (a + coords[e][2], b + coords[e][3]));
        if b1 != 0 || b2 != 0 {
            face_failures.push((fi, b1, b2));
        }
    }
    LemmaMainReport { vertex_failures, face_failures }
}

/// Admissible solutions with entries at most `bound` that are not a sum of
/// two nonzero admissible solutions.
///
/// A solution is decomposable exactly when it dominates a different nonzero
/// solution, hence a different fundamental one. Bounds are raised one at a
/// time and any branch dominating a known fundamental solution is cut.
pub fn fundamental_solutions(sys: &QMatchingSystem, bound: i64, limit: usize) -> Result<Vec<Vec<i64>>> {
    if bound < 1 {
        return Err(Error::Parameter("bound must be positive".into()));
    }
    let mut fund: Vec<Vec<i64>> = Vec::new();
    for b in 1..=bound {
        let mut cands = Vec::new();
        visit_admissible(sys, b, &fund, |v| {
            if cands.len() >= limit {
                return Err(Error::Resource(format!("more than {limit} candidate solutions")));
            }
            cands.push(v.to_vec());
            Ok(())
        })?;
        fund.extend(fundamental_filter(&cands));
    }
    fund.sort();
    Ok(fund)
}

/// All nonzero admissible solutions with entries at most `bound`.
pub fn admissible_solutions(sys: &QMatchingSystem, bound: i64, limit: usize) -> Result<Vec<Vec<i64>>> {
    if bound < 1 {
        return Err(Error::Parameter("bound must be positive".into()));
    }
    let mut out = Vec::new();
    visit_admissible(sys, bound, &[], |v| {
        if out.len() >= limit {
            return Err(Error::Resource(format!("more than {limit} admissible solutions")));
        }
        out.push(v.to_vec());
        Ok(())
    })?;
    out.sort();
    Ok(out)
}

/// Call `visit` on every nonzero admissible solution with entries at most
/// `bound` that dominates none of `avoid`.
///
/// Depth-first search over tetrahedra, ordered so that equations close
/// early; a branch is cut once some equation can no longer reach zero.
pub fn visit_admissible<F>(sys: &QMatchingSystem, bound: i64, avoid: &[Vec<i64>], mut visit: F) -> Result<()>
where
    F: FnMut(&[i64]) -> Result<()>,
{
    let caps = vec![bound; sys.columns];
    visit_capped(sys, &caps, avoid, |v| visit(v).map(|_| true)).map(|_| ())
}

/// A nonzero admissible solution `u <= v` different from `v`, if any.
pub fn proper_subsolution(sys: &QMatchingSystem, v: &[i64]) -> Option<Vec<i64>> {
    let mut found = None;
    let _ = visit_capped(sys, v, &[], |u| {
        if u != v {
            found = Some(u.to_vec());
            return Ok(false);
        }
        Ok(true)
    });
    found
}

/// Search engine behind [`visit_admissible`]: entries are capped per column
/// and `visit` returns `false` to stop. Returns whether the search ran to the end.
pub fn visit_capped<F>(sys: &QMatchingSystem, caps: &[i64], avoid: &[Vec<i64>], mut visit: F) -> Result<bool>
where
    F: FnMut(&[i64]) -> Result<bool>,
{
    let rows = sys.equation_rows();
    let nt = sys.columns / 3;
    let mut by_tet: Vec<Vec<(usize, [i64; 3])>> = vec![Vec::new(); nt];
    let mut row_tets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); rows.len()];
    for (ri, &e) in rows.iter().enumerate() {
        let mut acc: BTreeMap<usize, [i64; 3]> = BTreeMap::new();
        for (&c, &s) in &sys.slopes[e] {
            acc.entry(c / 3).or_default()[c % 3] = s;
        }
        for (t, co) in acc {
            by_tet[t].push((ri, co));
            row_tets[ri].insert(t);
        }
    }
    // Greedy order: next the tetrahedron closing or touching the most open equations.
    let mut order = Vec::with_capacity(nt);
    let mut placed = vec![false; nt];
    let mut open: Vec<usize> = row_tets.iter().map(|s| s.len()).collect();
    for _ in 0..nt {
        let best = (0..nt)
            .filter(|&t| !placed[t])
            .min_by_key(|&t| {
                let closes = by_tet[t].iter().filter(|(ri, _)| open[*ri] == 1).count();
                let touches = by_tet[t].iter().filter(|(ri, _)| open[*ri] < row_tets[*ri].len()).count();
                (std::cmp::Reverse(closes), std::cmp::Reverse(touches), t)
            })
            .unwrap();
        placed[best] = true;
        for (ri, _) in &by_tet[best] {
            open[*ri] -= 1;
        }
        order.push(best);
    }
    let mut pos = vec![0; nt];
    for (i, &t) in order.iter().enumerate() {
        pos[t] = i;
    }
    let mut reach = vec![vec![0i64; rows.len()]; nt + 1];
    for i in (0..nt).rev() {
        reach[i] = reach[i + 1].clone();
        for (ri, co) in &by_tet[order[i]] {
            let t = order[i];
            reach[i][*ri] += (0..3).map(|k| co[k].abs() * caps[3 * t + k]).max().unwrap();
        }
    }
    // Each avoided vector is checked once its support is fully assigned.
    let mut checks: Vec<Vec<Vec<(usize, i64)>>> = vec![Vec::new(); nt];
    for f in avoid {
        let supp: Vec<(usize, i64)> = f.iter().enumerate().filter(|x| *x.1 != 0).map(|(c, &x)| (c, x)).collect();
        if let Some(at) = supp.iter().map(|(c, _)| pos[c / 3]).max() {
            checks[at].push(supp);
        }
    }
    struct Search<'a, F> {
        by_tet: &'a [Vec<(usize, [i64; 3])>],
        order: &'a [usize],
        reach: &'a [Vec<i64>],
        checks: &'a [Vec<Vec<(usize, i64)>>],
        caps: &'a [i64],
        v: Vec<i64>,
        partial: Vec<i64>,
        visit: F,
    }
    impl<F: FnMut(&[i64]) -> Result<bool>> Search<'_, F> {
        fn dfs(&mut self, i: usize) -> Result<bool> {
            if i == self.order.len() {
                if self.v.iter().any(|x| *x != 0) {
                    return (self.visit)(&self.v);
                }
                return Ok(true);
            }
            let t = self.order[i];
            let by_tet = self.by_tet;
            let choices = std::iter::once((0, 0)).chain((0..3).flat_map(|k| (1..=self.caps[3 * t + k]).map(move |x| (k, x))));
            for (kind, val) in choices {
                for (ri, co) in &by_tet[t] {
                    self.partial[*ri] += co[kind] * val;
                }
                let feasible = by_tet[t].iter().all(|(ri, _)| self.partial[*ri].abs() <= self.reach[i + 1][*ri]);
                self.v[3 * t + kind] = val;
                let dominated = feasible && self.checks[i].iter().any(|f| f.iter().all(|&(c, x)| self.v[c] >= x));
                let r = if feasible && !dominated { self.dfs(i + 1) } else { Ok(true) };
                self.v[3 * t + kind] = 0;
                for (ri, co) in &by_tet[t] {
                    self.partial[*ri] -= co[kind] * val;
                }
                if !r? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
    let mut s = Search {
        by_tet: &by_tet,
        order: &order,
        reach: &reach,
        checks: &checks,
        caps,
        v: vec![0; sys.columns],
        partial: vec![0; rows.len()],
        visit: &mut visit,
    };
    s.dfs(0)
}

/// Keep the solutions that are not sums of two nonzero solutions from the set.
pub fn fundamental_filter(all: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let set: BTreeSet<&Vec<i64>> = all.iter().collect();
    let mut out: Vec<Vec<i64>> = all
        .iter()
        .filter(|v| {
            !all.iter().any(|u| {
                u != *v && u.iter().zip(v.iter()).all(|(a, b)| a <= b) && {
                    let d: Vec<i64> = v.iter().zip(u.iter()).map(|(a, b)| a - b).collect();
                    set.contains(&d)
                }
            })
        })
        .cloned()
        .collect();
    out.sort();
    out
}
