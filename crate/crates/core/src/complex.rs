//! Pure 3-dimensional simplicial complexes stored by their facets.
//!
//! A [`Complex3`] is immutable: every operation in this crate returns a new
//! complex. Face tables (edges, triangles, vertex links) are built eagerly on
//! construction, so lookups never mutate shared state.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{Surface2, SurfaceType};

pub type VertexId = u32;
pub type Edge = [VertexId; 2];
pub type Triangle = [VertexId; 3];
pub type Tetra = [VertexId; 4];

/// Sorts a fixed-size vertex array, returning `None` if a vertex repeats.
pub fn canonical<const N: usize>(mut face: [VertexId; N]) -> Option<[VertexId; N]> {
    face.sort_unstable();
    if face.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(face)
    }
}

pub(crate) fn edge(a: VertexId, b: VertexId) -> Edge {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

pub(crate) fn tri(a: VertexId, b: VertexId, c: VertexId) -> Triangle {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

pub(crate) fn tet(a: VertexId, b: VertexId, c: VertexId, d: VertexId) -> Tetra {
    let mut t = [a, b, c, d];
    t.sort_unstable();
    t
}

/// The four boundary triangles of a tetrahedron; entry `i` omits vertex `i`.
pub fn tet_faces(t: &Tetra) -> [Triangle; 4] {
    [
        [t[1], t[2], t[3]],
        [t[0], t[2], t[3]],
        [t[0], t[1], t[3]],
        [t[0], t[1], t[2]],
    ]
}

/// Face counts `(f_{-1}, f0, f1, f2, f3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FVector {
    pub f0: usize,
    pub f1: usize,
    pub f2: usize,
    pub f3: usize,
}

impl FVector {
    pub const F_MINUS_1: usize = 1;

    pub fn as_array(&self) -> [usize; 5] {
        [Self::F_MINUS_1, self.f0, self.f1, self.f2, self.f3]
    }

    pub fn g_invariants(&self) -> GInvariants {
        GInvariants::from_f_vector(self)
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(1,{},{},{},{})", self.f0, self.f1, self.f2, self.f3)
    }
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// h-vector and g2 of a 3-dimensional complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GInvariants {
    pub h: [i64; 5],
    pub g2: i64,
}

impl GInvariants {
    pub fn from_f_vector(f: &FVector) -> Self {
        const D: i64 = 3;
        let fv: Vec<i64> = f.as_array().iter().map(|&x| x as i64).collect();
        let mut h = [0i64; 5];
        for (i, hi) in h.iter_mut().enumerate() {
            let i = i as i64;
            *hi = (0..=i)
                .map(|j| {
                    let sign = if (i - j) % 2 == 0 { 1 } else { -1 };
                    sign * binomial(D + 1 - j, i - j) * fv[j as usize]
                })
                .sum();
        }
        let g2 = h[2] - h[1];
        debug_assert_eq!(g2, g2_closed_form(f));
        GInvariants { h, g2 }
    }
}

/// `f1 - 4 f0 + 10`, the d = 3 specialisation of `f1 - (d+1) f0 + C(d+2, 2)`.
pub fn g2_closed_form(f: &FVector) -> i64 {
    f.f1 as i64 - 4 * f.f0 as i64 + 10
}

/// Outcome of a single structural check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    fn pass() -> Self {
        Check {
            passed: true,
            witness: None,
        }
    }

    fn fail(witness: impl Into<String>) -> Self {
        Check {
            passed: false,
            witness: Some(witness.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pure: Check,
    pub triangles_in_two_facets: Check,
    pub strongly_connected: Check,
    pub vertex_links_closed_surfaces: Check,
    pub edge_links_cycles: Check,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed)
    }

    pub fn checks(&self) -> [(&'static str, &Check); 5] {
        [
            ("pure", &self.pure),
            ("triangles_in_two_facets", &self.triangles_in_two_facets),
            ("strongly_connected", &self.strongly_connected),
            (
                "vertex_links_closed_surfaces",
                &self.vertex_links_closed_surfaces,
            ),
            ("edge_links_cycles", &self.edge_links_cycles),
        ]
    }

    /// First failing check, formatted for error messages.
    pub fn first_failure(&self) -> Option<String> {
        self.checks().iter().find(|(_, c)| !c.passed).map(|(n, c)| {
            format!("{n}: {}", c.witness.clone().unwrap_or_default())
        })
    }
}

/// A pure 3-dimensional simplicial complex.
#[derive(Clone)]
pub struct Complex3 {
    facets: BTreeSet<Tetra>,
    vertices: Vec<VertexId>,
    /// edge -> opposite edges in the facets containing it (the edge link)
    edges: BTreeMap<Edge, Vec<Edge>>,
    /// triangle -> apexes of the facets containing it
    triangles: BTreeMap<Triangle, Vec<VertexId>>,
    /// vertex -> opposite triangles (the vertex link)
    vertex_links: BTreeMap<VertexId, Vec<Triangle>>,
}

impl PartialEq for Complex3 {
    fn eq(&self, other: &Self) -> bool {
        self.facets == other.facets
    }
}

impl Eq for Complex3 {}

impl fmt::Debug for Complex3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Complex3")
            .field("f", &self.f_vector())
            .field("facets", &self.facets)
            .finish()
    }
}

impl Complex3 {
    /// Builds a complex from facets, collapsing duplicates.
    pub fn new<I>(facets: I) -> Result<Self>
    where
        I: IntoIterator<Item = Tetra>,
    {
        let mut set = BTreeSet::new();
        for f in facets {
            let c = canonical(f).ok_or_else(|| Error::DegenerateFacet(f.to_vec()))?;
            set.insert(c);
        }
        if set.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self::from_set(set))
    }

    pub(crate) fn from_set(facets: BTreeSet<Tetra>) -> Self {
        let mut vertices = BTreeSet::new();
        let mut edges: BTreeMap<Edge, Vec<Edge>> = BTreeMap::new();
        let mut triangles: BTreeMap<Triangle, Vec<VertexId>> = BTreeMap::new();
        let mut vertex_links: BTreeMap<VertexId, Vec<Triangle>> = BTreeMap::new();
        for t in &facets {
            for (i, face) in tet_faces(t).into_iter().enumerate() {
                vertices.insert(t[i]);
                triangles.entry(face).or_default().push(t[i]);
                vertex_links.entry(t[i]).or_default().push(face);
            }
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let rest: Vec<VertexId> =
                        (0..4).filter(|&k| k != i && k != j).map(|k| t[k]).collect();
                    edges
                        .entry([t[i], t[j]])
                        .or_default()
                        .push([rest[0], rest[1]]);
                }
            }
        }
        Complex3 {
            facets,
            vertices: vertices.into_iter().collect(),
            edges,
            triangles,
            vertex_links,
        }
    }

    /// The boundary of the 4-simplex on the given five labels.
    pub fn boundary_4_simplex(labels: [VertexId; 5]) -> Result<Self> {
        let facets = (0..5).map(|skip| {
            let v: Vec<VertexId> = (0..5).filter(|&i| i != skip).map(|i| labels[i]).collect();
            [v[0], v[1], v[2], v[3]]
        });
        Self::new(facets)
    }

    pub fn facets(&self) -> impl Iterator<Item = &Tetra> + '_ {
        self.facets.iter()
    }

    pub fn facet_set(&self) -> &BTreeSet<Tetra> {
        &self.facets
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.keys()
    }

    pub fn triangles(&self) -> impl Iterator<Item = &Triangle> + '_ {
        self.triangles.keys()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertex_links.contains_key(&v)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains_key(&edge(a, b))
    }

    pub fn has_triangle(&self, t: &Triangle) -> bool {
        self.triangles.contains_key(t)
    }

    pub fn has_facet(&self, t: &Tetra) -> bool {
        self.facets.contains(t)
    }

    /// Membership of an arbitrary face given as a vertex slice.
    pub fn contains_face(&self, face: &[VertexId]) -> bool {
        let mut f = face.to_vec();
        f.sort_unstable();
        f.dedup();
        if f.len() != face.len() {
            return false;
        }
        match f.len() {
            0 => true,
            1 => self.has_vertex(f[0]),
            2 => self.has_edge(f[0], f[1]),
            3 => self.has_triangle(&[f[0], f[1], f[2]]),
            4 => self.has_facet(&[f[0], f[1], f[2], f[3]]),
            _ => false,
        }
    }

    pub fn f_vector(&self) -> FVector {
        FVector {
            f0: self.vertices.len(),
            f1: self.edges.len(),
            f2: self.triangles.len(),
            f3: self.facets.len(),
        }
    }

    pub fn g_invariants(&self) -> GInvariants {
        self.f_vector().g_invariants()
    }

    pub fn g2(&self) -> i64 {
        g2_closed_form(&self.f_vector())
    }

    pub fn max_label(&self) -> VertexId {
        *self.vertices.last().expect("complex is nonempty")
    }

    /// `count` fresh labels: max+1, max+2, ...
    pub fn fresh_labels(&self, count: usize) -> Vec<VertexId> {
        let m = self.max_label();
        (1..=count as VertexId).map(|i| m + i).collect()
    }

    /// Facets incident to the triangle (its apex vertices).
    pub fn triangle_cofaces(&self, t: &Triangle) -> &[VertexId] {
        self.triangles.get(t).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Triangles of the link of a vertex.
    pub fn link_triangles(&self, v: VertexId) -> &[Triangle] {
        self.vertex_links.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Edges of the link of an edge.
    pub fn edge_link_edges(&self, a: VertexId, b: VertexId) -> &[Edge] {
        self.edges
            .get(&edge(a, b))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Facets containing a vertex.
    pub fn vertex_star_facets(&self, v: VertexId) -> Vec<Tetra> {
        self.link_triangles(v)
            .iter()
            .map(|t| tet(v, t[0], t[1], t[2]))
            .collect()
    }

    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.link_triangles(v)
            .iter()
            .flat_map(|t| t.iter().copied())
            .collect()
    }

    /// `d(v)`: number of vertices in the link of `v`.
    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    pub fn edge_link_vertices(&self, a: VertexId, b: VertexId) -> BTreeSet<VertexId> {
        self.edge_link_edges(a, b)
            .iter()
            .flat_map(|e| e.iter().copied())
            .collect()
    }

    /// `d(ab)`: number of vertices in the link of the edge `ab`.
    pub fn edge_degree(&self, a: VertexId, b: VertexId) -> usize {
        self.edge_link_vertices(a, b).len()
    }

    /// The link of a vertex as a closed surface.
    pub fn vertex_link(&self, v: VertexId) -> Result<Surface2> {
        if !self.has_vertex(v) {
            return Err(Error::FaceNotFound(vec![v]));
        }
        Surface2::new(self.link_triangles(v).iter().copied())
    }

    /// The link of an edge as a cyclically ordered vertex list.
    pub fn edge_link_cycle(&self, a: VertexId, b: VertexId) -> Result<Vec<VertexId>> {
        if !self.has_edge(a, b) {
            return Err(Error::FaceNotFound(vec![a, b]));
        }
        cycle_order(self.edge_link_edges(a, b)).ok_or_else(|| {
            Error::NotASurface(format!("link of edge {a}-{b} is not a single cycle"))
        })
    }

    /// The closed star of a vertex or edge, as the pure complex of facets
    /// containing it.
    pub fn star(&self, face: &[VertexId]) -> Result<Complex3> {
        if face.is_empty() || face.len() > 3 || !self.contains_face(face) {
            return Err(Error::FaceNotFound(face.to_vec()));
        }
        let facets: BTreeSet<Tetra> = self
            .facets
            .iter()
            .filter(|t| face.iter().all(|v| t.contains(v)))
            .copied()
            .collect();
        Ok(Self::from_set(facets))
    }

    /// Facet with every vertex relabelled through `map` (identity where absent).
    pub fn relabel(&self, map: &BTreeMap<VertexId, VertexId>) -> Result<Complex3> {
        Self::new(self.facets.iter().map(|t| {
            let m = |v: VertexId| *map.get(&v).unwrap_or(&v);
            [m(t[0]), m(t[1]), m(t[2]), m(t[3])]
        }))
    }

    /// Replaces `remove` by `add` in the facet set.
    pub(crate) fn edit(&self, remove: &[Tetra], add: &[Tetra]) -> Result<Complex3> {
        let mut set = self.facets.clone();
        for t in remove {
            set.remove(t);
        }
        for t in add {
            let c = canonical(*t).ok_or_else(|| Error::DegenerateFacet(t.to_vec()))?;
            set.insert(c);
        }
        if set.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self::from_set(set))
    }

    /// Connected components of the 1-skeleton, as sorted vertex sets.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &self.vertices {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for w in self.neighbors(v) {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Checks the conditions defining a normal 3-pseudomanifold without boundary.
    pub fn validate_normal(&self) -> ValidationReport {
        // Purity holds by construction: faces are derived from facets.
        let pure = Check::pass();

        let triangles_in_two_facets = match self.triangles.iter().find(|(_, c)| c.len() != 2) {
            None => Check::pass(),
            Some((t, c)) => Check::fail(format!("triangle {t:?} lies in {} facets", c.len())),
        };

        let strongly_connected = {
            let reached = self.dual_graph_reach(self.facets.iter().next().copied(), |_| true);
            if reached == self.facets.len() {
                Check::pass()
            } else {
                Check::fail(format!(
                    "{} of {} facets reachable through shared triangles",
                    reached,
                    self.facets.len()
                ))
            }
        };

        let vertex_links_closed_surfaces = self
            .vertices
            .iter()
            .find_map(|&v| {
                self.vertex_link(v)
                    .err()
                    .map(|e| Check::fail(format!("link of {v}: {e}")))
            })
            .unwrap_or_else(Check::pass);

        let edge_links_cycles = self
            .edges
            .iter()
            .find_map(|(e, link)| match cycle_order(link) {
                Some(_) => None,
                None => Some(Check::fail(format!("link of edge {e:?} is not one cycle"))),
            })
            .unwrap_or_else(Check::pass);

        ValidationReport {
            pure,
            triangles_in_two_facets,
            strongly_connected,
            vertex_links_closed_surfaces,
            edge_links_cycles,
        }
    }

    pub fn is_normal(&self) -> bool {
        self.validate_normal().is_valid()
    }

    /// Number of facets reachable from `start` moving across triangles that
    /// pass `crossable`.
    fn dual_graph_reach(&self, start: Option<Tetra>, crossable: impl Fn(&Triangle) -> bool) -> usize {
        let Some(start) = start else { return 0 };
        self.dual_component(start, &crossable).len()
    }

    /// Facets reachable from `start` in the dual graph restricted to
    /// `crossable` triangles.
    pub(crate) fn dual_component(
        &self,
        start: Tetra,
        crossable: &dyn Fn(&Triangle) -> bool,
    ) -> BTreeSet<Tetra> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for (i, face) in tet_faces(&t).iter().enumerate() {
                if !crossable(face) {
                    continue;
                }
                for &apex in self.triangle_cofaces(face) {
                    if apex == t[i] {
                        continue;
                    }
                    let n = tet(face[0], face[1], face[2], apex);
                    if seen.insert(n) {
                        queue.push_back(n);
                    }
                }
            }
        }
        seen
    }

    /// Vertices whose link is not a 2-sphere, with the link classification,
    /// ordered so the distinguished vertex comes first: largest mod-2 first
    /// Betti number, then degree at least 8, then smallest label.
    pub fn singular_vertices(&self) -> Vec<(VertexId, SurfaceType)> {
        let mut out: Vec<(VertexId, SurfaceType)> = self
            .vertices
            .iter()
            .filter_map(|&v| {
                let ty = self.vertex_link(v).ok()?.classify();
                (!ty.is_sphere()).then_some((v, ty))
            })
            .collect();
        out.sort_by_key(|(v, ty)| {
            (
                std::cmp::Reverse(ty.first_betti_mod2),
                self.degree(*v) < 8,
                *v,
            )
        });
        out
    }

    /// Whether the facets admit a coherent orientation. Facet `[a,b,c,d]`
    /// with sign `s` induces sign `s * (-1)^i` on the face omitting entry `i`;
    /// the two facets on a triangle must induce opposite signs.
    pub fn is_orientable(&self) -> bool {
        let mut sign: BTreeMap<Tetra, i8> = BTreeMap::new();
        for &root in &self.facets {
            if sign.contains_key(&root) {
                continue;
            }
            sign.insert(root, 1);
            let mut queue = VecDeque::from([root]);
            while let Some(t) = queue.pop_front() {
                let s = sign[&t];
                for (i, face) in tet_faces(&t).iter().enumerate() {
                    let induced = if i % 2 == 0 { s } else { -s };
                    for &apex in self.triangle_cofaces(face) {
                        if apex == t[i] {
                            continue;
                        }
                        let n = tet(face[0], face[1], face[2], apex);
                        let j = n.iter().position(|&x| x == apex).unwrap();
                        let want = if j % 2 == 0 { -induced } else { induced };
                        match sign.get(&n) {
                            Some(&have) if have != want => return false,
                            Some(_) => {}
                            None => {
                                sign.insert(n, want);
                                queue.push_back(n);
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// The distinguished singular vertex, if any.
    pub fn distinguished_singular(&self) -> Option<VertexId> {
        self.singular_vertices().first().map(|(v, _)| *v)
    }
}

/// Orders a set of edges forming a single cycle; `None` otherwise.
pub(crate) fn cycle_order(edges: &[Edge]) -> Option<Vec<VertexId>> {
    if edges.len() < 3 {
        return None;
    }
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for e in edges {
        adj.entry(e[0]).or_default().push(e[1]);
        adj.entry(e[1]).or_default().push(e[0]);
    }
    if adj.values().any(|n| n.len() != 2) || adj.len() != edges.len() {
        return None;
    }
    let start = *adj.keys().next()?;
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0];
    while cur != start {
        order.push(cur);
        let n = &adj[&cur];
        let next = if n[0] == prev { n[1] } else { n[0] };
        prev = cur;
        cur = next;
        if order.len() > edges.len() {
            return None;
        }
    }
    (order.len() == edges.len()).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta4() -> Complex3 {
        Complex3::boundary_4_simplex([0, 1, 2, 3, 4]).unwrap()
    }

    #[test]
    fn boundary_of_4_simplex_counts() {
        let k = delta4();
        assert_eq!(k.f_vector().as_array(), [1, 5, 10, 10, 5]);
        assert_eq!(k.g2(), 0);
        assert_eq!(k.g_invariants().h, [1, 1, 1, 1, 1]);
        assert!(k.is_orientable());
    }

    #[test]
    fn single_tetrahedron() {
        let k = Complex3::new([[0, 1, 2, 3]]).unwrap();
        assert_eq!(k.f_vector().as_array(), [1, 4, 6, 4, 1]);
        let report = k.validate_normal();
        assert!(!report.triangles_in_two_facets.passed);
    }

    #[test]
    fn duplicates_collapse_and_degenerates_fail() {
        let a = Complex3::new([[0, 1, 2, 3], [3, 2, 1, 0]]).unwrap();
        let b = Complex3::new([[0, 1, 2, 3]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            Complex3::new([[0, 1, 1, 3]]),
            Err(Error::DegenerateFacet(vec![0, 1, 1, 3]))
        );
        assert_eq!(Complex3::new(Vec::<Tetra>::new()), Err(Error::Empty));
    }

    #[test]
    fn links_and_stars_of_delta4() {
        let k = delta4();
        let lk = k.vertex_link(0).unwrap();
        assert_eq!(lk.vertices().len(), 4);
        assert!(lk.classify().is_sphere());
        assert_eq!(k.edge_link_cycle(0, 1).unwrap().len(), 3);
        assert_eq!(k.edge_degree(0, 1), 3);
        let st = k.star(&[0]).unwrap();
        assert_eq!(st.f_vector().f3, 4);
        assert_eq!(st.f_vector().f0, 5);
        assert!(matches!(k.star(&[9]), Err(Error::FaceNotFound(_))));
        assert!(matches!(k.vertex_link(9), Err(Error::FaceNotFound(_))));
    }

    #[test]
    fn validation_of_disjoint_copies() {
        let mut facets: Vec<Tetra> = delta4().facets().copied().collect();
        facets.extend(
            Complex3::boundary_4_simplex([10, 11, 12, 13, 14])
                .unwrap()
                .facets()
                .copied(),
        );
        let k = Complex3::new(facets).unwrap();
        let r = k.validate_normal();
        assert!(!r.strongly_connected.passed);
        assert!(r.triangles_in_two_facets.passed);
        assert!(delta4().validate_normal().is_valid());
    }

    #[test]
    fn h_vector_matches_closed_form() {
        for f in [
            FVector { f0: 6, f1: 14, f2: 16, f3: 8 },
            FVector { f0: 20, f1: 90, f2: 140, f3: 70 },
        ] {
            let g = f.g_invariants();
            assert_eq!(g.g2, g2_closed_form(&f));
        }
    }
}
