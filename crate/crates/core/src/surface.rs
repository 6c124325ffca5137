//! Closed triangulated surfaces, as they arise for vertex links.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{cycle_order, edge, Edge, Triangle, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "genus")]
pub enum SurfaceKind {
    Sphere,
    OrientableGenus(u32),
    NonOrientableGenus(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceType {
    pub kind: SurfaceKind,
    pub euler_characteristic: i64,
    pub first_betti_mod2: u32,
}

impl SurfaceType {
    pub fn from_invariants(euler_characteristic: i64, orientable: bool) -> Self {
        let b1 = (2 - euler_characteristic).max(0) as u32;
        let kind = match (b1, orientable) {
            (0, _) => SurfaceKind::Sphere,
            (b, true) => SurfaceKind::OrientableGenus(b / 2),
            (b, false) => SurfaceKind::NonOrientableGenus(b),
        };
        SurfaceType {
            kind,
            euler_characteristic,
            first_betti_mod2: b1,
        }
    }

    pub fn is_sphere(&self) -> bool {
        self.kind == SurfaceKind::Sphere
    }

    pub fn is_orientable(&self) -> bool {
        !matches!(self.kind, SurfaceKind::NonOrientableGenus(_))
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SurfaceKind::Sphere => write!(f, "sphere"),
            SurfaceKind::OrientableGenus(g) => write!(f, "orientable genus {g}"),
            SurfaceKind::NonOrientableGenus(k) => write!(f, "non-orientable genus {k}"),
        }
    }
}

/// A closed, connected triangulated surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surface2 {
    triangles: BTreeSet<Triangle>,
    /// edge -> the two triangles containing it
    edges: BTreeMap<Edge, Vec<Triangle>>,
    vertices: BTreeSet<VertexId>,
}

/// Index of the vertex a triangle omits when restricted to `e`; the boundary
/// orientation of `e` inside `t` with sign +1 is `(-1)^i`.
fn edge_position(t: &Triangle, e: &Edge) -> usize {
    (0..3)
        .find(|&i| !e.contains(&t[i]))
        .expect("edge lies in triangle")
}

fn tri_edges(t: &Triangle) -> [Edge; 3] {
    [[t[1], t[2]], [t[0], t[2]], [t[0], t[1]]]
}

impl Surface2 {
    /// Builds and validates a closed connected surface.
    pub fn new<I>(triangles: I) -> Result<Self>
    where
        I: IntoIterator<Item = Triangle>,
    {
        let s = Self::unchecked(triangles)?;
        s.check_closed()?;
        Ok(s)
    }

    /// Builds the triangle tables without checking closedness.
    pub(crate) fn unchecked<I>(triangles: I) -> Result<Self>
    where
        I: IntoIterator<Item = Triangle>,
    {
        let mut set = BTreeSet::new();
        for t in triangles {
            let c = crate::complex::canonical(t)
                .ok_or_else(|| Error::NotASurface(format!("degenerate triangle {t:?}")))?;
            set.insert(c);
        }
        if set.is_empty() {
            return Err(Error::NotASurface("no triangles".into()));
        }
        let mut edges: BTreeMap<Edge, Vec<Triangle>> = BTreeMap::new();
        let mut vertices = BTreeSet::new();
        for t in &set {
            vertices.extend(t.iter().copied());
            for e in tri_edges(t) {
                edges.entry(e).or_default().push(*t);
            }
        }
        Ok(Surface2 {
            triangles: set,
            edges,
            vertices,
        })
    }

    fn check_closed(&self) -> Result<()> {
        if let Some((e, ts)) = self.edges.iter().find(|(_, ts)| ts.len() != 2) {
            return Err(Error::NotASurface(format!(
                "edge {e:?} lies in {} triangles",
                ts.len()
            )));
        }
        for &v in &self.vertices {
            let link: Vec<Edge> = self
                .triangles
                .iter()
                .filter(|t| t.contains(&v))
                .map(|t| {
                    let o: Vec<VertexId> = t.iter().copied().filter(|&x| x != v).collect();
                    [o[0], o[1]]
                })
                .collect();
            if cycle_order(&link).is_none() {
                return Err(Error::NotASurface(format!(
                    "link of vertex {v} is not a single cycle"
                )));
            }
        }
        let reached = self.triangle_component(*self.triangles.iter().next().unwrap(), |_| true);
        if reached.len() != self.triangles.len() {
            return Err(Error::NotASurface("not connected".into()));
        }
        Ok(())
    }

    pub fn triangles(&self) -> &BTreeSet<Triangle> {
        &self.triangles
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.keys()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains_key(&edge(a, b))
    }

    pub fn edge_triangles(&self, a: VertexId, b: VertexId) -> &[Triangle] {
        self.edges
            .get(&edge(a, b))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn f_vector(&self) -> (usize, usize, usize) {
        (self.vertices.len(), self.edges.len(), self.triangles.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (v, e, f) = self.f_vector();
        v as i64 - e as i64 + f as i64
    }

    /// `f1 - 3 f0 + 6`.
    pub fn g2(&self) -> i64 {
        let (v, e, _) = self.f_vector();
        e as i64 - 3 * v as i64 + 6
    }

    /// Triangles reachable from `start` across edges accepted by `crossable`.
    pub(crate) fn triangle_component(
        &self,
        start: Triangle,
        crossable: impl Fn(&Edge) -> bool,
    ) -> BTreeSet<Triangle> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for e in tri_edges(&t) {
                if !crossable(&e) {
                    continue;
                }
                for n in &self.edges[&e] {
                    if seen.insert(*n) {
                        queue.push_back(*n);
                    }
                }
            }
        }
        seen
    }

    /// Components of the triangle adjacency graph when adjacency may not
    /// cross the edges of `cycle` (given as a cyclic vertex sequence).
    pub fn sides_of_cycle(&self, cycle: &[VertexId]) -> Result<Vec<BTreeSet<Triangle>>> {
        let cut = cycle_edges(cycle);
        if let Some(e) = cut.iter().find(|e| !self.edges.contains_key(*e)) {
            return Err(Error::NotASurface(format!(
                "cycle edge {e:?} is not an edge of the surface"
            )));
        }
        let mut remaining = self.triangles.clone();
        let mut sides = Vec::new();
        while let Some(&start) = remaining.iter().next() {
            let comp = self.triangle_component(start, |e| !cut.contains(e));
            for t in &comp {
                remaining.remove(t);
            }
            sides.push(comp);
        }
        Ok(sides)
    }

    /// Propagates orientations by BFS. On success, returns a sign per
    /// triangle; on failure, returns the pair of triangles that conflict.
    pub fn orient(&self) -> std::result::Result<BTreeMap<Triangle, i8>, (Triangle, Triangle)> {
        let mut sign: BTreeMap<Triangle, i8> = BTreeMap::new();
        let start = *self.triangles.iter().next().expect("nonempty");
        sign.insert(start, 1);
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            let st = sign[&t];
            for e in tri_edges(&t) {
                let induced_t = st * parity(edge_position(&t, &e));
                for n in &self.edges[&e] {
                    if *n == t {
                        continue;
                    }
                    let want = -induced_t * parity(edge_position(n, &e));
                    match sign.get(n) {
                        Some(&s) if s != want => return Err((t, *n)),
                        Some(_) => {}
                        None => {
                            sign.insert(*n, want);
                            queue.push_back(*n);
                        }
                    }
                }
            }
        }
        Ok(sign)
    }

    pub fn is_orientable(&self) -> bool {
        self.orient().is_ok()
    }

    pub fn classify(&self) -> SurfaceType {
        SurfaceType::from_invariants(self.euler_characteristic(), self.is_orientable())
    }

    /// The 6-vertex real projective plane.
    pub fn rp2_6() -> Self {
        Self::new([
            [1, 2, 3],
            [1, 3, 4],
            [1, 4, 5],
            [1, 5, 6],
            [1, 2, 6],
            [2, 3, 5],
            [3, 4, 6],
            [2, 4, 5],
            [3, 5, 6],
            [2, 4, 6],
        ])
        .expect("minimal RP2 is a closed surface")
    }

    /// The 7-vertex torus, with triangles `{i, i+1, i+3}` and `{i, i+2, i+3}`
    /// mod 7.
    pub fn torus_7() -> Self {
        let tris = (0..7u32).flat_map(|i| {
            [
                [i, (i + 1) % 7, (i + 3) % 7],
                [i, (i + 2) % 7, (i + 3) % 7],
            ]
        });
        Self::new(tris).expect("7-vertex torus is a closed surface")
    }
}

pub(crate) fn cycle_edges(cycle: &[VertexId]) -> BTreeSet<Edge> {
    (0..cycle.len())
        .map(|i| edge(cycle[i], cycle[(i + 1) % cycle.len()]))
        .collect()
}

/// Euler characteristic of the subcomplex spanned by a set of triangles.
pub fn patch_euler_characteristic(triangles: &BTreeSet<Triangle>) -> i64 {
    let vertices: BTreeSet<VertexId> = triangles.iter().flatten().copied().collect();
    let edges: BTreeSet<Edge> = triangles.iter().flat_map(tri_edges).collect();
    vertices.len() as i64 - edges.len() as i64 + triangles.len() as i64
}

fn parity(i: usize) -> i8 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn classify_surface(s: &Surface2) -> SurfaceType {
    s.classify()
}
