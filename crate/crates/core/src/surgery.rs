//! Facet identifications (connected sum, handle addition, vertex and edge
//! folding) and their constructive inverses.
//!
//! Every identification merges `psi(x)` into `x`, so the vertices of the
//! source facet keep their labels. Unfoldings give the duplicated vertices
//! fresh labels `max+1, max+2, ...`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::{canonical, tet_faces, Complex3, Tetra, Triangle, VertexId};
use crate::detection::{is_missing_tetrahedron, separates_link, LinkSplit, Neighborhood};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurgeryKind {
    Sum,
    Handle,
    VertexFold,
    EdgeFold,
}

impl SurgeryKind {
    /// g2 change relative to the input (for a sum, relative to the disjoint
    /// union of the two summands).
    pub fn g2_delta(self) -> i64 {
        match self {
            SurgeryKind::Sum | SurgeryKind::Handle => 10,
            SurgeryKind::VertexFold => 6,
            SurgeryKind::EdgeFold => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SurgeryKind::Sum => "connected_sum",
            SurgeryKind::Handle => "handle_addition",
            SurgeryKind::VertexFold => "vertex_folding",
            SurgeryKind::EdgeFold => "edge_folding",
        }
    }

    /// Expected drop of `(f0, f1, f2, f3)` under the identification.
    fn face_loss(self) -> [usize; 4] {
        match self {
            SurgeryKind::Sum | SurgeryKind::Handle => [4, 6, 4, 2],
            SurgeryKind::VertexFold => [3, 6, 4, 2],
            SurgeryKind::EdgeFold => [2, 5, 4, 2],
        }
    }

    fn fixed_count(self) -> usize {
        match self {
            SurgeryKind::Sum | SurgeryKind::Handle => 0,
            SurgeryKind::VertexFold => 1,
            SurgeryKind::EdgeFold => 2,
        }
    }
}

/// A bijection between two facets, stored as sorted `(x, psi(x))` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FacetBijection {
    pub source_facet: Tetra,
    pub target_facet: Tetra,
    pub pairing: Vec<(VertexId, VertexId)>,
    pub fixed_set: Vec<VertexId>,
}

impl FacetBijection {
    pub fn new(pairs: &[(VertexId, VertexId)]) -> Result<Self> {
        let bad = |m: &str| Error::pre("facet_bijection", m.to_string());
        if pairs.len() != 4 {
            return Err(bad("a facet bijection needs exactly 4 pairs"));
        }
        let mut pairing = pairs.to_vec();
        pairing.sort_unstable();
        let src = [pairing[0].0, pairing[1].0, pairing[2].0, pairing[3].0];
        let dst = [pairing[0].1, pairing[1].1, pairing[2].1, pairing[3].1];
        let source_facet = canonical(src).ok_or_else(|| bad("source vertices repeat"))?;
        let target_facet = canonical(dst).ok_or_else(|| bad("pairing is not injective"))?;
        let fixed_set = pairing.iter().filter(|(a, b)| a == b).map(|p| p.0).collect();
        for (a, b) in &pairing {
            if a != b && (source_facet.contains(b) || target_facet.contains(a)) {
                return Err(bad("a shared vertex must map to itself"));
            }
        }
        Ok(FacetBijection {
            source_facet,
            target_facet,
            pairing,
            fixed_set,
        })
    }

    pub fn image(&self, x: VertexId) -> Option<VertexId> {
        self.pairing.iter().find(|p| p.0 == x).map(|p| p.1)
    }

    /// The map merging each target vertex into its source vertex.
    fn merge_map(&self) -> BTreeMap<VertexId, VertexId> {
        self.pairing
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (b, a))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// A short path that violates the admissibility condition.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witness_path: Vec<VertexId>,
}

impl Admissibility {
    fn ok() -> Self {
        Admissibility {
            admissible: true,
            reason: None,
            witness_path: vec![],
        }
    }

    fn fail(reason: impl Into<String>, path: Vec<VertexId>) -> Self {
        Admissibility {
            admissible: false,
            reason: Some(reason.into()),
            witness_path: path,
        }
    }
}

/// Shortest path between two vertices in the 1-skeleton.
fn shortest_path(k: &Complex3, from: VertexId, to: VertexId) -> Option<Vec<VertexId>> {
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    parent.insert(from, from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for w in k.neighbors(v) {
            if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(w) {
                e.insert(v);
                queue.push_back(w);
            }
        }
    }
    None
}

fn same_component(k: &Complex3, a: VertexId, b: VertexId) -> bool {
    shortest_path(k, a, b).is_some()
}

/// Checks the path-length conditions of each identification kind. For a
/// connected sum, `k` is the disjoint union of the summands.
pub fn check_admissible(k: &Complex3, psi: &FacetBijection, kind: SurgeryKind) -> Result<Admissibility> {
    for f in [&psi.source_facet, &psi.target_facet] {
        if !k.has_facet(f) {
            return Err(Error::FaceNotFound(f.to_vec()));
        }
    }
    let shared: BTreeSet<VertexId> = psi
        .source_facet
        .iter()
        .copied()
        .filter(|x| psi.target_facet.contains(x))
        .collect();
    let fixed: BTreeSet<VertexId> = psi.fixed_set.iter().copied().collect();
    if shared.len() != kind.fixed_count() || shared != fixed {
        return Ok(Admissibility::fail(
            format!(
                "the facets share {} vertices and psi fixes {}; {} needs {}",
                shared.len(),
                fixed.len(),
                kind.name(),
                kind.fixed_count()
            ),
            vec![],
        ));
    }
    let moved = psi.pairing.iter().filter(|(a, b)| a != b);
    match kind {
        SurgeryKind::Sum | SurgeryKind::Handle => {
            let connected = same_component(k, psi.source_facet[0], psi.target_facet[0]);
            if connected != (kind == SurgeryKind::Handle) {
                return Ok(Admissibility::fail(
                    if connected {
                        "facets lie in one component; use handle addition"
                    } else {
                        "facets lie in different components; use connected sum"
                    },
                    vec![],
                ));
            }
            for &(x, y) in moved {
                if let Some(p) = shortest_path(k, x, y) {
                    if p.len() - 1 < 3 {
                        return Ok(Admissibility::fail(
                            format!("path of length {} from {x} to {y}", p.len() - 1),
                            p,
                        ));
                    }
                }
            }
        }
        SurgeryKind::VertexFold | SurgeryKind::EdgeFold => {
            for &(y, z) in moved {
                if k.has_edge(y, z) {
                    return Ok(Admissibility::fail(format!("{y}-{z} is an edge"), vec![y, z]));
                }
                let bad = k
                    .neighbors(y)
                    .intersection(&k.neighbors(z))
                    .copied()
                    .find(|w| !fixed.contains(w));
                if let Some(w) = bad {
                    return Ok(Admissibility::fail(
                        format!("path {y}-{w}-{z} avoids the fixed vertices"),
                        vec![y, w, z],
                    ));
                }
                if kind == SurgeryKind::VertexFold {
                    let x = *fixed.iter().next().expect("one fixed vertex");
                    if !(k.has_edge(y, x) && k.has_edge(x, z)) {
                        return Ok(Admissibility::fail(
                            format!("no path {y}-{x}-{z}"),
                            vec![],
                        ));
                    }
                }
            }
        }
    }
    Ok(Admissibility::ok())
}

/// Identifies the two facets of `psi` inside `k` and removes them.
fn identify(k: &Complex3, psi: &FacetBijection, kind: SurgeryKind) -> Result<Complex3> {
    let op = kind.name();
    let adm = check_admissible(k, psi, kind)?;
    if !adm.admissible {
        return Err(Error::pre(op, adm.reason.unwrap_or_default()));
    }
    let map = psi.merge_map();
    let facets: Vec<Tetra> = k
        .facets()
        .filter(|t| **t != psi.source_facet && **t != psi.target_facet)
        .map(|t| {
            let m = |v: VertexId| *map.get(&v).unwrap_or(&v);
            [m(t[0]), m(t[1]), m(t[2]), m(t[3])]
        })
        .collect();
    let n_input = facets.len();
    let out = Complex3::new(facets)?;
    let before = k.f_vector();
    let after = out.f_vector();
    let loss = kind.face_loss();
    let expected = [
        before.f0 - loss[0],
        before.f1 - loss[1],
        before.f2 - loss[2],
        before.f3 - loss[3],
    ];
    if out.f_vector().f3 != n_input || [after.f0, after.f1, after.f2, after.f3] != expected {
        return Err(Error::pre(op, "the identification would merge faces outside the facets"));
    }
    if let Some(reason) = out.validate_normal().first_failure() {
        return Err(Error::InvalidResult { op, reason });
    }
    let actual = out.g2() - k.g2();
    if actual != kind.g2_delta() {
        return Err(Error::G2Mismatch {
            op,
            expected: kind.g2_delta(),
            actual,
        });
    }
    Ok(out)
}

/// Union of two complexes with disjoint vertex labels.
pub fn disjoint_union(k1: &Complex3, k2: &Complex3) -> Result<Complex3> {
    let l1: BTreeSet<VertexId> = k1.vertices().iter().copied().collect();
    if let Some(v) = k2.vertices().iter().find(|v| l1.contains(v)) {
        return Err(Error::pre("connected_sum", format!("label {v} occurs in both summands")));
    }
    Complex3::new(k1.facets().chain(k2.facets()).copied())
}

/// Shifts the labels of `k` to start above `floor`.
pub fn relabel_above(k: &Complex3, floor: VertexId) -> Result<Complex3> {
    let map = k
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, floor + 1 + i as VertexId))
        .collect();
    k.relabel(&map)
}

pub fn connected_sum(k1: &Complex3, k2: &Complex3, psi: &FacetBijection) -> Result<Complex3> {
    if !k1.has_facet(&psi.source_facet) || !k2.has_facet(&psi.target_facet) {
        return Err(Error::pre(
            "connected_sum",
            "source facet must lie in the first summand and target in the second",
        ));
    }
    let union = disjoint_union(k1, k2)?;
    let out = identify(&union, psi, SurgeryKind::Sum)?;
    debug_assert_eq!(out.g2(), k1.g2() + k2.g2());
    Ok(out)
}

pub fn handle_addition(k: &Complex3, psi: &FacetBijection) -> Result<Complex3> {
    identify(k, psi, SurgeryKind::Handle)
}

pub fn vertex_folding(k: &Complex3, psi: &FacetBijection) -> Result<Complex3> {
    identify(k, psi, SurgeryKind::VertexFold)
}

pub fn edge_folding(k: &Complex3, psi: &FacetBijection) -> Result<Complex3> {
    identify(k, psi, SurgeryKind::EdgeFold)
}

/// Splits the facets around `sigma` into the two local sides of its boundary
/// and gives the `dup` vertices on the second side fresh labels. Returns the
/// cut complex with both copies of `sigma` added, and the bijection whose
/// identification undoes the cut.
fn cut_along(
    k: &Complex3,
    sigma: Tetra,
    dup: &[VertexId],
    op: &'static str,
) -> Result<(Complex3, FacetBijection)> {
    if !is_missing_tetrahedron(k, &sigma) {
        return Err(Error::pre(op, format!("{sigma:?} is not a missing tetrahedron")));
    }
    let cut: BTreeSet<Triangle> = tet_faces(&sigma).into_iter().collect();
    let touches = |f: &[VertexId]| f.iter().any(|v| dup.contains(v));
    let around: BTreeSet<Tetra> = k.facets().filter(|t| touches(&t[..])).copied().collect();
    let crossable = |t: &Triangle| touches(&t[..]) && !cut.contains(t);
    let mut remaining = around.clone();
    let mut sides: Vec<BTreeSet<Tetra>> = Vec::new();
    while let Some(&start) = remaining.iter().next() {
        let comp = k.dual_component(start, &crossable);
        for t in &comp {
            remaining.remove(t);
        }
        sides.push(comp);
    }
    if sides.len() != 2 {
        return Err(Error::pre(
            op,
            format!(
                "side propagation around {sigma:?} found {} consistent regions, expected 2",
                sides.len()
            ),
        ));
    }
    let mut dup_sorted = dup.to_vec();
    dup_sorted.sort_unstable();
    let fresh = k.fresh_labels(dup_sorted.len());
    let map: BTreeMap<VertexId, VertexId> = dup_sorted.iter().copied().zip(fresh).collect();
    let m = |v: VertexId| *map.get(&v).unwrap_or(&v);
    let sigma2 = crate::complex::tet(m(sigma[0]), m(sigma[1]), m(sigma[2]), m(sigma[3]));
    let relabelled: Vec<Tetra> = sides[1]
        .iter()
        .map(|t| [m(t[0]), m(t[1]), m(t[2]), m(t[3])])
        .collect();
    let mut add = relabelled;
    add.push(sigma);
    add.push(sigma2);
    let remove: Vec<Tetra> = sides[1].iter().copied().collect();
    let out = k.edit(&remove, &add)?;
    let pairs: Vec<(VertexId, VertexId)> = sigma.iter().map(|&v| (v, m(v))).collect();
    Ok((out, FacetBijection::new(&pairs)?))
}

fn link_splits(k: &Complex3, sigma: &Tetra) -> Result<BTreeMap<VertexId, LinkSplit>> {
    tet_faces(sigma)
        .into_iter()
        .enumerate()
        .map(|(i, f)| Ok((sigma[i], separates_link(k, sigma[i], f)?)))
        .collect()
}

/// Evidence that a missing tetrahedron with separating links came from a
/// handle addition rather than a connected sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandleWitness {
    pub tetra: Tetra,
    pub unfolded: Complex3,
    pub psi: FacetBijection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Split {
    /// `left` keeps the labels of the tetrahedron; `psi` maps its copy in
    /// `left` to the copy in `right`.
    Sum {
        left: Complex3,
        right: Complex3,
        psi: FacetBijection,
    },
    Handle(HandleWitness),
}

pub fn split_connected_sum(k: &Complex3, sigma: Tetra) -> Result<Split> {
    const OP: &str = "split_connected_sum";
    let splits = link_splits(k, &sigma)?;
    if let Some((x, _)) = splits.iter().find(|(_, s)| !s.separates()) {
        return Err(Error::pre(OP, format!("the opposite triangle does not separate lk({x})")));
    }
    let (cut, psi) = cut_along(k, sigma, &sigma, OP)?;
    let comps = cut.components();
    match comps.len() {
        1 => Ok(Split::Handle(HandleWitness {
            tetra: sigma,
            unfolded: cut,
            psi,
        })),
        2 => {
            let pick = |c: &BTreeSet<VertexId>| {
                Complex3::new(cut.facets().filter(|t| c.contains(&t[0])).copied())
            };
            let (a, b) = (pick(&comps[0])?, pick(&comps[1])?);
            let (left, right) = if a.has_facet(&sigma) { (a, b) } else { (b, a) };
            for side in [&left, &right] {
                if let Some(reason) = side.validate_normal().first_failure() {
                    return Err(Error::InvalidResult { op: OP, reason });
                }
            }
            let actual = left.g2() + right.g2();
            if actual != k.g2() {
                return Err(Error::G2Mismatch {
                    op: OP,
                    expected: k.g2(),
                    actual,
                });
            }
            Ok(Split::Sum { left, right, psi })
        }
        n => Err(Error::pre(OP, format!("cut produced {n} components"))),
    }
}

/// Undoes a handle addition at a missing tetrahedron whose cut leaves the
/// complex connected.
pub fn handle_unfolding(k: &Complex3, sigma: Tetra) -> Result<(Complex3, FacetBijection)> {
    match split_connected_sum(k, sigma)? {
        Split::Handle(w) => finish_unfold("handle_unfolding", k, w.unfolded, w.psi, SurgeryKind::Handle),
        Split::Sum { .. } => Err(Error::pre("handle_unfolding", "the cut disconnects the complex")),
    }
}

fn finish_unfold(
    op: &'static str,
    k: &Complex3,
    out: Complex3,
    psi: FacetBijection,
    kind: SurgeryKind,
) -> Result<(Complex3, FacetBijection)> {
    if let Some(reason) = out.validate_normal().first_failure() {
        return Err(Error::InvalidResult { op, reason });
    }
    let actual = out.g2() - k.g2();
    if actual != -kind.g2_delta() {
        return Err(Error::G2Mismatch {
            op,
            expected: -kind.g2_delta(),
            actual,
        });
    }
    // the fold must reproduce the input exactly
    let back = identify(&out, &psi, kind)?;
    if back != *k {
        return Err(Error::pre(op, "refolding does not reproduce the input"));
    }
    Ok((out, psi))
}

/// Inverse of a vertex folding at `apex`, cutting along the missing
/// tetrahedron `sigma`.
pub fn vertex_unfolding(k: &Complex3, sigma: Tetra, apex: VertexId) -> Result<(Complex3, FacetBijection)> {
    const OP: &str = "vertex_unfolding";
    if !sigma.contains(&apex) {
        return Err(Error::pre(OP, "apex must be a vertex of the tetrahedron"));
    }
    let splits = link_splits(k, &sigma)?;
    for (x, s) in &splits {
        if (*x == apex) == s.separates() {
            return Err(Error::pre(
                OP,
                format!("separation at {x} does not match the vertex-fold pattern"),
            ));
        }
    }
    let dup: Vec<VertexId> = sigma.iter().copied().filter(|&x| x != apex).collect();
    let (out, psi) = cut_along(k, sigma, &dup, OP)?;
    finish_unfold(OP, k, out, psi, SurgeryKind::VertexFold)
}

/// Inverse of an edge folding at `uv`, cutting along the missing tetrahedron
/// `sigma = abuv`.
pub fn edge_unfolding(
    k: &Complex3,
    sigma: Tetra,
    u: VertexId,
    v: VertexId,
) -> Result<(Complex3, FacetBijection)> {
    const OP: &str = "edge_unfolding";
    if u == v || !sigma.contains(&u) || !sigma.contains(&v) {
        return Err(Error::pre(OP, "uv must be an edge of the tetrahedron"));
    }
    let splits = link_splits(k, &sigma)?;
    for (x, s) in &splits {
        let on_edge = *x == u || *x == v;
        let ok = match s {
            LinkSplit::Separates { .. } => !on_edge,
            LinkSplit::NonSeparating { neighborhood } => {
                on_edge && *neighborhood == Neighborhood::Moebius
            }
        };
        if !ok {
            return Err(Error::pre(
                OP,
                format!("separation at {x} does not match the edge-fold pattern"),
            ));
        }
    }
    let dup: Vec<VertexId> = sigma.iter().copied().filter(|&x| x != u && x != v).collect();
    let (out, psi) = cut_along(k, sigma, &dup, OP)?;
    finish_unfold(OP, k, out, psi, SurgeryKind::EdgeFold)
}
