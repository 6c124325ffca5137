//! Local moves on normal 3-pseudomanifolds with exact g2 bookkeeping.
//!
//! Every move checks its preconditions, rebuilds the complex, validates the
//! result and compares the recomputed g2 change with the move's formula.
//! Parameters are explicit so a [`Move`] can be re-applied verbatim.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::complex::{edge, tet, tri, Complex3, Edge, Tetra, Triangle, VertexId};
use crate::error::{Error, Result};
use crate::surface::patch_euler_characteristic;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Move {
    /// Replace the star of an edge of degree 3 by its missing triangle.
    Bistellar2 { u: VertexId, v: VertexId },
    /// Replace a triangle with two cofaces `u, v` by the edge `uv`.
    Bistellar1 { a: VertexId, b: VertexId, c: VertexId },
    /// Identify `u` and `v`, naming the merged vertex `into`.
    EdgeContraction { u: VertexId, v: VertexId, into: VertexId },
    /// Split `w` along `cycle` into the edge `uv`. `u` cones the side of
    /// `lk(w)` holding the smallest triangle.
    EdgeExpansion {
        w: VertexId,
        cycle: Vec<VertexId>,
        u: VertexId,
        v: VertexId,
    },
    CentralRetriangulation { u: VertexId, v: VertexId, center: VertexId },
    /// Remove non-singular `w`, insert the missing triangle `abc` and cone the
    /// two balls with `x1` (side of the smallest triangle of `lk(w)`) and `x2`.
    OpC {
        w: VertexId,
        a: VertexId,
        b: VertexId,
        c: VertexId,
        x1: VertexId,
        x2: VertexId,
    },
    /// Remove `u`, `v` and their common triangle, coning the boundary with `w`.
    OpCPrime { u: VertexId, v: VertexId, w: VertexId },
    /// Central retriangulation of `st(uw)` with `center`, then contraction of
    /// `u` into its neighbour `t`.
    OpD {
        u: VertexId,
        w: VertexId,
        center: VertexId,
        t: VertexId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    #[serde(flatten)]
    pub mv: Move,
    pub g2_delta: i64,
    pub fresh_labels: Vec<VertexId>,
}

impl Move {
    pub fn name(&self) -> &'static str {
        match self {
            Move::Bistellar2 { .. } => "bistellar2",
            Move::Bistellar1 { .. } => "bistellar1",
            Move::EdgeContraction { .. } => "edge_contraction",
            Move::EdgeExpansion { .. } => "edge_expansion",
            Move::CentralRetriangulation { .. } => "central_retriangulation",
            Move::OpC { .. } => "op_c",
            Move::OpCPrime { .. } => "op_c_prime",
            Move::OpD { .. } => "op_d",
        }
    }

    pub fn apply(&self, k: &Complex3) -> Result<(Complex3, MoveRecord)> {
        match *self {
            Move::Bistellar2 { u, v } => bistellar_2_move(k, u, v),
            Move::Bistellar1 { a, b, c } => bistellar_1_move(k, a, b, c),
            Move::EdgeContraction { u, v, into } => edge_contraction(k, u, v, into),
            Move::EdgeExpansion { w, ref cycle, u, v } => edge_expansion(k, w, cycle, u, v),
            Move::CentralRetriangulation { u, v, center } => {
                central_retriangulation(k, u, v, center)
            }
            Move::OpC { w, a, b, c, x1, x2 } => op_c(k, w, [a, b, c], x1, x2),
            Move::OpCPrime { u, v, w } => op_c_prime(k, u, v, w),
            Move::OpD { u, w, center, t } => op_d(k, u, w, center, t),
        }
    }

    /// Moves undoing `self`, given the complex `self` was applied to. The
    /// result of applying them in order is exactly `before`.
    pub fn inverse(&self, before: &Complex3) -> Result<Vec<Move>> {
        let (after, _) = self.apply(before)?;
        Ok(match *self {
            Move::Bistellar2 { u, v } => {
                let c = before.edge_link_cycle(u, v)?;
                let t = tri(c[0], c[1], c[2]);
                vec![Move::Bistellar1 { a: t[0], b: t[1], c: t[2] }]
            }
            Move::Bistellar1 { a, b, c } => {
                let apex = before.triangle_cofaces(&tri(a, b, c));
                let e = edge(apex[0], apex[1]);
                vec![Move::Bistellar2 { u: e[0], v: e[1] }]
            }
            Move::EdgeContraction { u, v, into } => {
                vec![expansion_undoing_contraction(before, &after, u, v, into)?]
            }
            Move::EdgeExpansion { w, u, v, .. } => {
                vec![Move::EdgeContraction { u, v, into: w }]
            }
            Move::CentralRetriangulation { u, center, .. } => vec![Move::EdgeContraction {
                u,
                v: center,
                into: u,
            }],
            Move::OpC { w, x1, x2, .. } => vec![Move::OpCPrime { u: x1, v: x2, w }],
            Move::OpCPrime { u, v, w } => {
                let [a, b, c] = common_triangle(before, u, v)?;
                let first = smallest_link_triangle(&after, w);
                let from_u = before.link_triangles(u).contains(&first);
                let (x1, x2) = if from_u { (u, v) } else { (v, u) };
                vec![Move::OpC { w, a, b, c, x1, x2 }]
            }
            Move::OpD { u, w, center, t } => {
                let (mid, _) = central_retriangulation(before, u, w, center)?;
                let expand = expansion_undoing_contraction(&mid, &after, u, t, t)?;
                vec![
                    expand,
                    Move::EdgeContraction {
                        u,
                        v: center,
                        into: u,
                    },
                ]
            }
        })
    }
}

fn expansion_undoing_contraction(
    before: &Complex3,
    after: &Complex3,
    u: VertexId,
    v: VertexId,
    into: VertexId,
) -> Result<Move> {
    let cycle = before.edge_link_cycle(u, v)?;
    let first = smallest_link_triangle(after, into);
    let from_u = before.link_triangles(u).contains(&first);
    let (a, b) = if from_u { (u, v) } else { (v, u) };
    Ok(Move::EdgeExpansion {
        w: into,
        cycle,
        u: a,
        v: b,
    })
}

fn smallest_link_triangle(k: &Complex3, w: VertexId) -> Triangle {
    *k.link_triangles(w).iter().min().expect("vertex has a link")
}

fn finish(
    op: &'static str,
    before: &Complex3,
    after: Complex3,
    mv: Move,
    expected: i64,
) -> Result<(Complex3, MoveRecord)> {
    if let Some(reason) = after.validate_normal().first_failure() {
        return Err(Error::InvalidResult { op, reason });
    }
    let actual = after.g2() - before.g2();
    if actual != expected {
        return Err(Error::G2Mismatch {
            op,
            expected,
            actual,
        });
    }
    let old: BTreeSet<VertexId> = before.vertices().iter().copied().collect();
    let fresh_labels = after
        .vertices()
        .iter()
        .copied()
        .filter(|v| !old.contains(v))
        .collect();
    Ok((
        after,
        MoveRecord {
            mv,
            g2_delta: actual,
            fresh_labels,
        },
    ))
}

/// A label introduced by a move must be new, or one of the vertices the move
/// deletes.
fn check_new_label(
    op: &'static str,
    k: &Complex3,
    label: VertexId,
    reusable: &[VertexId],
) -> Result<()> {
    if k.has_vertex(label) && !reusable.contains(&label) {
        return Err(Error::pre(op, format!("label {label} is already in use")));
    }
    Ok(())
}

fn require_edge(op: &'static str, k: &Complex3, u: VertexId, v: VertexId) -> Result<()> {
    if u == v || !k.has_edge(u, v) {
        return Err(Error::pre(op, format!("{u}-{v} is not an edge")));
    }
    Ok(())
}

pub fn is_singular(k: &Complex3, v: VertexId) -> bool {
    k.vertex_link(v).map_or(true, |s| !s.classify().is_sphere())
}

fn star_facets_of_edge(k: &Complex3, u: VertexId, v: VertexId) -> Vec<Tetra> {
    k.edge_link_edges(u, v)
        .iter()
        .map(|e| tet(u, v, e[0], e[1]))
        .collect()
}

fn link_edge_set(k: &Complex3, v: VertexId) -> BTreeSet<Edge> {
    k.link_triangles(v)
        .iter()
        .flat_map(|t| [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]])
        .collect()
}

/// `lk(u) ∩ lk(v) = lk(uv)`, compared dimension by dimension.
pub fn link_condition(k: &Complex3, u: VertexId, v: VertexId) -> bool {
    let common: BTreeSet<VertexId> = k
        .neighbors(u)
        .intersection(&k.neighbors(v))
        .copied()
        .collect();
    if common != k.edge_link_vertices(u, v) {
        return false;
    }
    let eu = link_edge_set(k, u);
    let ev = link_edge_set(k, v);
    let lk_uv: BTreeSet<Edge> = k.edge_link_edges(u, v).iter().copied().collect();
    if eu.intersection(&ev).copied().collect::<BTreeSet<_>>() != lk_uv {
        return false;
    }
    let tu: BTreeSet<&Triangle> = k.link_triangles(u).iter().collect();
    k.link_triangles(v).iter().all(|t| !tu.contains(t))
}

/// (A): the edge `uv` of degree 3 is replaced by its missing link triangle.
pub fn bistellar_2_move(k: &Complex3, u: VertexId, v: VertexId) -> Result<(Complex3, MoveRecord)> {
    const OP: &str = "bistellar2";
    require_edge(OP, k, u, v)?;
    let cycle = k.edge_link_cycle(u, v)?;
    if cycle.len() != 3 {
        return Err(Error::pre(OP, format!("d({u}-{v}) = {} is not 3", cycle.len())));
    }
    let [a, b, c] = [cycle[0], cycle[1], cycle[2]];
    if k.has_triangle(&tri(a, b, c)) {
        return Err(Error::pre(OP, format!("triangle {a}-{b}-{c} is already present")));
    }
    let after = k.edit(
        &star_facets_of_edge(k, u, v),
        &[tet(u, a, b, c), tet(v, a, b, c)],
    )?;
    let e = edge(u, v);
    finish(OP, k, after, Move::Bistellar2 { u: e[0], v: e[1] }, -1)
}

/// (A′): the triangle `abc` with cofaces `u, v` is replaced by the edge `uv`.
pub fn bistellar_1_move(
    k: &Complex3,
    a: VertexId,
    b: VertexId,
    c: VertexId,
) -> Result<(Complex3, MoveRecord)> {
    const OP: &str = "bistellar1";
    let t = crate::complex::canonical([a, b, c])
        .ok_or_else(|| Error::pre(OP, "repeated vertex"))?;
    if !k.has_triangle(&t) {
        return Err(Error::FaceNotFound(t.to_vec()));
    }
    let apex = k.triangle_cofaces(&t);
    if apex.len() != 2 {
        return Err(Error::pre(OP, "triangle does not lie in exactly two facets"));
    }
    let (u, v) = (apex[0], apex[1]);
    if k.has_edge(u, v) {
        return Err(Error::pre(OP, format!("edge {u}-{v} is already present")));
    }
    let [a, b, c] = t;
    let after = k.edit(
        &[tet(u, a, b, c), tet(v, a, b, c)],
        &[tet(u, v, a, b), tet(u, v, b, c), tet(u, v, a, c)],
    )?;
    finish(OP, k, after, Move::Bistellar1 { a, b, c }, 1)
}

/// (B): identify `u` and `v` as `into`. The link condition must hold and the
/// vertex that disappears must be non-singular.
pub fn edge_contraction(
    k: &Complex3,
    u: VertexId,
    v: VertexId,
    into: VertexId,
) -> Result<(Complex3, MoveRecord)> {
    const OP: &str = "edge_contraction";
    require_edge(OP, k, u, v)?;
    check_new_label(OP, k, into, &[u, v])?;
    let ok_singularity = if into == u {
        !is_singular(k, v)
    } else if into == v {
        !is_singular(k, u)
    } else {
        !is_singular(k, u) || !is_singular(k, v)
    };
    if !ok_singularity {
        return Err(Error::pre(OP, "the vanishing endpoint is singular"));
    }
    if !link_condition(k, u, v) {
        return Err(Error::pre(OP, format!("link condition fails for {u}-{v}")));
    }
    if k.f_vector().f0 <= 5 {
        return Err(Error::pre(OP, "result would have fewer than 5 vertices"));
    }
    let n = k.edge_degree(u, v) as i64;
    let mut remove = Vec::new();
    let mut add = Vec::new();
    for t in k.vertex_star_facets(u).into_iter().chain(k.vertex_star_facets(v)) {
        remove.push(t);
        if t.contains(&u) && t.contains(&v) {
            continue;
        }
        let m = |x: VertexId| if x == u || x == v { into } else { x };
        add.push([m(t[0]), m(t[1]), m(t[2]), m(t[3])]);
    }
    let after = k.edit(&remove, &add)?;
    finish(OP, k, after, Move::EdgeContraction { u, v, into }, -(n - 3))
}

/// (B′): split `w` along a cycle of its link into the edge `uv`.
pub fn edge_expansion(
    k: &Complex3,
    w: VertexId,
    cycle: &[VertexId],
    u: VertexId,
    v: VertexId,
) -> Result<(Complex3, MoveRecord)> {
    const OP: &str = "edge_expansion";
    if !k.has_vertex(w) {
        return Err(Error::FaceNotFound(vec![w]));
    }
    if u == v {
        return Err(Error::pre(OP, "u and v must differ"));
    }
    check_new_label(OP, k, u, &[w])?;
    check_new_label(OP, k, v, &[w])?;
    let n = cycle.len();
    let distinct: BTreeSet<VertexId> = cycle.iter().copied().collect();
    if n < 3 || distinct.len() != n || distinct.contains(&u) || distinct.contains(&v) {
        return Err(Error::pre(OP, "cycle must have at least 3 distinct vertices"));
    }
    let lk = k.vertex_link(w)?;
    let sides = lk
        .sides_of_cycle(cycle)
        .map_err(|e| Error::pre(OP, e.to_string()))?;
    if sides.len() != 2 {
        return Err(Error::pre(OP, "cycle does not separate the link"));
    }
    if !sides.iter().any(|s| patch_euler_characteristic(s) == 1) {
        return Err(Error::pre(OP, "neither side of the cycle is a disc"));
    }
    let first = *lk.triangles().iter().next().expect("nonempty link");
    let (side_u, side_v) = if sides[0].contains(&first) {
        (&sides[0], &sides[1])
    } else {
        (&sides[1], &sides[0])
    };
    let mut add: Vec<Tetra> = Vec::new();
    add.extend(side_u.iter().map(|t| tet(u, t[0], t[1], t[2])));
    add.extend(side_v.iter().map(|t| tet(v, t[0], t[1], t[2])));
    for i in 0..n {
        add.push(tet(u, v, cycle[i], cycle[(i + 1) % n]));
    }
    let after = k.edit(&k.vertex_star_facets(w), &add)?;
    let mv = Move::EdgeExpansion {
        w,
        cycle: cycle.to_vec(),
        u,
        v,
    };
    finish(OP, k, after, mv, n as i64 - 3)
}

/// Replace `st(uv)` by the cone from `center` over its boundary.
pub fn central_retriangulation(
    k: &Complex3,
    u: VertexId,
    v: VertexId,
    center: VertexId,
) -> Result<(Complex3, MoveRecord)> {
    const OP: &str = "central_retriangulation";
    require_edge(OP, k, u, v)?;
    check_new_label(OP, k, center, &[])?;
    let link = k.edge_link_edges(u, v).to_vec();
    let mut add = Vec::with_capacity(2 * link.len());
    for e in &link {
        add.push(tet(center, u, e[0], e[1]));
        add.push(tet(center, v, e[0], e[1]));
    }
    let n = k.edge_degree(u, v) as i64;
    let after = k.edit(&star_facets_of_edge(k, u, v), &add)?;
    debug_assert_eq!(after.f_vector().f1 as i64, k.f_vector().f1 as i64 + n + 1);
    finish(OP, k, after, Move::CentralRetriangulation { u, v, center }, n - 3)
}

/// (C): remove non-singular `w`, insert the missing triangle `abc` with
/// `∂(abc) ⊂ lk(w)`, and cone both sides with `x1`, `x2`.
pub fn op_c(
    k: &Complex3,
    w: VertexId,
    abc: [VertexId; 3],
    x1: VertexId,
    x2: VertexId,
) -> Result<(Complex3, MoveRecord)> {
    const OP: &str = "op_c";
    let t = crate::complex::canonical(abc).ok_or_else(|| Error::pre(OP, "repeated vertex"))?;
    if !k.has_vertex(w) {
        return Err(Error::FaceNotFound(vec![w]));
    }
    if is_singular(k, w) {
        return Err(Error::pre(OP, format!("{w} is singular")));
    }
    if k.has_triangle(&t) {
        return Err(Error::pre(OP, format!("triangle {t:?} is already present")));
    }
    if x1 == x2 {
        return Err(Error::pre(OP, "x1 and x2 must differ"));
    }
    check_new_label(OP, k, x1, &[w])?;
    check_new_label(OP, k, x2, &[w])?;
    let lk = k.vertex_link(w)?;
    let sides = lk
        .sides_of_cycle(&t)
        .map_err(|_| Error::pre(OP, "boundary of abc is not in the link"))?;
    if sides.len() != 2 {
        return Err(Error::pre(OP, "boundary of abc does not separate the link"));
    }
    let first = *lk.triangles().iter().next().expect("nonempty link");
    let (s1, s2) = if sides[0].contains(&first) {
        (&sides[0], &sides[1])
    } else {
        (&sides[1], &sides[0])
    };
    let mut add: Vec<Tetra> = vec![tet(x1, t[0], t[1], t[2]), tet(x2, t[0], t[1], t[2])];
    add.extend(s1.iter().map(|f| tet(x1, f[0], f[1], f[2])));
    add.extend(s2.iter().map(|f| tet(x2, f[0], f[1], f[2])));
    let after = k.edit(&k.vertex_star_facets(w), &add)?;
    let mv = Move::OpC {
        w,
        a: t[0],
        b: t[1],
        c: t[2],
        x1,
        x2,
    };
    finish(OP, k, after, mv, -1)
}

/// The unique triangle shared by the stars of two non-adjacent vertices.
fn common_triangle(k: &Complex3, u: VertexId, v: VertexId) -> Result<Triangle> {
    const OP: &str = "op_c_prime";
    let common: Vec<VertexId> = k
        .neighbors(u)
        .intersection(&k.neighbors(v))
        .copied()
        .collect();
    if common.len() != 3 {
        return Err(Error::pre(
            OP,
            format!("st({u}) and st({v}) share {} vertices, not 3", common.len()),
        ));
    }
    let t = tri(common[0], common[1], common[2]);
    if !k.link_triangles(u).contains(&t) || !k.link_triangles(v).contains(&t) {
        return Err(Error::pre(OP, "the shared vertices do not span a common triangle"));
    }
    Ok(t)
}

/// (C′): `u, v` non-singular and non-adjacent with `st(u) ∩ st(v) = abc`.
pub fn op_c_prime(
    k: &Complex3,
    u: VertexId,
    v: VertexId,
    w: VertexId,
) -> Result<(Complex3, MoveRecord)> {
    const OP: &str = "op_c_prime";
    for x in [u, v] {
        if !k.has_vertex(x) {
            return Err(Error::FaceNotFound(vec![x]));
        }
        if is_singular(k, x) {
            return Err(Error::pre(OP, format!("{x} is singular")));
        }
    }
    if u == v || k.has_edge(u, v) {
        return Err(Error::pre(OP, format!("{u}-{v} must be a non-edge")));
    }
    check_new_label(OP, k, w, &[u, v])?;
    let t = common_triangle(k, u, v)?;
    let mut remove = k.vertex_star_facets(u);
    remove.extend(k.vertex_star_facets(v));
    let add: Vec<Tetra> = k
        .link_triangles(u)
        .iter()
        .chain(k.link_triangles(v))
        .filter(|f| **f != t)
        .map(|f| tet(w, f[0], f[1], f[2]))
        .collect();
    let after = k.edit(&remove, &add)?;
    finish(OP, k, after, Move::OpCPrime { u, v, w }, 1)
}

/// (D), restricted to one central retriangulation followed by one contraction.
pub fn op_d(
    k: &Complex3,
    u: VertexId,
    w: VertexId,
    center: VertexId,
    t: VertexId,
) -> Result<(Complex3, MoveRecord)> {
    const OP: &str = "op_d";
    require_edge(OP, k, u, w)?;
    let d_uw = k.edge_degree(u, w) as i64;
    let (mid, _) = central_retriangulation(k, u, w, center)?;
    if !mid.has_edge(u, t) {
        return Err(Error::pre(OP, format!("{u}-{t} is not an edge after retriangulation")));
    }
    let d_ut = mid.edge_degree(u, t) as i64;
    let (after, _) = edge_contraction(&mid, u, t, t)?;
    finish(OP, k, after, Move::OpD { u, w, center, t }, d_uw - d_ut)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveMode {
    A,
    B,
    C,
    D,
    All,
}

/// The first strictly g2-reducing move in a fixed lexicographic scan, trying
/// (A), (B), (C) and (D) in that order.
pub fn find_g2_reducing_move(k: &Complex3, mode: MoveMode) -> Option<(MoveRecord, Complex3)> {
    let wants = |m: MoveMode| mode == MoveMode::All || mode == m;
    let found = [
        (MoveMode::A, find_a as fn(&Complex3) -> Option<(Complex3, MoveRecord)>),
        (MoveMode::B, find_b),
        (MoveMode::C, find_c),
        (MoveMode::D, find_d),
    ]
    .into_iter()
    .filter(|(m, _)| wants(*m))
    .find_map(|(_, f)| f(k))?;
    debug_assert!(found.1.g2_delta < 0);
    Some((found.1, found.0))
}

fn find_a(k: &Complex3) -> Option<(Complex3, MoveRecord)> {
    k.edges()
        .filter(|e| k.edge_degree(e[0], e[1]) == 3)
        .find_map(|e| bistellar_2_move(k, e[0], e[1]).ok())
}

fn find_b(k: &Complex3) -> Option<(Complex3, MoveRecord)> {
    k.edges()
        .filter(|e| k.edge_degree(e[0], e[1]) >= 4 && link_condition(k, e[0], e[1]))
        .find_map(|e| {
            let (u, v) = (e[0], e[1]);
            edge_contraction(k, u, v, u)
                .or_else(|_| edge_contraction(k, u, v, v))
                .ok()
        })
}

fn find_c(k: &Complex3) -> Option<(Complex3, MoveRecord)> {
    let fresh = k.fresh_labels(1)[0];
    for &w in k.vertices() {
        let Ok(lk) = k.vertex_link(w) else { continue };
        if !lk.classify().is_sphere() {
            continue;
        }
        let nb: Vec<VertexId> = lk.vertices().iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for (j, &b) in nb.iter().enumerate().skip(i + 1) {
                if !lk.has_edge(a, b) {
                    continue;
                }
                for &c in &nb[j + 1..] {
                    if lk.has_edge(a, c) && lk.has_edge(b, c) && !k.has_triangle(&[a, b, c]) {
                        if let Ok(found) = op_c(k, w, [a, b, c], w, fresh) {
                            return Some(found);
                        }
                    }
                }
            }
        }
    }
    None
}

fn find_d(k: &Complex3) -> Option<(Complex3, MoveRecord)> {
    let center = k.fresh_labels(1)[0];
    for e in k.edges() {
        for (u, w) in [(e[0], e[1]), (e[1], e[0])] {
            if is_singular(k, u) {
                continue;
            }
            let d_uw = k.edge_degree(u, w);
            let Ok((mid, _)) = central_retriangulation(k, u, w, center) else {
                continue;
            };
            for t in mid.neighbors(u) {
                if mid.edge_degree(u, t) <= d_uw || !link_condition(&mid, u, t) {
                    continue;
                }
                if let Ok(found) = op_d(k, u, w, center, t) {
                    return Some(found);
                }
            }
        }
    }
    None
}
