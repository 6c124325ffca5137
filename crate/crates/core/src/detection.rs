//! Missing faces, link separation and the missing-tetrahedron taxonomy.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::{tet_faces, Complex3, Tetra, Triangle, VertexId};
use crate::error::{Error, Result};
use crate::surface::{patch_euler_characteristic, Surface2};

pub fn missing_triangles(k: &Complex3) -> Vec<Triangle> {
    let mut out = Vec::new();
    for &a in k.vertices() {
        let nb: Vec<VertexId> = k.neighbors(a).into_iter().filter(|&x| x > a).collect();
        for (i, &b) in nb.iter().enumerate() {
            for &c in &nb[i + 1..] {
                if k.has_edge(b, c) && !k.has_triangle(&[a, b, c]) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

pub fn missing_tetrahedra(k: &Complex3) -> Vec<Tetra> {
    let mut out = BTreeSet::new();
    for t in k.triangles() {
        let [a, b, c] = *t;
        for d in k.neighbors(c) {
            if d <= c {
                continue;
            }
            let s = [a, b, c, d];
            if !k.has_facet(&s) && tet_faces(&s).iter().all(|f| k.has_triangle(f)) {
                out.insert(s);
            }
        }
    }
    out.into_iter().collect()
}

/// Exhaustive scan over all 4-subsets of vertices; for small complexes.
pub fn missing_tetrahedra_brute_force(k: &Complex3) -> Vec<Tetra> {
    let v = k.vertices();
    let mut out = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            for l in j + 1..v.len() {
                for m in l + 1..v.len() {
                    let s = [v[i], v[j], v[l], v[m]];
                    if !k.has_facet(&s) && tet_faces(&s).iter().all(|f| k.has_triangle(f)) {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Neighborhood {
    Annulus,
    Moebius,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkSplit {
    Separates {
        sides: [Vec<Triangle>; 2],
        disc: [bool; 2],
    },
    NonSeparating {
        neighborhood: Neighborhood,
    },
}

impl LinkSplit {
    pub fn separates(&self) -> bool {
        matches!(self, LinkSplit::Separates { .. })
    }

    pub fn has_disc_side(&self) -> bool {
        matches!(self, LinkSplit::Separates { disc, .. } if disc[0] || disc[1])
    }
}

/// Closing a side with its boundary cycle yields a disc.
pub fn side_is_disc(side: &BTreeSet<Triangle>) -> bool {
    if side.is_empty() {
        return false;
    }
    patch_euler_characteristic(side) == 1
}

/// Does the boundary of the triangle `abc` separate `lk(x)`?
pub fn separates_link(k: &Complex3, x: VertexId, abc: Triangle) -> Result<LinkSplit> {
    let lk = k.vertex_link(x)?;
    let sides = lk.sides_of_cycle(&abc)?;
    match sides.len() {
        2 => {
            let disc = [side_is_disc(&sides[0]), side_is_disc(&sides[1])];
            let [s0, s1]: [BTreeSet<Triangle>; 2] = sides.try_into().expect("two sides");
            Ok(LinkSplit::Separates {
                sides: [s0.into_iter().collect(), s1.into_iter().collect()],
                disc,
            })
        }
        1 => Ok(LinkSplit::NonSeparating {
            neighborhood: neighborhood_type(&lk, &abc)?,
        }),
        n => Err(Error::NotASurface(format!(
            "a cycle cut the link of {x} into {n} pieces"
        ))),
    }
}

/// Two-sidedness of a cycle in a surface, decided by transporting a choice
/// of side around the cycle.
pub fn neighborhood_type(s: &Surface2, cycle: &[VertexId]) -> Result<Neighborhood> {
    let n = cycle.len();
    if n < 3 {
        return Err(Error::NotASurface("cycle needs at least 3 vertices".into()));
    }
    for i in 0..n {
        if !s.has_edge(cycle[i], cycle[(i + 1) % n]) {
            return Err(Error::NotASurface(format!(
                "cycle edge {}{} is not in the surface",
                cycle[i],
                cycle[(i + 1) % n]
            )));
        }
    }
    // wedge(i, side): triangles at cycle[i] between its two cycle neighbours
    let wedges = |i: usize| -> [BTreeSet<Triangle>; 2] {
        let c = cycle[i];
        let prev = cycle[(i + n - 1) % n];
        let next = cycle[(i + 1) % n];
        let ring = vertex_ring(s, c);
        let p = ring.iter().position(|&x| x == prev).expect("prev in ring");
        let m = ring.len();
        let mut sides = [BTreeSet::new(), BTreeSet::new()];
        let mut side = 0;
        for step in 0..m {
            let x = ring[(p + step) % m];
            let y = ring[(p + step + 1) % m];
            if step > 0 && x == next {
                side = 1;
            }
            sides[side].insert(crate::complex::tri(c, x, y));
        }
        sides
    };
    let start = wedges(0);
    let mut current = start[0].clone();
    for i in 0..n {
        let j = (i + 1) % n;
        let carried = current
            .iter()
            .find(|t| t.contains(&cycle[j]))
            .copied()
            .expect("wedge meets the next cycle edge");
        let w = wedges(j);
        current = if w[0].contains(&carried) {
            w[0].clone()
        } else {
            w[1].clone()
        };
    }
    Ok(if current == start[0] {
        Neighborhood::Annulus
    } else {
        Neighborhood::Moebius
    })
}

/// Link of a surface vertex as a cyclic vertex order.
fn vertex_ring(s: &Surface2, c: VertexId) -> Vec<VertexId> {
    let edges: Vec<[VertexId; 2]> = s
        .triangles()
        .iter()
        .filter(|t| t.contains(&c))
        .map(|t| {
            let o: Vec<VertexId> = t.iter().copied().filter(|&x| x != c).collect();
            [o[0], o[1]]
        })
        .collect();
    crate::complex::cycle_order(&edges).expect("surface vertex link is a cycle")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TypeTag {
    T1NoSingular,
    T2SepDisc,
    T3Unfoldable,
    T4VertexFoldPattern,
    T5SepNoDisc,
    /// A separation pattern outside the five recognised types.
    Irregular,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingTetraReport {
    pub tetra: Tetra,
    pub per_vertex: BTreeMap<VertexId, LinkSplit>,
    pub type_tag: TypeTag,
    /// Vertex or edge at which an unfolding applies, for the fold patterns.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub fold_at: Vec<VertexId>,
}

/// Classifies a missing tetrahedron against the tracked singular vertices,
/// listed in priority order (the distinguished vertex first).
pub fn classify_missing_tetra(
    k: &Complex3,
    sigma: Tetra,
    singular: &[VertexId],
) -> Result<MissingTetraReport> {
    let sigma = crate::complex::canonical(sigma).ok_or_else(|| Error::DegenerateFacet(sigma.to_vec()))?;
    let missing = !k.has_facet(&sigma) && tet_faces(&sigma).iter().all(|f| k.has_triangle(f));
    if !missing {
        return Err(Error::pre("classify_missing_tetra", format!("{sigma:?} is not a missing tetrahedron")));
    }
    let mut per_vertex = BTreeMap::new();
    for (i, face) in tet_faces(&sigma).into_iter().enumerate() {
        per_vertex.insert(sigma[i], separates_link(k, sigma[i], face)?);
    }
    let non_sep: Vec<VertexId> = sigma
        .iter()
        .copied()
        .filter(|x| !per_vertex[x].separates())
        .collect();
    let tracked_in_sigma: Vec<VertexId> = singular
        .iter()
        .copied()
        .filter(|x| sigma.contains(x))
        .collect();
    let neighborhood = |x: &VertexId| match per_vertex[x] {
        LinkSplit::NonSeparating { neighborhood } => Some(neighborhood),
        _ => None,
    };

    let (type_tag, fold_at) = if tracked_in_sigma.is_empty() && non_sep.is_empty() {
        (TypeTag::T1NoSingular, vec![])
    } else if non_sep.is_empty() {
        if per_vertex[&tracked_in_sigma[0]].has_disc_side() {
            (TypeTag::T2SepDisc, vec![])
        } else {
            (TypeTag::T5SepNoDisc, vec![])
        }
    } else if non_sep.len() == 1
        && singular.contains(&non_sep[0])
        && neighborhood(&non_sep[0]) == Some(Neighborhood::Annulus)
    {
        (TypeTag::T4VertexFoldPattern, non_sep.clone())
    } else if non_sep.len() == 2
        && non_sep.iter().all(|x| singular.contains(x))
        && non_sep
            .iter()
            .all(|x| neighborhood(x) == Some(Neighborhood::Moebius))
    {
        (TypeTag::T3Unfoldable, non_sep.clone())
    } else {
        (TypeTag::Irregular, non_sep.clone())
    };
    Ok(MissingTetraReport {
        tetra: sigma,
        per_vertex,
        type_tag,
        fold_at,
    })
}

/// Reports for every missing tetrahedron, using the complex's own singular
/// vertices in distinguished order.
pub fn analyze_missing(k: &Complex3) -> Result<Vec<MissingTetraReport>> {
    let singular: Vec<VertexId> = k.singular_vertices().into_iter().map(|(v, _)| v).collect();
    missing_tetrahedra(k)
        .into_iter()
        .map(|s| classify_missing_tetra(k, s, &singular))
        .collect()
}

/// The tetrahedron itself, if it would fill a missing facet.
pub fn is_missing_tetrahedron(k: &Complex3, s: &Tetra) -> bool {
    !k.has_facet(s) && tet_faces(s).iter().all(|f| k.has_triangle(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::Surface2;

    fn delta4() -> Complex3 {
        Complex3::boundary_4_simplex([0, 1, 2, 3, 4]).unwrap()
    }

    fn double() -> Complex3 {
        // ∂Δ⁴ # ∂Δ⁴ glued along 0123 (second copy apex 5)
        let mut f: Vec<Tetra> = delta4().facets().copied().filter(|t| *t != [0, 1, 2, 3]).collect();
        f.extend(
            Complex3::boundary_4_simplex([0, 1, 2, 3, 5])
                .unwrap()
                .facets()
                .copied()
                .filter(|t| *t != [0, 1, 2, 3]),
        );
        Complex3::new(f).unwrap()
    }

    #[test]
    fn delta4_has_no_missing_faces() {
        assert!(missing_triangles(&delta4()).is_empty());
        assert!(missing_tetrahedra(&delta4()).is_empty());
    }

    #[test]
    fn double_has_one_missing_tetrahedron() {
        let k = double();
        assert_eq!(k.f_vector().as_array(), [1, 6, 14, 16, 8]);
        assert_eq!(missing_tetrahedra(&k), vec![[0, 1, 2, 3]]);
        assert_eq!(missing_tetrahedra_brute_force(&k), vec![[0, 1, 2, 3]]);
        assert!(missing_triangles(&k).is_empty());
        let r = classify_missing_tetra(&k, [0, 1, 2, 3], &[]).unwrap();
        assert_eq!(r.type_tag, TypeTag::T1NoSingular);
        for s in r.per_vertex.values() {
            assert!(s.separates() && s.has_disc_side());
        }
    }

    #[test]
    fn missing_triangle_after_bistellar_1() {
        let k = double();
        let (k2, _) = crate::moves::bistellar_1_move(&k, 0, 1, 2).unwrap();
        assert!(missing_triangles(&k2).contains(&[0, 1, 2]));
    }

    #[test]
    fn cross_cap_is_one_sided() {
        let p = Surface2::rp2_6();
        // every empty 3-cycle of the minimal RP2 is a cross-cap curve
        let mut found_moebius = false;
        for a in 1..=6u32 {
            for b in a + 1..=6 {
                for c in b + 1..=6 {
                    if p.has_edge(a, b) && p.has_edge(b, c) && p.has_edge(a, c) && !p.triangles().contains(&[a, b, c]) {
                        let sides = p.sides_of_cycle(&[a, b, c]).unwrap();
                        assert_eq!(sides.len(), 1);
                        assert_eq!(neighborhood_type(&p, &[a, b, c]).unwrap(), Neighborhood::Moebius);
                        found_moebius = true;
                    }
                }
            }
        }
        assert!(found_moebius);
        let t = Surface2::torus_7();
        let mut found_nonsep = false;
        for a in 0..7u32 {
            for b in a + 1..7 {
                for c in b + 1..7 {
                    if t.has_edge(a, b) && t.has_edge(b, c) && t.has_edge(a, c) && !t.triangles().contains(&[a, b, c]) {
                        assert_eq!(neighborhood_type(&t, &[a, b, c]).unwrap(), Neighborhood::Annulus);
                        found_nonsep |= t.sides_of_cycle(&[a, b, c]).unwrap().len() == 1;
                    }
                }
            }
        }
        assert!(found_nonsep);
    }

    #[test]
    fn sphere_cycles_are_two_sided_and_bound_discs() {
        let k = double();
        let lk = k.vertex_link(0).unwrap();
        assert_eq!(neighborhood_type(&lk, &[1, 2, 3]).unwrap(), Neighborhood::Annulus);
        let split = separates_link(&k, 0, [1, 2, 3]).unwrap();
        assert!(matches!(split, LinkSplit::Separates { disc: [true, true], .. }));
    }
}
