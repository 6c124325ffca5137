//! Deterministic constructions: chains of summed 4-simplex boundaries, the
//! handle example, the sharp one- and two-singularity examples, two small
//! surfaces, and seeded random complexes inside the reduction hypotheses.
//!
//! Blocks are grown by summing fresh copies of the 4-simplex boundary at the
//! largest facet through a designated vertex set until an admissible facet
//! pairing appears. Outputs are relabelled to `0..f0` in label order, then
//! permuted by the seed (seed 0 keeps the order).

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex3, Tetra, VertexId};
use crate::error::{Error, Result};
use crate::moves;
use crate::surface::Surface2;
use crate::surgery::{
    check_admissible, connected_sum, edge_folding, handle_addition, relabel_above, vertex_folding,
    FacetBijection, SurgeryKind,
};

/// Upper limit on summed blocks while searching for an admissible pairing.
const MAX_BLOCKS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceSpec {
    Rp2_6,
    Torus7,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    Boundary4Simplex,
    ChainSum { k: usize },
    HandleExample,
    SharpOneSingularity { n: usize },
    SharpTwoSingularities { m: usize },
    Surface { surface: SurfaceSpec },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub seed: u64,
    /// Pick orientation-respecting pairings (torus links, orientable
    /// handles). `false` picks the reversing ones (Klein bottle links).
    pub orientable: bool,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind) -> Self {
        GeneratorSpec {
            kind,
            seed: 0,
            orientable: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generated {
    Complex {
        complex: Complex3,
        /// Copies of the 4-simplex boundary used in total.
        blocks: usize,
    },
    Surface(Surface2),
}

impl Generated {
    pub fn complex(self) -> Option<Complex3> {
        match self {
            Generated::Complex { complex, .. } => Some(complex),
            Generated::Surface(_) => None,
        }
    }
}

fn delta4() -> Complex3 {
    Complex3::boundary_4_simplex([0, 1, 2, 3, 4]).expect("five distinct labels")
}

/// Pairs `from` with `to` entry by entry.
fn ordered_pairing(from: Tetra, to: Tetra) -> Result<FacetBijection> {
    let pairs: Vec<(VertexId, VertexId)> = from.iter().copied().zip(to.iter().copied()).collect();
    FacetBijection::new(&pairs)
}

/// Sums a fresh 4-simplex boundary onto the largest facet through `core`.
/// The new block's vertex is the new maximum label.
fn sum_block_at(k: &Complex3, core: &[VertexId]) -> Result<Complex3> {
    let source = *k
        .facets()
        .filter(|t| core.iter().all(|v| t.contains(v)))
        .max()
        .ok_or_else(|| Error::pre("generate", format!("no facet contains {core:?}")))?;
    let block = relabel_above(&delta4(), k.max_label())?;
    let target = *block.facets().next().expect("nonempty");
    connected_sum(k, &block, &ordered_pairing(source, target)?)
}

pub fn chain_sum(blocks: usize) -> Result<Complex3> {
    if blocks < 1 {
        return Err(Error::pre("chain_sum", "need at least one block"));
    }
    let mut k = delta4();
    for _ in 1..blocks {
        k = sum_block_at(&k, &[])?;
    }
    Ok(k)
}

/// Keeps summing blocks at `core` until `search` finds something.
fn grow_until<T>(
    mut k: Complex3,
    core: &[VertexId],
    what: &str,
    mut search: impl FnMut(&Complex3) -> Result<Option<T>>,
) -> Result<(Complex3, T, usize)> {
    for added in 0..=MAX_BLOCKS {
        if let Some(found) = search(&k)? {
            return Ok((k, found, added));
        }
        k = sum_block_at(&k, core)?;
    }
    Err(Error::pre(
        "generate",
        format!("no admissible {what} after summing {MAX_BLOCKS} blocks"),
    ))
}

fn permutations3(x: [VertexId; 3]) -> [[VertexId; 3]; 6] {
    let [a, b, c] = x;
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

fn permutations4(x: Tetra) -> Vec<Tetra> {
    let mut out = Vec::with_capacity(24);
    for i in 0..4 {
        let rest: Vec<VertexId> = (0..4).filter(|&j| j != i).map(|j| x[j]).collect();
        for p in permutations3([rest[0], rest[1], rest[2]]) {
            out.push([x[i], p[0], p[1], p[2]]);
        }
    }
    out
}

/// First admissible vertex fold at `v` (lexicographic over facet pairs and
/// pairings) whose folded link has the requested orientability.
pub fn find_vertex_fold(k: &Complex3, v: VertexId, orientable: bool) -> Result<Option<FacetBijection>> {
    let star = k.vertex_star_facets(v);
    for (i, s1) in star.iter().enumerate() {
        for s2 in &star[i + 1..] {
            if s1.iter().filter(|x| s2.contains(x)).count() != 1 {
                continue;
            }
            let rest = |s: &Tetra| {
                let r: Vec<VertexId> = s.iter().copied().filter(|&x| x != v).collect();
                [r[0], r[1], r[2]]
            };
            let (a, b) = (rest(s1), rest(s2));
            for p in permutations3(b) {
                let psi = FacetBijection::new(&[(v, v), (a[0], p[0]), (a[1], p[1]), (a[2], p[2])])?;
                if !check_admissible(k, &psi, SurgeryKind::VertexFold)?.admissible {
                    continue;
                }
                let Ok(folded) = vertex_folding(k, &psi) else { continue };
                if folded.vertex_link(v)?.is_orientable() == orientable {
                    return Ok(Some(psi));
                }
            }
        }
    }
    Ok(None)
}

/// First admissible edge fold at `uv`.
pub fn find_edge_fold(k: &Complex3, u: VertexId, v: VertexId) -> Result<Option<FacetBijection>> {
    let around: Vec<Tetra> = k.facets().copied().filter(|t| t.contains(&u) && t.contains(&v)).collect();
    for (i, s1) in around.iter().enumerate() {
        for s2 in &around[i + 1..] {
            if s1.iter().filter(|x| s2.contains(x)).count() != 2 {
                continue;
            }
            let rest = |s: &Tetra| {
                let r: Vec<VertexId> = s.iter().copied().filter(|&x| x != u && x != v).collect();
                [r[0], r[1]]
            };
            let (a, b) = (rest(s1), rest(s2));
            for (p, q) in [(b[0], b[1]), (b[1], b[0])] {
                let psi = FacetBijection::new(&[(u, u), (v, v), (a[0], p), (a[1], q)])?;
                if check_admissible(k, &psi, SurgeryKind::EdgeFold)?.admissible
                    && edge_folding(k, &psi).is_ok()
                {
                    return Ok(Some(psi));
                }
            }
        }
    }
    Ok(None)
}

/// All-pairs graph distances, capped at 3.
fn distances(k: &Complex3) -> BTreeMap<(VertexId, VertexId), u8> {
    let mut out = BTreeMap::new();
    for &a in k.vertices() {
        let n1 = k.neighbors(a);
        for &b in &n1 {
            out.insert((a, b), 1);
        }
        for &b in &n1 {
            for c in k.neighbors(b) {
                if c != a {
                    out.entry((a, c)).or_insert(2);
                }
            }
        }
    }
    out
}

/// First admissible handle pairing whose result has the requested
/// orientability.
pub fn find_handle(k: &Complex3, orientable: bool) -> Result<Option<FacetBijection>> {
    let dist = distances(k);
    let far = |a: VertexId, b: VertexId| a != b && !dist.contains_key(&(a, b));
    let facets: Vec<Tetra> = k.facets().copied().collect();
    for (i, s1) in facets.iter().enumerate() {
        for s2 in &facets[i + 1..] {
            if s1.iter().any(|x| s2.contains(x)) {
                continue;
            }
            for p in permutations4(*s2) {
                if !(0..4).all(|j| far(s1[j], p[j])) {
                    continue;
                }
                let psi = ordered_pairing(*s1, p)?;
                let Ok(out) = handle_addition(k, &psi) else { continue };
                if out.is_orientable() == orientable {
                    return Ok(Some(psi));
                }
            }
        }
    }
    Ok(None)
}

fn handle_example(orientable: bool) -> Result<(Complex3, usize)> {
    let (k, psi, added) = grow_until(delta4(), &[], "handle pairing", |k| find_handle(k, orientable))?;
    Ok((handle_addition(&k, &psi)?, added + 1))
}

/// A chain folded at vertex 0; its only singular vertex is 0.
fn fold_block(orientable: bool) -> Result<(Complex3, usize)> {
    let (k, psi, added) = grow_until(delta4(), &[0], "vertex fold", |k| find_vertex_fold(k, 0, orientable))?;
    Ok((vertex_folding(&k, &psi)?, added + 1))
}

/// Sums `block` onto `k` pairing `v` (or the smallest vertex of `k` when
/// `v` is `None`) with `w`. Returns the sum and the label now carrying both.
fn sum_at_vertex(
    k: &Complex3,
    v: Option<VertexId>,
    block: &Complex3,
    w: VertexId,
) -> Result<(Complex3, VertexId)> {
    let floor = k.max_label();
    let shifted = relabel_above(block, floor)?;
    let w_pos = block.vertices().iter().position(|&x| x == w).expect("w in block");
    let w2 = shifted.vertices()[w_pos];
    let v = v.unwrap_or(k.vertices()[0]);
    let source = *k.facets().find(|t| t.contains(&v)).expect("v has a facet");
    let target = *shifted.facets().find(|t| t.contains(&w2)).expect("w has a facet");
    let s_rest = source.iter().copied().filter(|&x| x != v);
    let t_rest = target.iter().copied().filter(|&x| x != w2);
    let mut pairs = vec![(v, w2)];
    pairs.extend(s_rest.zip(t_rest));
    let sum = connected_sum(k, &shifted, &FacetBijection::new(&pairs)?)?;
    Ok((sum, v))
}

/// The handle example summed with `n` folded blocks at a common vertex.
fn sharp_one(n: usize, orientable: bool) -> Result<(Complex3, Option<VertexId>, usize)> {
    let (mut k, mut blocks) = handle_example(orientable)?;
    let mut v = None;
    for _ in 0..n {
        let (block, used) = fold_block(orientable)?;
        let (sum, at) = sum_at_vertex(&k, v, &block, 0)?;
        k = sum;
        v = Some(at);
        blocks += used;
    }
    Ok((k, v, blocks))
}

fn sharp_two(m: usize, orientable: bool) -> Result<(Complex3, usize)> {
    let (k, v, blocks) = sharp_one(m - 1, orientable)?;
    let t = v.unwrap_or(k.vertices()[0]);
    let k = sum_block_at(&k, &[t])?;
    let a = k.max_label();
    let (k, psi, added) = grow_until(k, &[t, a], "edge fold", |k| find_edge_fold(k, t, a))?;
    Ok((edge_folding(&k, &psi)?, blocks + 1 + added))
}

/// Relabels to `0..f0` in label order, then applies a seeded permutation.
pub fn normalize_labels(k: &Complex3, seed: u64) -> Result<Complex3> {
    let mut targets: Vec<VertexId> = (0..k.vertices().len() as VertexId).collect();
    if seed != 0 {
        targets.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let map = k.vertices().iter().copied().zip(targets).collect();
    k.relabel(&map)
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    let bad = |m: &str| Err(Error::pre("generate", m.to_string()));
    let o = spec.orientable;
    let (complex, blocks) = match spec.kind {
        GeneratorKind::Boundary4Simplex => (delta4(), 1),
        GeneratorKind::ChainSum { k } if k < 2 => return bad("chain length must be at least 2"),
        GeneratorKind::ChainSum { k } => (chain_sum(k)?, k),
        GeneratorKind::HandleExample => handle_example(o)?,
        GeneratorKind::SharpOneSingularity { n } if n < 1 => return bad("n must be at least 1"),
        GeneratorKind::SharpOneSingularity { n } => {
            let (k, _, b) = sharp_one(n, o)?;
            (k, b)
        }
        GeneratorKind::SharpTwoSingularities { m } if m < 1 => return bad("m must be at least 1"),
        GeneratorKind::SharpTwoSingularities { m } => sharp_two(m, o)?,
        GeneratorKind::Surface { surface } => {
            return Ok(Generated::Surface(match surface {
                SurfaceSpec::Rp2_6 => Surface2::rp2_6(),
                SurfaceSpec::Torus7 => Surface2::torus_7(),
            }))
        }
    };
    Ok(Generated::Complex {
        complex: normalize_labels(&complex, spec.seed)?,
        blocks,
    })
}

/// Singularity profiles covered by the reduction engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    /// No singular vertex, g2 at most 9.
    Sphere,
    /// One singular vertex whose link has `handles` handles, g2 at most
    /// `9 + 6 handles`.
    OneSingularity { handles: usize },
    /// Two singular vertices, one with an RP2 link and the other with
    /// `2m - 1` cross-caps; g2 at most `6 + 6m`.
    TwoSingularities { m: usize },
}

impl Profile {
    pub fn g2_bound(self) -> i64 {
        match self {
            Profile::Sphere => 9,
            Profile::OneSingularity { handles } => 9 + 6 * handles as i64,
            Profile::TwoSingularities { m } => 6 + 6 * m as i64,
        }
    }

    pub fn vertex_folds(self) -> usize {
        match self {
            Profile::Sphere => 0,
            Profile::OneSingularity { handles } => handles,
            Profile::TwoSingularities { m } => m - 1,
        }
    }

    pub fn edge_folds(self) -> usize {
        usize::from(matches!(self, Profile::TwoSingularities { .. }))
    }
}

/// A seeded complex in `profile` built from 4-simplex boundaries by sums,
/// folds and g2-raising moves, with g2 kept within the profile's bound.
pub fn random_in_scope(profile: Profile, seed: u64) -> Result<Complex3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orientable = rng.gen_bool(0.5);
    let mut k = delta4();
    for _ in 0..rng.gen_range(0..3) {
        let core = [k.vertices()[rng.gen_range(0..k.vertices().len())]];
        k = sum_block_at(&k, &core)?;
    }
    let mut t = None;
    for _ in 0..profile.vertex_folds() {
        let (block, _) = fold_block(rng.gen_bool(0.5) || orientable)?;
        let (sum, at) = sum_at_vertex(&k, t, &block, 0)?;
        k = sum;
        t = Some(at);
    }
    if let Profile::TwoSingularities { .. } = profile {
        let tv = t.unwrap_or(k.vertices()[0]);
        k = sum_block_at(&k, &[tv])?;
        let a = k.max_label();
        let (grown, psi, _) = grow_until(k, &[tv, a], "edge fold", |k| find_edge_fold(k, tv, a))?;
        k = edge_folding(&grown, &psi)?;
    }
    let budget = profile.g2_bound() - k.g2();
    let raises = rng.gen_range(0..=budget.clamp(0, 4));
    let mut done = 0;
    let mut attempts = 0;
    while done < raises && attempts < 200 {
        attempts += 1;
        let tris: Vec<_> = k.triangles().copied().collect();
        let tr = tris[rng.gen_range(0..tris.len())];
        if let Ok((next, _)) = moves::bistellar_1_move(&k, tr[0], tr[1], tr[2]) {
            k = next;
            done += 1;
        }
    }
    normalize_labels(&k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SurfaceKind;

    fn gen(kind: GeneratorKind) -> Complex3 {
        generate(&GeneratorSpec::new(kind)).unwrap().complex().unwrap()
    }

    #[test]
    fn chain_sums_are_spheres_with_no_stress() {
        for k in 2..6 {
            let c = gen(GeneratorKind::ChainSum { k });
            assert_eq!(c.g2(), 0);
            assert_eq!(c.f_vector().f0, 5 + (k - 1));
            assert!(c.is_normal());
            assert!(c.singular_vertices().is_empty());
        }
    }

    #[test]
    fn handle_example() {
        let c = gen(GeneratorKind::HandleExample);
        assert_eq!(c.g2(), 10);
        assert!(c.singular_vertices().is_empty());
        assert!(c.is_orientable());
        let twisted = generate(&GeneratorSpec {
            orientable: false,
            ..GeneratorSpec::new(GeneratorKind::HandleExample)
        })
        .unwrap()
        .complex()
        .unwrap();
        assert_eq!(twisted.g2(), 10);
        assert!(!twisted.is_orientable());
    }

    #[test]
    fn sharp_one_singularity() {
        let c = gen(GeneratorKind::SharpOneSingularity { n: 1 });
        assert_eq!(c.g2(), 16);
        let sing = c.singular_vertices();
        assert_eq!(sing.len(), 1);
        assert_eq!(sing[0].1.kind, SurfaceKind::OrientableGenus(1));
    }

    #[test]
    fn sharp_two_singularities() {
        let c = gen(GeneratorKind::SharpTwoSingularities { m: 1 });
        assert_eq!(c.g2(), 13);
        let sing = c.singular_vertices();
        assert_eq!(sing.len(), 2);
        for (_, ty) in sing {
            assert_eq!(ty.kind, SurfaceKind::NonOrientableGenus(1));
        }
    }

    #[test]
    fn seeds_permute_labels_only() {
        let spec = GeneratorSpec {
            seed: 5,
            ..GeneratorSpec::new(GeneratorKind::ChainSum { k: 3 })
        };
        let a = generate(&spec).unwrap().complex().unwrap();
        assert_eq!(a, generate(&spec).unwrap().complex().unwrap());
        let b = gen(GeneratorKind::ChainSum { k: 3 });
        assert!(crate::iso::is_isomorphic(&a, &b).is_some());
    }

    #[test]
    fn random_complexes_stay_in_profile() {
        for seed in 0..4 {
            let k = random_in_scope(Profile::OneSingularity { handles: 1 }, seed).unwrap();
            assert!(k.g2() <= 15);
            assert_eq!(k.singular_vertices().len(), 1);
            let k = random_in_scope(Profile::TwoSingularities { m: 1 }, seed).unwrap();
            assert!(k.g2() <= 12);
            assert_eq!(k.singular_vertices().len(), 2);
        }
    }

    #[test]
    fn parameters_are_checked() {
        for kind in [
            GeneratorKind::ChainSum { k: 1 },
            GeneratorKind::SharpOneSingularity { n: 0 },
            GeneratorKind::SharpTwoSingularities { m: 0 },
        ] {
            assert!(generate(&GeneratorSpec::new(kind)).is_err());
        }
    }
}
