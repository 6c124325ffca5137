#![allow(dead_code)]

use pseudo3::complex::{Complex3, Tetra, VertexId};
use pseudo3::generators::{generate, random_in_scope, GeneratorKind, GeneratorSpec, Profile};
use pseudo3::moves::bistellar_1_move;
use pseudo3::surgery::{connected_sum, relabel_above, FacetBijection};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn delta4() -> Complex3 {
    Complex3::boundary_4_simplex([0, 1, 2, 3, 4]).unwrap()
}

/// g2 straight from the edge and vertex counts.
pub fn g2_oracle(k: &Complex3) -> i64 {
    let f = k.f_vector();
    f.f1 as i64 - 4 * f.f0 as i64 + 10
}

pub fn build(kind: GeneratorKind, orientable: bool) -> Complex3 {
    let mut spec = GeneratorSpec::new(kind);
    spec.orientable = orientable;
    generate(&spec).unwrap().complex().unwrap()
}

pub struct Entry {
    pub name: String,
    pub complex: Complex3,
}

fn entry(name: impl Into<String>, complex: Complex3) -> Entry {
    Entry {
        name: name.into(),
        complex,
    }
}

pub fn in_scope_profiles() -> Vec<(Profile, u64)> {
    let mut out = Vec::new();
    for seed in 0..5 {
        out.push((Profile::Sphere, seed));
        out.push((Profile::OneSingularity { handles: 1 }, seed));
        out.push((Profile::TwoSingularities { m: 1 }, seed));
    }
    for seed in 0..3 {
        out.push((Profile::OneSingularity { handles: 2 }, seed));
        out.push((Profile::TwoSingularities { m: 2 }, seed));
    }
    out
}

/// The fixed test corpus shared by the acceptance checks.
pub fn corpus() -> Vec<Entry> {
    let mut out = vec![entry("simplex", delta4())];
    for k in 2..=5 {
        out.push(entry(format!("chain{k}"), build(GeneratorKind::ChainSum { k }, true)));
    }
    for o in [true, false] {
        out.push(entry(format!("handle/o={o}"), build(GeneratorKind::HandleExample, o)));
        for n in 1..=3 {
            out.push(entry(
                format!("sharp1({n})/o={o}"),
                build(GeneratorKind::SharpOneSingularity { n }, o),
            ));
        }
    }
    for m in 1..=2 {
        out.push(entry(
            format!("sharp2({m})"),
            build(GeneratorKind::SharpTwoSingularities { m }, true),
        ));
    }
    for (profile, seed) in in_scope_profiles() {
        out.push(entry(
            format!("random {profile:?} seed {seed}"),
            random_in_scope(profile, seed).unwrap(),
        ));
    }
    out
}

/// Pairs `source` with `target`, fixing shared vertices and shuffling the
/// rest.
pub fn random_pairing(source: Tetra, target: Tetra, rng: &mut ChaCha8Rng) -> Option<FacetBijection> {
    let free_src: Vec<VertexId> = source.iter().copied().filter(|v| !target.contains(v)).collect();
    let mut free_dst: Vec<VertexId> = target.iter().copied().filter(|v| !source.contains(v)).collect();
    free_dst.shuffle(rng);
    let mut pairs: Vec<(VertexId, VertexId)> = source
        .iter()
        .copied()
        .filter(|v| target.contains(v))
        .map(|v| (v, v))
        .collect();
    pairs.extend(free_src.into_iter().zip(free_dst));
    FacetBijection::new(&pairs).ok()
}

/// Sums a fresh simplex boundary onto a random facet containing `core` and,
/// when possible, the newest vertex. Growth stays path-like.
pub fn stack_at(k: &Complex3, core: &[VertexId], rng: &mut ChaCha8Rng) -> Complex3 {
    let through_core: Vec<Tetra> = k
        .facets()
        .copied()
        .filter(|t| core.iter().all(|v| t.contains(v)))
        .collect();
    let newest: Vec<Tetra> = through_core
        .iter()
        .copied()
        .filter(|t| t.contains(&k.max_label()))
        .collect();
    let candidates = if newest.is_empty() { through_core } else { newest };
    let source = *candidates.choose(rng).unwrap();
    let block = relabel_above(&delta4(), k.max_label()).unwrap();
    let target = *block.facets().next().unwrap();
    let pairs: Vec<(VertexId, VertexId)> = source.iter().copied().zip(target).collect();
    connected_sum(k, &block, &FacetBijection::new(&pairs).unwrap()).unwrap()
}

/// Applies up to `count` random bistellar 1-moves.
pub fn inflate(k: &Complex3, count: usize, rng: &mut ChaCha8Rng) -> Complex3 {
    let mut k = k.clone();
    for _ in 0..count {
        let tris: Vec<_> = k.triangles().copied().collect();
        for _ in 0..20 {
            let t = tris[rng.gen_range(0..tris.len())];
            if let Ok((next, _)) = bistellar_1_move(&k, t[0], t[1], t[2]) {
                k = next;
                break;
            }
        }
    }
    k
}
