//! Stress spaces of generic embeddings in R^4.
//!
//! For a normal 3-pseudomanifold the dimension of the space of equilibrium
//! stresses of a generic embedding equals g2. The rank is computed exactly
//! by fraction-free elimination over the integers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{Complex3, Edge, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub seed: u64,
    /// Coordinates are drawn from `[-range, range]`.
    pub range: i64,
    pub coords: BTreeMap<VertexId, [i64; 4]>,
}

pub fn generic_embedding(k: &Complex3, seed: u64) -> Embedding {
    embedding_in_range(k, seed, 1000 * k.vertices().len() as i64)
}

/// Integer coordinates, pairwise distinct on each axis.
pub fn embedding_in_range(k: &Complex3, seed: u64, range: i64) -> Embedding {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used: [BTreeSet<i64>; 4] = Default::default();
    let mut coords = BTreeMap::new();
    for &v in k.vertices() {
        let mut p = [0i64; 4];
        for (axis, slot) in p.iter_mut().enumerate() {
            loop {
                let x = rng.gen_range(-range..=range);
                if used[axis].insert(x) {
                    *slot = x;
                    break;
                }
            }
        }
        coords.insert(v, p);
    }
    Embedding { seed, range, coords }
}

/// The equilibrium system: rows `(v, i)`, columns edges, entry
/// `f(v)_i - f(u)_i` in row `(v, i)` of column `vu`.
#[derive(Clone, Debug)]
pub struct StressSystem {
    pub embedding: Embedding,
    pub rows: Vec<(VertexId, usize)>,
    pub columns: Vec<Edge>,
    pub matrix: Vec<Vec<i64>>,
}

impl StressSystem {
    pub fn new(k: &Complex3, embedding: &Embedding) -> Self {
        let rows: Vec<(VertexId, usize)> = k
            .vertices()
            .iter()
            .flat_map(|&v| (0..4).map(move |i| (v, i)))
            .collect();
        let index: BTreeMap<VertexId, usize> =
            k.vertices().iter().enumerate().map(|(i, &v)| (v, 4 * i)).collect();
        let columns: Vec<Edge> = k.edges().copied().collect();
        let mut matrix = vec![vec![0i64; columns.len()]; rows.len()];
        for (c, e) in columns.iter().enumerate() {
            let (pu, pv) = (embedding.coords[&e[0]], embedding.coords[&e[1]]);
            for i in 0..4 {
                matrix[index[&e[0]] + i][c] = pu[i] - pv[i];
                matrix[index[&e[1]] + i][c] = pv[i] - pu[i];
            }
        }
        StressSystem {
            embedding: embedding.clone(),
            rows,
            columns,
            matrix,
        }
    }

    pub fn rank(&self) -> usize {
        integer_rank(&self.matrix)
    }
}

/// Rank of an integer matrix by Bareiss elimination.
pub fn integer_rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let n_rows = a.len();
    let n_cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(p) = (rank..n_rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[col].clone();
        for row in rest.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..n_cols {
                let v = &pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

pub fn stress_space_dim(k: &Complex3, embedding: &Embedding) -> usize {
    let system = StressSystem::new(k, embedding);
    system.columns.len() - system.rank()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeedDim {
    pub seed: u64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StressReport {
    pub g2: i64,
    pub dims: Vec<SeedDim>,
    /// Coordinate range of the final attempt.
    pub range: i64,
    pub pass: bool,
}

/// Compares the stress dimension with g2 for every seed. If the seeds
/// disagree the range is widened tenfold, up to three times.
pub fn check_g2_stress(k: &Complex3, seeds: &[u64]) -> StressReport {
    let g2 = k.g2();
    let mut range = 1000 * k.vertices().len() as i64;
    let mut dims = Vec::new();
    for _ in 0..4 {
        dims = seeds
            .iter()
            .map(|&seed| SeedDim {
                seed,
                dim: stress_space_dim(k, &embedding_in_range(k, seed, range)),
            })
            .collect();
        if dims.windows(2).all(|w| w[0].dim == w[1].dim) {
            break;
        }
        range *= 10;
    }
    let pass = dims.iter().all(|d| d.dim as i64 == g2);
    StressReport {
        g2,
        dims,
        range,
        pass,
    }
}
