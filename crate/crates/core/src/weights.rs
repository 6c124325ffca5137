//! Edge weights relative to a distinguished singular vertex `t`, the vertex
//! and outer weights built from them, and a report of the counting
//! identities and inequalities they feed.
//!
//! All arithmetic is exact over `Ratio<i64>`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::complex::{Complex3, VertexId};
use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

fn r(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

/// Serializes a rational as a `"p/q"` string.
pub fn ser_rational<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
}

fn in_star(k: &Complex3, t: VertexId, u: VertexId) -> bool {
    u == t || k.has_edge(u, t)
}

fn edge_in_star(k: &Complex3, t: VertexId, u: VertexId, v: VertexId) -> bool {
    u == t || v == t || k.has_triangle(&crate::complex::tri(t, u, v))
}

fn edge_in_link(k: &Complex3, t: VertexId, u: VertexId, v: VertexId) -> bool {
    u != t && v != t && k.has_triangle(&crate::complex::tri(t, u, v))
}

/// Every value `lambda` can take.
pub fn lambda_value_set() -> [Rational; 5] {
    [r(1, 4), r(1, 3), r(1, 2), r(2, 3), r(3, 4)]
}

/// The weight of the oriented edge `(u, v)`. Cases are tried top-down and
/// the first match wins.
pub fn lambda(k: &Complex3, t: VertexId, u: VertexId, v: VertexId) -> Result<Rational> {
    if !k.has_vertex(t) {
        return Err(Error::FaceNotFound(vec![t]));
    }
    if !k.has_edge(u, v) {
        return Err(Error::FaceNotFound(vec![u, v]));
    }
    Ok(lambda_unchecked(k, t, u, v))
}

fn lambda_unchecked(k: &Complex3, t: VertexId, u: VertexId, v: VertexId) -> Rational {
    let off_star = !in_star(k, t, u) || !in_star(k, t, v);
    if !off_star {
        return r(1, 2);
    }
    let du = k.degree(u);
    match du {
        6 => r(2, 3),
        7 if k.edge_degree(u, v) == 5 => r(3, 4),
        7 if k.edge_degree(u, v) == 4 => r(1, 2),
        8 => r(1, 2),
        d if d >= 9 && k.degree(v) <= 8 => Rational::one() - lambda_unchecked(k, t, v, u),
        _ => r(1, 2),
    }
}

/// `W_u`, the sum of `lambda(u, v)` over the neighbours of `u`.
pub fn vertex_weight(k: &Complex3, t: VertexId, u: VertexId) -> Result<Rational> {
    if !k.has_vertex(u) {
        return Err(Error::FaceNotFound(vec![u]));
    }
    k.neighbors(u)
        .into_iter()
        .map(|v| lambda(k, t, u, v))
        .sum()
}

/// `O_u` for a vertex `u` of `lk(t)`: the sum of `lambda(u, v)` over the
/// edges `uv` outside `st(t)`.
pub fn outer_weight(k: &Complex3, t: VertexId, u: VertexId) -> Result<Rational> {
    if u == t || !k.has_edge(u, t) {
        return Err(Error::pre("outer_weight", format!("{u} is not a vertex of lk({t})")));
    }
    Ok(k
        .neighbors(u)
        .into_iter()
        .filter(|&v| v != t && !edge_in_link(k, t, u, v))
        .map(|v| lambda_unchecked(k, t, u, v))
        .sum())
}

/// `lambda` on both orientations of every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    pub base_vertex_t: VertexId,
    pub lambda: BTreeMap<(VertexId, VertexId), Rational>,
}

impl WeightTable {
    pub fn new(k: &Complex3, t: VertexId) -> Result<Self> {
        require_singular(k, t)?;
        let mut table = BTreeMap::new();
        for e in k.edges() {
            table.insert((e[0], e[1]), lambda_unchecked(k, t, e[0], e[1]));
            table.insert((e[1], e[0]), lambda_unchecked(k, t, e[1], e[0]));
        }
        Ok(WeightTable {
            base_vertex_t: t,
            lambda: table,
        })
    }

    pub fn get(&self, u: VertexId, v: VertexId) -> Option<Rational> {
        self.lambda.get(&(u, v)).copied()
    }
}

fn require_singular(k: &Complex3, t: VertexId) -> Result<()> {
    if !k.has_vertex(t) {
        return Err(Error::FaceNotFound(vec![t]));
    }
    if k.vertex_link(t)?.classify().is_sphere() {
        return Err(Error::pre("weights", format!("vertex {t} is not singular")));
    }
    Ok(())
}

/// `(f1(st(v)), 4 f0(st(v)) - 3 chi(lk(v)) - 4)` for a vertex `v`.
pub fn star_edge_count(k: &Complex3, v: VertexId) -> Result<(i64, i64)> {
    let lk = k.vertex_link(v)?;
    let (l0, l1, _) = lk.f_vector();
    let f0 = l0 as i64 + 1;
    let f1 = (l0 + l1) as i64;
    Ok((f1, 4 * f0 - 3 * lk.euler_characteristic() - 4))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSum {
    pub u: VertexId,
    pub v: VertexId,
    #[serde(serialize_with = "ser_rational")]
    pub sum: Rational,
    pub equals_one: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexWeightCheck {
    pub u: VertexId,
    pub degree: usize,
    #[serde(serialize_with = "ser_rational")]
    pub weight: Rational,
    pub at_least_four: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub t: VertexId,
    /// (a) `lambda(u,v) + lambda(v,u)` per edge.
    pub pair_sums: Vec<PairSum>,
    pub pair_sums_all_one: bool,
    /// (b) `f1(K) - f1(st(t))` against the weight sum over edges off `st(t)`.
    pub off_star_edges: i64,
    #[serde(serialize_with = "ser_rational")]
    pub off_star_weight_sum: Rational,
    pub off_star_identity_holds: bool,
    /// (c) `f1(K) >= 4 f0(K) - 3 chi(lk t) - 4 + sum of O_u`.
    pub f1: i64,
    #[serde(serialize_with = "ser_rational")]
    pub f1_lower_bound: Rational,
    pub f1_bound_holds: bool,
    /// (d) `W_u >= 4` for every vertex off `st(t)`.
    pub off_star_vertex_weights: Vec<VertexWeightCheck>,
    pub vertex_weights_hold: bool,
    /// (e) `sum of O_v >= f0(lk t) - 1`.
    #[serde(serialize_with = "ser_rational")]
    pub outer_weight_sum: Rational,
    pub link_f0: usize,
    pub outer_weight_bound_holds: bool,
}

pub fn verify_weight_identities(k: &Complex3, t: VertexId) -> Result<IdentityReport> {
    let table = WeightTable::new(k, t)?;
    let lk = k.vertex_link(t)?;

    let mut pair_sums = Vec::new();
    let mut off_star_edges = 0i64;
    let mut off_star_weight_sum = Rational::zero();
    for e in k.edges() {
        let (u, v) = (e[0], e[1]);
        let sum = table.get(u, v).unwrap() + table.get(v, u).unwrap();
        pair_sums.push(PairSum {
            u,
            v,
            sum,
            equals_one: sum.is_one(),
        });
        if !edge_in_star(k, t, u, v) {
            off_star_edges += 1;
            off_star_weight_sum += sum;
        }
    }
    let pair_sums_all_one = pair_sums.iter().all(|p| p.equals_one);

    let outer_weight_sum: Rational = lk
        .vertices()
        .iter()
        .map(|&u| outer_weight(k, t, u))
        .sum::<Result<Rational>>()?;
    let f = k.f_vector();
    let f1 = f.f1 as i64;
    let f1_lower_bound = Rational::from_integer(4 * f.f0 as i64 - 3 * lk.euler_characteristic() - 4)
        + outer_weight_sum;

    let off_star_vertex_weights: Vec<VertexWeightCheck> = k
        .vertices()
        .iter()
        .filter(|&&u| !in_star(k, t, u))
        .map(|&u| {
            let weight: Rational = k.neighbors(u).into_iter().map(|v| table.get(u, v).unwrap()).sum();
            VertexWeightCheck {
                u,
                degree: k.degree(u),
                weight,
                at_least_four: weight >= Rational::from_integer(4),
            }
        })
        .collect();

    let link_f0 = lk.vertices().len();
    Ok(IdentityReport {
        t,
        pair_sums_all_one,
        pair_sums,
        off_star_edges,
        off_star_weight_sum,
        off_star_identity_holds: off_star_weight_sum == Rational::from_integer(off_star_edges),
        f1,
        f1_bound_holds: Rational::from_integer(f1) >= f1_lower_bound,
        f1_lower_bound,
        vertex_weights_hold: off_star_vertex_weights.iter().all(|c| c.at_least_four),
        off_star_vertex_weights,
        outer_weight_bound_holds: outer_weight_sum >= Rational::from_integer(link_f0 as i64 - 1),
        outer_weight_sum,
        link_f0,
    })
}
