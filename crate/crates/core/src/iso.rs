//! Isomorphism test for small complexes by backtracking search.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::complex::{tet, Complex3, VertexId};

/// Cheap per-vertex invariant used to prune candidate images.
fn signature(k: &Complex3, v: VertexId) -> (usize, usize, usize) {
    let lk = k.link_triangles(v);
    let edges: BTreeSet<[VertexId; 2]> = lk
        .iter()
        .flat_map(|t| [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]])
        .collect();
    (k.degree(v), edges.len(), lk.len())
}

/// Returns a vertex bijection `K1 -> K2` mapping facets onto facets, if one
/// exists.
pub fn is_isomorphic(k1: &Complex3, k2: &Complex3) -> Option<BTreeMap<VertexId, VertexId>> {
    if k1.f_vector() != k2.f_vector() {
        return None;
    }
    if k1 == k2 {
        return Some(k1.vertices().iter().map(|&v| (v, v)).collect());
    }
    let sig1: BTreeMap<VertexId, _> = k1.vertices().iter().map(|&v| (v, signature(k1, v))).collect();
    let sig2: BTreeMap<VertexId, _> = k2.vertices().iter().map(|&v| (v, signature(k2, v))).collect();
    let mut h1: Vec<_> = sig1.values().copied().collect();
    let mut h2: Vec<_> = sig2.values().copied().collect();
    h1.sort_unstable();
    h2.sort_unstable();
    if h1 != h2 {
        return None;
    }

    // Visit vertices of K1 in BFS order so each new vertex has mapped neighbours.
    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    for &s in k1.vertices() {
        if !seen.insert(s) {
            continue;
        }
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in k1.neighbors(v) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }

    let neighbors1: BTreeMap<VertexId, BTreeSet<VertexId>> =
        k1.vertices().iter().map(|&v| (v, k1.neighbors(v))).collect();
    let mut search = Search {
        k1,
        k2,
        sig1,
        sig2,
        order,
        neighbors1,
        map: BTreeMap::new(),
        used: BTreeSet::new(),
    };
    if search.extend(0) {
        Some(search.map)
    } else {
        None
    }
}

struct Search<'a> {
    k1: &'a Complex3,
    k2: &'a Complex3,
    sig1: BTreeMap<VertexId, (usize, usize, usize)>,
    sig2: BTreeMap<VertexId, (usize, usize, usize)>,
    order: Vec<VertexId>,
    neighbors1: BTreeMap<VertexId, BTreeSet<VertexId>>,
    map: BTreeMap<VertexId, VertexId>,
    used: BTreeSet<VertexId>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return self
                .k1
                .facets()
                .all(|t| self.k2.has_facet(&tet(self.map[&t[0]], self.map[&t[1]], self.map[&t[2]], self.map[&t[3]])));
        }
        let v = self.order[depth];
        let candidates: Vec<VertexId> = self
            .k2
            .vertices()
            .iter()
            .copied()
            .filter(|c| !self.used.contains(c) && self.sig2[c] == self.sig1[&v])
            .collect();
        for c in candidates {
            if !self.consistent(v, c) {
                continue;
            }
            self.map.insert(v, c);
            self.used.insert(c);
            if self.extend(depth + 1) {
                return true;
            }
            self.map.remove(&v);
            self.used.remove(&c);
        }
        false
    }

    fn consistent(&self, v: VertexId, c: VertexId) -> bool {
        for (&w, &img) in &self.map {
            if self.neighbors1[&v].contains(&w) != self.k2.has_edge(c, img) {
                return false;
            }
        }
        // every facet of K1 at v whose other vertices are mapped must land on a facet
        self.k1.link_triangles(v).iter().all(|t| {
            match (self.map.get(&t[0]), self.map.get(&t[1]), self.map.get(&t[2])) {
                (Some(&a), Some(&b), Some(&d)) => self.k2.has_facet(&tet(c, a, b, d)),
                _ => true,
            }
        })
    }
}
