//! Decomposition of a complex into 4-simplex boundaries.
//!
//! The engine alternates greedy g2 descent with a cut at a missing
//! tetrahedron: separating patterns are split as connected sums, fold
//! patterns are unfolded. The result is a [`Certificate`], a tree whose
//! leaves are 4-simplex boundaries and whose inner nodes rebuild their
//! parent complex exactly when replayed from the leaves up.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::complex::{Complex3, VertexId};
use crate::detection::{analyze_missing, MissingTetraReport, TypeTag};
use crate::error::{Error, Result};
use crate::generators::Profile;
use crate::iso::is_isomorphic;
use crate::moves::{find_g2_reducing_move, MoveMode, MoveRecord};
use crate::surgery::{
    connected_sum, edge_folding, edge_unfolding, handle_addition, split_connected_sum,
    vertex_folding, vertex_unfolding, FacetBijection, Split,
};

/// Applies g2-reducing moves until none is found.
pub fn greedy_descend(k: &Complex3) -> (Complex3, Vec<MoveRecord>) {
    let mut cur = k.clone();
    let mut records = Vec::new();
    while let Some((rec, next)) = find_g2_reducing_move(&cur, MoveMode::All) {
        debug_assert!(next.g2() < cur.g2());
        records.push(rec);
        cur = next;
    }
    (cur, records)
}

/// The operation rebuilding a node's complex from its children.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "params", rename_all = "snake_case")]
pub enum Op {
    Leaf { labels: [VertexId; 5] },
    /// Moves applied in order to the single child.
    Moves { moves: Vec<MoveRecord> },
    /// Connected sum of the two children.
    Sum { psi: FacetBijection },
    Handle { psi: FacetBijection },
    VertexFold { psi: FacetBijection },
    EdgeFold { psi: FacetBijection },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    #[serde(flatten)]
    pub op: Op,
    /// Sum of the children's g2.
    pub g2_before: i64,
    pub g2_after: i64,
    pub f_vector: [usize; 5],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Node>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub leaves: usize,
    pub moves: BTreeMap<String, usize>,
    pub sums: usize,
    pub handles: usize,
    pub vertex_folds: usize,
    pub edge_folds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub root: Node,
    pub summary: Summary,
}

impl Certificate {
    pub fn new(root: Node) -> Self {
        let mut summary = Summary::default();
        tally(&root, &mut summary);
        Certificate { root, summary }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Certificate(e.to_string()))
    }
}

fn tally(node: &Node, s: &mut Summary) {
    match &node.op {
        Op::Leaf { .. } => s.leaves += 1,
        Op::Moves { moves } => {
            for m in moves {
                *s.moves.entry(m.mv.name().to_string()).or_default() += 1;
            }
        }
        Op::Sum { .. } => s.sums += 1,
        Op::Handle { .. } => s.handles += 1,
        Op::VertexFold { .. } => s.vertex_folds += 1,
        Op::EdgeFold { .. } => s.edge_folds += 1,
    }
    for c in &node.children {
        tally(c, s);
    }
}

fn node(op: Op, k: &Complex3, children: Vec<Node>) -> Node {
    let g2_before = match &op {
        Op::Leaf { .. } => 0,
        _ => children.iter().map(|c| c.g2_after).sum(),
    };
    Node {
        op,
        g2_before,
        g2_after: k.g2(),
        f_vector: k.f_vector().as_array(),
        children,
    }
}

/// The singularity profile of `k`, if it is one the engine covers.
pub fn profile_of(k: &Complex3) -> Option<Profile> {
    let sing = k.singular_vertices();
    let b1 = |i: usize| sing[i].1.first_betti_mod2 as usize;
    match sing.len() {
        0 => Some(Profile::Sphere),
        1 if b1(0) % 2 == 0 => Some(Profile::OneSingularity { handles: b1(0) / 2 }),
        2 if !sing[0].1.is_orientable() && b1(1) == 1 && b1(0) % 2 == 1 => {
            Some(Profile::TwoSingularities { m: b1(0).div_ceil(2) })
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Refuse inputs outside the profiles or above their g2 bound.
    Strict,
    /// Run on anything; may end in [`ReductionError::NonReducible`].
    BestEffort,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub reason: String,
    pub g2: i64,
    pub f_vector: [usize; 5],
    pub singular: Vec<VertexId>,
    pub missing: Vec<MissingTetraReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, ThisError)]
pub enum ReductionError {
    #[error("outside the covered singularity profiles")]
    OutOfScope,
    #[error("g2 = {g2} exceeds the bound {bound} for {profile:?}")]
    AboveBound { profile: Profile, g2: i64, bound: i64 },
    #[error("no reduction applies: {}", .0.reason)]
    NonReducible(Box<Obstruction>),
    #[error(transparent)]
    Internal(#[from] Error),
}

pub fn decompose(k: &Complex3, mode: Mode) -> std::result::Result<Certificate, ReductionError> {
    if let Some(reason) = k.validate_normal().first_failure() {
        return Err(Error::InvalidResult { op: "decompose", reason }.into());
    }
    if mode == Mode::Strict {
        let profile = profile_of(k).ok_or(ReductionError::OutOfScope)?;
        if k.g2() > profile.g2_bound() {
            return Err(ReductionError::AboveBound {
                profile,
                g2: k.g2(),
                bound: profile.g2_bound(),
            });
        }
    }
    Ok(Certificate::new(reduce(k)?))
}

fn reduce(k: &Complex3) -> std::result::Result<Node, ReductionError> {
    let (low, records) = greedy_descend(k);
    let inner = reduce_fixed_point(&low)?;
    if records.is_empty() {
        return Ok(inner);
    }
    // replay direction: undo the descent from its last move back to `k`
    let mut forward = Vec::new();
    let mut before = k.clone();
    let mut undo: Vec<Vec<crate::moves::Move>> = Vec::new();
    for rec in &records {
        undo.push(rec.mv.inverse(&before)?);
        before = rec.mv.apply(&before)?.0;
    }
    let mut cur = low;
    for group in undo.into_iter().rev() {
        for mv in group {
            let (next, rec) = mv.apply(&cur)?;
            forward.push(rec);
            cur = next;
        }
    }
    if cur != *k {
        return Err(Error::Certificate("undoing the descent does not restore the input".into()).into());
    }
    Ok(node(Op::Moves { moves: forward }, k, vec![inner]))
}

fn is_leaf(k: &Complex3) -> bool {
    k.f_vector().as_array() == [1, 5, 10, 10, 5]
        && is_isomorphic(k, &Complex3::boundary_4_simplex([0, 1, 2, 3, 4]).expect("valid")).is_some()
}

fn reduce_fixed_point(k: &Complex3) -> std::result::Result<Node, ReductionError> {
    if is_leaf(k) {
        let v = k.vertices();
        return Ok(node(Op::Leaf { labels: [v[0], v[1], v[2], v[3], v[4]] }, k, vec![]));
    }
    let reports = analyze_missing(k)?;
    let tier = |tags: &[TypeTag]| -> Vec<&MissingTetraReport> {
        reports.iter().filter(|r| tags.contains(&r.type_tag)).collect()
    };
    let mut attempts = Vec::new();

    for r in tier(&[TypeTag::T1NoSingular, TypeTag::T2SepDisc]) {
        match split_connected_sum(k, r.tetra) {
            Ok(Split::Sum { left, right, psi }) => {
                let children = vec![reduce(&left)?, reduce(&right)?];
                return Ok(node(Op::Sum { psi }, k, children));
            }
            Ok(Split::Handle(_)) => attempts.push(format!("{:?}: cut leaves the complex connected (handle)", r.tetra)),
            Err(e) => attempts.push(format!("{:?}: {e}", r.tetra)),
        }
    }
    for r in tier(&[TypeTag::T4VertexFoldPattern]) {
        match vertex_unfolding(k, r.tetra, r.fold_at[0]) {
            Ok((unfolded, psi)) => return Ok(node(Op::VertexFold { psi }, k, vec![reduce(&unfolded)?])),
            Err(e) => attempts.push(format!("{:?}: {e}", r.tetra)),
        }
    }
    for r in tier(&[TypeTag::T3Unfoldable]) {
        match edge_unfolding(k, r.tetra, r.fold_at[0], r.fold_at[1]) {
            Ok((unfolded, psi)) => return Ok(node(Op::EdgeFold { psi }, k, vec![reduce(&unfolded)?])),
            Err(e) => attempts.push(format!("{:?}: {e}", r.tetra)),
        }
    }
    for r in tier(&[TypeTag::T5SepNoDisc]) {
        match split_connected_sum(k, r.tetra) {
            Ok(Split::Sum { left, right, psi }) => {
                let children = vec![reduce(&left)?, reduce(&right)?];
                return Ok(node(Op::Sum { psi }, k, children));
            }
            Ok(Split::Handle(_)) => attempts.push(format!("{:?}: cut leaves the complex connected (handle)", r.tetra)),
            Err(e) => attempts.push(format!("{:?}: {e}", r.tetra)),
        }
    }
    let reason = if reports.is_empty() {
        "fixed point of the descent with no missing tetrahedron".to_string()
    } else {
        format!("no missing tetrahedron could be cut: {}", attempts.join("; "))
    };
    Err(ReductionError::NonReducible(Box::new(Obstruction {
        reason,
        g2: k.g2(),
        f_vector: k.f_vector().as_array(),
        singular: k.singular_vertices().into_iter().map(|(v, _)| v).collect(),
        missing: reports,
    })))
}

fn ledger_error(node: &Node, what: String) -> Error {
    Error::Certificate(format!("{} node: {what}", op_name(&node.op)))
}

fn op_name(op: &Op) -> &'static str {
    match op {
        Op::Leaf { .. } => "leaf",
        Op::Moves { .. } => "moves",
        Op::Sum { .. } => "sum",
        Op::Handle { .. } => "handle",
        Op::VertexFold { .. } => "vertex_fold",
        Op::EdgeFold { .. } => "edge_fold",
    }
}

/// Rebuilds the complex from the leaves up, checking every node's ledger.
pub fn replay(cert: &Certificate) -> Result<Complex3> {
    replay_node(&cert.root)
}

fn replay_node(n: &Node) -> Result<Complex3> {
    let kids: Vec<Complex3> = n.children.iter().map(replay_node).collect::<Result<_>>()?;
    let arity = match n.op {
        Op::Leaf { .. } => 0,
        Op::Sum { .. } => 2,
        _ => 1,
    };
    if kids.len() != arity {
        return Err(ledger_error(n, format!("expected {arity} children, found {}", kids.len())));
    }
    let before: i64 = kids.iter().map(Complex3::g2).sum();
    if before != n.g2_before {
        return Err(ledger_error(n, format!("g2_before {} but children give {before}", n.g2_before)));
    }
    let out = match &n.op {
        Op::Leaf { labels } => Complex3::boundary_4_simplex(*labels)?,
        Op::Moves { moves } => {
            let mut cur = kids[0].clone();
            for m in moves {
                let (next, rec) = m.mv.apply(&cur)?;
                if rec.g2_delta != m.g2_delta {
                    return Err(ledger_error(n, format!("{} changed g2 by {}, recorded {}", m.mv.name(), rec.g2_delta, m.g2_delta)));
                }
                cur = next;
            }
            cur
        }
        Op::Sum { psi } => connected_sum(&kids[0], &kids[1], psi)?,
        Op::Handle { psi } => handle_addition(&kids[0], psi)?,
        Op::VertexFold { psi } => vertex_folding(&kids[0], psi)?,
        Op::EdgeFold { psi } => edge_folding(&kids[0], psi)?,
    };
    if out.g2() != n.g2_after || out.f_vector().as_array() != n.f_vector {
        return Err(ledger_error(
            n,
            format!(
                "recorded g2 {} and f {:?}, replay gives {} and {:?}",
                n.g2_after,
                n.f_vector,
                out.g2(),
                out.f_vector().as_array()
            ),
        ));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub valid: bool,
    pub isomorphic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    pub vertex_folds: usize,
    pub edge_folds: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub problems: Vec<String>,
}

pub fn verify_certificate_report(k: &Complex3, cert: &Certificate) -> Verification {
    let mut problems = Vec::new();
    let mut summary = Summary::default();
    tally(&cert.root, &mut summary);
    let isomorphic = match replay(cert) {
        Ok(built) => {
            let iso = is_isomorphic(&built, k).is_some();
            if !iso {
                problems.push("replayed complex is not isomorphic to the input".to_string());
            }
            iso
        }
        Err(e) => {
            problems.push(format!("replay failed: {e}"));
            false
        }
    };
    let profile = profile_of(k);
    if let Some(p) = profile {
        if summary.vertex_folds != p.vertex_folds() {
            problems.push(format!(
                "{} vertex folds, but a link with {} handles needs exactly that many",
                summary.vertex_folds,
                p.vertex_folds()
            ));
        }
        if summary.edge_folds != p.edge_folds() {
            problems.push(format!(
                "{} edge folds, expected {}",
                summary.edge_folds,
                p.edge_folds()
            ));
        }
    }
    Verification {
        valid: problems.is_empty(),
        isomorphic,
        profile,
        vertex_folds: summary.vertex_folds,
        edge_folds: summary.edge_folds,
        problems,
    }
}

pub fn verify_certificate(k: &Complex3, cert: &Certificate) -> bool {
    verify_certificate_report(k, cert).valid
}
