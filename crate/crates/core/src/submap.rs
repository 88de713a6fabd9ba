//! Thinking-map shaped submaps anchored at core knowledge units.
//!
//! Single-unit searches yield one submap per supported thinking map: the
//! one-hop Bubble (attributes), Circle (associations) and Multi-Flow
//! (causes and results) maps, and the breadth-first Tree (kinds) and Brace
//! (parts) maps grown up to `k_depth` hops. Two core units yield the
//! connective submap: their shared one-hop neighbours plus those
//! neighbours' own one-hop neighbourhoods.
//!
//! Adjacency never looks at edge direction.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::km::{Direction, EdgeDocument, KmError, KnowledgeMap, KnowledgeUnit, RelationKind, SemanticEdge, UnitId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ThinkingMapKind {
    Bubble,
    Circle,
    MultiFlow,
    Tree,
    Brace,
    Connective,
}

impl ThinkingMapKind {
    /// Single-unit kinds in the order [`search_single`] returns them.
    pub const SINGLE: [ThinkingMapKind; 5] = [
        ThinkingMapKind::Bubble,
        ThinkingMapKind::Circle,
        ThinkingMapKind::MultiFlow,
        ThinkingMapKind::Tree,
        ThinkingMapKind::Brace,
    ];

    pub fn relation_kinds(self) -> &'static [RelationKind] {
        match self {
            ThinkingMapKind::Bubble => &[RelationKind::Attribute],
            ThinkingMapKind::Circle => &[RelationKind::Association],
            ThinkingMapKind::MultiFlow => &[RelationKind::Cause, RelationKind::Result],
            ThinkingMapKind::Tree => &[RelationKind::KindOf],
            ThinkingMapKind::Brace => &[RelationKind::PartOf],
            ThinkingMapKind::Connective => &RelationKind::ALL,
        }
    }

    /// Whether the search grows up to `k_depth` hops rather than one.
    pub fn is_deep(self) -> bool {
        matches!(self, ThinkingMapKind::Tree | ThinkingMapKind::Brace)
    }

    pub fn name(self) -> &'static str {
        match self {
            ThinkingMapKind::Bubble => "bubble",
            ThinkingMapKind::Circle => "circle",
            ThinkingMapKind::MultiFlow => "multiflow",
            ThinkingMapKind::Tree => "tree",
            ThinkingMapKind::Brace => "brace",
            ThinkingMapKind::Connective => "connective",
        }
    }
}

impl fmt::Display for ThinkingMapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum SubmapError {
    #[error(transparent)]
    Km(#[from] KmError),
    #[error("connective search needs two distinct core units, got `{0}` twice")]
    SameUnit(UnitId),
    #[error("k_depth must be at least 1")]
    ZeroDepth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submap {
    pub kind: ThinkingMapKind,
    pub ckus: Vec<UnitId>,
    /// Member units, never including the core units.
    pub unit_ids: BTreeSet<UnitId>,
    pub edges: BTreeSet<SemanticEdge>,
}

impl Submap {
    pub fn len(&self) -> usize {
        self.unit_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unit_ids.is_empty()
    }

    pub fn contains(&self, unit: &UnitId) -> bool {
        self.unit_ids.contains(unit)
    }

    /// Human-readable identity such as `bubble(Array)`.
    pub fn title(&self, km: &KnowledgeMap) -> String {
        let names: Vec<String> = self.ckus.iter().map(|c| km.display_name(c)).collect();
        format!("{}({})", self.kind, names.join(", "))
    }

    /// Checks the structural invariants, returning the first broken one.
    pub fn check_invariants(&self, km: &KnowledgeMap) -> Result<(), String> {
        let expected_ckus = if self.kind == ThinkingMapKind::Connective { 2 } else { 1 };
        if self.ckus.len() != expected_ckus {
            return Err(format!("{} submap with {} ckus", self.kind, self.ckus.len()));
        }
        if let Some(c) = self.ckus.iter().find(|c| self.unit_ids.contains(*c)) {
            return Err(format!("cku {c} listed as a member unit"));
        }
        for unit in &self.unit_ids {
            if !self.edges.iter().any(|e| &e.head == unit || &e.tail == unit) {
                return Err(format!("unit {unit} is not an endpoint of any submap edge"));
            }
        }
        if !self.kind.is_deep() && self.kind != ThinkingMapKind::Connective {
            let cku = &self.ckus[0];
            let adjacent = km
                .neighbors(cku, &RelationKind::ALL, Direction::Both)
                .map_err(|e| e.to_string())?;
            if let Some(u) = self.unit_ids.iter().find(|u| !adjacent.contains(*u)) {
                return Err(format!("unit {u} is not adjacent to cku {cku}"));
            }
        }
        Ok(())
    }

    pub fn to_document(&self, km: &KnowledgeMap) -> SubmapDocument {
        let units = self
            .ckus
            .iter()
            .chain(&self.unit_ids)
            .filter_map(|id| km.unit(id).cloned())
            .collect();
        SubmapDocument {
            course_id: km.course_id().to_string(),
            kind: self.kind,
            ckus: self.ckus.clone(),
            units,
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDocument {
                    head: e.head.0.clone(),
                    relation: e.relation.label().to_string(),
                    tail: e.tail.0.clone(),
                })
                .collect(),
        }
    }

    /// Graphviz rendering; core units are filled yellow.
    pub fn to_dot(&self, km: &KnowledgeMap, graph_name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph {} {{", dot_quote(graph_name));
        let _ = writeln!(out, "  label={};", dot_quote(&self.title(km)));
        out.push_str("  node [shape=ellipse];\n");
        for cku in &self.ckus {
            let _ = writeln!(
                out,
                "  {} [label={}, style=filled, fillcolor=yellow, shape=box];",
                dot_quote(cku.as_str()),
                dot_quote(&km.display_name(cku))
            );
        }
        for unit in &self.unit_ids {
            let _ = writeln!(
                out,
                "  {} [label={}];",
                dot_quote(unit.as_str()),
                dot_quote(&km.display_name(unit))
            );
        }
        for edge in &self.edges {
            let _ = writeln!(
                out,
                "  {} -> {} [label={}];",
                dot_quote(edge.head.as_str()),
                dot_quote(edge.tail.as_str()),
                dot_quote(edge.relation.label())
            );
        }
        out.push_str("}\n");
        out
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Knowledge-map document shape extended with the submap's kind and core
/// units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmapDocument {
    pub course_id: String,
    pub kind: ThinkingMapKind,
    pub ckus: Vec<UnitId>,
    pub units: Vec<KnowledgeUnit>,
    pub edges: Vec<EdgeDocument>,
}

fn induced_edges(
    km: &KnowledgeMap,
    members: &BTreeSet<UnitId>,
    anchors: &[UnitId],
    kinds: &[RelationKind],
) -> BTreeSet<SemanticEdge> {
    let inside = |u: &UnitId| members.contains(u) || anchors.contains(u);
    km.edges()
        .filter(|e| kinds.contains(&e.relation) && inside(&e.head) && inside(&e.tail))
        .cloned()
        .collect()
}

/// Breadth-first growth from `start` over `kinds`, at most `hops` steps.
fn grow(
    km: &KnowledgeMap,
    start: &UnitId,
    kinds: &[RelationKind],
    hops: usize,
) -> Result<BTreeSet<UnitId>, KmError> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut frontier = vec![start.clone()];
    for _ in 0..hops {
        let mut next = Vec::new();
        for unit in &frontier {
            for n in km.neighbors(unit, kinds, Direction::Both)? {
                if seen.insert(n.clone()) {
                    next.push(n);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen.remove(start);
    Ok(seen)
}

fn single(
    km: &KnowledgeMap,
    cku: &UnitId,
    kind: ThinkingMapKind,
    k_depth: usize,
) -> Result<Submap, KmError> {
    let hops = if kind.is_deep() { k_depth } else { 1 };
    let unit_ids = grow(km, cku, kind.relation_kinds(), hops)?;
    let anchors = [cku.clone()];
    let edges = induced_edges(km, &unit_ids, &anchors, kind.relation_kinds());
    Ok(Submap {
        kind,
        ckus: anchors.to_vec(),
        unit_ids,
        edges,
    })
}

/// One submap per single-unit thinking map, in [`ThinkingMapKind::SINGLE`]
/// order. Empty submaps are kept.
pub fn search_single(km: &KnowledgeMap, cku: &UnitId, k_depth: usize) -> Result<Vec<Submap>, SubmapError> {
    if k_depth == 0 {
        return Err(SubmapError::ZeroDepth);
    }
    if !km.contains(cku) {
        return Err(KmError::UnknownUnit(cku.clone()).into());
    }
    ThinkingMapKind::SINGLE
        .into_iter()
        .map(|kind| single(km, cku, kind, k_depth).map_err(SubmapError::from))
        .collect()
}

pub fn bubble(km: &KnowledgeMap, cku: &UnitId) -> Result<Submap, SubmapError> {
    if !km.contains(cku) {
        return Err(KmError::UnknownUnit(cku.clone()).into());
    }
    Ok(single(km, cku, ThinkingMapKind::Bubble, 1)?)
}

/// Shared one-hop neighbours of two core units, expanded by one more hop.
pub fn search_connective(km: &KnowledgeMap, cku1: &UnitId, cku2: &UnitId) -> Result<Submap, SubmapError> {
    for c in [cku1, cku2] {
        if !km.contains(c) {
            return Err(KmError::UnknownUnit(c.clone()).into());
        }
    }
    if cku1 == cku2 {
        return Err(SubmapError::SameUnit(cku1.clone()));
    }
    let all = &RelationKind::ALL;
    let first = km.neighbors(cku1, all, Direction::Both)?;
    let second = km.neighbors(cku2, all, Direction::Both)?;
    let shared: BTreeSet<UnitId> = first
        .intersection(&second)
        .filter(|u| *u != cku1 && *u != cku2)
        .cloned()
        .collect();
    let mut unit_ids = shared.clone();
    for u in &shared {
        unit_ids.extend(km.neighbors(u, all, Direction::Both)?);
    }
    unit_ids.remove(cku1);
    unit_ids.remove(cku2);
    let anchors = [cku1.clone(), cku2.clone()];
    let edges = induced_edges(km, &unit_ids, &anchors, all);
    Ok(Submap {
        kind: ThinkingMapKind::Connective,
        ckus: anchors.to_vec(),
        unit_ids,
        edges,
    })
}

/// The three regions of a comparison question: description of the first
/// unit, the connective region, and description of the second unit.
///
/// Units in the connective region are removed from both descriptions so
/// the three member sets are pairwise disjoint.
pub fn comparison_triple(
    km: &KnowledgeMap,
    cku1: &UnitId,
    cku2: &UnitId,
) -> Result<(Submap, Submap, Submap), SubmapError> {
    let conn = search_connective(km, cku1, cku2)?;
    let carve = |cku: &UnitId, other: &UnitId| -> Result<Submap, SubmapError> {
        let mut desc = bubble(km, cku)?;
        desc.unit_ids.retain(|u| !conn.contains(u) && u != other);
        let anchors = [cku.clone()];
        desc.edges = induced_edges(km, &desc.unit_ids, &anchors, ThinkingMapKind::Bubble.relation_kinds());
        Ok(desc)
    };
    let desc1 = carve(cku1, cku2)?;
    let desc2 = carve(cku2, cku1)?;
    Ok((desc1, conn, desc2))
}
