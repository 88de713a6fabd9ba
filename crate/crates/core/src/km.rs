//! Knowledge maps: knowledge units joined by typed semantic edges.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitId(pub String);

impl UnitId {
    pub fn new(id: impl Into<String>) -> Self {
        UnitId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UnitId {
    fn from(s: &str) -> Self {
        UnitId(s.to_string())
    }
}

/// Canonical semantic relation kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    Attribute,
    Association,
    PartOf,
    KindOf,
    Cause,
    Result,
    Definition,
    SimilarTo,
}

impl RelationKind {
    pub const ALL: [RelationKind; 8] = [
        RelationKind::Attribute,
        RelationKind::Association,
        RelationKind::PartOf,
        RelationKind::KindOf,
        RelationKind::Cause,
        RelationKind::Result,
        RelationKind::Definition,
        RelationKind::SimilarTo,
    ];

    /// Surface labels that normalize to this kind. The first entry is the
    /// label written by the serializer.
    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            RelationKind::Attribute => &["an attribute"],
            RelationKind::Association => &["an association"],
            RelationKind::PartOf => &["a part of", "a part"],
            RelationKind::KindOf => &["a kind of", "a type of"],
            RelationKind::Cause => &["an initial cause"],
            RelationKind::Result => &["a result"],
            RelationKind::Definition => &["a definition"],
            RelationKind::SimilarTo => &["similar to"],
        }
    }

    pub fn label(self) -> &'static str {
        self.aliases()[0]
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Attribute => "Attribute",
            RelationKind::Association => "Association",
            RelationKind::PartOf => "PartOf",
            RelationKind::KindOf => "KindOf",
            RelationKind::Cause => "Cause",
            RelationKind::Result => "Result",
            RelationKind::Definition => "Definition",
            RelationKind::SimilarTo => "SimilarTo",
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Lowercases and collapses runs of whitespace into single spaces.
pub fn normalize_phrase(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown relation label `{0}`")]
pub struct UnknownRelation(pub String);

/// Maps a surface label (or a canonical kind name) to its relation kind.
pub fn normalize_relation(label: &str) -> Result<RelationKind, UnknownRelation> {
    let norm = normalize_phrase(label);
    RelationKind::ALL
        .into_iter()
        .find(|kind| {
            kind.aliases().iter().any(|a| *a == norm) || kind.name().to_lowercase() == norm
        })
        .ok_or_else(|| UnknownRelation(label.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeUnit {
    pub id: UnitId,
    pub name: String,
    #[serde(default)]
    pub content: String,
    pub core_term: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SemanticEdge {
    pub head: UnitId,
    pub relation: RelationKind,
    pub tail: UnitId,
}

impl SemanticEdge {
    pub fn new(head: impl Into<UnitId>, relation: RelationKind, tail: impl Into<UnitId>) -> Self {
        SemanticEdge {
            head: head.into(),
            relation,
            tail: tail.into(),
        }
    }

    /// The endpoint opposite `unit`, if `unit` is one of the endpoints.
    pub fn other(&self, unit: &UnitId) -> Option<&UnitId> {
        if &self.head == unit {
            Some(&self.tail)
        } else if &self.tail == unit {
            Some(&self.head)
        } else {
            None
        }
    }
}

impl From<String> for UnitId {
    fn from(s: String) -> Self {
        UnitId(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

/// On-disk shape of a knowledge map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KmDocument {
    pub course_id: String,
    #[serde(default)]
    pub units: Vec<KnowledgeUnit>,
    #[serde(default)]
    pub edges: Vec<EdgeDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateUnitId(UnitId),
    EmptyUnitName(UnitId),
    EmptyUnitId,
    UnknownRelation { edge: usize, label: String },
    DanglingEndpoint { edge: usize, unit: String },
    SelfLoop { edge: usize, unit: String },
    DuplicateEdge { edge: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateUnitId(id) => write!(f, "duplicate unit id `{id}`"),
            Violation::EmptyUnitName(id) => write!(f, "unit `{id}` has an empty name"),
            Violation::EmptyUnitId => write!(f, "unit with empty id"),
            Violation::UnknownRelation { edge, label } => {
                write!(f, "edge #{edge}: unknown relation label `{label}`")
            }
            Violation::DanglingEndpoint { edge, unit } => {
                write!(f, "edge #{edge}: endpoint `{unit}` is not a unit of the map")
            }
            Violation::SelfLoop { edge, unit } => write!(f, "edge #{edge}: self-loop on `{unit}`"),
            Violation::DuplicateEdge { edge } => write!(f, "edge #{edge}: duplicate triple"),
        }
    }
}

#[derive(Debug, Error)]
pub enum KmError {
    #[error("malformed knowledge map document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("reading knowledge map: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid knowledge map ({} violation(s)): {}", .0.len(), join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("no knowledge unit has core term `{0}`")]
    NotFound(String),
    #[error("core item `{item}` matches several units: {}", join_ids(.units))]
    Ambiguous { item: String, units: Vec<UnitId> },
    #[error("unknown unit `{0}`")]
    UnknownUnit(UnitId),
    #[error(transparent)]
    UnknownRelation(#[from] UnknownRelation),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn join_ids(ids: &[UnitId]) -> String {
    ids.iter().map(UnitId::as_str).collect::<Vec<_>>().join(", ")
}

/// A course knowledge map. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeMap {
    course_id: String,
    units: BTreeMap<UnitId, KnowledgeUnit>,
    edges: BTreeSet<SemanticEdge>,
    outgoing: BTreeMap<UnitId, Vec<SemanticEdge>>,
    incoming: BTreeMap<UnitId, Vec<SemanticEdge>>,
}

impl KnowledgeMap {
    /// Builds a map, rejecting anything that breaks the map invariants.
    pub fn new(
        course_id: impl Into<String>,
        units: impl IntoIterator<Item = KnowledgeUnit>,
        edges: impl IntoIterator<Item = SemanticEdge>,
    ) -> Result<Self, KmError> {
        let mut violations = Vec::new();
        let mut unit_map = BTreeMap::new();
        for unit in units {
            check_unit(&unit, &mut violations);
            if unit_map.contains_key(&unit.id) {
                violations.push(Violation::DuplicateUnitId(unit.id.clone()));
            } else {
                unit_map.insert(unit.id.clone(), unit);
            }
        }
        let mut edge_set = BTreeSet::new();
        for (idx, edge) in edges.into_iter().enumerate() {
            if check_endpoints(idx, &edge.head, &edge.tail, &unit_map, &mut violations)
                && !edge_set.insert(edge)
            {
                violations.push(Violation::DuplicateEdge { edge: idx });
            }
        }
        if !violations.is_empty() {
            return Err(KmError::Validation(violations));
        }
        Ok(Self::assemble(course_id.into(), unit_map, edge_set))
    }

    fn assemble(
        course_id: String,
        units: BTreeMap<UnitId, KnowledgeUnit>,
        edges: BTreeSet<SemanticEdge>,
    ) -> Self {
        let mut outgoing: BTreeMap<UnitId, Vec<SemanticEdge>> = BTreeMap::new();
        let mut incoming: BTreeMap<UnitId, Vec<SemanticEdge>> = BTreeMap::new();
        for edge in &edges {
            outgoing.entry(edge.head.clone()).or_default().push(edge.clone());
            incoming.entry(edge.tail.clone()).or_default().push(edge.clone());
        }
        KnowledgeMap {
            course_id,
            units,
            edges,
            outgoing,
            incoming,
        }
    }

    pub fn from_document(doc: KmDocument) -> Result<Self, KmError> {
        let violations = validate_document(&doc);
        if !violations.is_empty() {
            return Err(KmError::Validation(violations));
        }
        let edges = doc
            .edges
            .iter()
            .map(|e| {
                SemanticEdge::new(
                    e.head.as_str(),
                    normalize_relation(&e.relation).expect("validated"),
                    e.tail.as_str(),
                )
            })
            .collect::<Vec<_>>();
        Self::new(doc.course_id, doc.units, edges)
    }

    pub fn to_document(&self) -> KmDocument {
        KmDocument {
            course_id: self.course_id.clone(),
            units: self.units.values().cloned().collect(),
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

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    pub fn course_id(&self) -> &str {
        &self.course_id
    }

    pub fn unit(&self, id: &UnitId) -> Option<&KnowledgeUnit> {
        self.units.get(id)
    }

    pub fn contains(&self, id: &UnitId) -> bool {
        self.units.contains_key(id)
    }

    pub fn units(&self) -> impl Iterator<Item = &KnowledgeUnit> {
        self.units.values()
    }

    pub fn unit_ids(&self) -> impl Iterator<Item = &UnitId> {
        self.units.keys()
    }

    pub fn edges(&self) -> impl Iterator<Item = &SemanticEdge> {
        self.edges.iter()
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn display_name(&self, id: &UnitId) -> String {
        self.unit(id).map_or_else(|| id.0.clone(), |u| u.name.clone())
    }

    /// Resolves a question's core item to its core knowledge unit.
    pub fn find_cku(&self, core_item: &str) -> Result<UnitId, KmError> {
        let wanted = normalize_phrase(core_item);
        if wanted.is_empty() {
            return Err(KmError::NotFound(core_item.to_string()));
        }
        let matches: Vec<UnitId> = self
            .units
            .values()
            .filter(|u| normalize_phrase(&u.core_term) == wanted)
            .map(|u| u.id.clone())
            .collect();
        match matches.len() {
            0 => Err(KmError::NotFound(core_item.to_string())),
            1 => Ok(matches.into_iter().next().unwrap()),
            _ => Err(KmError::Ambiguous {
                item: core_item.to_string(),
                units: matches,
            }),
        }
    }

    /// Edges touching `unit` in `direction` whose relation is in `kinds`.
    pub fn incident_edges<'a>(
        &'a self,
        unit: &UnitId,
        kinds: &'a [RelationKind],
        direction: Direction,
    ) -> Result<impl Iterator<Item = &'a SemanticEdge> + 'a, KmError> {
        if !self.contains(unit) {
            return Err(KmError::UnknownUnit(unit.clone()));
        }
        let out = match direction {
            Direction::Out | Direction::Both => self.outgoing.get(unit).map(Vec::as_slice),
            Direction::In => None,
        };
        let inc = match direction {
            Direction::In | Direction::Both => self.incoming.get(unit).map(Vec::as_slice),
            Direction::Out => None,
        };
        Ok(out
            .unwrap_or_default()
            .iter()
            .chain(inc.unwrap_or_default())
            .filter(move |e| kinds.contains(&e.relation)))
    }

    pub fn neighbors(
        &self,
        unit: &UnitId,
        kinds: &[RelationKind],
        direction: Direction,
    ) -> Result<BTreeSet<UnitId>, KmError> {
        Ok(self
            .incident_edges(unit, kinds, direction)?
            .filter_map(|e| e.other(unit).cloned())
            .collect())
    }
}

fn check_unit(unit: &KnowledgeUnit, violations: &mut Vec<Violation>) {
    if unit.id.0.trim().is_empty() {
        violations.push(Violation::EmptyUnitId);
    }
    if unit.name.trim().is_empty() {
        violations.push(Violation::EmptyUnitName(unit.id.clone()));
    }
}

fn check_endpoints<T>(
    idx: usize,
    head: &UnitId,
    tail: &UnitId,
    units: &BTreeMap<UnitId, T>,
    violations: &mut Vec<Violation>,
) -> bool {
    let mut ok = true;
    for end in [head, tail] {
        if !units.contains_key(end) {
            violations.push(Violation::DanglingEndpoint {
                edge: idx,
                unit: end.0.clone(),
            });
            ok = false;
        }
    }
    if head == tail {
        violations.push(Violation::SelfLoop {
            edge: idx,
            unit: head.0.clone(),
        });
        ok = false;
    }
    ok
}

/// Collects every invariant violation in a document instead of stopping at
/// the first.
pub fn validate_document(doc: &KmDocument) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut ids: BTreeMap<UnitId, ()> = BTreeMap::new();
    for unit in &doc.units {
        check_unit(unit, &mut violations);
        if ids.insert(unit.id.clone(), ()).is_some() {
            violations.push(Violation::DuplicateUnitId(unit.id.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for (idx, edge) in doc.edges.iter().enumerate() {
        let head = UnitId::new(edge.head.as_str());
        let tail = UnitId::new(edge.tail.as_str());
        let endpoints_ok = check_endpoints(idx, &head, &tail, &ids, &mut violations);
        match normalize_relation(&edge.relation) {
            Ok(kind) => {
                if endpoints_ok && !seen.insert(SemanticEdge::new(head, kind, tail)) {
                    violations.push(Violation::DuplicateEdge { edge: idx });
                }
            }
            Err(_) => violations.push(Violation::UnknownRelation {
                edge: idx,
                label: edge.relation.clone(),
            }),
        }
    }
    violations
}

pub fn parse_document(reader: impl Read) -> Result<KmDocument, KmError> {
    Ok(serde_json::from_reader(reader)?)
}

/// Reads, validates and normalizes a knowledge map document.
pub fn load_km(reader: impl Read) -> Result<KnowledgeMap, KmError> {
    KnowledgeMap::from_document(parse_document(reader)?)
}

pub fn load_km_str(text: &str) -> Result<KnowledgeMap, KmError> {
    load_km(text.as_bytes())
}
