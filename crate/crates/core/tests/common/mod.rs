#![allow(dead_code)]

use proptest::prelude::*;
use stratmap::{KnowledgeMap, KnowledgeUnit, RelationKind, SemanticEdge, UnitId};

pub fn unit(id: &str) -> KnowledgeUnit {
    KnowledgeUnit {
        id: UnitId::new(id),
        name: format!("Unit {id}"),
        content: String::new(),
        core_term: format!("unit {id}"),
    }
}

pub fn build_km(n: usize, edges: &[(usize, usize, usize)]) -> KnowledgeMap {
    let mut seen = std::collections::BTreeSet::new();
    let edges: Vec<SemanticEdge> = edges
        .iter()
        .filter(|(h, t, _)| h != t)
        .filter(|e| seen.insert(**e))
        .map(|&(h, t, r)| SemanticEdge::new(format!("n{h}").as_str(), RelationKind::ALL[r], format!("n{t}").as_str()))
        .collect();
    KnowledgeMap::new("random", (0..n).map(|i| unit(&format!("n{i}"))), edges).expect("generated map is valid")
}

/// Random valid maps with up to `max_units` units.
pub fn arb_km(max_units: usize) -> impl Strategy<Value = KnowledgeMap> {
    (2..=max_units).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 0..RelationKind::ALL.len()), 0..n * 3)
            .prop_map(move |edges| build_km(n, &edges))
    })
}
