//! Cognition control measures: per-event submap coverage and threshold
//! based strategy recognition.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::km::{KnowledgeMap, UnitId};
use crate::rate::{to_decimal, Rate};
use crate::strategy::{StrategyKind, StrategyLabel};
use crate::submap::{comparison_triple, search_single, Submap, SubmapError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("submap `{0}` has no member units")]
    EmptySubmap(String),
    #[error("threshold {0} is not in (0, 1]")]
    InvalidThreshold(Rate),
}

/// A submap tracked as one coverage component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackedSubmap {
    /// Column name, e.g. `desc1`, `conn`, `bubble`.
    pub name: String,
    pub label: StrategyLabel,
    pub submap: Submap,
}

impl TrackedSubmap {
    pub fn new(km: &KnowledgeMap, name: impl Into<String>, submap: Submap) -> Self {
        let label = StrategyLabel::concrete(
            StrategyKind::for_map(submap.kind),
            submap.ckus.iter().map(|c| km.display_name(c)).collect(),
        );
        TrackedSubmap {
            name: name.into(),
            label,
            submap,
        }
    }
}

/// The candidate submaps of one question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubmapSet {
    /// `[desc(cku1), conn, desc(cku2)]`.
    Comparison(Box<[TrackedSubmap; 3]>),
    /// Bubble, Circle, Multi-Flow, Tree and Brace maps of one unit.
    Single(Vec<TrackedSubmap>),
}

impl SubmapSet {
    pub fn comparison(km: &KnowledgeMap, cku1: &UnitId, cku2: &UnitId) -> Result<Self, SubmapError> {
        let (d1, conn, d2) = comparison_triple(km, cku1, cku2)?;
        Ok(SubmapSet::Comparison(Box::new([
            TrackedSubmap::new(km, "desc1", d1),
            TrackedSubmap::new(km, "conn", conn),
            TrackedSubmap::new(km, "desc2", d2),
        ])))
    }

    pub fn single(km: &KnowledgeMap, cku: &UnitId, k_depth: usize) -> Result<Self, SubmapError> {
        let maps = search_single(km, cku, k_depth)?;
        Ok(SubmapSet::Single(
            maps.into_iter().map(|m| TrackedSubmap::new(km, m.kind.name(), m)).collect(),
        ))
    }

    pub fn members(&self) -> &[TrackedSubmap] {
        match self {
            SubmapSet::Comparison(triple) => triple.as_slice(),
            SubmapSet::Single(maps) => maps,
        }
    }
}

/// Coverage rates of the tracked submaps at one moment, in component order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ccm(pub Vec<Rate>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CognitionControlSequence {
    pub components: Vec<String>,
    pub labels: Vec<StrategyLabel>,
    /// One vector per visit of the activity sequence.
    pub ccms: Vec<Ccm>,
}

impl CognitionControlSequence {
    pub fn len(&self) -> usize {
        self.ccms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ccms.is_empty()
    }

    pub fn last(&self) -> Option<&Ccm> {
        self.ccms.last()
    }

    /// Coverage curves as CSV: `event_index` (1-based) then one column per
    /// component, six fractional digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("event_index");
        for c in &self.components {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (i, ccm) in self.ccms.iter().enumerate() {
            let _ = write!(out, "{}", i + 1);
            for v in &ccm.0 {
                let _ = write!(out, ",{}", to_decimal(*v, 6));
            }
            out.push('\n');
        }
        out
    }
}

/// Fraction of a submap's member units present in `visited`.
pub fn coverage(submap: &Submap, visited: &BTreeSet<UnitId>) -> Result<Rate, MetricsError> {
    if submap.is_empty() {
        return Err(MetricsError::EmptySubmap(format!("{}({})", submap.kind, join(&submap.ckus))));
    }
    let hit = submap.unit_ids.iter().filter(|u| visited.contains(*u)).count();
    Ok(Rate::new(hit as u64, submap.len() as u64))
}

fn join(ids: &[UnitId]) -> String {
    ids.iter().map(UnitId::as_str).collect::<Vec<_>>().join(", ")
}

/// Drops empty submaps and, for single-unit questions, submaps none of
/// the given learners ever visited. The comparison triple keeps its
/// unvisited members: a zero there is a stage not yet reached.
pub fn prune_irrelevant<'a>(
    set: &SubmapSet,
    sequences: impl IntoIterator<Item = &'a [UnitId]>,
) -> Vec<TrackedSubmap> {
    match set {
        SubmapSet::Comparison(triple) => triple.iter().filter(|t| !t.submap.is_empty()).cloned().collect(),
        SubmapSet::Single(maps) => {
            let visited: BTreeSet<&UnitId> = sequences.into_iter().flatten().collect();
            maps.iter()
                .filter(|t| !t.submap.is_empty() && t.submap.unit_ids.iter().any(|u| visited.contains(u)))
                .cloned()
                .collect()
        }
    }
}

/// Coverage vector after each visit, counting distinct units cumulatively.
/// A visit counts toward every tracked submap containing the unit.
pub fn ccm_sequence(visits: &[UnitId], submaps: &[TrackedSubmap]) -> Result<CognitionControlSequence, MetricsError> {
    if let Some(empty) = submaps.iter().find(|t| t.submap.is_empty()) {
        return Err(MetricsError::EmptySubmap(empty.name.clone()));
    }
    let mut seen = BTreeSet::new();
    let mut hits = vec![0u64; submaps.len()];
    let mut ccms = Vec::with_capacity(visits.len());
    for unit in visits {
        if seen.insert(unit) {
            for (h, t) in hits.iter_mut().zip(submaps) {
                if t.submap.contains(unit) {
                    *h += 1;
                }
            }
        }
        ccms.push(Ccm(hits
            .iter()
            .zip(submaps)
            .map(|(h, t)| Rate::new(*h, t.submap.len() as u64))
            .collect()));
    }
    Ok(CognitionControlSequence {
        components: submaps.iter().map(|t| t.name.clone()).collect(),
        labels: submaps.iter().map(|t| t.label.clone()).collect(),
        ccms,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CognitiveStrategyInstance {
    pub label: StrategyLabel,
    /// Position of the submap in the component order.
    pub component: usize,
    pub component_name: String,
    /// 1-based event index at which coverage first reached the threshold.
    pub crossing_index: usize,
    pub final_coverage: Rate,
}

/// One instance per component whose coverage reaches `threshold`, ordered
/// by crossing event and then by component position.
pub fn recognize_strategies(
    s_cog: &CognitionControlSequence,
    threshold: Rate,
) -> Result<Vec<CognitiveStrategyInstance>, MetricsError> {
    if *threshold.numer() == 0 || threshold > Rate::from_integer(1) {
        return Err(MetricsError::InvalidThreshold(threshold));
    }
    let Some(last) = s_cog.last() else {
        return Ok(Vec::new());
    };
    let mut out: Vec<CognitiveStrategyInstance> = (0..s_cog.components.len())
        .filter_map(|j| {
            let at = s_cog.ccms.iter().position(|c| c.0[j] >= threshold)?;
            Some(CognitiveStrategyInstance {
                label: s_cog.labels[j].clone(),
                component: j,
                component_name: s_cog.components[j].clone(),
                crossing_index: at + 1,
                final_coverage: last.0[j],
            })
        })
        .collect();
    out.sort_by_key(|i| (i.crossing_index, i.component));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::km::{KnowledgeUnit, RelationKind, SemanticEdge};
    use crate::submap::ThinkingMapKind;

    fn comparison() -> (KnowledgeMap, SubmapSet) {
        let km = fixtures::c_course_map();
        let a = km.find_cku("array").unwrap();
        let p = km.find_cku("pointer").unwrap();
        let set = SubmapSet::comparison(&km, &a, &p).unwrap();
        (km, set)
    }

    fn ids(xs: &[&str]) -> Vec<UnitId> {
        xs.iter().map(|x| UnitId::new(*x)).collect()
    }

    #[test]
    fn coverage_examples() {
        let (_, set) = comparison();
        let desc1 = &set.members()[0].submap;
        let half: BTreeSet<UnitId> = ids(&["array-definition", "array-type", "2d-array"]).into_iter().collect();
        assert_eq!(coverage(desc1, &half).unwrap(), Rate::new(1, 2));
        assert_eq!(coverage(desc1, &BTreeSet::new()).unwrap(), Rate::from_integer(0));
        let mut all: BTreeSet<UnitId> = desc1.unit_ids.clone();
        all.insert(UnitId::new("pointer"));
        assert_eq!(coverage(desc1, &all).unwrap(), Rate::from_integer(1));
    }

    #[test]
    fn empty_submap_has_no_coverage() {
        let empty = Submap {
            kind: ThinkingMapKind::Circle,
            ckus: ids(&["x"]),
            unit_ids: BTreeSet::new(),
            edges: BTreeSet::new(),
        };
        assert!(matches!(coverage(&empty, &BTreeSet::new()), Err(MetricsError::EmptySubmap(_))));
    }

    #[test]
    fn fixture_trace_final_ccm() {
        let (_, set) = comparison();
        let s = ccm_sequence(&fixtures::comparison_trace(), set.members()).unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(
            s.last().unwrap().0,
            vec![Rate::new(1, 2), Rate::new(3, 5), Rate::from_integer(0)]
        );
    }

    #[test]
    fn visits_outside_every_submap_leave_coverage_flat() {
        let (_, set) = comparison();
        let s = ccm_sequence(&ids(&["array-index", "function", "array-type"]), set.members()).unwrap();
        let first: Vec<Rate> = s.ccms.iter().map(|c| c.0[0]).collect();
        assert_eq!(first, vec![Rate::new(1, 6), Rate::new(1, 6), Rate::new(2, 6)]);
        assert!(ccm_sequence(&[], set.members()).unwrap().is_empty());
    }

    #[test]
    fn repeat_visits_do_not_add_coverage() {
        let (_, set) = comparison();
        let s = ccm_sequence(&ids(&["array-type", "array", "array-type"]), set.members()).unwrap();
        assert_eq!(s.last().unwrap().0[0], Rate::new(1, 6));
    }

    #[test]
    fn curve_csv_layout() {
        let (_, set) = comparison();
        let s = ccm_sequence(&ids(&["array-type", "pointer-array"]), set.members()).unwrap();
        assert_eq!(
            s.to_csv(),
            "event_index,desc1,conn,desc2\n1,0.166667,0.000000,0.000000\n2,0.166667,0.200000,0.000000\n"
        );
    }

    #[test]
    fn comparison_triple_survives_pruning_at_zero() {
        let (_, set) = comparison();
        let trace = fixtures::comparison_trace();
        let kept = prune_irrelevant(&set, [trace.as_slice()]);
        assert_eq!(kept.len(), 3);
        assert_eq!(kept[2].name, "desc2");
    }

    #[test]
    fn unvisited_single_submaps_are_pruned() {
        let km = fixtures::c_course_map();
        let a = km.find_cku("array").unwrap();
        let set = SubmapSet::single(&km, &a, 2).unwrap();
        let trace = ids(&["array-type", "string"]);
        let kept = prune_irrelevant(&set, [trace.as_slice()]);
        let names: Vec<&str> = kept.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, vec!["bubble", "tree"]);
    }

    #[test]
    fn a_unit_in_two_single_submaps_counts_for_both() {
        let km = KnowledgeMap::new(
            "t",
            ["x", "u"].iter().map(|id| KnowledgeUnit {
                id: UnitId::new(*id),
                name: id.to_string(),
                content: String::new(),
                core_term: id.to_string(),
            }),
            vec![
                SemanticEdge::new("x", RelationKind::Attribute, "u"),
                SemanticEdge::new("x", RelationKind::Association, "u"),
            ],
        )
        .unwrap();
        let set = SubmapSet::single(&km, &UnitId::new("x"), 1).unwrap();
        let kept = prune_irrelevant(&set, [ids(&["u"]).as_slice()]);
        assert_eq!(kept.len(), 2);
        let s = ccm_sequence(&ids(&["u"]), &kept).unwrap();
        assert_eq!(s.last().unwrap().0, vec![Rate::from_integer(1); 2]);
    }

    fn sequence(rows: &[[(u64, u64); 3]]) -> CognitionControlSequence {
        let (_, set) = comparison();
        CognitionControlSequence {
            components: vec!["desc1".into(), "conn".into(), "desc2".into()],
            labels: set.members().iter().map(|t| t.label.clone()).collect(),
            ccms: rows
                .iter()
                .map(|r| Ccm(r.iter().map(|(n, d)| Rate::new(*n, *d)).collect()))
                .collect(),
        }
    }

    #[test]
    fn recognition_orders_by_crossing() {
        let s = sequence(&[
            [(3, 6), (0, 1), (0, 1)],
            [(4, 6), (0, 1), (0, 1)],
            [(4, 6), (3, 5), (0, 1)],
            [(1, 1), (1, 1), (3, 5)],
        ]);
        let found = recognize_strategies(&s, Rate::new(3, 5)).unwrap();
        let order: Vec<String> = found.iter().map(|i| i.label.to_string()).collect();
        assert_eq!(order, vec!["Description(Array)", "Comparison(Array, Pointer)", "Description(Pointer)"]);
        assert_eq!(found.iter().map(|i| i.crossing_index).collect::<Vec<_>>(), vec![2, 3, 4]);
        assert_eq!(found[0].final_coverage, Rate::from_integer(1));
    }

    #[test]
    fn recognition_ties_follow_component_order() {
        let s = sequence(&[[(0, 1), (0, 1), (0, 1)], [(4, 6), (4, 5), (0, 1)]]);
        let found = recognize_strategies(&s, Rate::new(3, 5)).unwrap();
        assert_eq!(found.len(), 2);
        assert_eq!(found[0].component_name, "desc1");
        assert_eq!(found[1].component_name, "conn");
    }

    #[test]
    fn nothing_crosses() {
        let s = sequence(&[[(1, 6), (1, 5), (1, 5)]]);
        assert!(recognize_strategies(&s, Rate::new(3, 5)).unwrap().is_empty());
        assert!(matches!(
            recognize_strategies(&s, Rate::from_integer(0)),
            Err(MetricsError::InvalidThreshold(_))
        ));
        assert!(matches!(
            recognize_strategies(&s, Rate::new(11, 10)),
            Err(MetricsError::InvalidThreshold(_))
        ));
    }
}
