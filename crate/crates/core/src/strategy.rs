//! Strategy labels and their abstraction into metacognitive strategy
//! sequences.
//!
//! Two routes lead to an abstract sequence such as
//! `Description-Comparison-Description`:
//!
//! * per learner, from the order in which submap coverages cross the
//!   recognition threshold ([`abstract_learner`]);
//! * per mined pattern, from the order in which decoded coverage states
//!   increase ([`decode_and_label`]).

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{decode_ccm, CodecError, EncodedCcm};
use crate::metrics::CognitiveStrategyInstance;
use crate::submap::ThinkingMapKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    Description,
    Comparison,
    Classification,
    WholePart,
    CauseEffect,
    Context,
}

impl StrategyKind {
    pub fn for_map(kind: ThinkingMapKind) -> Self {
        match kind {
            ThinkingMapKind::Bubble => StrategyKind::Description,
            ThinkingMapKind::Connective => StrategyKind::Comparison,
            ThinkingMapKind::Tree => StrategyKind::Classification,
            ThinkingMapKind::Brace => StrategyKind::WholePart,
            ThinkingMapKind::MultiFlow => StrategyKind::CauseEffect,
            ThinkingMapKind::Circle => StrategyKind::Context,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Description => "Description",
            StrategyKind::Comparison => "Comparison",
            StrategyKind::Classification => "Classification",
            StrategyKind::WholePart => "WholePart",
            StrategyKind::CauseEffect => "CauseEffect",
            StrategyKind::Context => "Context",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A cognitive strategy, concrete when it names its core units.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StrategyLabel {
    pub kind: StrategyKind,
    pub ckus: Vec<String>,
}

impl StrategyLabel {
    pub fn concrete(kind: StrategyKind, ckus: Vec<String>) -> Self {
        StrategyLabel { kind, ckus }
    }

    pub fn is_abstract(&self) -> bool {
        self.ckus.is_empty()
    }
}

impl fmt::Display for StrategyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ckus.is_empty() {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "{}({})", self.kind, self.ckus.join(", "))
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MetacognitiveStrategySequence(pub Vec<StrategyKind>);

impl MetacognitiveStrategySequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Dash-joined name, e.g. `Description-Comparison-Description`.
    pub fn name(&self) -> String {
        self.0.iter().map(|k| k.name()).collect::<Vec<_>>().join("-")
    }
}

impl fmt::Display for MetacognitiveStrategySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Strips the core units from an ordered list of recognized strategies.
pub fn abstract_learner(instances: &[CognitiveStrategyInstance]) -> MetacognitiveStrategySequence {
    MetacognitiveStrategySequence(instances.iter().map(|i| i.label.kind).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbstractionError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("coverage of component {component} drops between pattern items {from} and {to}")]
    NonMonotonePattern { component: usize, from: EncodedCcm, to: EncodedCcm },
}

/// Decodes a mined pattern and labels the components whose state rises.
///
/// For each pair of consecutive codewords the components whose state
/// increased are visited in position order; a label is emitted whenever
/// the rising component differs from the one that rose last, so a run of
/// increases on one component yields a single label.
pub fn decode_and_label(
    pattern: &[EncodedCcm],
    labels: &[StrategyKind],
) -> Result<MetacognitiveStrategySequence, AbstractionError> {
    let arity = labels.len();
    let states = pattern
        .iter()
        .map(|code| decode_ccm(*code, arity))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    let mut last_rising: Option<usize> = None;
    for (idx, pair) in states.windows(2).enumerate() {
        let (before, after) = (&pair[0], &pair[1]);
        for j in 0..arity {
            if after.0[j] < before.0[j] {
                return Err(AbstractionError::NonMonotonePattern {
                    component: j,
                    from: pattern[idx],
                    to: pattern[idx + 1],
                });
            }
        }
        for (j, label) in labels.iter().enumerate() {
            if after.0[j] > before.0[j] && last_rising != Some(j) {
                out.push(*label);
                last_rising = Some(j);
            }
        }
    }
    Ok(MetacognitiveStrategySequence(out))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternShare {
    pub labels: MetacognitiveStrategySequence,
    pub count: usize,
}

/// Share of learners per complete metacognitive strategy sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternReport {
    pub total_learners: usize,
    /// Ordered by descending count, then by name.
    pub patterns: Vec<PatternShare>,
    pub unmatched_count: usize,
}

impl PatternReport {
    pub fn percentage(&self, count: usize) -> f64 {
        if self.total_learners == 0 {
            0.0
        } else {
            100.0 * count as f64 / self.total_learners as f64
        }
    }

    pub fn share_of(&self, name: &str) -> Option<&PatternShare> {
        self.patterns.iter().find(|p| p.labels.name() == name)
    }

    pub fn matched_count(&self) -> usize {
        self.patterns.iter().map(|p| p.count).sum()
    }

    /// Plain-text table: pattern, percentage, and the combined share on
    /// the middle row.
    pub fn render_table(&self) -> String {
        let width = self
            .patterns
            .iter()
            .map(|p| p.labels.name().len())
            .chain(["Metacognition Strategy Pattern".len()])
            .max()
            .unwrap_or(0);
        let rule = "=".repeat(width + 24);
        let mut out = String::new();
        let _ = writeln!(out, "{rule}");
        let _ = writeln!(out, "{:<width$}  {:>10}  {:>8}", "Metacognition Strategy Pattern", "Percentage", "Sum");
        let _ = writeln!(out, "{}", "-".repeat(width + 24));
        let sum = format!("{:.1}%", self.percentage(self.matched_count()));
        let mid = self.patterns.len().saturating_sub(1) / 2;
        for (i, p) in self.patterns.iter().enumerate() {
            let pct = format!("{:.1}%", self.percentage(p.count));
            let sum_cell = if i == mid { sum.as_str() } else { "" };
            let _ = writeln!(out, "{:<width$}  {:>10}  {:>8}", p.labels.name(), pct, sum_cell);
        }
        if self.patterns.is_empty() {
            let _ = writeln!(out, "{:<width$}  {:>10}  {:>8}", "(none)", "", sum);
        }
        let _ = writeln!(out, "{rule}");
        let _ = writeln!(
            out,
            "learners: {}  unmatched: {} ({:.1}%)",
            self.total_learners,
            self.unmatched_count,
            self.percentage(self.unmatched_count)
        );
        out
    }
}

/// Groups learners by their abstract sequence. Only sequences in which
/// every one of the `arity` components was recognized count as patterns;
/// everyone else is unmatched.
pub fn population_report(sequences: &[MetacognitiveStrategySequence], arity: usize) -> PatternReport {
    let mut counts: BTreeMap<&MetacognitiveStrategySequence, usize> = BTreeMap::new();
    let mut unmatched = 0;
    for seq in sequences {
        if arity > 0 && seq.len() == arity {
            *counts.entry(seq).or_default() += 1;
        } else {
            unmatched += 1;
        }
    }
    let mut patterns: Vec<PatternShare> = counts
        .into_iter()
        .map(|(labels, count)| PatternShare {
            labels: labels.clone(),
            count,
        })
        .collect();
    patterns.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.labels.name().cmp(&b.labels.name())));
    PatternReport {
        total_learners: sequences.len(),
        patterns,
        unmatched_count: unmatched,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{encode_ccm, CoverageState::*, QuantizedCcm};
    use crate::rate::Rate;
    use StrategyKind::*;

    const TRIPLE: [StrategyKind; 3] = [Description, Comparison, Description];

    fn codes(vectors: &[[crate::codec::CoverageState; 3]]) -> Vec<EncodedCcm> {
        vectors.iter().map(|v| encode_ccm(&QuantizedCcm(v.to_vec())).unwrap()).collect()
    }

    fn instance(kind: StrategyKind, ckus: &[&str], component: usize, at: usize) -> CognitiveStrategyInstance {
        CognitiveStrategyInstance {
            label: StrategyLabel::concrete(kind, ckus.iter().map(|s| s.to_string()).collect()),
            component,
            component_name: format!("c{component}"),
            crossing_index: at,
            final_coverage: Rate::from_integer(1),
        }
    }

    #[test]
    fn map_kind_table() {
        assert_eq!(StrategyKind::for_map(ThinkingMapKind::Bubble), Description);
        assert_eq!(StrategyKind::for_map(ThinkingMapKind::Connective), Comparison);
        assert_eq!(StrategyKind::for_map(ThinkingMapKind::Tree), Classification);
        assert_eq!(StrategyKind::for_map(ThinkingMapKind::Brace), WholePart);
        assert_eq!(StrategyKind::for_map(ThinkingMapKind::MultiFlow), CauseEffect);
        assert_eq!(StrategyKind::for_map(ThinkingMapKind::Circle), Context);
    }

    #[test]
    fn abstraction_drops_core_units() {
        let ins = vec![
            instance(Description, &["Array"], 0, 3),
            instance(Comparison, &["Array", "Pointer"], 1, 7),
            instance(Description, &["Pointer"], 2, 12),
        ];
        let seq = abstract_learner(&ins);
        assert_eq!(seq.name(), "Description-Comparison-Description");
        assert!(abstract_learner(&[]).is_empty());
        let first_conn = vec![
            instance(Comparison, &["Array", "Pointer"], 1, 2),
            instance(Description, &["Array"], 0, 5),
            instance(Description, &["Pointer"], 2, 9),
        ];
        assert_eq!(abstract_learner(&first_conn).name(), "Comparison-Description-Description");
    }

    #[test]
    fn relabeling_units_keeps_the_abstract_sequence() {
        let a = vec![instance(Description, &["Array"], 0, 1), instance(Comparison, &["Array", "Pointer"], 1, 2)];
        let b = vec![
            instance(Description, &["Packet Switching"], 0, 1),
            instance(Comparison, &["Packet Switching", "Circuit Switching"], 1, 2),
        ];
        assert_eq!(abstract_learner(&a), abstract_learner(&b));
    }

    #[test]
    fn decode_description_comparison_description() {
        let p = codes(&[
            [Partial, Untouched, Untouched],
            [Complete, Untouched, Untouched],
            [Complete, Partial, Untouched],
            [Complete, Complete, Untouched],
            [Complete, Complete, Partial],
            [Complete, Complete, Complete],
        ]);
        assert_eq!(decode_and_label(&p, &TRIPLE).unwrap().name(), "Description-Comparison-Description");
    }

    #[test]
    fn decode_comparison_first() {
        let p = codes(&[
            [Untouched, Partial, Untouched],
            [Untouched, Complete, Untouched],
            [Partial, Complete, Untouched],
            [Complete, Complete, Untouched],
            [Complete, Complete, Complete],
        ]);
        assert_eq!(decode_and_label(&p, &TRIPLE).unwrap().name(), "Comparison-Description-Description");
    }

    #[test]
    fn single_symbol_has_at_most_one_label() {
        for v in [[Untouched; 3], [Partial, Partial, Untouched], [Complete; 3]] {
            assert!(decode_and_label(&codes(&[v]), &TRIPLE).unwrap().len() <= 1);
        }
    }

    #[test]
    fn decreasing_state_is_rejected() {
        let p = codes(&[[Complete, Untouched, Untouched], [Partial, Untouched, Untouched]]);
        assert!(matches!(
            decode_and_label(&p, &TRIPLE),
            Err(AbstractionError::NonMonotonePattern { component: 0, .. })
        ));
        assert!(matches!(
            decode_and_label(&[EncodedCcm(123456)], &TRIPLE),
            Err(AbstractionError::Codec(_))
        ));
    }

    #[test]
    fn report_counts_and_unmatched() {
        let dcd = MetacognitiveStrategySequence(vec![Description, Comparison, Description]);
        let cdd = MetacognitiveStrategySequence(vec![Comparison, Description, Description]);
        let partial = MetacognitiveStrategySequence(vec![Description]);
        let seqs = vec![dcd.clone(), cdd.clone(), dcd.clone(), partial, MetacognitiveStrategySequence::default()];
        let report = population_report(&seqs, 3);
        assert_eq!(report.total_learners, 5);
        assert_eq!(report.unmatched_count, 2);
        assert_eq!(report.patterns[0].labels, dcd);
        assert_eq!(report.patterns[0].count, 2);
        assert_eq!(report.patterns[1].count, 1);
        assert_eq!(report.matched_count() + report.unmatched_count, report.total_learners);
        assert!((report.percentage(2) - 40.0).abs() < 1e-12);
        let table = report.render_table();
        assert!(table.contains("Description-Comparison-Description"));
        assert!(table.contains("60.0%"));
    }

    #[test]
    fn identical_learners_form_one_full_pattern() {
        let dcd = MetacognitiveStrategySequence(vec![Description, Comparison, Description]);
        let report = population_report(&vec![dcd; 4], 3);
        assert_eq!(report.patterns.len(), 1);
        assert!((report.percentage(report.patterns[0].count) - 100.0).abs() < 1e-12);
    }
}
