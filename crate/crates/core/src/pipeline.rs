//! End-to-end mining: core items to submaps, logs to activity sequences,
//! coverage curves to recognized strategies, and encoded curves through
//! GSP to mined metacognitive patterns.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{encode_sequence, CodecError, EncodedCcm, MAX_ARITY};
use crate::gsp::{gsp, GspError, SequenceDatabase};
use crate::km::{KmError, KnowledgeMap, UnitId};
use crate::log::{build_las, filter_events, question_ids, LasBuild, LearningEvent};
use crate::metrics::{ccm_sequence, prune_irrelevant, recognize_strategies, CognitionControlSequence, CognitiveStrategyInstance, MetricsError, SubmapSet, TrackedSubmap};
use crate::rate::{to_f64, Rate};
use crate::strategy::{
    abstract_learner, decode_and_label, population_report, AbstractionError, MetacognitiveStrategySequence, PatternReport,
    PatternShare, StrategyKind,
};
use crate::submap::{SubmapError, ThinkingMapKind};

pub const DEFAULT_K_DEPTH: usize = 2;

pub fn default_threshold() -> Rate {
    Rate::new(3, 5)
}

pub fn default_minsup() -> Rate {
    Rate::new(1, 4)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub core_items: Vec<String>,
    pub k_depth: usize,
    pub threshold: Rate,
    pub minsup: Rate,
    /// Which question of the log to mine; needed only when the log holds
    /// several.
    pub question_id: Option<String>,
}

impl PipelineConfig {
    pub fn new(core_items: Vec<String>) -> Self {
        PipelineConfig {
            core_items,
            k_depth: DEFAULT_K_DEPTH,
            threshold: default_threshold(),
            minsup: default_minsup(),
            question_id: None,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let unit = Rate::from_integer(1);
        if !(1..=2).contains(&self.core_items.len()) {
            return Err(PipelineError::Config(format!(
                "expected 1 or 2 core items, got {}",
                self.core_items.len()
            )));
        }
        if self.core_items.iter().any(|c| c.trim().is_empty()) {
            return Err(PipelineError::Config("core items must be non-empty".into()));
        }
        if self.k_depth == 0 {
            return Err(PipelineError::Config("k_depth must be at least 1".into()));
        }
        if *self.threshold.numer() == 0 || self.threshold > unit {
            return Err(PipelineError::Config(format!("threshold {} is not in (0, 1]", self.threshold)));
        }
        if *self.minsup.numer() == 0 || self.minsup > unit {
            return Err(PipelineError::Config(format!("minsup {} is not in (0, 1]", self.minsup)));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Lookup(KmError),
    #[error(transparent)]
    Submap(#[from] SubmapError),
    #[error("no data: {0}")]
    EmptyData(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Gsp(#[from] GspError),
    #[error(transparent)]
    Abstraction(#[from] AbstractionError),
}

/// Resolves core items and searches the question's candidate submaps.
pub fn question_submaps(km: &KnowledgeMap, config: &PipelineConfig) -> Result<(Vec<UnitId>, SubmapSet), PipelineError> {
    config.validate()?;
    let ckus = config
        .core_items
        .iter()
        .map(|c| km.find_cku(c))
        .collect::<Result<Vec<_>, _>>()
        .map_err(PipelineError::Lookup)?;
    let set = match ckus.as_slice() {
        [one] => SubmapSet::single(km, one, config.k_depth)?,
        [first, second] => SubmapSet::comparison(km, first, second)?,
        _ => unreachable!("validated core item count"),
    };
    Ok((ckus, set))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ingested {
    pub question_id: String,
    pub removed: usize,
    pub las: LasBuild,
}

/// Filters non-learning actions and assembles activity sequences for one
/// question. Without an explicit question the log must hold exactly one.
pub fn ingest(km: &KnowledgeMap, events: Vec<LearningEvent>, question_id: Option<&str>) -> Result<Ingested, PipelineError> {
    let (kept, removed) = filter_events(events);
    let question_id = match question_id {
        Some(q) => q.to_string(),
        None => {
            let mut qs = question_ids(&kept);
            match qs.len() {
                0 => return Err(PipelineError::EmptyData("no learning events after filtering".into())),
                1 => qs.remove(0),
                _ => {
                    return Err(PipelineError::Config(format!(
                        "log holds several questions ({}); pick one",
                        qs.join(", ")
                    )))
                }
            }
        }
    };
    let las = build_las(&kept, km, &question_id);
    Ok(Ingested {
        question_id,
        removed,
        las,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnerResult {
    pub user_id: String,
    pub curve: CognitionControlSequence,
    pub instances: Vec<CognitiveStrategyInstance>,
    pub sequence: MetacognitiveStrategySequence,
    pub encoded: Vec<EncodedCcm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportPattern {
    pub name: String,
    pub labels: Vec<StrategyKind>,
    pub count: usize,
    pub pct: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSubmap {
    pub name: String,
    pub kind: ThinkingMapKind,
    pub label: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinedPattern {
    pub pattern: Vec<u32>,
    pub support_count: usize,
    #[serde(with = "crate::rate::serde_str")]
    pub support_ratio: Rate,
    /// Abstract strategy sequence decoded from the pattern.
    pub strategy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub question_id: String,
    pub course_id: String,
    pub core_items: Vec<String>,
    pub k_depth: usize,
    #[serde(with = "crate::rate::serde_str")]
    pub threshold: Rate,
    #[serde(with = "crate::rate::serde_str")]
    pub minsup: Rate,
    pub total_learners: usize,
    pub patterns: Vec<ReportPattern>,
    pub unmatched_count: usize,
    pub unmatched_pct: f64,
    pub submaps: Vec<ReportSubmap>,
    pub mined_raw: Vec<MinedPattern>,
}

impl Report {
    pub fn pattern_report(&self) -> PatternReport {
        PatternReport {
            total_learners: self.total_learners,
            patterns: self
                .patterns
                .iter()
                .map(|p| PatternShare {
                    labels: MetacognitiveStrategySequence(p.labels.clone()),
                    count: p.count,
                })
                .collect(),
            unmatched_count: self.unmatched_count,
        }
    }

    pub fn render_table(&self) -> String {
        format!("question: {}\n{}", self.question_id, self.pattern_report().render_table())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn pattern_pct(&self, name: &str) -> Option<f64> {
        self.patterns.iter().find(|p| p.name == name).map(|p| p.pct)
    }
}

#[derive(Debug, Clone)]
pub struct MineOutcome {
    pub report: Report,
    pub submaps: Vec<TrackedSubmap>,
    pub learners: Vec<LearnerResult>,
    pub ingested: Ingested,
    pub warnings: Vec<String>,
}

impl MineOutcome {
    /// `(file name, csv)` per learner.
    pub fn curve_files(&self) -> Vec<(String, String)> {
        self.learners
            .iter()
            .map(|l| (format!("{}.csv", file_stem(&l.user_id)), l.curve.to_csv()))
            .collect()
    }

    /// `(file name, dot)` per tracked submap.
    pub fn dot_files(&self, km: &KnowledgeMap) -> Vec<(String, String)> {
        self.submaps
            .iter()
            .map(|t| (format!("{}.dot", t.name), t.submap.to_dot(km, &t.name)))
            .collect()
    }
}

/// Keeps ASCII alphanumerics, `-` and `_`; everything else becomes `_`.
pub fn file_stem(raw: &str) -> String {
    raw.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn percent(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

pub fn mine(km: &KnowledgeMap, events: Vec<LearningEvent>, config: &PipelineConfig) -> Result<MineOutcome, PipelineError> {
    let (_, set) = question_submaps(km, config)?;
    let ingested = ingest(km, events, config.question_id.as_deref())?;
    let mut warnings: Vec<String> = ingested.las.unresolved.iter().map(ToString::to_string).collect();
    let sequences = &ingested.las.sequences;
    if sequences.is_empty() {
        return Err(PipelineError::EmptyData(format!(
            "no learner visited a unit of the map for question `{}`",
            ingested.question_id
        )));
    }

    if let SubmapSet::Comparison(triple) = &set {
        if let Some(empty) = triple.iter().find(|t| t.submap.is_empty()) {
            return Err(PipelineError::EmptyData(format!(
                "comparison region `{}` has no units",
                empty.name
            )));
        }
    }
    let tracked = prune_irrelevant(&set, sequences.iter().map(|s| s.visits.as_slice()));
    if tracked.is_empty() {
        return Err(PipelineError::EmptyData("no candidate submap was visited".into()));
    }
    let arity = tracked.len();
    let labels: Vec<StrategyKind> = tracked.iter().map(|t| t.label.kind).collect();

    let mut learners = Vec::with_capacity(sequences.len());
    for las in sequences {
        let curve = ccm_sequence(&las.visits, &tracked)?;
        let instances = recognize_strategies(&curve, config.threshold)?;
        let sequence = abstract_learner(&instances);
        let encoded = if arity <= MAX_ARITY {
            encode_sequence(&curve.ccms)?
        } else {
            Vec::new()
        };
        learners.push(LearnerResult {
            user_id: las.user_id.clone(),
            curve,
            instances,
            sequence,
            encoded,
        });
    }

    let mined_raw = if arity <= MAX_ARITY {
        let db = SequenceDatabase::new(
            learners
                .iter()
                .map(|l| (l.user_id.clone(), l.encoded.clone()))
                .collect(),
        )?;
        gsp(&db, config.minsup)?
            .into_iter()
            .map(|p| {
                let strategy = decode_and_label(&p.pattern, &labels)?.name();
                Ok(MinedPattern {
                    pattern: p.pattern.iter().map(|c| c.0).collect(),
                    support_count: p.support_count,
                    support_ratio: p.support_ratio,
                    strategy,
                })
            })
            .collect::<Result<Vec<_>, AbstractionError>>()?
    } else {
        warnings.push(format!(
            "{arity} relevant submaps exceed the {MAX_ARITY}-position codeword; pattern mining skipped"
        ));
        Vec::new()
    };

    let abstract_seqs: Vec<MetacognitiveStrategySequence> = learners.iter().map(|l| l.sequence.clone()).collect();
    let pop = population_report(&abstract_seqs, arity);
    let total = pop.total_learners;
    let report = Report {
        question_id: ingested.question_id.clone(),
        course_id: km.course_id().to_string(),
        core_items: config.core_items.clone(),
        k_depth: config.k_depth,
        threshold: config.threshold,
        minsup: config.minsup,
        total_learners: total,
        patterns: pop
            .patterns
            .iter()
            .map(|p| ReportPattern {
                name: p.labels.name(),
                labels: p.labels.0.clone(),
                count: p.count,
                pct: percent(p.count, total),
            })
            .collect(),
        unmatched_count: pop.unmatched_count,
        unmatched_pct: percent(pop.unmatched_count, total),
        submaps: tracked
            .iter()
            .map(|t| ReportSubmap {
                name: t.name.clone(),
                kind: t.submap.kind,
                label: t.label.to_string(),
                size: t.submap.len(),
            })
            .collect(),
        mined_raw,
    };
    Ok(MineOutcome {
        report,
        submaps: tracked,
        learners,
        ingested,
        warnings,
    })
}

/// Share as a fraction of learners, exact.
pub fn share(count: usize, total: usize) -> Rate {
    Rate::new(count as u64, total.max(1) as u64)
}

pub fn share_f64(count: usize, total: usize) -> f64 {
    to_f64(share(count, total))
}
