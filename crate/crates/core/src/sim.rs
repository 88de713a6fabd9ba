//! Deterministic synthetic learner logs for comparison questions.
//!
//! Each learner follows an archetype: a stage order over the three
//! comparison regions (`DCD` visits the first description, then the
//! connective region, then the second description), or `NOISE`, a random
//! walk over the map. Randomness comes from ChaCha8 seeded with the
//! configured seed; learner `i` draws from stream `i + 1` and archetype
//! assignment from stream 0, so output depends on nothing but the config.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::km::{normalize_phrase, Direction, KmError, KnowledgeMap, RelationKind, UnitId};
use crate::log::LearningEvent;
use crate::rate::{parse_rate, Rate};
use crate::submap::{comparison_triple, Submap, SubmapError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Archetype {
    Dcd,
    Cdd,
    Ddc,
    Noise,
}

impl Archetype {
    pub const ALL: [Archetype; 4] = [Archetype::Dcd, Archetype::Cdd, Archetype::Ddc, Archetype::Noise];

    /// Order of visited regions as indices into `[desc1, conn, desc2]`.
    pub fn stage_order(self) -> Option<[usize; 3]> {
        match self {
            Archetype::Dcd => Some([0, 1, 2]),
            Archetype::Cdd => Some([1, 0, 2]),
            Archetype::Ddc => Some([0, 2, 1]),
            Archetype::Noise => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Archetype::Dcd => "DCD",
            Archetype::Cdd => "CDD",
            Archetype::Ddc => "DDC",
            Archetype::Noise => "NOISE",
        }
    }

    /// Abstract strategy sequence a clean run of this archetype produces.
    pub fn pattern_name(self) -> Option<&'static str> {
        match self {
            Archetype::Dcd => Some("Description-Comparison-Description"),
            Archetype::Cdd => Some("Comparison-Description-Description"),
            Archetype::Ddc => Some("Description-Description-Comparison"),
            Archetype::Noise => None,
        }
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Archetype {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Archetype::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SimError::InvalidMix(format!("unknown archetype `{s}`")))
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("simulation needs exactly two core items, got {0}")]
    CoreItemCount(usize),
    #[error(transparent)]
    Km(#[from] KmError),
    #[error(transparent)]
    Submap(#[from] SubmapError),
    #[error("comparison region `{0}` is empty in this map")]
    EmptySubmapFixture(&'static str),
    #[error("invalid archetype mix: {0}")]
    InvalidMix(String),
    #[error("interleave probability {0} is not in [0, 1]")]
    InvalidInterleave(f64),
    #[error("completion {0} is not in (0, 1]")]
    InvalidCompletion(Rate),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub core_items: Vec<String>,
    pub learner_count: usize,
    /// Archetype shares; must sum to exactly 1.
    pub mix: Vec<(Archetype, Rate)>,
    pub seed: u64,
    /// Chance of an out-of-stage visit before each in-stage visit.
    pub interleave_prob: f64,
    /// Fraction of each region visited during its stage.
    pub completion: Rate,
    /// Defaults to the core items joined with `-vs-`.
    pub question_id: Option<String>,
}

impl SimConfig {
    pub fn new(core_items: Vec<String>, learner_count: usize, mix: Vec<(Archetype, Rate)>, seed: u64) -> Self {
        SimConfig {
            core_items,
            learner_count,
            mix,
            seed,
            interleave_prob: 0.0,
            completion: Rate::from_integer(1),
            question_id: None,
        }
    }

    pub fn question_id(&self) -> String {
        self.question_id.clone().unwrap_or_else(|| default_question_id(&self.core_items))
    }
}

pub fn default_question_id(core_items: &[String]) -> String {
    core_items
        .iter()
        .map(|c| normalize_phrase(c).replace(' ', "-"))
        .collect::<Vec<_>>()
        .join("-vs-")
}

/// Parses `DCD=0.313,CDD=1/3,...`.
pub fn parse_mix(text: &str) -> Result<Vec<(Archetype, Rate)>, SimError> {
    let mut out: Vec<(Archetype, Rate)> = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, share) = part
            .split_once('=')
            .or_else(|| part.split_once(':'))
            .ok_or_else(|| SimError::InvalidMix(format!("`{part}` is not NAME=SHARE")))?;
        let archetype: Archetype = name.parse()?;
        if out.iter().any(|(a, _)| *a == archetype) {
            return Err(SimError::InvalidMix(format!("archetype {archetype} listed twice")));
        }
        let share = parse_rate(share).map_err(|e| SimError::InvalidMix(e.to_string()))?;
        out.push((archetype, share));
    }
    validate_mix(&out)?;
    Ok(out)
}

fn validate_mix(mix: &[(Archetype, Rate)]) -> Result<(), SimError> {
    if mix.is_empty() {
        return Err(SimError::InvalidMix("empty".into()));
    }
    let total: Rate = mix.iter().map(|(_, r)| *r).sum();
    if total != Rate::from_integer(1) {
        return Err(SimError::InvalidMix(format!("shares sum to {total}, not 1")));
    }
    Ok(())
}

/// Learners per archetype by largest remainder; ties go to the earlier
/// mix entry.
pub fn allocate(learner_count: usize, mix: &[(Archetype, Rate)]) -> Vec<(Archetype, usize)> {
    let n = learner_count as u64;
    let mut alloc: Vec<(Archetype, usize, Rate, usize)> = mix
        .iter()
        .enumerate()
        .map(|(i, (a, share))| {
            let exact = *share * n;
            (*a, exact.to_integer() as usize, exact.fract(), i)
        })
        .collect();
    let assigned: usize = alloc.iter().map(|x| x.1).sum();
    let mut order: Vec<usize> = (0..alloc.len()).collect();
    order.sort_by(|&x, &y| alloc[y].2.cmp(&alloc[x].2).then(alloc[x].3.cmp(&alloc[y].3)));
    for &i in order.iter().take(learner_count.saturating_sub(assigned)) {
        alloc[i].1 += 1;
    }
    alloc.into_iter().map(|(a, c, _, _)| (a, c)).collect()
}

/// Archetype of each learner, in learner order.
pub fn assignments(config: &SimConfig) -> Result<Vec<Archetype>, SimError> {
    validate_mix(&config.mix)?;
    let mut out: Vec<Archetype> = allocate(config.learner_count, &config.mix)
        .into_iter()
        .flat_map(|(a, c)| std::iter::repeat_n(a, c))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(0);
    out.shuffle(&mut rng);
    Ok(out)
}

const BASE_TIMESTAMP: i64 = 1_600_000_000_000;
const LEARNER_SPACING_MS: i64 = 86_400_000;

struct Regions {
    regions: [Vec<UnitId>; 3],
    all_units: Vec<UnitId>,
}

fn regions(km: &KnowledgeMap, config: &SimConfig) -> Result<Regions, SimError> {
    if config.core_items.len() != 2 {
        return Err(SimError::CoreItemCount(config.core_items.len()));
    }
    let cku1 = km.find_cku(&config.core_items[0])?;
    let cku2 = km.find_cku(&config.core_items[1])?;
    let (d1, conn, d2) = comparison_triple(km, &cku1, &cku2)?;
    let names = ["desc1", "conn", "desc2"];
    let units = |s: &Submap| s.unit_ids.iter().cloned().collect::<Vec<_>>();
    let regions = [units(&d1), units(&conn), units(&d2)];
    for (r, name) in regions.iter().zip(names) {
        if r.is_empty() {
            return Err(SimError::EmptySubmapFixture(name));
        }
    }
    Ok(Regions {
        regions,
        all_units: km.unit_ids().cloned().collect(),
    })
}

/// Generates the event log of every learner, sorted by learner and then by
/// per-learner sequence number. Event ids number that order from 1.
pub fn simulate(km: &KnowledgeMap, config: &SimConfig) -> Result<Vec<LearningEvent>, SimError> {
    if !(0.0..=1.0).contains(&config.interleave_prob) {
        return Err(SimError::InvalidInterleave(config.interleave_prob));
    }
    if *config.completion.numer() == 0 || config.completion > Rate::from_integer(1) {
        return Err(SimError::InvalidCompletion(config.completion));
    }
    let regions = regions(km, config)?;
    let archetypes = assignments(config)?;
    let question = config.question_id();
    let mut events = Vec::new();
    for (i, archetype) in archetypes.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64 + 1);
        let visits = match archetype.stage_order() {
            Some(order) => staged_visits(&regions, order, config, &mut rng),
            None => random_walk(km, &regions, &mut rng),
        };
        let user_id = format!("u{:04}", i + 1);
        let user_name = format!("Learner {}", i + 1);
        let mut ts = BASE_TIMESTAMP + i as i64 * LEARNER_SPACING_MS;
        let mut push = |action: &str, unit: Option<&UnitId>, ts: i64| {
            events.push(LearningEvent {
                id: String::new(),
                user_id: user_id.clone(),
                user_name: Some(user_name.clone()),
                question_id: question.clone(),
                action_type: action.to_string(),
                object_id: unit.map(|u| u.0.clone()).unwrap_or_default(),
                action_object: unit.map(|u| km.display_name(u)).unwrap_or_default(),
                timestamp: ts,
            });
        };
        push("login", None, ts);
        for unit in &visits {
            ts += rng.random_range(2_000..=90_000);
            push("visit", Some(unit), ts);
        }
        ts += rng.random_range(2_000..=30_000);
        push("submit", None, ts);
        ts += 1_000;
        push("exit", None, ts);
    }
    for (n, e) in events.iter_mut().enumerate() {
        e.id = (n + 1).to_string();
    }
    Ok(events)
}

fn staged_visits(regions: &Regions, order: [usize; 3], config: &SimConfig, rng: &mut ChaCha8Rng) -> Vec<UnitId> {
    let mut visits = Vec::new();
    for stage in order {
        let mut units = regions.regions[stage].clone();
        units.shuffle(rng);
        let take = (config.completion * units.len() as u64).ceil().to_integer() as usize;
        let stage_set: BTreeSet<&UnitId> = regions.regions[stage].iter().collect();
        let outside: Vec<&UnitId> = regions.all_units.iter().filter(|u| !stage_set.contains(u)).collect();
        for unit in units.into_iter().take(take.max(1)) {
            if config.interleave_prob > 0.0 && rng.random_bool(config.interleave_prob) {
                if let Some(stray) = outside.choose(rng) {
                    visits.push((*stray).clone());
                }
            }
            visits.push(unit);
        }
    }
    visits
}

fn random_walk(km: &KnowledgeMap, regions: &Regions, rng: &mut ChaCha8Rng) -> Vec<UnitId> {
    let steps: usize = regions.regions.iter().map(Vec::len).sum();
    let mut visits = Vec::with_capacity(steps);
    let Some(mut at) = regions.all_units.choose(rng).cloned() else {
        return visits;
    };
    for _ in 0..steps {
        visits.push(at.clone());
        let next: Vec<UnitId> = km
            .neighbors(&at, &RelationKind::ALL, Direction::Both)
            .map(|n| n.into_iter().collect())
            .unwrap_or_default();
        at = match next.choose(rng) {
            Some(n) => n.clone(),
            None => regions.all_units.choose(rng).cloned().expect("map has units"),
        };
    }
    visits
}
