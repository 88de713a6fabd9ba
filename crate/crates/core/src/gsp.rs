//! Levelwise sequential pattern mining (GSP) over sequences of single items.
//!
//! Every element of a database sequence is one item, so candidate
//! generation reduces to the classic join: two frequent `k-1` patterns
//! `p` and `q` with `p[1..] == q[..k-2]` produce `p + q.last()`. A
//! candidate survives pruning only if each of its `k-1` subsequences is
//! frequent. Support counts each database sequence at most once.

use std::collections::{BTreeMap, BTreeSet};
use std::hash::Hash;

use serde::Serialize;
use thiserror::Error;

use crate::rate::{ratio_at_least, Rate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GspError {
    #[error("sequence database is empty")]
    EmptyDatabase,
    #[error("minimum support {0} is not in (0, 1]")]
    InvalidMinsup(Rate),
    #[error("duplicate sequence id `{0}`")]
    DuplicateId(String),
    #[error("instance too large for exhaustive enumeration ({0})")]
    InstanceTooLarge(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceDatabase<T> {
    sequences: Vec<(String, Vec<T>)>,
}

impl<T> SequenceDatabase<T> {
    pub fn new(sequences: Vec<(String, Vec<T>)>) -> Result<Self, GspError> {
        let mut ids = BTreeSet::new();
        for (id, _) in &sequences {
            if !ids.insert(id.as_str()) {
                return Err(GspError::DuplicateId(id.clone()));
            }
        }
        Ok(SequenceDatabase { sequences })
    }

    /// Numbers the sequences `0, 1, ...` in order.
    pub fn from_sequences(seqs: impl IntoIterator<Item = Vec<T>>) -> Self {
        SequenceDatabase {
            sequences: seqs.into_iter().enumerate().map(|(i, s)| (i.to_string(), s)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn sequences(&self) -> impl Iterator<Item = &[T]> {
        self.sequences.iter().map(|(_, s)| s.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequentPattern<T> {
    pub pattern: Vec<T>,
    pub support_count: usize,
    #[serde(with = "crate::rate::serde_str")]
    pub support_ratio: Rate,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GspOptions {
    /// Largest allowed distance between positions of consecutive pattern
    /// items (1 means adjacent). `None` leaves gaps unconstrained.
    pub max_gap: Option<usize>,
}

fn check_inputs<T>(db: &SequenceDatabase<T>, minsup: Rate) -> Result<(), GspError> {
    if db.is_empty() {
        return Err(GspError::EmptyDatabase);
    }
    if *minsup.numer() == 0 || minsup > Rate::from_integer(1) {
        return Err(GspError::InvalidMinsup(minsup));
    }
    Ok(())
}

/// Whether `pattern` occurs in `seq` as a subsequence.
fn contains<T: PartialEq>(seq: &[T], pattern: &[T], max_gap: Option<usize>) -> bool {
    match max_gap {
        None => {
            let mut it = seq.iter();
            pattern.iter().all(|p| it.any(|s| s == p))
        }
        Some(gap) => {
            fn from<T: PartialEq>(seq: &[T], pattern: &[T], last: usize, gap: usize) -> bool {
                let Some((head, rest)) = pattern.split_first() else {
                    return true;
                };
                let end = (last + gap).min(seq.len() - 1);
                (last + 1..=end).any(|i| seq[i] == *head && from(seq, rest, i, gap))
            }
            let Some((head, rest)) = pattern.split_first() else {
                return true;
            };
            (0..seq.len()).any(|i| seq[i] == *head && from(seq, rest, i, gap))
        }
    }
}

fn finish<T: Ord>(mut out: Vec<FrequentPattern<T>>) -> Vec<FrequentPattern<T>> {
    out.sort_by(|a, b| {
        b.pattern
            .len()
            .cmp(&a.pattern.len())
            .then(b.support_count.cmp(&a.support_count))
            .then_with(|| a.pattern.cmp(&b.pattern))
    });
    out
}

pub fn gsp<T: Ord + Clone + Hash>(db: &SequenceDatabase<T>, minsup: Rate) -> Result<Vec<FrequentPattern<T>>, GspError> {
    gsp_with(db, minsup, GspOptions::default())
}

/// All patterns with support ratio `>= minsup`, longest first, then by
/// descending support, then lexicographically.
pub fn gsp_with<T: Ord + Clone + Hash>(
    db: &SequenceDatabase<T>,
    minsup: Rate,
    options: GspOptions,
) -> Result<Vec<FrequentPattern<T>>, GspError> {
    check_inputs(db, minsup)?;
    let total = db.len();
    let frequent = |count: usize| ratio_at_least(count, total, minsup);
    let mut out = Vec::new();

    let mut item_counts: BTreeMap<&T, usize> = BTreeMap::new();
    for seq in db.sequences() {
        for item in seq.iter().collect::<BTreeSet<_>>() {
            *item_counts.entry(item).or_default() += 1;
        }
    }
    let mut level: BTreeSet<Vec<T>> = BTreeSet::new();
    for (item, count) in item_counts {
        if frequent(count) {
            level.insert(vec![item.clone()]);
            out.push(pattern(vec![item.clone()], count, total));
        }
    }

    while !level.is_empty() {
        let candidates = generate_candidates(&level, options);
        let mut next = BTreeSet::new();
        for cand in candidates {
            let count = db.sequences().filter(|s| contains(s, &cand, options.max_gap)).count();
            if frequent(count) {
                out.push(pattern(cand.clone(), count, total));
                next.insert(cand);
            }
        }
        level = next;
    }
    Ok(finish(out))
}

fn pattern<T>(pattern: Vec<T>, count: usize, total: usize) -> FrequentPattern<T> {
    FrequentPattern {
        pattern,
        support_count: count,
        support_ratio: Rate::new(count as u64, total as u64),
    }
}

fn generate_candidates<T: Ord + Clone>(level: &BTreeSet<Vec<T>>, options: GspOptions) -> BTreeSet<Vec<T>> {
    let k = level.iter().next().map_or(0, Vec::len) + 1;
    let mut by_prefix: BTreeMap<&[T], Vec<&T>> = BTreeMap::new();
    for p in level {
        by_prefix.entry(&p[..p.len() - 1]).or_default().push(&p[p.len() - 1]);
    }
    let mut out = BTreeSet::new();
    for p in level {
        let Some(lasts) = by_prefix.get(&p[1..]) else {
            continue;
        };
        for last in lasts {
            let mut cand = p.clone();
            cand.push((*last).clone());
            if k <= 2 || survives_prune(&cand, level, options) {
                out.insert(cand);
            }
        }
    }
    out
}

fn survives_prune<T: Ord + Clone>(cand: &[T], level: &BTreeSet<Vec<T>>, options: GspOptions) -> bool {
    // with a gap limit only the contiguous sub-patterns are implied
    let drops: Vec<usize> = match options.max_gap {
        None => (0..cand.len()).collect(),
        Some(_) => vec![0, cand.len() - 1],
    };
    drops.into_iter().all(|i| {
        let mut sub = cand.to_vec();
        sub.remove(i);
        level.contains(&sub)
    })
}

/// Caps for [`brute_force_frequent`].
pub const BRUTE_FORCE_MAX_TOTAL: usize = 40;
pub const BRUTE_FORCE_MAX_SEQUENCE: usize = 16;

pub fn brute_force_frequent<T: Ord + Clone>(
    db: &SequenceDatabase<T>,
    minsup: Rate,
    max_len: usize,
) -> Result<Vec<FrequentPattern<T>>, GspError> {
    brute_force_frequent_with(db, minsup, max_len, GspOptions::default())
}

/// Reference miner: enumerates every distinct subsequence of every
/// database sequence up to `max_len` items and counts the sequences that
/// produce it.
pub fn brute_force_frequent_with<T: Ord + Clone>(
    db: &SequenceDatabase<T>,
    minsup: Rate,
    max_len: usize,
    options: GspOptions,
) -> Result<Vec<FrequentPattern<T>>, GspError> {
    check_inputs(db, minsup)?;
    let total_len: usize = db.sequences().map(<[T]>::len).sum();
    let longest = db.sequences().map(<[T]>::len).max().unwrap_or(0);
    if total_len > BRUTE_FORCE_MAX_TOTAL || longest > BRUTE_FORCE_MAX_SEQUENCE {
        return Err(GspError::InstanceTooLarge(format!(
            "total length {total_len}, longest sequence {longest}"
        )));
    }
    let mut counts: BTreeMap<Vec<T>, usize> = BTreeMap::new();
    for seq in db.sequences() {
        let mut subs = BTreeSet::new();
        enumerate(seq, max_len, options.max_gap, &mut Vec::new(), None, &mut subs);
        for sub in subs {
            *counts.entry(sub).or_default() += 1;
        }
    }
    let total = db.len();
    let out = counts
        .into_iter()
        .filter(|(_, c)| ratio_at_least(*c, total, minsup))
        .map(|(p, c)| pattern(p, c, total))
        .collect();
    Ok(finish(out))
}

fn enumerate<T: Ord + Clone>(
    seq: &[T],
    max_len: usize,
    max_gap: Option<usize>,
    current: &mut Vec<T>,
    last: Option<usize>,
    out: &mut BTreeSet<Vec<T>>,
) {
    if current.len() == max_len {
        return;
    }
    let start = last.map_or(0, |l| l + 1);
    let end = match (last, max_gap) {
        (Some(l), Some(g)) => (l + g + 1).min(seq.len()),
        _ => seq.len(),
    };
    for i in start..end {
        current.push(seq[i].clone());
        out.insert(current.clone());
        enumerate(seq, max_len, max_gap, current, Some(i), out);
        current.pop();
    }
}
