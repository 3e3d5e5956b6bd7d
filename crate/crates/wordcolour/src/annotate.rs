//! Crowdsourced annotation: questionnaire generation, gold-question
//! validation, majority-vote aggregation, and agreement statistics.
//!
//! Each word sense is annotated through a two-question HIT. Q1 asks for the
//! near-synonym of the target among distractors; a wrong answer discards the
//! whole assignment. Q2 records the associated colour. Valid assignments are
//! combined per sense by majority vote, with ties broken by a seeded-uniform
//! pick so runs are reproducible.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::colour::{Colour, ColourCounts};
use crate::lexicon::{LexiconEntry, Thesaurus, WordSense};
use crate::seeding::rng_for_key;

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("no near-synonym available for `{0}`")]
    NoNearSynonym(WordSense),
    #[error("distractor pool too small: need {needed}, found {found}")]
    InsufficientDistractors { needed: usize, found: usize },
    #[error("sense `{0}` missing from the answer key")]
    UnknownSense(WordSense),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("empty lexicon")]
    EmptyLexicon,
    #[error("empty input")]
    EmptyInput,
    #[error(transparent)]
    Lexicon(#[from] crate::lexicon::LexiconError),
}

impl AnnotateError {
    pub fn category(&self) -> &'static str {
        match self {
            AnnotateError::Io(_) => "io",
            AnnotateError::Parse { .. } => "parse",
            AnnotateError::NoNearSynonym(_) => "no-near-synonym",
            AnnotateError::InsufficientDistractors { .. } => "insufficient-distractors",
            AnnotateError::UnknownSense(_) => "unknown-sense",
            AnnotateError::UnknownCategory(_) => "unknown-category",
            AnnotateError::EmptyLexicon => "empty-lexicon",
            AnnotateError::EmptyInput => "empty-input",
            AnnotateError::Lexicon(e) => e.category(),
        }
    }
}

/// One generated questionnaire for a word sense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hit {
    pub sense: WordSense,
    /// Four word-choice options: the near-synonym and three distractors,
    /// in seeded-random order.
    pub q1_options: Vec<String>,
    /// The correct Q1 answer (a category member other than the term).
    pub q1_gold: String,
    /// All eleven colours in seeded-random order.
    pub q2_options: Vec<Colour>,
}

/// One annotator's completed HIT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub worker_id: String,
    pub sense: WordSense,
    pub q1_answer: String,
    pub q2_answer: Colour,
}

/// Maps each sense to its gold near-synonym.
#[derive(Debug, Clone, Default)]
pub struct AnswerKey {
    gold: HashMap<WordSense, String>,
}

impl AnswerKey {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sense: WordSense, gold: &str) {
        self.gold.insert(sense, gold.trim().to_lowercase());
    }

    pub fn gold_for(&self, sense: &WordSense) -> Option<&str> {
        self.gold.get(sense).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.gold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gold.is_empty()
    }
}

/// Generates the HIT for one sense.
///
/// The near-synonym is the first category member other than the term itself
/// (category source order), so it does not depend on the seed. Distractors
/// are drawn without replacement from the pool terms outside the category;
/// both option orders are seeded-random permutations. Deterministic for a
/// fixed seed.
pub fn generate_hit(
    sense: &WordSense,
    thesaurus: &Thesaurus,
    distractor_pool: &[String],
    seed: u64,
) -> Result<Hit, AnnotateError> {
    let category = thesaurus
        .get(&sense.category_id)
        .ok_or_else(|| AnnotateError::UnknownCategory(sense.category_id.clone()))?;
    let gold = category
        .members()
        .iter()
        .find(|m| **m != sense.term)
        .cloned()
        .ok_or_else(|| AnnotateError::NoNearSynonym(sense.clone()))?;

    // Candidate distractors: pool terms outside the category, deduplicated,
    // sorted so the draw is independent of pool order.
    let mut candidates: Vec<&String> = distractor_pool
        .iter()
        .filter(|t| !category.contains(t))
        .collect();
    candidates.sort();
    candidates.dedup();
    if candidates.len() < 3 {
        return Err(AnnotateError::InsufficientDistractors {
            needed: 3,
            found: candidates.len(),
        });
    }

    let mut rng = rng_for_key(seed, &["hit", &sense.term, &sense.category_id]);
    let distractors: Vec<String> = candidates
        .choose_multiple(&mut rng, 3)
        .map(|s| (*s).clone())
        .collect();

    let mut q1_options = distractors;
    q1_options.push(gold.clone());
    q1_options.shuffle(&mut rng);

    let mut q2_options = Colour::ALL.to_vec();
    q2_options.shuffle(&mut rng);

    Ok(Hit {
        sense: sense.clone(),
        q1_options,
        q1_gold: gold,
        q2_options,
    })
}

/// Why an assignment was discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscardReason {
    /// Wrong answer to the Q1 gold question.
    WrongGold,
    /// A repeated (worker, sense) pair; only the first occurrence counts.
    Duplicate,
}

/// Outcome of gold-question validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Discarded(DiscardReason),
}

/// Checks an assignment against the Q1 answer key (case-insensitive).
pub fn validate_assignment(
    assignment: &Assignment,
    key: &AnswerKey,
) -> Result<Validity, AnnotateError> {
    let gold = key
        .gold_for(&assignment.sense)
        .ok_or_else(|| AnnotateError::UnknownSense(assignment.sense.clone()))?;
    if assignment.q1_answer.trim().eq_ignore_ascii_case(gold) {
        Ok(Validity::Valid)
    } else {
        Ok(Validity::Discarded(DiscardReason::WrongGold))
    }
}

/// Summary of an aggregation run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AggregationReport {
    pub total_assignments: usize,
    pub valid_assignments: usize,
    pub discarded_wrong_gold: usize,
    pub discarded_duplicate: usize,
    /// Senses dropped for having fewer than `min_valid` valid assignments,
    /// with their valid counts. Sorted by sense.
    pub dropped_senses: Vec<(WordSense, usize)>,
    pub kept_senses: usize,
    /// Mean number of valid assignments per kept sense.
    pub mean_valid_per_kept: f64,
    /// Fraction of ingested assignments discarded for a wrong Q1 answer.
    pub discard_rate: f64,
}

/// Aggregates assignments into lexicon entries by per-sense majority vote.
///
/// Duplicate (worker, sense) pairs keep the first occurrence; wrong-Q1
/// assignments are discarded. Senses with fewer than `min_valid` valid
/// assignments are dropped and reported. Vote ties are broken by a uniform
/// pick seeded per sense, so the result does not depend on sense order.
/// Entries are returned sorted by (term, category_id).
pub fn aggregate(
    assignments: &[Assignment],
    key: &AnswerKey,
    min_valid: usize,
    seed: u64,
) -> Result<(Vec<LexiconEntry>, AggregationReport), AnnotateError> {
    let mut report = AggregationReport {
        total_assignments: assignments.len(),
        ..Default::default()
    };

    let mut seen: HashSet<(&str, &WordSense)> = HashSet::new();
    let mut votes: BTreeMap<WordSense, ColourCounts> = BTreeMap::new();
    for a in assignments {
        if !seen.insert((a.worker_id.as_str(), &a.sense)) {
            report.discarded_duplicate += 1;
            continue;
        }
        match validate_assignment(a, key)? {
            Validity::Valid => {
                report.valid_assignments += 1;
                votes.entry(a.sense.clone()).or_default().add(a.q2_answer, 1);
            }
            Validity::Discarded(DiscardReason::WrongGold) => {
                report.discarded_wrong_gold += 1;
            }
            Validity::Discarded(DiscardReason::Duplicate) => unreachable!(),
        }
    }

    let mut entries = Vec::new();
    let mut kept_valid_total = 0usize;
    for (sense, counts) in votes {
        let total = counts.total() as usize;
        if total < min_valid {
            report.dropped_senses.push((sense, total));
            continue;
        }
        let tied = counts.argmax_set();
        let majority = if tied.len() == 1 {
            tied[0]
        } else {
            let mut rng = rng_for_key(seed, &["tie", &sense.term, &sense.category_id]);
            tied[rng.gen_range(0..tied.len())]
        };
        let near_synonym = key
            .gold_for(&sense)
            .expect("validated sense present in key")
            .to_string();
        entries.push(LexiconEntry::new(sense, near_synonym, counts, majority)?);
        kept_valid_total += total;
    }

    report.kept_senses = entries.len();
    report.mean_valid_per_kept = if entries.is_empty() {
        0.0
    } else {
        kept_valid_total as f64 / entries.len() as f64
    };
    report.discard_rate = if assignments.is_empty() {
        0.0
    } else {
        report.discarded_wrong_gold as f64 / assignments.len() as f64
    };
    Ok((entries, report))
}

/// Distribution of majority class sizes over a lexicon, as percentages.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementHistogram {
    /// Percentage of entries per majority class size.
    pub share: BTreeMap<u64, f64>,
    pub cumulative_ge2: f64,
    pub cumulative_ge3: f64,
}

impl AgreementHistogram {
    pub fn share_of(&self, size: u64) -> f64 {
        self.share.get(&size).copied().unwrap_or(0.0)
    }
}

/// Percentage of entries with each majority class size (the maximal vote
/// count before tie-breaking), plus cumulative shares for sizes >= 2 and >= 3.
pub fn agreement_histogram(entries: &[LexiconEntry]) -> Result<AgreementHistogram, AnnotateError> {
    if entries.is_empty() {
        return Err(AnnotateError::EmptyLexicon);
    }
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for e in entries {
        *counts.entry(e.majority_class_size()).or_default() += 1;
    }
    let n = entries.len() as f64;
    let share: BTreeMap<u64, f64> = counts
        .into_iter()
        .map(|(size, c)| (size, 100.0 * c as f64 / n))
        .collect();
    let cum = |min: u64| {
        share
            .iter()
            .filter(|(size, _)| **size >= min)
            .map(|(_, pct)| pct)
            .sum::<f64>()
    };
    Ok(AgreementHistogram {
        cumulative_ge2: cum(2),
        cumulative_ge3: cum(3),
        share,
    })
}

/// Probability that `n_annotators` independent uniform choices over
/// `n_colours` are pairwise distinct:
/// `prod_{i=1}^{n_annotators-1} max(n_colours - i, 0) / n_colours`.
pub fn chance_distinct_probability(n_annotators: u32, n_colours: u32) -> f64 {
    assert!(n_annotators >= 1 && n_colours >= 1);
    let mut p = 1.0;
    for i in 1..n_annotators {
        let remaining = n_colours.saturating_sub(i);
        p *= f64::from(remaining) / f64::from(n_colours);
    }
    p
}

/// Which population a colour distribution describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionMode {
    /// Every valid annotation in the lexicon counts once.
    Overall,
    /// One majority colour per entry.
    Voted,
}

/// Percentage of annotations (or entries) associated with each colour,
/// summing to 100 over the eleven colours.
pub fn colour_distribution(
    entries: &[LexiconEntry],
    mode: DistributionMode,
) -> Result<BTreeMap<Colour, f64>, AnnotateError> {
    if entries.is_empty() {
        return Err(AnnotateError::EmptyInput);
    }
    let mut counts = ColourCounts::new();
    match mode {
        DistributionMode::Overall => {
            for e in entries {
                counts.merge(&e.votes);
            }
        }
        DistributionMode::Voted => {
            for e in entries {
                counts.add(e.majority, 1);
            }
        }
    }
    let total = counts.total();
    if total == 0 {
        return Err(AnnotateError::EmptyInput);
    }
    Ok(counts
        .iter()
        .map(|(c, n)| (c, 100.0 * n as f64 / total as f64))
        .collect())
}

/// Loads assignments from TSV:
/// `worker_id<TAB>term<TAB>category_id<TAB>q1_answer<TAB>q2_answer`.
pub fn load_assignments(path: &Path) -> Result<Vec<Assignment>, AnnotateError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut assignments = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 5 {
            return Err(AnnotateError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg: format!("expected 5 tab-separated fields, found {}", fields.len()),
            });
        }
        let q2 = Colour::parse(fields[4]).ok_or_else(|| AnnotateError::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg: format!("unknown colour `{}`", fields[4]),
        })?;
        assignments.push(Assignment {
            worker_id: fields[0].trim().to_string(),
            sense: WordSense::new(fields[1], fields[2]),
            q1_answer: fields[3].trim().to_lowercase(),
            q2_answer: q2,
        });
    }
    Ok(assignments)
}

/// Loads an answer key from TSV: `term<TAB>category_id<TAB>gold_near_synonym`.
pub fn load_answer_key(path: &Path) -> Result<AnswerKey, AnnotateError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut key = AnswerKey::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(AnnotateError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        key.insert(WordSense::new(fields[0], fields[1]), fields[2]);
    }
    Ok(key)
}
