//! Lexicon and thesaurus data types: word senses, aggregated lexicon entries,
//! and the category structure they are annotated against.
//!
//! File formats:
//! - thesaurus: TSV rows `category_id<TAB>head<TAB>member,member,...`
//! - lexicon: JSON-lines, one entry per line with fields in the fixed order
//!   `term, category_id, near_synonym, votes, majority, confidence`.
//!
//! Lines starting with `#` are treated as comments in both formats.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colour::{Colour, ColourCounts};

/// Errors from lexicon and thesaurus files.
#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("invalid entry for `{term}` ({category_id}): {msg}")]
    InvalidEntry {
        term: String,
        category_id: String,
        msg: String,
    },
    #[error("invalid category `{category_id}`: {msg}")]
    InvalidCategory { category_id: String, msg: String },
}

impl LexiconError {
    /// Short machine-parsable category for CLI error lines.
    pub fn category(&self) -> &'static str {
        match self {
            LexiconError::Io(_) => "io",
            LexiconError::Parse { .. } => "parse",
            LexiconError::InvalidEntry { .. } | LexiconError::InvalidCategory { .. } => {
                "invalid-input"
            }
        }
    }
}

/// A word in one thesaurus category: the unit of annotation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordSense {
    pub term: String,
    pub category_id: String,
}

impl WordSense {
    /// Terms are stored lowercase; input casing is normalized here.
    pub fn new(term: &str, category_id: &str) -> Self {
        Self {
            term: term.trim().to_lowercase(),
            category_id: category_id.trim().to_string(),
        }
    }
}

impl fmt::Display for WordSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.term, self.category_id)
    }
}

/// One aggregated word-sense entry: vote vector, majority colour, confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub sense: WordSense,
    pub near_synonym: String,
    pub votes: ColourCounts,
    pub majority: Colour,
    pub confidence: f64,
}

impl LexiconEntry {
    /// Builds an entry, deriving the confidence score. The majority colour
    /// must attain the maximal vote count (the tie-break happens upstream).
    pub fn new(
        sense: WordSense,
        near_synonym: String,
        votes: ColourCounts,
        majority: Colour,
    ) -> Result<Self, LexiconError> {
        let total = votes.total();
        if total == 0 {
            return Err(LexiconError::InvalidEntry {
                term: sense.term,
                category_id: sense.category_id,
                msg: "empty vote vector".into(),
            });
        }
        if votes.get(majority) != votes.max_count() {
            return Err(LexiconError::InvalidEntry {
                term: sense.term,
                category_id: sense.category_id,
                msg: format!("majority {majority} does not attain the maximal vote count"),
            });
        }
        let confidence = votes.get(majority) as f64 / total as f64;
        Ok(Self {
            sense,
            near_synonym,
            votes,
            majority,
            confidence,
        })
    }

    /// Majority class size: the maximal vote count, before any tie-break.
    pub fn majority_class_size(&self) -> u64 {
        self.votes.max_count()
    }
}

// Flat record mirroring the JSON-lines layout; field order is the contract.
#[derive(Serialize, Deserialize)]
struct EntryRecord {
    term: String,
    category_id: String,
    near_synonym: String,
    votes: ColourCounts,
    majority: Colour,
    confidence: f64,
}

impl From<&LexiconEntry> for EntryRecord {
    fn from(e: &LexiconEntry) -> Self {
        EntryRecord {
            term: e.sense.term.clone(),
            category_id: e.sense.category_id.clone(),
            near_synonym: e.near_synonym.clone(),
            votes: e.votes,
            majority: e.majority,
            confidence: e.confidence,
        }
    }
}

/// Serializes entries as JSON-lines in a diff-stable field order.
pub fn write_lexicon_jsonl<W: Write>(
    entries: &[LexiconEntry],
    out: &mut W,
) -> Result<(), LexiconError> {
    for entry in entries {
        let record = EntryRecord::from(entry);
        serde_json::to_writer(&mut *out, &record)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::Other, e))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a JSON-lines lexicon, skipping `#` comment lines and blank lines.
pub fn read_lexicon_jsonl(path: &Path) -> Result<Vec<LexiconEntry>, LexiconError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let record: EntryRecord =
            serde_json::from_str(trimmed).map_err(|e| LexiconError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg: e.to_string(),
            })?;
        let entry = LexiconEntry::new(
            WordSense::new(&record.term, &record.category_id),
            record.near_synonym,
            record.votes,
            record.majority,
        )?;
        // Confidence is derived; tolerate rounding drift from external writers.
        if (entry.confidence - record.confidence).abs() > 1e-9 {
            return Err(LexiconError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg: format!(
                    "confidence {} inconsistent with votes (expected {})",
                    record.confidence, entry.confidence
                ),
            });
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// A thesaurus category: a head label and its member terms.
///
/// Members keep their source order (first member listed is the canonical
/// near-synonym source for HIT generation) but are guaranteed unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThesaurusCategory {
    pub category_id: String,
    pub head: String,
    members: Vec<String>,
}

impl ThesaurusCategory {
    pub fn new(
        category_id: &str,
        head: &str,
        members: impl IntoIterator<Item = String>,
    ) -> Result<Self, LexiconError> {
        let mut seen = std::collections::HashSet::new();
        let mut list = Vec::new();
        for m in members {
            let m = m.trim().to_lowercase();
            if m.is_empty() {
                return Err(LexiconError::InvalidCategory {
                    category_id: category_id.to_string(),
                    msg: "empty member term".into(),
                });
            }
            if seen.insert(m.clone()) {
                list.push(m);
            }
        }
        if list.is_empty() {
            return Err(LexiconError::InvalidCategory {
                category_id: category_id.to_string(),
                msg: "category has no members".into(),
            });
        }
        Ok(Self {
            category_id: category_id.trim().to_string(),
            head: head.trim().to_lowercase(),
            members: list,
        })
    }

    /// Member terms in source order.
    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn contains(&self, term: &str) -> bool {
        self.members.iter().any(|m| m == term)
    }
}

/// An ordered collection of categories with id lookup.
#[derive(Debug, Clone, Default)]
pub struct Thesaurus {
    categories: Vec<ThesaurusCategory>,
    by_id: HashMap<String, usize>,
}

impl Thesaurus {
    pub fn new(categories: Vec<ThesaurusCategory>) -> Result<Self, LexiconError> {
        let mut by_id = HashMap::new();
        for (i, cat) in categories.iter().enumerate() {
            if by_id.insert(cat.category_id.clone(), i).is_some() {
                return Err(LexiconError::InvalidCategory {
                    category_id: cat.category_id.clone(),
                    msg: "duplicate category id".into(),
                });
            }
        }
        Ok(Self { categories, by_id })
    }

    pub fn get(&self, category_id: &str) -> Option<&ThesaurusCategory> {
        self.by_id.get(category_id).map(|&i| &self.categories[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &ThesaurusCategory> {
        self.categories.iter()
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    /// All member terms across categories, sorted and deduplicated.
    pub fn all_terms(&self) -> Vec<String> {
        let mut terms: Vec<String> = self
            .categories
            .iter()
            .flat_map(|c| c.members.iter().cloned())
            .collect();
        terms.sort();
        terms.dedup();
        terms
    }
}

/// Loads a thesaurus from TSV: `category_id<TAB>head<TAB>member,member,...`.
pub fn load_thesaurus(path: &Path) -> Result<Thesaurus, LexiconError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut categories = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(LexiconError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let members = fields[2].split(',').map(|s| s.to_string());
        categories.push(ThesaurusCategory::new(fields[0], fields[1], members)?);
    }
    Thesaurus::new(categories)
}

/// An index from term to the lexicon entries containing it, used by the
/// category-level analyses.
pub struct LexiconIndex<'a> {
    by_term: HashMap<&'a str, Vec<&'a LexiconEntry>>,
    by_sense: HashMap<(&'a str, &'a str), &'a LexiconEntry>,
}

impl<'a> LexiconIndex<'a> {
    pub fn new(entries: &'a [LexiconEntry]) -> Self {
        let mut by_term: HashMap<&str, Vec<&LexiconEntry>> = HashMap::new();
        let mut by_sense = HashMap::new();
        for e in entries {
            by_term.entry(e.sense.term.as_str()).or_default().push(e);
            by_sense.insert(
                (e.sense.term.as_str(), e.sense.category_id.as_str()),
                e,
            );
        }
        Self { by_term, by_sense }
    }

    /// The entry for a term annotated in a specific category, if any.
    pub fn sense_entry(&self, term: &str, category_id: &str) -> Option<&'a LexiconEntry> {
        self.by_sense.get(&(term, category_id)).copied()
    }

    /// All entries for a term across categories.
    pub fn term_entries(&self, term: &str) -> &[&'a LexiconEntry] {
        self.by_term.get(term).map(|v| v.as_slice()).unwrap_or(&[])
    }
}
