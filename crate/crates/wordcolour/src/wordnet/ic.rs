//! Information content from synset frequency counts.
//!
//! Count files hold `offset+pos count` lines (a trailing ROOT marker is
//! tolerated). Raw counts propagate up the hypernym hierarchy: a synset's
//! frequency is its own count plus the counts of all hyponym descendants.
//! IC is `-ln(freq / total)` per part of speech, so a root that dominates
//! every counted synset gets IC 0. Synsets with zero frequency have no IC
//! and are excluded from the IC-based measures.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{PartOfSpeech, SynsetId, WordNetDb, WordNetError};

/// Per-synset information content; only synsets with nonzero propagated
/// frequency are present.
#[derive(Debug, Clone, Default)]
pub struct InformationContent {
    ic: HashMap<SynsetId, f64>,
    /// Count lines referencing synsets missing from the database (skipped).
    pub skipped_unknown: usize,
}

impl InformationContent {
    /// IC of a synset, or `None` when its frequency is zero or unloaded.
    pub fn ic(&self, id: SynsetId) -> Option<f64> {
        self.ic.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.ic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ic.is_empty()
    }

    /// Number of database synsets without a defined IC.
    pub fn undefined_count(&self, db: &WordNetDb) -> usize {
        db.ids().filter(|id| !self.ic.contains_key(id)).count()
    }

    /// Builds IC from raw per-synset counts by propagating them to all
    /// hypernym ancestors and normalizing per part of speech.
    pub fn from_counts<I>(counts: I, db: &WordNetDb) -> Self
    where
        I: IntoIterator<Item = (SynsetId, u64)>,
    {
        let mut freq: HashMap<SynsetId, u64> = HashMap::new();
        let mut totals: HashMap<PartOfSpeech, u64> = HashMap::new();
        let mut skipped = 0usize;
        for (id, count) in counts {
            if db.get(id).is_none() {
                skipped += 1;
                continue;
            }
            if count == 0 {
                continue;
            }
            *totals.entry(id.pos).or_default() += count;
            // Ancestor set (not path walk): multiple hypernym routes to the
            // same ancestor must count a synset's frequency once.
            for ancestor in db.ancestors(id) {
                *freq.entry(ancestor).or_default() += count;
            }
        }
        let ic = freq
            .into_iter()
            .filter_map(|(id, f)| {
                let total = *totals.get(&id.pos)?;
                Some((id, -(f as f64 / total as f64).ln()))
            })
            .collect();
        Self {
            ic,
            skipped_unknown: skipped,
        }
    }
}

/// Loads a count file and derives information content.
pub fn load_information_content(
    path: &Path,
    db: &WordNetDb,
) -> Result<InformationContent, WordNetError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut counts = Vec::new();
    let mut skipped_unknown = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("wnver") {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let key = fields.next().unwrap();
        let count_str = fields.next().ok_or_else(|| WordNetError::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg: "missing count".into(),
        })?;
        // A third field (the ROOT marker) is tolerated and ignored.
        let id = parse_offset_pos(key).ok_or_else(|| WordNetError::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg: format!("bad synset key `{key}`"),
        })?;
        let count: u64 = count_str.parse().map_err(|_| WordNetError::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg: format!("bad count `{count_str}`"),
        })?;
        if db.get(id).is_none() {
            skipped_unknown += 1;
            continue;
        }
        counts.push((id, count));
    }
    let mut ic = InformationContent::from_counts(counts, db);
    ic.skipped_unknown += skipped_unknown;
    Ok(ic)
}

fn parse_offset_pos(key: &str) -> Option<SynsetId> {
    let (digits, letter) = key.split_at(key.len().checked_sub(1)?);
    let pos = PartOfSpeech::parse(letter)?;
    let offset: u64 = digits.parse().ok()?;
    Some(SynsetId { offset, pos })
}


#[cfg(test)]
impl WordNetDb {
    fn by_ref(&self) -> &Self {
        self
    }
}
