//! Category-level colour association: strength scores, the gold standard of
//! strongly associated categories, and imageability aggregates.
//!
//! A category's strength is the share of its annotated members whose majority
//! colour equals the category's most common colour. Only members annotated in
//! this category (sense-level match) count, and a category needs at least
//! `min_members` annotated members to be eligible.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

use crate::colour::{Colour, ColourCounts};
use crate::lexicon::{LexiconEntry, LexiconIndex, Thesaurus, ThesaurusCategory};

pub const DEFAULT_MIN_MEMBERS: usize = 4;
pub const DEFAULT_GOLD_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum CategoryError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}

impl CategoryError {
    pub fn category(&self) -> &'static str {
        match self {
            CategoryError::Io(_) => "io",
            CategoryError::Parse { .. } => "parse",
        }
    }
}

/// Colour association strength of one eligible category.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryColourScore {
    pub category_id: String,
    pub best_colour: Colour,
    /// Share of annotated members whose majority is `best_colour`; in
    /// `(0, 1]` and at least `1/n_annotated`.
    pub strength: f64,
    /// Number of category members with a lexicon entry in this category.
    pub n_annotated: usize,
}

/// Strength of the colour association of a category, or `None` when fewer
/// than `min_members` members are annotated.
///
/// The best colour is the modal majority colour over annotated members, ties
/// broken by B&K rank.
pub fn category_colour_strength(
    cat: &ThesaurusCategory,
    index: &LexiconIndex<'_>,
    min_members: usize,
) -> Option<CategoryColourScore> {
    let mut member_majorities = ColourCounts::new();
    let mut n_annotated = 0usize;
    for member in cat.members() {
        if let Some(entry) = index.sense_entry(member, &cat.category_id) {
            member_majorities.add(entry.majority, 1);
            n_annotated += 1;
        }
    }
    if n_annotated < min_members {
        return None;
    }
    let best_colour = member_majorities.argmax().expect("n_annotated > 0");
    let strength = member_majorities.get(best_colour) as f64 / n_annotated as f64;
    Some(CategoryColourScore {
        category_id: cat.category_id.clone(),
        best_colour,
        strength,
        n_annotated,
    })
}

/// One gold-standard entry: a strongly colour-associated category.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldEntry {
    pub head: String,
    pub colour: Colour,
    pub strength: f64,
    pub n_annotated: usize,
}

/// Categories whose strength reached the extraction threshold, keyed by id.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldStandard {
    pub threshold: f64,
    pub entries: BTreeMap<String, GoldEntry>,
}

impl GoldStandard {
    pub fn colour_of(&self, category_id: &str) -> Option<Colour> {
        self.entries.get(category_id).map(|e| e.colour)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The most common gold colour, ties broken by B&K rank.
    pub fn modal_colour(&self) -> Option<Colour> {
        let mut counts = ColourCounts::new();
        for e in self.entries.values() {
            counts.add(e.colour, 1);
        }
        counts.argmax()
    }

    /// Share of gold entries labelled with the modal colour, as a percentage.
    pub fn modal_colour_share(&self) -> f64 {
        match self.modal_colour() {
            None => 0.0,
            Some(modal) => {
                let n = self
                    .entries
                    .values()
                    .filter(|e| e.colour == modal)
                    .count();
                100.0 * n as f64 / self.entries.len() as f64
            }
        }
    }
}

/// All eligible categories with strength at or above `threshold`.
pub fn extract_gold_standard(
    thesaurus: &Thesaurus,
    lexicon: &[LexiconEntry],
    threshold: f64,
    min_members: usize,
) -> GoldStandard {
    let index = LexiconIndex::new(lexicon);
    let mut entries = BTreeMap::new();
    for cat in thesaurus.iter() {
        if let Some(score) = category_colour_strength(cat, &index, min_members) {
            if score.strength >= threshold {
                entries.insert(
                    score.category_id.clone(),
                    GoldEntry {
                        head: cat.head.clone(),
                        colour: score.best_colour,
                        strength: score.strength,
                        n_annotated: score.n_annotated,
                    },
                );
            }
        }
    }
    GoldStandard { threshold, entries }
}

/// Human imageability ratings on the 100 (hard to visualize) to 700 (easy)
/// scale.
#[derive(Debug, Clone, Default)]
pub struct ImageabilityTable {
    ratings: std::collections::HashMap<String, f64>,
}

impl ImageabilityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, term: &str, rating: f64) -> Result<(), CategoryError> {
        if !(100.0..=700.0).contains(&rating) {
            return Err(CategoryError::Parse {
                path: String::new(),
                line: 0,
                msg: format!("rating {rating} for `{term}` outside [100, 700]"),
            });
        }
        self.ratings.insert(term.trim().to_lowercase(), rating);
        Ok(())
    }

    pub fn rating(&self, term: &str) -> Option<f64> {
        self.ratings.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }
}

/// Loads imageability ratings from TSV: `term<TAB>rating`.
pub fn load_imageability(path: &Path) -> Result<ImageabilityTable, CategoryError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut table = ImageabilityTable::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 2 {
            return Err(CategoryError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg: format!("expected 2 tab-separated fields, found {}", fields.len()),
            });
        }
        let rating: f64 = fields[1].trim().parse().map_err(|_| CategoryError::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg: format!("bad rating `{}`", fields[1]),
        })?;
        table.insert(fields[0], rating).map_err(|e| match e {
            CategoryError::Parse { msg, .. } => CategoryError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg,
            },
            other => other,
        })?;
    }
    Ok(table)
}

/// Mean imageability rating over category members that appear in both the
/// colour lexicon (any sense of the member in this category) and the ratings
/// table. `None` when no member qualifies.
pub fn category_imageability(
    cat: &ThesaurusCategory,
    ratings: &ImageabilityTable,
    index: &LexiconIndex<'_>,
) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for member in cat.members() {
        if index.sense_entry(member, &cat.category_id).is_some() {
            if let Some(r) = ratings.rating(member) {
                sum += r;
                n += 1;
            }
        }
    }
    if n == 0 {
        None
    } else {
        Some(sum / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::WordSense;

    fn entry(term: &str, cat: &str, colour: Colour) -> LexiconEntry {
        LexiconEntry::new(
            WordSense::new(term, cat),
            "g".into(),
            ColourCounts::from_pairs([(colour, 3)]),
            colour,
        )
        .unwrap()
    }

    fn category(id: &str, members: &[&str]) -> ThesaurusCategory {
        ThesaurusCategory::new(id, members[0], members.iter().map(|s| s.to_string())).unwrap()
    }

    #[test]
    fn four_distinct_colours_hit_the_strength_floor() {
        let cat = category("c1", &["a", "b", "c", "d"]);
        let lexicon = vec![
            entry("a", "c1", Colour::Red),
            entry("b", "c1", Colour::Blue),
            entry("c", "c1", Colour::White),
            entry("d", "c1", Colour::Green),
        ];
        let index = LexiconIndex::new(&lexicon);
        let score = category_colour_strength(&cat, &index, 4).unwrap();
        assert_eq!(score.strength, 0.25);
        assert_eq!(score.n_annotated, 4);
        // All four colours tie at one vote; white wins on B&K rank.
        assert_eq!(score.best_colour, Colour::White);
    }

    #[test]
    fn unanimous_category() {
        let cat = category("c1", &["a", "b", "c", "d", "e"]);
        let lexicon: Vec<LexiconEntry> = ["a", "b", "c", "d", "e"]
            .iter()
            .map(|t| entry(t, "c1", Colour::Black))
            .collect();
        let index = LexiconIndex::new(&lexicon);
        let score = category_colour_strength(&cat, &index, 4).unwrap();
        assert_eq!(score.best_colour, Colour::Black);
        assert_eq!(score.strength, 1.0);
    }

    #[test]
    fn plurality_hand_count() {
        let cat = category("c1", &["a", "b", "c", "d", "e"]);
        let lexicon = vec![
            entry("a", "c1", Colour::Red),
            entry("b", "c1", Colour::Red),
            entry("c", "c1", Colour::Blue),
            entry("d", "c1", Colour::White),
            entry("e", "c1", Colour::Green),
        ];
        let index = LexiconIndex::new(&lexicon);
        let score = category_colour_strength(&cat, &index, 4).unwrap();
        assert_eq!(score.best_colour, Colour::Red);
        assert!((score.strength - 0.4).abs() < 1e-12);
    }

    #[test]
    fn too_few_annotated_members_is_ineligible() {
        let cat = category("c1", &["a", "b", "c", "d"]);
        let lexicon = vec![
            entry("a", "c1", Colour::Red),
            entry("b", "c1", Colour::Red),
            entry("c", "c1", Colour::Red),
        ];
        let index = LexiconIndex::new(&lexicon);
        assert!(category_colour_strength(&cat, &index, 4).is_none());
    }

    #[test]
    fn other_sense_entries_do_not_count() {
        let cat = category("c1", &["a", "b", "c", "d"]);
        // `d` is only annotated under a different category.
        let lexicon = vec![
            entry("a", "c1", Colour::Red),
            entry("b", "c1", Colour::Red),
            entry("c", "c1", Colour::Red),
            entry("d", "c9", Colour::Red),
        ];
        let index = LexiconIndex::new(&lexicon);
        assert!(category_colour_strength(&cat, &index, 4).is_none());
    }

    #[test]
    fn gold_extraction_thresholds() {
        // A: 4 distinct (0.25); B: 2 of 4 red (0.5); C: 3 of 4 red (0.75).
        let thesaurus = Thesaurus::new(vec![
            category("a", &["a1", "a2", "a3", "a4"]),
            category("b", &["b1", "b2", "b3", "b4"]),
            category("c", &["c1", "c2", "c3", "c4"]),
        ])
        .unwrap();
        let lexicon = vec![
            entry("a1", "a", Colour::Red),
            entry("a2", "a", Colour::Blue),
            entry("a3", "a", Colour::Green),
            entry("a4", "a", Colour::Brown),
            entry("b1", "b", Colour::Red),
            entry("b2", "b", Colour::Red),
            entry("b3", "b", Colour::Blue),
            entry("b4", "b", Colour::Green),
            entry("c1", "c", Colour::Red),
            entry("c2", "c", Colour::Red),
            entry("c3", "c", Colour::Red),
            entry("c4", "c", Colour::Blue),
        ];
        let gold = extract_gold_standard(&thesaurus, &lexicon, 0.5, 4);
        assert_eq!(gold.len(), 2);
        assert_eq!(gold.colour_of("b"), Some(Colour::Red));
        assert_eq!(gold.colour_of("c"), Some(Colour::Red));
        assert_eq!(gold.colour_of("a"), None);

        let strict = extract_gold_standard(&thesaurus, &lexicon, 1.0, 4);
        assert!(strict.is_empty());

        // Lower threshold includes everything eligible: subset property.
        let loose = extract_gold_standard(&thesaurus, &lexicon, 0.25, 4);
        for id in gold.entries.keys() {
            assert!(loose.entries.contains_key(id));
        }
        assert_eq!(loose.len(), 3);
    }

    #[test]
    fn imageability_mean_over_lexicon_members() {
        let cat = category("c1", &["a", "b", "c"]);
        let lexicon = vec![entry("a", "c1", Colour::Red), entry("b", "c1", Colour::Blue)];
        let index = LexiconIndex::new(&lexicon);
        let mut ratings = ImageabilityTable::new();
        ratings.insert("a", 300.0).unwrap();
        ratings.insert("b", 500.0).unwrap();
        ratings.insert("c", 700.0).unwrap(); // not in lexicon, ignored
        assert_eq!(category_imageability(&cat, &ratings, &index), Some(400.0));

        let single = category("c2", &["x"]);
        let lex2 = vec![entry("x", "c2", Colour::Red)];
        let idx2 = LexiconIndex::new(&lex2);
        let mut r2 = ImageabilityTable::new();
        r2.insert("x", 650.0).unwrap();
        assert_eq!(category_imageability(&single, &r2, &idx2), Some(650.0));

        // No rated member in the lexicon.
        let none = category_imageability(&cat, &ImageabilityTable::new(), &index);
        assert_eq!(none, None);
    }

    #[test]
    fn imageability_table_rejects_out_of_scale() {
        let mut t = ImageabilityTable::new();
        assert!(t.insert("x", 99.0).is_err());
        assert!(t.insert("x", 701.0).is_err());
        assert!(t.insert("x", 100.0).is_ok());
        assert!(t.insert("y", 700.0).is_ok());
    }

    #[test]
    fn modal_colour_share() {
        let thesaurus = Thesaurus::new(vec![
            category("a", &["a1", "a2", "a3", "a4"]),
            category("b", &["b1", "b2", "b3", "b4"]),
            category("c", &["c1", "c2", "c3", "c4"]),
        ])
        .unwrap();
        let mut lexicon = Vec::new();
        for (cat, colour) in [("a", Colour::Red), ("b", Colour::Red), ("c", Colour::Blue)] {
            for i in 1..=4 {
                lexicon.push(entry(&format!("{cat}{i}"), cat, colour));
            }
        }
        let gold = extract_gold_standard(&thesaurus, &lexicon, 0.5, 4);
        assert_eq!(gold.modal_colour(), Some(Colour::Red));
        let share = gold.modal_colour_share();
        assert!((share - 200.0 / 3.0).abs() < 1e-9);
    }
}
