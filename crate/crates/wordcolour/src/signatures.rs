//! Colour signatures: cross-tabulation of the colour lexicon with a
//! term-label lexicon (emotions, polarities, or any other label inventory).
//!
//! The signature of a label is the distribution over majority colours of the
//! terms carrying that label. Label lexicons can associate labels at the
//! sense level (term + category) or the plain term level; sense-level is the
//! default join and term-level lets every sense of a labelled term contribute
//! one vote.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use thiserror::Error;

use crate::colour::Colour;
use crate::lexicon::LexiconEntry;

#[derive(Debug, Error)]
pub enum SignatureError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("label `{0}` outside the declared inventory")]
    UnknownInventoryLabel(String),
    #[error("no term carries both a label and a colour entry")]
    NoOverlap,
    #[error("label `{0}` not present in the signature matrix")]
    UnknownLabel(String),
}

impl SignatureError {
    pub fn category(&self) -> &'static str {
        match self {
            SignatureError::Io(_) => "io",
            SignatureError::Parse { .. } => "parse",
            SignatureError::UnknownInventoryLabel(_) => "invalid-input",
            SignatureError::NoOverlap => "no-overlap",
            SignatureError::UnknownLabel(_) => "unknown-label",
        }
    }
}

/// Whether labels attach to senses or to plain terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelLevel {
    /// Labels keyed by (term, category_id).
    Sense,
    /// Labels keyed by term; all senses of the term inherit them.
    Term,
}

/// A lexicon of term (or sense) to label associations over a declared
/// inventory.
#[derive(Debug, Clone)]
pub struct LabelLexicon {
    level: LabelLevel,
    inventory: BTreeSet<String>,
    // Sense keys carry Some(category_id); term keys carry None.
    associations: HashMap<(String, Option<String>), BTreeSet<String>>,
}

impl LabelLexicon {
    pub fn new(level: LabelLevel, inventory: impl IntoIterator<Item = String>) -> Self {
        Self {
            level,
            inventory: inventory.into_iter().map(|l| l.to_lowercase()).collect(),
            associations: HashMap::new(),
        }
    }

    pub fn level(&self) -> LabelLevel {
        self.level
    }

    pub fn inventory(&self) -> &BTreeSet<String> {
        &self.inventory
    }

    pub fn add_term(&mut self, term: &str, label: &str) -> Result<(), SignatureError> {
        debug_assert_eq!(self.level, LabelLevel::Term);
        self.add_key((term.trim().to_lowercase(), None), label)
    }

    pub fn add_sense(
        &mut self,
        term: &str,
        category_id: &str,
        label: &str,
    ) -> Result<(), SignatureError> {
        debug_assert_eq!(self.level, LabelLevel::Sense);
        self.add_key(
            (
                term.trim().to_lowercase(),
                Some(category_id.trim().to_string()),
            ),
            label,
        )
    }

    fn add_key(
        &mut self,
        key: (String, Option<String>),
        label: &str,
    ) -> Result<(), SignatureError> {
        let label = label.trim().to_lowercase();
        if !self.inventory.contains(&label) {
            return Err(SignatureError::UnknownInventoryLabel(label));
        }
        self.associations.entry(key).or_default().insert(label);
        Ok(())
    }

    /// Labels carried by a lexicon entry under this lexicon's join level.
    pub fn labels_for(&self, entry: &LexiconEntry) -> Option<&BTreeSet<String>> {
        let key = match self.level {
            LabelLevel::Sense => (
                entry.sense.term.clone(),
                Some(entry.sense.category_id.clone()),
            ),
            LabelLevel::Term => (entry.sense.term.clone(), None),
        };
        self.associations.get(&key)
    }

    /// Labels carried by a bare term (term-level lookup only).
    pub fn labels_for_term(&self, term: &str) -> Option<&BTreeSet<String>> {
        match self.level {
            LabelLevel::Term => self.associations.get(&(term.to_lowercase(), None)),
            LabelLevel::Sense => None,
        }
    }

    /// Labels carried by a term in a given category, falling back to the
    /// term-level association when the lexicon is term-level.
    pub fn labels_for_sense(&self, term: &str, category_id: &str) -> Option<&BTreeSet<String>> {
        let key = match self.level {
            LabelLevel::Sense => (term.to_lowercase(), Some(category_id.to_string())),
            LabelLevel::Term => (term.to_lowercase(), None),
        };
        self.associations.get(&key)
    }

    pub fn len(&self) -> usize {
        self.associations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.associations.is_empty()
    }
}

/// Loads an NRC-style label lexicon.
///
/// Three tab-separated columns `term<TAB>label<TAB>flag` give a term-level
/// lexicon; four columns `term<TAB>category_id<TAB>label<TAB>flag` give a
/// sense-level one. Rows with flag 0 are ignored. The inventory is the set
/// of labels seen in the file (including flag-0 rows).
pub fn load_label_lexicon(path: &Path) -> Result<LabelLexicon, SignatureError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = trimmed.split('\t').map(|s| s.to_string()).collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(SignatureError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg: format!("expected 3 or 4 tab-separated fields, found {}", fields.len()),
            });
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(SignatureError::Parse {
                    path: path.display().to_string(),
                    line: idx + 1,
                    msg: "mixed 3- and 4-column rows".into(),
                })
            }
            _ => {}
        }
        rows.push((idx + 1, fields));
    }

    let level = match width {
        Some(4) => LabelLevel::Sense,
        _ => LabelLevel::Term,
    };
    let label_col = if level == LabelLevel::Sense { 2 } else { 1 };
    let inventory: BTreeSet<String> = rows
        .iter()
        .map(|(_, f)| f[label_col].trim().to_lowercase())
        .collect();
    let mut lexicon = LabelLexicon::new(level, inventory);
    for (line_no, fields) in rows {
        let flag = fields.last().unwrap().trim();
        let keep = match flag {
            "0" => false,
            "1" => true,
            other => {
                return Err(SignatureError::Parse {
                    path: path.display().to_string(),
                    line: line_no,
                    msg: format!("flag must be 0 or 1, found `{other}`"),
                })
            }
        };
        if !keep {
            continue;
        }
        match level {
            LabelLevel::Term => lexicon.add_term(&fields[0], &fields[1])?,
            LabelLevel::Sense => lexicon.add_sense(&fields[0], &fields[1], &fields[2])?,
        }
    }
    Ok(lexicon)
}

/// Per-label colour distribution over the joined lexicons.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureMatrix {
    /// Percentage rows in B&K colour order; each row sums to 100.
    rows: BTreeMap<String, [f64; 11]>,
    /// Number of colour-lexicon entries contributing to each row.
    support: BTreeMap<String, usize>,
}

impl SignatureMatrix {
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(|s| s.as_str())
    }

    pub fn row(&self, label: &str) -> Option<&[f64; 11]> {
        self.rows.get(label)
    }

    pub fn cell(&self, label: &str, colour: Colour) -> Option<f64> {
        self.rows.get(label).map(|r| r[colour.index()])
    }

    pub fn support(&self, label: &str) -> Option<usize> {
        self.support.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Cross-tabulates labels with majority colours.
///
/// For each label, the row is the percentage of labelled entries whose
/// majority is each colour. Entries with several labels contribute to every
/// matching row; labels with zero support are omitted.
pub fn association_signature(
    labels: &LabelLexicon,
    colour_lexicon: &[LexiconEntry],
) -> Result<SignatureMatrix, SignatureError> {
    let mut counts: BTreeMap<String, [u64; 11]> = BTreeMap::new();
    let mut support: BTreeMap<String, usize> = BTreeMap::new();
    for entry in colour_lexicon {
        let Some(entry_labels) = labels.labels_for(entry) else {
            continue;
        };
        for label in entry_labels {
            counts.entry(label.clone()).or_insert([0; 11])[entry.majority.index()] += 1;
            *support.entry(label.clone()).or_default() += 1;
        }
    }
    if counts.is_empty() {
        return Err(SignatureError::NoOverlap);
    }
    let rows = counts
        .into_iter()
        .map(|(label, row)| {
            let total: u64 = row.iter().sum();
            let mut pct = [0.0; 11];
            for (i, c) in row.iter().enumerate() {
                pct[i] = 100.0 * *c as f64 / total as f64;
            }
            (label, pct)
        })
        .collect();
    Ok(SignatureMatrix { rows, support })
}

/// The `k` colours with the highest percentage in a row, descending, with
/// percentage ties broken by B&K rank. Returns at most eleven pairs.
pub fn top_colours(
    matrix: &SignatureMatrix,
    label: &str,
    k: usize,
) -> Result<Vec<(Colour, f64)>, SignatureError> {
    let row = matrix
        .row(label)
        .ok_or_else(|| SignatureError::UnknownLabel(label.to_string()))?;
    let mut pairs: Vec<(Colour, f64)> = Colour::ALL.iter().map(|&c| (c, row[c.index()])).collect();
    // Stable sort keeps B&K order inside equal percentages.
    pairs.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("percentages are finite"));
    pairs.truncate(k);
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colour::ColourCounts;
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

    fn emotions() -> Vec<String> {
        ["anger", "joy"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn anger_fixture_row() {
        let mut labels = LabelLexicon::new(LabelLevel::Term, emotions());
        labels.add_term("rage", "anger").unwrap();
        labels.add_term("fury", "anger").unwrap();
        let lexicon = vec![entry("rage", "c1", Colour::Red), entry("fury", "c2", Colour::Red)];
        let matrix = association_signature(&labels, &lexicon).unwrap();
        assert_eq!(matrix.cell("anger", Colour::Red), Some(100.0));
        assert_eq!(matrix.cell("anger", Colour::Black), Some(0.0));
        assert_eq!(matrix.support("anger"), Some(2));
        // joy has no labelled term in the colour lexicon: omitted.
        assert!(matrix.row("joy").is_none());
    }

    #[test]
    fn rows_sum_to_100() {
        let mut labels = LabelLexicon::new(LabelLevel::Term, emotions());
        for (t, l) in [("a", "anger"), ("b", "anger"), ("c", "joy"), ("d", "anger")] {
            labels.add_term(t, l).unwrap();
        }
        let lexicon = vec![
            entry("a", "c1", Colour::Red),
            entry("b", "c1", Colour::Black),
            entry("c", "c1", Colour::White),
            entry("d", "c1", Colour::Grey),
        ];
        let matrix = association_signature(&labels, &lexicon).unwrap();
        for label in ["anger", "joy"] {
            let sum: f64 = matrix.row(label).unwrap().iter().sum();
            assert!((sum - 100.0).abs() < 0.1, "row {label} sums to {sum}");
        }
    }

    #[test]
    fn sense_level_join_distinguishes_categories() {
        let mut labels = LabelLexicon::new(LabelLevel::Sense, emotions());
        labels.add_sense("bolt", "c1", "anger").unwrap();
        let lexicon = vec![
            entry("bolt", "c1", Colour::Red),
            entry("bolt", "c2", Colour::Blue), // different sense, unlabelled
        ];
        let matrix = association_signature(&labels, &lexicon).unwrap();
        assert_eq!(matrix.cell("anger", Colour::Red), Some(100.0));
        assert_eq!(matrix.support("anger"), Some(1));
    }

    #[test]
    fn term_level_join_covers_all_senses() {
        let mut labels = LabelLexicon::new(LabelLevel::Term, emotions());
        labels.add_term("bolt", "anger").unwrap();
        let lexicon = vec![
            entry("bolt", "c1", Colour::Red),
            entry("bolt", "c2", Colour::Blue),
        ];
        let matrix = association_signature(&labels, &lexicon).unwrap();
        assert_eq!(matrix.support("anger"), Some(2));
        assert_eq!(matrix.cell("anger", Colour::Red), Some(50.0));
    }

    #[test]
    fn disjoint_lexicons_report_no_overlap() {
        let mut labels = LabelLexicon::new(LabelLevel::Term, emotions());
        labels.add_term("absent", "anger").unwrap();
        let lexicon = vec![entry("present", "c1", Colour::Red)];
        assert!(matches!(
            association_signature(&labels, &lexicon),
            Err(SignatureError::NoOverlap)
        ));
    }

    #[test]
    fn top_colours_ordering_and_ties() {
        let mut labels = LabelLexicon::new(LabelLevel::Term, emotions());
        for t in ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j"] {
            labels.add_term(t, "anger").unwrap();
        }
        // 60% red, 30% black, 10% grey.
        let lexicon = vec![
            entry("a", "c", Colour::Red),
            entry("b", "c", Colour::Red),
            entry("c", "c", Colour::Red),
            entry("d", "c", Colour::Red),
            entry("e", "c", Colour::Red),
            entry("f", "c", Colour::Red),
            entry("g", "c", Colour::Black),
            entry("h", "c", Colour::Black),
            entry("i", "c", Colour::Black),
            entry("j", "c", Colour::Grey),
        ];
        let matrix = association_signature(&labels, &lexicon).unwrap();
        let top = top_colours(&matrix, "anger", 2).unwrap();
        assert_eq!(top[0], (Colour::Red, 60.0));
        assert_eq!(top[1], (Colour::Black, 30.0));

        // k beyond the nonzero cells: zero cells follow in B&K order.
        let all = top_colours(&matrix, "anger", 11).unwrap();
        assert_eq!(all.len(), 11);
        assert_eq!(all[2], (Colour::Grey, 10.0));
        assert_eq!(all[3].0, Colour::White);
        assert_eq!(all[4].0, Colour::Green);

        assert!(top_colours(&matrix, "joy", 1).is_err());
    }

    #[test]
    fn nrc_file_parses_both_layouts() {
        let dir = tempfile::tempdir().unwrap();
        let term_path = dir.path().join("term.tsv");
        std::fs::write(&term_path, "rage\tanger\t1\nrage\tjoy\t0\ncalm\tjoy\t1\n").unwrap();
        let lex = load_label_lexicon(&term_path).unwrap();
        assert_eq!(lex.level(), LabelLevel::Term);
        assert_eq!(lex.inventory().len(), 2);
        assert!(lex.labels_for_term("rage").unwrap().contains("anger"));
        assert!(!lex.labels_for_term("rage").unwrap().contains("joy"));

        let sense_path = dir.path().join("sense.tsv");
        std::fs::write(&sense_path, "rage\tc1\tanger\t1\n").unwrap();
        let lex = load_label_lexicon(&sense_path).unwrap();
        assert_eq!(lex.level(), LabelLevel::Sense);
        assert!(lex.labels_for_sense("rage", "c1").unwrap().contains("anger"));
        assert!(lex.labels_for_sense("rage", "c2").is_none());
    }
}
