//! WordNet-backed colour prediction: a parser for the standard text-layout
//! database, information-content loading, and four synset closeness
//! measures (Jiang-Conrath, Lin, Lesk gloss overlap, gloss cosine).
//!
//! The database loads from the `data.{noun,verb,adj,adv}` files of a
//! WordNet-style directory (gloss after the `|` separator). Lemma lookup is
//! built from the synset word lists, so the `index.*` files are not needed.

mod ic;
mod measures;
mod parse;

pub use ic::{load_information_content, InformationContent};
pub use measures::{synset_closeness, ClosenessOptions, Measure, SenseAggregation};

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::colour::Colour;
use crate::corpus::Prediction;
use crate::lexicon::ThesaurusCategory;

#[derive(Debug, Error)]
pub enum WordNetError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("no data files found in `{0}`")]
    NoDataFiles(String),
    #[error("dangling pointer {symbol} from {from} to missing synset {to}")]
    DanglingPointer {
        from: SynsetId,
        to: SynsetId,
        symbol: String,
    },
    #[error("hypernym cycle through {0}")]
    HypernymCycle(SynsetId),
    #[error("measure {measure} unavailable: {reason}")]
    MeasureUnavailable {
        measure: &'static str,
        reason: String,
    },
}

impl WordNetError {
    pub fn category(&self) -> &'static str {
        match self {
            WordNetError::Io(_) => "io",
            WordNetError::Parse { .. } | WordNetError::NoDataFiles(_) => "parse",
            WordNetError::DanglingPointer { .. } => "dangling-pointer",
            WordNetError::HypernymCycle(_) => "invalid-input",
            WordNetError::MeasureUnavailable { .. } => "measure-unavailable",
        }
    }
}

/// Part of speech of a synset. Adjective satellites fold into `Adjective`,
/// matching how pointers address them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartOfSpeech {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl PartOfSpeech {
    pub fn parse(letter: &str) -> Option<Self> {
        Some(match letter {
            "n" => PartOfSpeech::Noun,
            "v" => PartOfSpeech::Verb,
            "a" | "s" => PartOfSpeech::Adjective,
            "r" => PartOfSpeech::Adverb,
            _ => return None,
        })
    }

    pub fn letter(self) -> char {
        match self {
            PartOfSpeech::Noun => 'n',
            PartOfSpeech::Verb => 'v',
            PartOfSpeech::Adjective => 'a',
            PartOfSpeech::Adverb => 'r',
        }
    }
}

/// A synset identifier: data-file offset plus part of speech.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId {
    pub offset: u64,
    pub pos: PartOfSpeech,
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}{}", self.offset, self.pos.letter())
    }
}

/// Pointer classes the measures care about; everything else is kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationKind {
    Hypernym,
    Hyponym,
    Other(String),
}

impl RelationKind {
    fn from_symbol(symbol: &str) -> Self {
        match symbol {
            "@" | "@i" => RelationKind::Hypernym,
            "~" | "~i" => RelationKind::Hyponym,
            other => RelationKind::Other(other.to_string()),
        }
    }
}

/// One synset: lemmas, gloss, and typed relations to other synsets.
#[derive(Debug, Clone, PartialEq)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub gloss: String,
    pub relations: Vec<(RelationKind, SynsetId)>,
}

impl Synset {
    pub fn hypernyms(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.relations
            .iter()
            .filter(|(k, _)| *k == RelationKind::Hypernym)
            .map(|(_, id)| *id)
    }

    pub fn hyponyms(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.relations
            .iter()
            .filter(|(k, _)| *k == RelationKind::Hyponym)
            .map(|(_, id)| *id)
    }
}

/// An immutable, fully linked WordNet database.
#[derive(Debug, Clone)]
pub struct WordNetDb {
    synsets: HashMap<SynsetId, Synset>,
    lemma_index: HashMap<String, Vec<SynsetId>>,
}

impl WordNetDb {
    /// Builds a database from parsed synsets, checking that every relation
    /// target exists and that the noun hypernym graph is acyclic.
    pub fn from_synsets(synsets: Vec<Synset>) -> Result<Self, WordNetError> {
        let map: HashMap<SynsetId, Synset> =
            synsets.into_iter().map(|s| (s.id, s)).collect();
        for synset in map.values() {
            for (kind, target) in &synset.relations {
                if !map.contains_key(target) {
                    let symbol = match kind {
                        RelationKind::Hypernym => "@".to_string(),
                        RelationKind::Hyponym => "~".to_string(),
                        RelationKind::Other(s) => s.clone(),
                    };
                    return Err(WordNetError::DanglingPointer {
                        from: synset.id,
                        to: *target,
                        symbol,
                    });
                }
            }
        }

        let mut lemma_index: HashMap<String, Vec<SynsetId>> = HashMap::new();
        for synset in map.values() {
            for lemma in &synset.lemmas {
                lemma_index.entry(lemma.clone()).or_default().push(synset.id);
            }
        }
        for ids in lemma_index.values_mut() {
            ids.sort();
            ids.dedup();
        }

        let db = Self {
            synsets: map,
            lemma_index,
        };
        db.check_noun_acyclicity()?;
        Ok(db)
    }

    // Iterative three-state DFS over noun hypernym edges.
    fn check_noun_acyclicity(&self) -> Result<(), WordNetError> {
        #[derive(Clone, Copy, PartialEq)]
        enum State {
            Unseen,
            Active,
            Done,
        }
        let mut states: HashMap<SynsetId, State> = self
            .synsets
            .keys()
            .filter(|id| id.pos == PartOfSpeech::Noun)
            .map(|id| (*id, State::Unseen))
            .collect();
        let ids: Vec<SynsetId> = states.keys().copied().collect();
        for start in ids {
            if states[&start] != State::Unseen {
                continue;
            }
            // Stack entries: (node, entered). Post-order marks Done.
            let mut stack = vec![(start, false)];
            while let Some((node, entered)) = stack.pop() {
                if entered {
                    states.insert(node, State::Done);
                    continue;
                }
                match states[&node] {
                    State::Done => continue,
                    State::Active => return Err(WordNetError::HypernymCycle(node)),
                    State::Unseen => {}
                }
                states.insert(node, State::Active);
                stack.push((node, true));
                for hyper in self.synsets[&node].hypernyms() {
                    match states.get(&hyper) {
                        Some(State::Active) => {
                            return Err(WordNetError::HypernymCycle(hyper))
                        }
                        Some(State::Unseen) => stack.push((hyper, false)),
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, id: SynsetId) -> Option<&Synset> {
        self.synsets.get(&id)
    }

    /// All synsets containing a lemma, across parts of speech. Lookup is
    /// case-insensitive and joins multiword lemmas with underscores.
    pub fn synsets_for(&self, lemma: &str) -> Vec<&Synset> {
        let key = lemma.trim().to_lowercase().replace(' ', "_");
        self.lemma_index
            .get(&key)
            .map(|ids| ids.iter().map(|id| &self.synsets[id]).collect())
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.synsets.keys().copied()
    }

    /// Transitive hypernym closure of a synset, including itself.
    pub fn ancestors(&self, id: SynsetId) -> HashSet<SynsetId> {
        let mut seen = HashSet::new();
        let mut stack = vec![id];
        while let Some(node) = stack.pop() {
            if !seen.insert(node) {
                continue;
            }
            if let Some(synset) = self.synsets.get(&node) {
                stack.extend(synset.hypernyms());
            }
        }
        seen
    }
}

/// Loads a database from the data files in a WordNet-layout directory.
pub fn load_wordnet(dir: &Path) -> Result<WordNetDb, WordNetError> {
    let mut synsets = Vec::new();
    let mut found = false;
    for name in ["data.noun", "data.verb", "data.adj", "data.adv"] {
        let path = dir.join(name);
        if !path.exists() {
            continue;
        }
        found = true;
        synsets.extend(parse::parse_data_file(&path)?);
    }
    if !found {
        return Err(WordNetError::NoDataFiles(dir.display().to_string()));
    }
    WordNetDb::from_synsets(synsets)
}

/// Maximum closeness between any synset of `term` and any synset of the
/// colour's lemma, under the chosen measure. Pairs where the measure is
/// unavailable (wrong part of speech, missing IC) are skipped; a term or
/// colour absent from the database scores 0.
pub fn word_colour_closeness(
    term: &str,
    colour: Colour,
    db: &WordNetDb,
    measure: Measure,
    ic: Option<&InformationContent>,
    options: &ClosenessOptions,
) -> f64 {
    let term_synsets = db.synsets_for(term);
    let colour_synsets = db.synsets_for(colour.name());
    let mut aggregate: Option<f64> = None;
    for a in &term_synsets {
        for b in &colour_synsets {
            if let Ok(score) = synset_closeness(a, b, measure, db, ic, options) {
                let agg = aggregate.get_or_insert(0.0);
                match options.sense_aggregation {
                    SenseAggregation::Max => *agg = agg.max(score),
                    SenseAggregation::Sum => *agg += score,
                }
            }
        }
    }
    aggregate.unwrap_or(0.0)
}

/// Sums member closeness per colour and picks the argmax (B&K tie-break);
/// abstains when every colour sums to zero.
pub fn predict_by_wordnet(
    cat: &ThesaurusCategory,
    db: &WordNetDb,
    measure: Measure,
    ic: Option<&InformationContent>,
    options: &ClosenessOptions,
) -> Prediction {
    let method = format!("wordnet:{}", measure.name());
    let mut best: Option<(Colour, f64)> = None;
    for colour in Colour::ALL {
        let sum: f64 = cat
            .members()
            .iter()
            .map(|m| word_colour_closeness(m, colour, db, measure, ic, options))
            .sum();
        if sum > 0.0 && best.map_or(true, |(_, s)| sum > s) {
            best = Some((colour, sum));
        }
    }
    match best {
        None => Prediction {
            category_id: cat.category_id.clone(),
            colour: None,
            method,
            score: 0.0,
        },
        Some((colour, score)) => Prediction {
            category_id: cat.category_id.clone(),
            colour: Some(colour),
            method,
            score,
        },
    }
}

#[cfg(test)]
pub(crate) mod test_fixture {
    use super::*;

    pub fn noun(offset: u64) -> SynsetId {
        SynsetId {
            offset,
            pos: PartOfSpeech::Noun,
        }
    }

    /// The miniature taxonomy used across wordnet tests:
    /// entity > colour > {red > inflammation, blue, green, black}.
    pub fn mini_db() -> WordNetDb {
        let synset = |offset: u64, lemmas: &[&str], gloss: &str, rels: Vec<(RelationKind, u64)>| {
            Synset {
                id: noun(offset),
                lemmas: lemmas.iter().map(|s| s.to_string()).collect(),
                gloss: gloss.to_string(),
                relations: rels
                    .into_iter()
                    .map(|(k, o)| (k, noun(o)))
                    .collect(),
            }
        };
        use RelationKind::{Hypernym, Hyponym};
        WordNetDb::from_synsets(vec![
            synset(1, &["entity"], "that which is perceived to exist", vec![(Hyponym, 2)]),
            synset(
                2,
                &["colour", "color"],
                "a visual attribute of things from the light they emit",
                vec![
                    (Hypernym, 1),
                    (Hyponym, 3),
                    (Hyponym, 5),
                    (Hyponym, 6),
                    (Hyponym, 7),
                ],
            ),
            synset(
                3,
                &["red", "redness"],
                "the chromatic colour resembling the hue of blood marked by redness",
                vec![(Hypernym, 2), (Hyponym, 4)],
            ),
            synset(
                4,
                &["inflammation"],
                "a bodily response marked by redness swelling and heat",
                vec![(Hypernym, 3)],
            ),
            synset(
                5,
                &["blue"],
                "the chromatic colour of the clear sky",
                vec![(Hypernym, 2)],
            ),
            synset(
                6,
                &["green"],
                "the chromatic colour resembling the hue of growing grass",
                vec![(Hypernym, 2)],
            ),
            synset(
                7,
                &["black"],
                "the achromatic colour of coal and night",
                vec![(Hypernym, 2)],
            ),
        ])
        .unwrap()
    }

    /// Own counts matching the shipped ic fixture: entity 100, colour 20,
    /// red 10, inflammation 10, blue/green/black 20 each (total 200).
    pub fn mini_ic(db: &WordNetDb) -> InformationContent {
        let counts = [
            (1u64, 100u64),
            (2, 20),
            (3, 10),
            (4, 10),
            (5, 20),
            (6, 20),
            (7, 20),
        ];
        InformationContent::from_counts(
            counts.iter().map(|&(o, c)| (noun(o), c)),
            db,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::test_fixture::{mini_db, noun};
    use super::*;

    #[test]
    fn lemma_lookup_spans_synsets() {
        let db = mini_db();
        assert_eq!(db.len(), 7);
        assert_eq!(db.synsets_for("red").len(), 1);
        assert_eq!(db.synsets_for("REDNESS").len(), 1);
        assert!(db.synsets_for("missing").is_empty());
    }

    #[test]
    fn dangling_pointers_are_rejected() {
        let bad = Synset {
            id: noun(1),
            lemmas: vec!["x".into()],
            gloss: String::new(),
            relations: vec![(RelationKind::Hypernym, noun(99))],
        };
        assert!(matches!(
            WordNetDb::from_synsets(vec![bad]),
            Err(WordNetError::DanglingPointer { .. })
        ));
    }

    #[test]
    fn hypernym_cycles_are_rejected() {
        let s = |offset: u64, hyper: u64| Synset {
            id: noun(offset),
            lemmas: vec![format!("s{offset}")],
            gloss: String::new(),
            relations: vec![(RelationKind::Hypernym, noun(hyper))],
        };
        assert!(matches!(
            WordNetDb::from_synsets(vec![s(1, 2), s(2, 3), s(3, 1)]),
            Err(WordNetError::HypernymCycle(_))
        ));
    }

    #[test]
    fn ancestors_include_self_and_transitive_hypernyms() {
        let db = mini_db();
        let ancestors = db.ancestors(noun(4));
        assert_eq!(ancestors.len(), 4);
        for offset in [4, 3, 2, 1] {
            assert!(ancestors.contains(&noun(offset)));
        }
    }
}
