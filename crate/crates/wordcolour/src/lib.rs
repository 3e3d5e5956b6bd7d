//! A toolkit for building and analysing word-colour association lexicons.

pub mod annotate;
pub mod categories;
pub mod colour;
pub mod corpus;
pub mod lexicon;
pub mod signatures;
pub mod stats;

mod seeding;

pub use colour::{colour_order, polarity_colour_set, Colour, ColourCounts, Polarity};
pub use lexicon::{LexiconEntry, Thesaurus, ThesaurusCategory, WordSense};
pub use stats::{pearson_correlation, spearman_correlation};
