//! The eleven basic colour terms, their reference ranking, and the
//! positive/negative colour sets used for polarity-restricted prediction.

use std::fmt;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

/// One of the eleven basic colour terms.
///
/// Declaration order is the Berlin & Kay order, so deriving `Ord` gives the
/// reference ranking for free: `white < black < red < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colour {
    White,
    Black,
    Red,
    Green,
    Yellow,
    Blue,
    Brown,
    Pink,
    Purple,
    Orange,
    Grey,
}

impl Colour {
    /// All eleven colours in Berlin & Kay order.
    pub const ALL: [Colour; 11] = [
        Colour::White,
        Colour::Black,
        Colour::Red,
        Colour::Green,
        Colour::Yellow,
        Colour::Blue,
        Colour::Brown,
        Colour::Pink,
        Colour::Purple,
        Colour::Orange,
        Colour::Grey,
    ];

    /// Berlin & Kay rank, 1 (white) through 11 (grey).
    pub fn bk_rank(self) -> u8 {
        self as u8 + 1
    }

    /// Zero-based index, `bk_rank() - 1`. Used for array-backed count tables.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Lowercase name. Always the "grey" spelling.
    pub fn name(self) -> &'static str {
        match self {
            Colour::White => "white",
            Colour::Black => "black",
            Colour::Red => "red",
            Colour::Green => "green",
            Colour::Yellow => "yellow",
            Colour::Blue => "blue",
            Colour::Brown => "brown",
            Colour::Pink => "pink",
            Colour::Purple => "purple",
            Colour::Orange => "orange",
            Colour::Grey => "grey",
        }
    }

    /// Parse a colour name. Case-insensitive; accepts the "gray" variant.
    pub fn parse(s: &str) -> Option<Colour> {
        let lower = s.trim().to_ascii_lowercase();
        Some(match lower.as_str() {
            "white" => Colour::White,
            "black" => Colour::Black,
            "red" => Colour::Red,
            "green" => Colour::Green,
            "yellow" => Colour::Yellow,
            "blue" => Colour::Blue,
            "brown" => Colour::Brown,
            "pink" => Colour::Pink,
            "purple" => Colour::Purple,
            "orange" => Colour::Orange,
            "grey" | "gray" => Colour::Grey,
            _ => return None,
        })
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The eleven colours sorted by Berlin & Kay rank.
pub fn colour_order() -> [Colour; 11] {
    Colour::ALL
}

/// Positive or negative semantic orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn name(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Colours that skew positive in polarity-restricted prediction.
pub const POSITIVE_COLOURS: [Colour; 6] = [
    Colour::White,
    Colour::Green,
    Colour::Yellow,
    Colour::Blue,
    Colour::Pink,
    Colour::Orange,
];

/// Colours that skew negative. Purple belongs to neither set.
pub const NEGATIVE_COLOURS: [Colour; 4] =
    [Colour::Black, Colour::Red, Colour::Brown, Colour::Grey];

/// The admissible colours for a polarity.
pub fn polarity_colour_set(p: Polarity) -> &'static [Colour] {
    match p {
        Polarity::Positive => &POSITIVE_COLOURS,
        Polarity::Negative => &NEGATIVE_COLOURS,
    }
}

/// Per-colour non-negative counts. The mergeable vote/co-occurrence vector
/// behind lexicon entries and co-occurrence rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ColourCounts {
    counts: [u64; 11],
}

impl ColourCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from `(colour, count)` pairs; repeated colours accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (Colour, u64)>>(pairs: I) -> Self {
        let mut c = Self::new();
        for (colour, n) in pairs {
            c.add(colour, n);
        }
        c
    }

    pub fn add(&mut self, colour: Colour, n: u64) {
        self.counts[colour.index()] += n;
    }

    pub fn get(&self, colour: Colour) -> u64 {
        self.counts[colour.index()]
    }

    /// Sum over all eleven colours.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&n| n == 0)
    }

    /// Cell-wise addition. Commutative and associative with `new()` as identity.
    pub fn merge(&mut self, other: &ColourCounts) {
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
    }

    /// `(colour, count)` pairs in B&K order, including zero cells.
    pub fn iter(&self) -> impl Iterator<Item = (Colour, u64)> + '_ {
        Colour::ALL.iter().map(move |&c| (c, self.get(c)))
    }

    /// The largest cell value (0 for an empty vector).
    pub fn max_count(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Colour with the largest count, ties broken by B&K rank.
    /// `None` when all cells are zero.
    pub fn argmax(&self) -> Option<Colour> {
        if self.is_empty() {
            return None;
        }
        let max = self.max_count();
        Colour::ALL.iter().copied().find(|&c| self.get(c) == max)
    }

    /// All colours attaining the maximal count, in B&K order.
    pub fn argmax_set(&self) -> Vec<Colour> {
        if self.is_empty() {
            return Vec::new();
        }
        let max = self.max_count();
        Colour::ALL
            .iter()
            .copied()
            .filter(|&c| self.get(c) == max)
            .collect()
    }
}

// Serialized as an object with all eleven colour keys in B&K order so that
// JSON-lines output is diff-stable.
impl Serialize for ColourCounts {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(11))?;
        for (colour, n) in self.iter() {
            map.serialize_entry(colour.name(), &n)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ColourCounts {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CountsVisitor;
        impl<'de> Visitor<'de> for CountsVisitor {
            type Value = ColourCounts;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map of colour name to count")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut counts = ColourCounts::new();
                while let Some((key, value)) = access.next_entry::<String, u64>()? {
                    let colour = Colour::parse(&key)
                        .ok_or_else(|| de::Error::custom(format!("unknown colour `{key}`")))?;
                    counts.add(colour, value);
                }
                Ok(counts)
            }
        }
        deserializer.deserialize_map(CountsVisitor)
    }
}
