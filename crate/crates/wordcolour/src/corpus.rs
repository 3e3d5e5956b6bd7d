//! Corpus statistics: n-gram ingestion, colour frequency rankings, windowed
//! co-occurrence counting, and colour prediction from co-occurrence with
//! optional polarity restriction.
//!
//! N-gram files follow the Google layout: one record per line,
//! whitespace-separated tokens, a tab, then the count. Files may be plain
//! text or gzip (detected by the `.gz` extension). Running text is tokenized
//! by lowercasing and splitting on non-alphanumeric characters.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use rand::Rng;
use thiserror::Error;

use crate::categories::GoldStandard;
use crate::colour::{polarity_colour_set, Colour, ColourCounts, Polarity};
use crate::lexicon::ThesaurusCategory;
use crate::seeding::rng_for_key;
use crate::signatures::LabelLexicon;
use crate::stats::spearman_correlation;

pub const DEFAULT_WINDOW: usize = 4;

/// Lines sampled before deciding whether a file is in the wrong format.
const FORMAT_GUARD_SAMPLE: usize = 200;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("format error in {path}: {malformed} of {sampled} sampled lines malformed")]
    Format {
        path: String,
        malformed: usize,
        sampled: usize,
    },
    #[error("no prediction for gold category `{0}`")]
    MissingPrediction(String),
    #[error("multiple predictions for category `{0}`")]
    DuplicatePrediction(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl CorpusError {
    pub fn category(&self) -> &'static str {
        match self {
            CorpusError::Io(_) => "io",
            CorpusError::Parse { .. } => "parse",
            CorpusError::Format { .. } => "format",
            CorpusError::MissingPrediction(_) => "missing-prediction",
            CorpusError::DuplicatePrediction(_) => "duplicate-prediction",
            CorpusError::EmptyInput(_) => "empty-input",
        }
    }
}

/// One n-gram with its corpus count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramRecord {
    pub tokens: Vec<String>,
    pub count: u64,
}

/// Counters from one ingestion pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub lines: usize,
    pub malformed: usize,
    pub records: usize,
    /// Records dropped by the minimum-count filter.
    pub filtered: usize,
}

/// Streaming reader over an n-gram file.
///
/// Malformed lines (missing count, wrong token arity, zero count) are counted
/// and skipped. If more than half of the first sampled lines are malformed the
/// file is assumed to be in the wrong format and the stream fails instead of
/// quietly producing an empty table.
pub struct NgramReader<R: BufRead> {
    reader: R,
    n: usize,
    path: String,
    stats: IngestStats,
    guard_done: bool,
    failed: bool,
    buf: String,
}

impl<R: BufRead> NgramReader<R> {
    pub fn new(reader: R, n: usize, path: &str) -> Self {
        Self {
            reader,
            n,
            path: path.to_string(),
            stats: IngestStats::default(),
            guard_done: false,
            failed: false,
            buf: String::new(),
        }
    }

    pub fn stats(&self) -> IngestStats {
        self.stats
    }

    fn parse_line(&self, line: &str) -> Option<NgramRecord> {
        let (tokens_part, count_part) = line.rsplit_once('\t')?;
        let count: u64 = count_part.trim().parse().ok()?;
        if count == 0 {
            return None;
        }
        let tokens: Vec<String> = tokens_part
            .split_whitespace()
            .map(|t| t.to_lowercase())
            .collect();
        if tokens.len() != self.n {
            return None;
        }
        Some(NgramRecord { tokens, count })
    }

    fn guard(&mut self) -> Option<CorpusError> {
        if self.guard_done {
            return None;
        }
        self.guard_done = true;
        if self.stats.lines > 0 && self.stats.malformed * 2 > self.stats.lines {
            self.failed = true;
            return Some(CorpusError::Format {
                path: self.path.clone(),
                malformed: self.stats.malformed,
                sampled: self.stats.lines,
            });
        }
        None
    }
}

impl<R: BufRead> Iterator for NgramReader<R> {
    type Item = Result<NgramRecord, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            let read = match self.reader.read_line(&mut self.buf) {
                Ok(n) => n,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(CorpusError::Io(e)));
                }
            };
            if read == 0 {
                // EOF: run the guard if the sample never filled up.
                return self.guard().map(Err);
            }
            let line = self.buf.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            self.stats.lines += 1;
            let parsed = self.parse_line(line);
            if parsed.is_none() {
                self.stats.malformed += 1;
            }
            if !self.guard_done && self.stats.lines >= FORMAT_GUARD_SAMPLE {
                if let Some(err) = self.guard() {
                    return Some(Err(err));
                }
            }
            if let Some(record) = parsed {
                self.stats.records += 1;
                return Some(Ok(record));
            }
        }
    }
}

/// Opens an n-gram file, transparently decompressing `.gz`.
pub fn load_ngrams(
    path: &Path,
    n: usize,
) -> Result<NgramReader<Box<dyn BufRead>>, CorpusError> {
    let file = File::open(path)?;
    let reader: Box<dyn BufRead> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    };
    Ok(NgramReader::new(reader, n, &path.display().to_string()))
}

// Boxed readers keep `load_ngrams` callers independent of compression.
type BoxedRead = Box<dyn Read + Send>;

fn open_text(path: &Path) -> Result<BoxedRead, CorpusError> {
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(MultiGzDecoder::new(file)))
    } else {
        Ok(Box::new(file))
    }
}

/// Frequency of the eleven colour terms per million corpus tokens, with the
/// induced ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct ColourRanking {
    per_million: [f64; 11],
    rank: [u8; 11],
}

impl ColourRanking {
    /// Builds a ranking from per-million frequencies. Ranks are a bijection
    /// onto 1..=11, frequency ties broken by B&K rank.
    pub fn from_per_million(per_million: [f64; 11]) -> Self {
        let mut order: Vec<Colour> = Colour::ALL.to_vec();
        // Stable sort keeps B&K order among equal frequencies.
        order.sort_by(|a, b| {
            per_million[b.index()]
                .partial_cmp(&per_million[a.index()])
                .expect("frequencies are finite")
        });
        let mut rank = [0u8; 11];
        for (pos, colour) in order.iter().enumerate() {
            rank[colour.index()] = pos as u8 + 1;
        }
        Self { per_million, rank }
    }

    pub fn per_million(&self, colour: Colour) -> f64 {
        self.per_million[colour.index()]
    }

    pub fn rank(&self, colour: Colour) -> u8 {
        self.rank[colour.index()]
    }

    /// Rank vector in B&K colour order.
    pub fn rank_vector(&self) -> [u8; 11] {
        self.rank
    }

    /// The rank-1 colour.
    pub fn most_frequent(&self) -> Colour {
        Colour::ALL
            .into_iter()
            .find(|&c| self.rank(c) == 1)
            .expect("rank 1 exists")
    }

    /// Spearman correlation of this ranking against the B&K reference order.
    pub fn spearman_vs_bk(&self) -> f64 {
        let bk: Vec<f64> = Colour::ALL.iter().map(|c| f64::from(c.bk_rank())).collect();
        let ours: Vec<f64> = Colour::ALL.iter().map(|c| f64::from(self.rank(*c))).collect();
        spearman_correlation(&bk, &ours).expect("ranks are permutations")
    }
}

/// Counts colour-term occurrences in a unigram stream and normalizes per
/// million corpus tokens. The "gray" spelling folds into grey.
pub fn colour_frequency_ranking<I>(unigrams: I, total_tokens: u64) -> ColourRanking
where
    I: IntoIterator<Item = NgramRecord>,
{
    assert!(total_tokens > 0, "total_tokens must be positive");
    let mut counts = ColourCounts::new();
    for record in unigrams {
        if record.tokens.len() != 1 {
            continue;
        }
        if let Some(colour) = Colour::parse(&record.tokens[0]) {
            counts.add(colour, record.count);
        }
    }
    let mut per_million = [0.0; 11];
    for (colour, n) in counts.iter() {
        per_million[colour.index()] = n as f64 * 1_000_000.0 / total_tokens as f64;
    }
    ColourRanking::from_per_million(per_million)
}

/// The set of terms whose colour co-occurrences are being collected.
#[derive(Debug, Clone, Default)]
pub struct TargetSet {
    terms: HashSet<String>,
}

impl TargetSet {
    pub fn new<I: IntoIterator<Item = String>>(terms: I) -> Self {
        Self {
            terms: terms.into_iter().map(|t| t.trim().to_lowercase()).collect(),
        }
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Mergeable term-by-colour co-occurrence counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoocTable {
    rows: BTreeMap<String, ColourCounts>,
}

impl CoocTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: &str, colour: Colour, weight: u64) {
        self.rows.entry(term.to_string()).or_default().add(colour, weight);
    }

    pub fn row(&self, term: &str) -> Option<&ColourCounts> {
        self.rows.get(term)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Cell-wise addition: commutative, associative, identity `new()`.
    pub fn merge(&mut self, other: CoocTable) {
        for (term, counts) in other.rows {
            self.rows.entry(term).or_default().merge(&counts);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ColourCounts)> {
        self.rows.iter().map(|(t, c)| (t.as_str(), c))
    }

    /// Writes rows as TSV: term then the eleven counts in B&K order,
    /// sorted by term.
    pub fn write_tsv<W: Write>(&self, out: &mut W) -> Result<(), CorpusError> {
        for (term, counts) in &self.rows {
            write!(out, "{term}")?;
            for (_, n) in counts.iter() {
                write!(out, "\t{n}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read_tsv(path: &Path) -> Result<Self, CorpusError> {
        let file = File::open(path)?;
        let reader = BufReader::new(file);
        let mut table = CoocTable::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 12 {
                return Err(CorpusError::Parse {
                    path: path.display().to_string(),
                    line: idx + 1,
                    msg: format!("expected 12 tab-separated fields, found {}", fields.len()),
                });
            }
            let mut counts = ColourCounts::new();
            for (colour, field) in Colour::ALL.iter().zip(&fields[1..]) {
                let n: u64 = field.trim().parse().map_err(|_| CorpusError::Parse {
                    path: path.display().to_string(),
                    line: idx + 1,
                    msg: format!("bad count `{field}`"),
                })?;
                counts.add(*colour, n);
            }
            table.rows.insert(fields[0].to_string(), counts);
        }
        Ok(table)
    }
}

/// Lowercases and splits on non-alphanumeric characters; "gray" folds into
/// "grey" so both spellings share one colour token.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| if t == "gray" { "grey".to_string() } else { t.to_string() })
        .collect()
}

/// Counts (target, colour) token pairs within `window` positions of each
/// other, adding `weight` per pair. A token never pairs with itself at the
/// same position.
pub fn window_cooccurrence_tokens(
    tokens: &[String],
    targets: &TargetSet,
    window: usize,
    weight: u64,
    table: &mut CoocTable,
) {
    let colours: Vec<Option<Colour>> = tokens.iter().map(|t| Colour::parse(t)).collect();
    for (i, token) in tokens.iter().enumerate() {
        if !targets.contains(token) {
            continue;
        }
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(tokens.len().saturating_sub(1));
        for j in lo..=hi {
            if j == i {
                continue;
            }
            if let Some(colour) = colours[j] {
                table.add(token, colour, weight);
            }
        }
    }
}

/// Adds one n-gram record's pairs, weighted by its corpus count.
pub fn window_cooccurrence_record(
    record: &NgramRecord,
    targets: &TargetSet,
    window: usize,
    table: &mut CoocTable,
) {
    window_cooccurrence_tokens(&record.tokens, targets, window, record.count, table);
}

/// Input kind for a co-occurrence scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    /// Running UTF-8 text; every pair weighs 1.
    Text,
    /// N-gram records; pairs weigh the record count.
    Ngram { n: usize },
}

/// Options for a co-occurrence scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    pub mode: ScanMode,
    pub window: usize,
    /// Records with a smaller corpus count are dropped (0 disables).
    pub min_count: u64,
    /// Number of worker threads. The result is identical for any value.
    pub parallel: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            mode: ScanMode::Ngram { n: 5 },
            window: DEFAULT_WINDOW,
            min_count: 0,
            parallel: 1,
        }
    }
}

/// Builds a co-occurrence table from n-gram or text files.
///
/// Work is split into units (record chunks for n-grams, whole files for
/// text); each unit produces a private table and tables merge in unit order,
/// so output is bit-identical for every parallelism degree.
pub fn build_cooc_table(
    paths: &[PathBuf],
    targets: &TargetSet,
    options: &ScanOptions,
) -> Result<(CoocTable, IngestStats), CorpusError> {
    if targets.is_empty() {
        return Err(CorpusError::EmptyInput("empty target set"));
    }
    let threads = options.parallel.max(1);
    match options.mode {
        ScanMode::Ngram { n } => {
            let mut stats = IngestStats::default();
            let mut records = Vec::new();
            for path in paths {
                let mut reader = load_ngrams(path, n)?;
                for record in reader.by_ref() {
                    let record = record?;
                    if options.min_count > 0 && record.count < options.min_count {
                        stats.filtered += 1;
                        continue;
                    }
                    records.push(record);
                }
                let s = reader.stats();
                stats.lines += s.lines;
                stats.malformed += s.malformed;
                stats.records += s.records;
            }
            let chunk = records.len().div_ceil(threads).max(1);
            let table = merge_unit_tables(records.chunks(chunk).collect::<Vec<_>>(), threads, |unit| {
                let mut t = CoocTable::new();
                for record in *unit {
                    window_cooccurrence_record(record, targets, options.window, &mut t);
                }
                t
            });
            Ok((table, stats))
        }
        ScanMode::Text => {
            let mut stats = IngestStats::default();
            let mut token_streams = Vec::new();
            for path in paths {
                let mut text = String::new();
                open_text(path)?.read_to_string(&mut text)?;
                stats.lines += text.lines().count();
                token_streams.push(tokenize(&text));
            }
            let table = merge_unit_tables(token_streams.iter().collect::<Vec<_>>(), threads, |tokens| {
                let mut t = CoocTable::new();
                window_cooccurrence_tokens(tokens, targets, options.window, 1, &mut t);
                t
            });
            Ok((table, stats))
        }
    }
}

/// Maps units to tables on up to `threads` workers and merges in unit order.
fn merge_unit_tables<U: Sync>(
    units: Vec<U>,
    threads: usize,
    build: impl Fn(&U) -> CoocTable + Sync,
) -> CoocTable {
    if units.is_empty() {
        return CoocTable::new();
    }
    let n_units = units.len();
    let per_thread = n_units.div_ceil(threads.max(1));
    let mut tables: Vec<Option<CoocTable>> = (0..n_units).map(|_| None).collect();
    std::thread::scope(|scope| {
        for (slot_block, unit_block) in tables.chunks_mut(per_thread).zip(units.chunks(per_thread))
        {
            let build = &build;
            scope.spawn(move || {
                for (slot, unit) in slot_block.iter_mut().zip(unit_block) {
                    *slot = Some(build(unit));
                }
            });
        }
    });
    let mut merged = CoocTable::new();
    for table in tables.into_iter().flatten() {
        merged.merge(table);
    }
    merged
}

/// Conditional colour distribution of a category: summed member rows,
/// normalized. Empty when the category has no colour co-occurrences.
pub fn category_colour_conditional(
    cat: &ThesaurusCategory,
    table: &CoocTable,
) -> BTreeMap<Colour, f64> {
    let counts = category_counts(cat, table);
    let total = counts.total();
    if total == 0 {
        return BTreeMap::new();
    }
    counts
        .iter()
        .filter(|(_, n)| *n > 0)
        .map(|(c, n)| (c, n as f64 / total as f64))
        .collect()
}

fn category_counts(cat: &ThesaurusCategory, table: &CoocTable) -> ColourCounts {
    let mut counts = ColourCounts::new();
    for member in cat.members() {
        if let Some(row) = table.row(member) {
            counts.merge(row);
        }
    }
    counts
}

/// A predicted category colour (or an explicit abstention).
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub category_id: String,
    pub colour: Option<Colour>,
    pub method: String,
    pub score: f64,
}

impl Prediction {
    fn abstain(category_id: &str, method: &str) -> Self {
        Self {
            category_id: category_id.to_string(),
            colour: None,
            method: method.to_string(),
            score: 0.0,
        }
    }
}

/// Picks the colour with the highest conditional probability, ties broken by
/// B&K rank; abstains when the category never co-occurs with a colour.
pub fn predict_by_cooccurrence(cat: &ThesaurusCategory, table: &CoocTable) -> Prediction {
    let counts = category_counts(cat, table);
    let total = counts.total();
    match counts.argmax() {
        None => Prediction::abstain(&cat.category_id, "cooc"),
        Some(colour) => Prediction {
            category_id: cat.category_id.clone(),
            colour: Some(colour),
            method: "cooc".to_string(),
            score: counts.get(colour) as f64 / total as f64,
        },
    }
}

/// Category polarity from a positive/negative label lexicon: negative iff
/// strictly more members carry the negative label than the positive one,
/// otherwise positive (ties and unlabelled categories included).
pub fn category_polarity(cat: &ThesaurusCategory, polarity_lexicon: &LabelLexicon) -> Polarity {
    let mut positive = 0usize;
    let mut negative = 0usize;
    for member in cat.members() {
        if let Some(labels) = polarity_lexicon.labels_for_sense(member, &cat.category_id) {
            if labels.contains("positive") {
                positive += 1;
            }
            if labels.contains("negative") {
                negative += 1;
            }
        }
    }
    if negative > positive {
        Polarity::Negative
    } else {
        Polarity::Positive
    }
}

/// Like [`predict_by_cooccurrence`] but the argmax ranges only over the
/// colour set matching the category's polarity. The score stays the full
/// conditional probability. Abstains when every admissible count is zero.
pub fn predict_by_cooccurrence_with_polarity(
    cat: &ThesaurusCategory,
    table: &CoocTable,
    polarity_lexicon: &LabelLexicon,
) -> Prediction {
    let method = "cooc-polarity";
    let counts = category_counts(cat, table);
    let total = counts.total();
    let polarity = category_polarity(cat, polarity_lexicon);
    let admissible = polarity_colour_set(polarity);
    // B&K iteration order makes the first strict maximum the tie-break winner.
    let mut best: Option<(Colour, u64)> = None;
    for colour in Colour::ALL {
        if !admissible.contains(&colour) {
            continue;
        }
        let n = counts.get(colour);
        if n > 0 && best.map_or(true, |(_, m)| n > m) {
            best = Some((colour, n));
        }
    }
    match best {
        None => Prediction::abstain(&cat.category_id, method),
        Some((colour, n)) => Prediction {
            category_id: cat.category_id.clone(),
            colour: Some(colour),
            method: method.to_string(),
            score: n as f64 / total as f64,
        },
    }
}

/// A baseline predictor and the auxiliary input it needs.
#[derive(Debug, Clone, Copy)]
pub enum Baseline<'a> {
    /// Seeded uniform choice over the eleven colours.
    Random { seed: u64 },
    /// Always the corpus's most frequent colour.
    CorpusMostFrequent(&'a ColourRanking),
    /// Always the modal colour of the gold standard (supervised).
    GoldMostFrequent(&'a GoldStandard),
}

impl Baseline<'_> {
    pub fn method(&self) -> &'static str {
        match self {
            Baseline::Random { .. } => "baseline:random",
            Baseline::CorpusMostFrequent(_) => "baseline:corpus-most-frequent",
            Baseline::GoldMostFrequent(_) => "baseline:gold-most-frequent",
        }
    }
}

/// Applies a baseline to one category.
pub fn baseline_predict(baseline: &Baseline<'_>, cat: &ThesaurusCategory) -> Prediction {
    let method = baseline.method();
    match baseline {
        Baseline::Random { seed } => {
            let mut rng = rng_for_key(*seed, &["baseline-random", &cat.category_id]);
            let colour = Colour::ALL[rng.gen_range(0..Colour::ALL.len())];
            Prediction {
                category_id: cat.category_id.clone(),
                colour: Some(colour),
                method: method.to_string(),
                score: 1.0 / 11.0,
            }
        }
        Baseline::CorpusMostFrequent(ranking) => Prediction {
            category_id: cat.category_id.clone(),
            colour: Some(ranking.most_frequent()),
            method: method.to_string(),
            score: 1.0,
        },
        Baseline::GoldMostFrequent(gold) => match gold.modal_colour() {
            None => Prediction::abstain(&cat.category_id, method),
            Some(colour) => Prediction {
                category_id: cat.category_id.clone(),
                colour: Some(colour),
                method: method.to_string(),
                score: gold.modal_colour_share() / 100.0,
            },
        },
    }
}

/// Percentage of gold categories whose prediction matches the gold colour.
/// Abstentions count as incorrect. Every gold category must have exactly one
/// prediction; predictions for non-gold categories are ignored.
pub fn evaluate_accuracy(
    predictions: &[Prediction],
    gold: &GoldStandard,
) -> Result<f64, CorpusError> {
    if gold.is_empty() {
        return Err(CorpusError::EmptyInput("empty gold standard"));
    }
    let mut by_category: BTreeMap<&str, &Prediction> = BTreeMap::new();
    for p in predictions {
        if gold.entries.contains_key(&p.category_id)
            && by_category.insert(&p.category_id, p).is_some()
        {
            return Err(CorpusError::DuplicatePrediction(p.category_id.clone()));
        }
    }
    let mut correct = 0usize;
    for (category_id, entry) in &gold.entries {
        let p = by_category
            .get(category_id.as_str())
            .ok_or_else(|| CorpusError::MissingPrediction(category_id.clone()))?;
        if p.colour == Some(entry.colour) {
            correct += 1;
        }
    }
    Ok(100.0 * correct as f64 / gold.len() as f64)
}
