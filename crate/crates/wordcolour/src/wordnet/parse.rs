//! Parser for WordNet `data.*` files.
//!
//! Line layout (standard text release):
//! `offset lex_filenum ss_type w_cnt word lex_id [...] p_cnt [ptr...] | gloss`
//! where `w_cnt` is two hex digits, each pointer is
//! `symbol offset pos source/target`, and verb frames (if any) sit between
//! the pointers and the gloss separator.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{PartOfSpeech, RelationKind, Synset, SynsetId, WordNetError};

pub(super) fn parse_data_file(path: &Path) -> Result<Vec<Synset>, WordNetError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut synsets = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        // License header lines begin with two spaces.
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        let synset = parse_line(&line).map_err(|msg| WordNetError::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg,
        })?;
        synsets.push(synset);
    }
    Ok(synsets)
}

fn parse_line(line: &str) -> Result<Synset, String> {
    let (head, gloss) = match line.split_once('|') {
        Some((head, gloss)) => (head, gloss.trim().to_string()),
        None => (line, String::new()),
    };
    let tokens: Vec<&str> = head.split_whitespace().collect();
    let mut cursor = 0usize;
    let mut take = |what: &str| -> Result<&str, String> {
        let token = tokens
            .get(cursor)
            .ok_or_else(|| format!("unexpected end of line reading {what}"))?;
        cursor += 1;
        Ok(token)
    };

    let offset: u64 = take("offset")?
        .parse()
        .map_err(|_| "bad synset offset".to_string())?;
    let _lex_filenum = take("lex_filenum")?;
    let ss_type = take("ss_type")?;
    let pos =
        PartOfSpeech::parse(ss_type).ok_or_else(|| format!("bad ss_type `{ss_type}`"))?;

    let w_cnt = usize::from_str_radix(take("w_cnt")?, 16)
        .map_err(|_| "bad word count".to_string())?;
    if w_cnt == 0 {
        return Err("synset with zero words".into());
    }
    let mut lemmas = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = take("word")?;
        let _lex_id = take("lex_id")?;
        lemmas.push(normalize_lemma(word));
    }

    let p_cnt: usize = take("p_cnt")?
        .parse()
        .map_err(|_| "bad pointer count".to_string())?;
    let mut relations = Vec::with_capacity(p_cnt);
    for _ in 0..p_cnt {
        let symbol = take("pointer symbol")?;
        let target_offset: u64 = take("pointer offset")?
            .parse()
            .map_err(|_| "bad pointer offset".to_string())?;
        let target_pos_str = take("pointer pos")?;
        let target_pos = PartOfSpeech::parse(target_pos_str)
            .ok_or_else(|| format!("bad pointer pos `{target_pos_str}`"))?;
        let _source_target = take("pointer source/target")?;
        relations.push((
            RelationKind::from_symbol(symbol),
            SynsetId {
                offset: target_offset,
                pos: target_pos,
            },
        ));
    }
    // Verb frames, when present, follow the pointers; they are not used.

    Ok(Synset {
        id: SynsetId { offset, pos },
        lemmas,
        gloss,
        relations,
    })
}

/// Lowercases and strips adjective syntax markers like `(a)`, `(p)`, `(ip)`.
fn normalize_lemma(word: &str) -> String {
    let word = match word.find('(') {
        Some(i) => &word[..i],
        None => word,
    };
    word.to_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_noun_line() {
        let line = "00000003 03 n 02 red 0 redness 0 002 @ 00000002 n 0000 ~ 00000004 n 0000 | the colour of blood";
        let synset = parse_line(line).unwrap();
        assert_eq!(synset.id.offset, 3);
        assert_eq!(synset.id.pos, PartOfSpeech::Noun);
        assert_eq!(synset.lemmas, ["red", "redness"]);
        assert_eq!(synset.gloss, "the colour of blood");
        assert_eq!(synset.relations.len(), 2);
        assert_eq!(synset.relations[0].0, RelationKind::Hypernym);
        assert_eq!(synset.relations[1].0, RelationKind::Hyponym);
    }

    #[test]
    fn satellite_adjectives_fold_into_adjective() {
        let line = "00000101 00 s 01 crimson(a) 0 000 | of a deep red";
        let synset = parse_line(line).unwrap();
        assert_eq!(synset.id.pos, PartOfSpeech::Adjective);
        assert_eq!(synset.lemmas, ["crimson"]);
    }

    #[test]
    fn hex_word_counts_parse() {
        // 0x0b = 11 words.
        let mut line = String::from("00000001 03 n 0b");
        for i in 0..11 {
            line.push_str(&format!(" w{i} 0"));
        }
        line.push_str(" 000 | many words");
        let synset = parse_line(&line).unwrap();
        assert_eq!(synset.lemmas.len(), 11);
    }

    #[test]
    fn truncated_lines_error() {
        assert!(parse_line("00000003 03 n 02 red 0").is_err());
        assert!(parse_line("xyz").is_err());
    }
}
