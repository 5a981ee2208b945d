//! Corpus ingestion and preprocessing.
//!
//! Raw documents are segmented into sentences by a deterministic rule-based
//! splitter, tokenized into lowercase alphanumeric tokens, and filtered for
//! very short fragments before a frequency-thresholded vocabulary is built.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Sentences shorter than this many tokens are treated as segmentation noise.
pub const DEFAULT_MIN_TOKENS: usize = 3;

/// A document to be preprocessed, identified by a corpus-unique id.
#[derive(Debug, Clone)]
pub struct RawDocument {
    pub doc_id: String,
    pub text: String,
}

/// A tokenized sentence with provenance: owning document and 0-based
/// position among that document's segmented sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub doc_id: String,
    pub index: usize,
    pub tokens: Vec<String>,
}

/// Dot-terminated strings that do not end a sentence. Compared lowercase,
/// without the final period; entries may contain internal periods ("e.g").
const ABBREVIATIONS: &[&str] = &[
    "al", "e.g", "i.e", "etc", "cf", "vs", "viz", "fig", "figs", "eq", "eqs", "sec", "secs",
    "chap", "ch", "no", "nos", "vol", "vols", "pp", "p", "ed", "eds", "resp", "approx", "dept",
    "univ", "proc", "conf", "dr", "prof", "mr", "mrs", "ms", "st", "jr", "sr", "inc", "ltd",
];

fn is_abbreviation(prefix: &[char]) -> bool {
    // Word immediately before the period: trailing run of non-whitespace,
    // with leading punctuation such as '(' stripped.
    let mut start = prefix.len();
    while start > 0 && !prefix[start - 1].is_whitespace() {
        start -= 1;
    }
    let mut word = &prefix[start..];
    while let Some(&c) = word.first() {
        if c.is_alphanumeric() {
            break;
        }
        word = &word[1..];
    }
    if word.is_empty() {
        return false;
    }
    // Single capital initial, as in "J. Smith".
    if word.len() == 1 && word[0].is_uppercase() {
        return true;
    }
    let word: String = word.iter().flat_map(|c| c.to_lowercase()).collect();
    ABBREVIATIONS.contains(&word.as_str())
}

/// Splits raw text into sentence strings.
///
/// A boundary is placed after sentence-final '.', '!' or '?' when it is
/// followed by whitespace and an uppercase letter or digit, unless the
/// period terminates a known abbreviation or a single capital initial.
/// Whitespace runs inside a sentence are collapsed to single spaces, so
/// token content is preserved while each sentence fits on one line.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;

    let push = |slice: &[char], out: &mut Vec<String>| {
        let s: String = slice.iter().collect();
        let normalized = s.split_whitespace().collect::<Vec<_>>().join(" ");
        if !normalized.is_empty() {
            out.push(normalized);
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if c == '.' || c == '!' || c == '?' {
            // Closing quotes or brackets stay with the terminator.
            let mut end = i + 1;
            while end < chars.len() && matches!(chars[end], ')' | ']' | '"' | '\'') {
                end += 1;
            }
            let mut next = end;
            while next < chars.len() && chars[next].is_whitespace() {
                next += 1;
            }
            let has_gap = next > end;
            let starts_sentence = next < chars.len()
                && (chars[next].is_uppercase() || chars[next].is_ascii_digit());
            let suppressed = c == '.' && is_abbreviation(&chars[..i]);
            if has_gap && starts_sentence && !suppressed {
                push(&chars[start..end], &mut sentences);
                start = next;
                i = next;
                continue;
            }
        }
        i += 1;
    }
    push(&chars[start..], &mut sentences);
    sentences
}

/// Lowercases and splits on every non-alphanumeric character, so hyphens,
/// apostrophes and punctuation all act as separators and punctuation-only
/// fragments vanish. Digit runs survive as tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            for lc in c.to_lowercase() {
                current.push(lc);
            }
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Keeps sentences with at least `min_tokens` tokens, in their input order.
pub fn filter_short(sentences: Vec<Sentence>, min_tokens: usize) -> Vec<Sentence> {
    sentences
        .into_iter()
        .filter(|s| s.tokens.len() >= min_tokens)
        .collect()
}

/// Token/index bijection with per-token corpus frequencies.
///
/// Indices are dense and ordered by descending frequency, ties broken
/// lexicographically.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    token_to_index: HashMap<String, usize>,
    index_to_token: Vec<String>,
    counts: Vec<u64>,
    min_count: u64,
}

impl Vocabulary {
    /// Builds a vocabulary from externally supplied tokens (for example a
    /// pre-trained embedding file). Every token gets count 1.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut token_to_index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if token_to_index.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate token {t:?}")));
            }
        }
        let counts = vec![1; tokens.len()];
        Ok(Vocabulary {
            token_to_index,
            index_to_token: tokens,
            counts,
            min_count: 1,
        })
    }

    pub fn len(&self) -> usize {
        self.index_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_to_token.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.token_to_index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.index_to_token[index]
    }

    /// Corpus frequency of the token at `index`.
    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Total occurrences of retained tokens.
    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.index_to_token.iter().map(String::as_str)
    }
}

/// Counts token frequencies over `sentences` and keeps tokens occurring at
/// least `min_count` times.
pub fn build_vocabulary(sentences: &[Sentence], min_count: u64) -> Result<Vocabulary> {
    if min_count < 1 {
        return Err(Error::InvalidConfig("min_count must be >= 1".into()));
    }
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for sentence in sentences {
        for token in &sentence.tokens {
            *freq.entry(token.as_str()).or_insert(0) += 1;
        }
    }
    let mut retained: Vec<(&str, u64)> = freq
        .into_iter()
        .filter(|&(_, count)| count >= min_count)
        .collect();
    if retained.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    retained.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut token_to_index = HashMap::with_capacity(retained.len());
    let mut index_to_token = Vec::with_capacity(retained.len());
    let mut counts = Vec::with_capacity(retained.len());
    for (i, (token, count)) in retained.into_iter().enumerate() {
        token_to_index.insert(token.to_string(), i);
        index_to_token.push(token.to_string());
        counts.push(count);
    }
    Ok(Vocabulary {
        token_to_index,
        index_to_token,
        counts,
        min_count,
    })
}

/// Counters reported by the preprocessing stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PreprocessStats {
    pub documents: usize,
    /// Sentences produced by segmentation that tokenized to at least one token.
    pub segmented: usize,
    /// Sentences surviving the short-sentence filter.
    pub kept: usize,
    /// Bytes that were not valid UTF-8 and got replaced with U+FFFD.
    pub invalid_utf8_replacements: usize,
}

/// Loads documents from `path`: either a directory of plain-text files
/// (file stem becomes the doc id) or a single file with one document per
/// line (doc id `<stem>-<line>`). Returns the documents sorted by id plus
/// the count of invalid UTF-8 replacements.
pub fn load_documents(path: &Path) -> Result<(Vec<RawDocument>, usize)> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    let mut replaced = 0usize;
    let mut docs = Vec::new();

    if meta.is_dir() {
        let mut entries: Vec<_> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .collect::<std::io::Result<_>>()
            .map_err(|e| Error::io(path, e))?;
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let file_path = entry.path();
            if !entry.file_type().map_err(|e| Error::io(&file_path, e))?.is_file() {
                continue;
            }
            let doc_id = file_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            if doc_id.is_empty() {
                continue;
            }
            let bytes = fs::read(&file_path).map_err(|e| Error::io(&file_path, e))?;
            let text = String::from_utf8_lossy(&bytes).into_owned();
            replaced += text.matches('\u{FFFD}').count();
            docs.push(RawDocument { doc_id, text });
        }
        if docs.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "no documents found in {}",
                path.display()
            )));
        }
    } else {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "doc".to_string());
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = String::from_utf8_lossy(&bytes).into_owned();
        replaced += text.matches('\u{FFFD}').count();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            docs.push(RawDocument {
                doc_id: format!("{stem}-{i}"),
                text: line.to_string(),
            });
        }
        if docs.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "no documents found in {}",
                path.display()
            )));
        }
    }

    docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    for pair in docs.windows(2) {
        if pair[0].doc_id == pair[1].doc_id {
            return Err(Error::DuplicateDocId(pair[0].doc_id.clone()));
        }
    }
    Ok((docs, replaced))
}

/// Full preprocessing: segment, tokenize, drop empties, filter short
/// sentences. Sentence indices count the document's segmented sentences,
/// so provenance stays stable across the filter.
pub fn preprocess_documents(
    documents: &[RawDocument],
    min_tokens: usize,
) -> (Vec<Sentence>, PreprocessStats) {
    let mut sentences = Vec::new();
    let mut stats = PreprocessStats {
        documents: documents.len(),
        ..PreprocessStats::default()
    };
    for doc in documents {
        for (index, raw) in segment_sentences(&doc.text).into_iter().enumerate() {
            let tokens = tokenize(&raw);
            if tokens.is_empty() {
                continue;
            }
            stats.segmented += 1;
            sentences.push(Sentence {
                doc_id: doc.doc_id.clone(),
                index,
                tokens,
            });
        }
    }
    let sentences = filter_short(sentences, min_tokens);
    stats.kept = sentences.len();
    (sentences, stats)
}

/// Writes one sentence per line, tokens separated by single spaces.
pub fn write_sentences(path: &Path, sentences: &[Sentence]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for sentence in sentences {
        writeln!(out, "{}", sentence.tokens.join(" ")).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a sentence file written by [`write_sentences`]. The file stem is
/// used as doc id and the line number as sentence index.
pub fn read_sentences(path: &Path) -> Result<Vec<Sentence>> {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sentences".to_string());
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut sentences = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let tokens: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if tokens.is_empty() {
            continue;
        }
        sentences.push(Sentence {
            doc_id: stem.clone(),
            index: i,
            tokens,
        });
    }
    Ok(sentences)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sent(tokens: &[&str]) -> Sentence {
        Sentence {
            doc_id: "d".into(),
            index: 0,
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        }
    }

    #[test]
    fn splits_on_terminator_before_uppercase() {
        assert_eq!(
            segment_sentences("This works. It is fast."),
            vec!["This works.", "It is fast."]
        );
    }

    #[test]
    fn abbreviation_suppresses_split() {
        assert_eq!(
            segment_sentences("Cutting et al. , 1992 improved tagging."),
            vec!["Cutting et al. , 1992 improved tagging."]
        );
        assert_eq!(
            segment_sentences("Results are shown in Fig. 3 and discussed. Next point."),
            vec![
                "Results are shown in Fig. 3 and discussed.",
                "Next point."
            ]
        );
        assert_eq!(
            segment_sentences("See e.g. Smith for details. More follows."),
            vec!["See e.g. Smith for details.", "More follows."]
        );
    }

    #[test]
    fn single_initial_suppresses_split() {
        assert_eq!(
            segment_sentences("J. Smith proposed this. We agree."),
            vec!["J. Smith proposed this.", "We agree."]
        );
    }

    #[test]
    fn empty_input_yields_no_sentences() {
        assert_eq!(segment_sentences(""), Vec::<String>::new());
        assert_eq!(segment_sentences("   \n\t "), Vec::<String>::new());
    }

    #[test]
    fn splits_before_digits_and_after_bang_question() {
        assert_eq!(
            segment_sentences("It ended in 1992. 42 teams joined! Why not?  Because."),
            vec![
                "It ended in 1992.",
                "42 teams joined!",
                "Why not?",
                "Because."
            ]
        );
    }

    #[test]
    fn decimal_numbers_do_not_split() {
        assert_eq!(
            segment_sentences("Accuracy was 97.5 percent. Recall was lower."),
            vec!["Accuracy was 97.5 percent.", "Recall was lower."]
        );
    }

    #[test]
    fn multiline_sentences_are_joined() {
        assert_eq!(
            segment_sentences("Tagging is\nhard. Parsing is\nharder."),
            vec!["Tagging is hard.", "Parsing is harder."]
        );
    }

    #[test]
    fn tokenize_splits_hyphens_and_punctuation() {
        assert_eq!(
            tokenize("HMM-based POS tagging."),
            vec!["hmm", "based", "pos", "tagging"]
        );
        assert_eq!(
            tokenize("(Cutting et al., 1992)"),
            vec!["cutting", "et", "al", "1992"]
        );
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("don't"), vec!["don", "t"]);
        assert_eq!(tokenize("... --- !!!"), Vec::<String>::new());
    }

    #[test]
    fn filter_short_keeps_three_and_up() {
        let input = vec![
            sent(&["publication", "year"]),
            sent(&["a", "b", "c"]),
            sent(&["one"]),
        ];
        let kept = filter_short(input, DEFAULT_MIN_TOKENS);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].tokens, vec!["a", "b", "c"]);
        assert!(filter_short(vec![], DEFAULT_MIN_TOKENS).is_empty());
    }

    #[test]
    fn vocabulary_threshold_and_tie_break() {
        let sentences = vec![sent(&["a", "a", "b"])];
        let vocab = build_vocabulary(&sentences, 2).unwrap();
        assert_eq!(vocab.len(), 1);
        assert_eq!(vocab.index_of("a"), Some(0));
        assert_eq!(vocab.index_of("b"), None);

        let sentences = vec![sent(&["b", "a", "b", "a", "a", "b"])];
        let vocab = build_vocabulary(&sentences, 1).unwrap();
        assert_eq!(vocab.index_of("a"), Some(0));
        assert_eq!(vocab.index_of("b"), Some(1));
        assert_eq!(vocab.count(0), 3);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let err = build_vocabulary(&[], 1).unwrap_err();
        assert!(matches!(err, Error::EmptyVocabulary));
    }

    #[test]
    fn vocabulary_indices_are_dense_and_inverse() {
        let sentences = vec![sent(&["c", "b", "a", "c", "b", "c"])];
        let vocab = build_vocabulary(&sentences, 1).unwrap();
        for i in 0..vocab.len() {
            assert_eq!(vocab.index_of(vocab.token(i)), Some(i));
        }
    }

    proptest! {
        #[test]
        fn tokenize_yields_lowercase_nonempty(text in "\\PC*") {
            for token in tokenize(&text) {
                prop_assert!(!token.is_empty());
                // Lowercasing is idempotent on the output; characters with
                // no lowercase mapping (e.g. math capitals) pass through.
                prop_assert_eq!(token.to_lowercase(), token.clone());
                prop_assert!(token.chars().all(|c| c.is_alphanumeric()));
            }
        }

        #[test]
        fn segmenter_never_emits_empty_sentences(text in "\\PC*") {
            for s in segment_sentences(&text) {
                prop_assert!(!s.trim().is_empty());
            }
        }

        #[test]
        fn filter_short_is_idempotent(lens in proptest::collection::vec(0usize..6, 0..20)) {
            let sentences: Vec<Sentence> = lens.iter().map(|&n| sent(&vec!["w"; n])).collect();
            let once = filter_short(sentences, 3);
            let twice = filter_short(once.clone(), 3);
            prop_assert_eq!(once, twice);
        }
    }
}
