//! Whitespace + punctuation tokenizer over the canonical grammar.
//!
//! Tokens are maximal runs of word characters ([A-Za-z0-9_]) and maximal
//! runs of other non-whitespace characters, so operator spellings like `->`
//! and `|-` survive as retrieval signal. The constant prompt-frame markers
//! are stopwords: they appear in every prompt and would otherwise give every
//! pair of prompts nonzero overlap.

use std::collections::BTreeSet;

/// Frame-marker words plus the angle-bracket runs tokenizing them produces.
const STOPWORDS: [&str; 7] = ["SOS", "CTXT", "PRF_STT", "PRF_STP", "EOS", "<", ">"];

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Token set of a prompt (or any grammar text). Sets, not bags: similarity
/// is Jaccard overlap.
pub fn tokenize(text: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut cur = String::new();
    let mut cur_word = false;
    for c in text.chars() {
        if c.is_whitespace() {
            if !cur.is_empty() {
                out.insert(std::mem::take(&mut cur));
            }
            continue;
        }
        let word = is_word(c);
        if !cur.is_empty() && word != cur_word {
            out.insert(std::mem::take(&mut cur));
        }
        cur_word = word;
        cur.push(c);
    }
    if !cur.is_empty() {
        out.insert(cur);
    }
    for stop in STOPWORDS {
        out.remove(stop);
    }
    out
}

/// |a ∩ b| / |a ∪ b|; zero when either side is empty.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let shared = a.intersection(b).count();
    let union = a.len() + b.len() - shared;
    shared as f64 / union as f64
}
