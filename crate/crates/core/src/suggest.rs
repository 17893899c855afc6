//! Keyword-based category suggestions for an answer. Suggestions are only
//! shown to the analyst; recording an answer always needs an explicit
//! category.

use serde::Serialize;

use crate::engine::Taxonomy;

const DEFAULT_KEYWORDS: &[(&str, &[&str])] = &[
    (
        "Performance",
        &["second", "seconds", "sec", "time", "fast", "quick", "speed", "minute", "minutes", "response", "delay"],
    ),
    ("Flexibility", &["ways", "partial", "option", "options", "multiple", "alternative", "configurable"]),
    (
        "Usability",
        &["message", "drop down", "easy", "show", "select", "friendly", "autosuggestion", "suggest", "simple"],
    ),
    ("Modifiability", &["modify", "change", "edit", "update", "extend"]),
    ("Privacy", &["private", "privacy", "personal", "confidential", "mask", "hidden"]),
    ("Legal issue", &["legal", "law", "tax", "regulation", "compliance", "license"]),
    ("Security", &["password", "access", "privilege", "privileged", "authorized", "encrypt", "encrypted"]),
];

/// Keyword to category table. Keywords are lowercase words or
/// space-separated phrases, matched on whole words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordTable {
    entries: Vec<(String, Vec<String>)>,
}

impl KeywordTable {
    pub fn new<C, K>(entries: impl IntoIterator<Item = (C, Vec<K>)>) -> Self
    where
        C: Into<String>,
        K: Into<String>,
    {
        Self {
            entries: entries
                .into_iter()
                .map(|(c, ks)| (c.into(), ks.into_iter().map(|k| k.into().to_lowercase()).collect()))
                .collect(),
        }
    }

    fn keywords_for<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.entries
            .iter()
            .filter(move |(c, _)| c == category)
            .flat_map(|(_, ks)| ks.iter().map(String::as_str))
    }
}

impl Default for KeywordTable {
    fn default() -> Self {
        Self::new(DEFAULT_KEYWORDS.iter().map(|(c, ks)| (*c, ks.to_vec())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Suggestion {
    pub category: String,
    pub score: f64,
}

fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn contains_phrase(haystack: &[String], phrase: &str) -> bool {
    let needle: Vec<&str> = phrase.split_whitespace().collect();
    !needle.is_empty()
        && haystack
            .windows(needle.len())
            .any(|w| w.iter().zip(&needle).all(|(a, b)| a == b))
}

/// Every taxonomy category with a score in `[0, 1]`: distinct matched
/// keywords divided by the best category's count. Sorted by score, ties in
/// taxonomy order.
pub fn suggest_category(answer: &str, taxonomy: &Taxonomy) -> Vec<Suggestion> {
    suggest_with(answer, taxonomy, &KeywordTable::default())
}

pub fn suggest_with(answer: &str, taxonomy: &Taxonomy, table: &KeywordTable) -> Vec<Suggestion> {
    let tokens = words(answer);
    let counts: Vec<usize> = taxonomy
        .categories()
        .iter()
        .map(|c| {
            let mut seen: Vec<&str> = Vec::new();
            for k in table.keywords_for(c) {
                if !seen.contains(&k) && contains_phrase(&tokens, k) {
                    seen.push(k);
                }
            }
            seen.len()
        })
        .collect();
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut ranked: Vec<(usize, Suggestion)> = taxonomy
        .categories()
        .iter()
        .zip(&counts)
        .enumerate()
        .map(|(i, (c, &n))| {
            let score = if max == 0 { 0.0 } else { n as f64 / max as f64 };
            (i, Suggestion { category: c.clone(), score })
        })
        .collect();
    ranked.sort_by(|(ia, a), (ib, b)| b.score.total_cmp(&a.score).then(ia.cmp(ib)));
    ranked.into_iter().map(|(_, s)| s).collect()
}
