//! Character filtering and whitespace tokenization for Bangla news text.
//!
//! Removed characters are replaced by a space rather than deleted, so that
//! stripping e.g. the digit in "৫টি" never fuses two neighbouring words.
//! Removal classes:
//!
//! * special characters: every code point in Unicode categories `P*` and `S*`
//! * digits: ASCII `0-9` and Bangla `০-৯` (U+09E6..=U+09EF)
//! * English letters: ASCII `A-Z`, `a-z`
//! * emoji: U+1F300..=U+1FAFF and U+2600..=U+27BF. ASCII emoticons such as
//!   `:D` or `;)` fall apart into punctuation and letters and are covered by
//!   the first and third classes.
//!
//! Bangla letters, vowel signs, virama and ZWJ/ZWNJ are kept.

use std::borrow::Cow;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterRules {
    pub remove_special: bool,
    pub remove_digits_bangla_english: bool,
    pub remove_english_alphabet: bool,
    pub remove_emoticons_and_emoji: bool,
}

impl Default for FilterRules {
    fn default() -> Self {
        Self {
            remove_special: true,
            remove_digits_bangla_english: true,
            remove_english_alphabet: true,
            remove_emoticons_and_emoji: true,
        }
    }
}

impl FilterRules {
    pub fn none() -> Self {
        Self {
            remove_special: false,
            remove_digits_bangla_english: false,
            remove_english_alphabet: false,
            remove_emoticons_and_emoji: false,
        }
    }

    /// Whether `c` falls in one of the enabled removal classes.
    pub fn removes(&self, c: char) -> bool {
        (self.remove_special && is_punct_or_symbol(c))
            || (self.remove_digits_bangla_english && is_digit(c))
            || (self.remove_english_alphabet && c.is_ascii_alphabetic())
            || (self.remove_emoticons_and_emoji && is_emoji(c))
    }

    fn class_pattern(&self) -> Option<String> {
        let mut class = String::new();
        if self.remove_special {
            class.push_str(r"\p{P}\p{S}");
        }
        if self.remove_digits_bangla_english {
            class.push_str(r"0-9\x{09E6}-\x{09EF}");
        }
        if self.remove_english_alphabet {
            class.push_str("A-Za-z");
        }
        if self.remove_emoticons_and_emoji {
            class.push_str(r"\x{1F300}-\x{1FAFF}\x{2600}-\x{27BF}");
        }
        (!class.is_empty()).then(|| format!("[{class}]"))
    }
}

fn is_digit(c: char) -> bool {
    c.is_ascii_digit() || ('\u{09E6}'..='\u{09EF}').contains(&c)
}

fn is_emoji(c: char) -> bool {
    ('\u{1F300}'..='\u{1FAFF}').contains(&c) || ('\u{2600}'..='\u{27BF}').contains(&c)
}

fn is_punct_or_symbol(c: char) -> bool {
    use std::sync::OnceLock;
    static PS: OnceLock<Regex> = OnceLock::new();
    let re = PS.get_or_init(|| Regex::new(r"^[\p{P}\p{S}]$").expect("static pattern"));
    let mut buf = [0u8; 4];
    re.is_match(c.encode_utf8(&mut buf))
}

/// Compiled form of a [`FilterRules`] value, reusable across documents.
#[derive(Debug, Clone)]
pub struct TextCleaner {
    rules: FilterRules,
    removable: Option<Regex>,
}

impl TextCleaner {
    pub fn new(rules: FilterRules) -> Self {
        let removable = rules
            .class_pattern()
            .map(|p| Regex::new(&p).expect("character class built from fixed fragments"));
        Self { rules, removable }
    }

    pub fn rules(&self) -> &FilterRules {
        &self.rules
    }

    pub fn clean(&self, text: &str) -> String {
        let spaced: Cow<'_, str> = match &self.removable {
            Some(re) => re.replace_all(text, " "),
            None => Cow::Borrowed(text),
        };
        collapse_whitespace(&spaced)
    }

    pub fn preprocess(&self, text: &str) -> TokenList {
        tokenize(&self.clean(text))
    }
}

impl Default for TextCleaner {
    fn default() -> Self {
        Self::new(FilterRules::default())
    }
}

fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

pub fn clean_text(text: &str, rules: &FilterRules) -> String {
    TextCleaner::new(*rules).clean(text)
}

/// Whitespace-separated word tokens of a cleaned document.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenList(Vec<String>);

impl TokenList {
    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for TokenList {
    /// Splits every item on whitespace so the token invariants hold for any input.
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenList(
            iter.into_iter()
                .flat_map(|s| {
                    let s: String = s.into();
                    s.split_whitespace().map(str::to_owned).collect::<Vec<_>>()
                })
                .collect(),
        )
    }
}

pub fn tokenize(text: &str) -> TokenList {
    TokenList(text.split_whitespace().map(str::to_owned).collect())
}
