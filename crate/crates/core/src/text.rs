//! Tokenization and rule-based lemmatization.
//!
//! Tokens are runs of alphanumerics (with internal hyphens), clitics such as
//! `n't` and `'s`, or single punctuation characters. Every offset is a
//! character offset into the original text, never a byte offset.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Half-open character span `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct CharSpan {
    pub start: usize,
    pub end: usize,
}

impl CharSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        CharSpan { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn overlaps(&self, other: &CharSpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, other: &CharSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Extracts the spanned characters from `text`.
    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        let mut indices = text
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(text.len()));
        let start = indices.nth(self.start).unwrap_or(text.len());
        let end = if self.end == self.start {
            start
        } else {
            indices.nth(self.end - self.start - 1).unwrap_or(text.len())
        };
        &text[start..end]
    }
}

impl From<[usize; 2]> for CharSpan {
    fn from(v: [usize; 2]) -> Self {
        CharSpan {
            start: v[0],
            end: v[1],
        }
    }
}

impl From<CharSpan> for [usize; 2] {
    fn from(s: CharSpan) -> Self {
        [s.start, s.end]
    }
}

impl fmt::Display for CharSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub span: CharSpan,
    pub is_function_word: bool,
}

impl Token {
    pub fn is_punct(&self) -> bool {
        self.surface.chars().all(|c| !c.is_alphanumeric())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSeq {
    pub text: String,
    pub tokens: Vec<Token>,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.lemma.as_str())
    }

    /// Character span covering tokens `range`.
    pub fn span_of(&self, range: std::ops::Range<usize>) -> CharSpan {
        CharSpan::new(
            self.tokens[range.start].span.start,
            self.tokens[range.end - 1].span.end,
        )
    }

    pub fn slice(&self, span: CharSpan) -> &str {
        span.slice(&self.text)
    }
}

/// Stateless text analyzer parameterized by a function-word list.
#[derive(Debug, Clone)]
pub struct Analyzer {
    stopwords: HashSet<String>,
}

impl Default for Analyzer {
    fn default() -> Self {
        Analyzer::new(crate::fixtures::default_stopwords())
    }
}

impl Analyzer {
    pub fn new(stopwords: HashSet<String>) -> Self {
        Analyzer { stopwords }
    }

    pub fn stopwords(&self) -> &HashSet<String> {
        &self.stopwords
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    pub fn analyze(&self, text: &str) -> TokenSeq {
        let tokens = tokenize(text)
            .into_iter()
            .map(|(surface, span)| {
                let lemma = lemmatize(&surface);
                let lower = surface.to_lowercase();
                let is_function_word =
                    self.stopwords.contains(&lemma) || self.stopwords.contains(&lower);
                Token {
                    surface,
                    lemma,
                    span,
                    is_function_word,
                }
            })
            .collect();
        TokenSeq {
            text: text.to_string(),
            tokens,
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Splits `text` into (surface, span) pairs.
pub fn tokenize(text: &str) -> Vec<(String, CharSpan)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_word_char(c) {
            let start = i;
            while i < chars.len()
                && (is_word_char(chars[i])
                    || ((chars[i] == '-' || chars[i] == '/' || chars[i] == '.')
                        && i + 1 < chars.len()
                        && is_word_char(chars[i + 1])
                        && i > start
                        && (chars[i] == '-' || chars[i - 1].is_ascii_digit())))
            {
                i += 1;
            }
            // "doesn't" -> "does" + "n't"
            let negated_clitic = i >= start + 2
                && i + 1 < chars.len()
                && chars[i - 1].eq_ignore_ascii_case(&'n')
                && (chars[i] == '\'' || chars[i] == '\u{2019}')
                && chars[i + 1].eq_ignore_ascii_case(&'t')
                && (i + 2 == chars.len() || !is_word_char(chars[i + 2]));
            if negated_clitic {
                let word: String = chars[start..i - 1].iter().collect();
                out.push((word, CharSpan::new(start, i - 1)));
                let clitic: String = chars[i - 1..i + 2].iter().collect();
                out.push((clitic, CharSpan::new(i - 1, i + 2)));
                i += 2;
                continue;
            }
            let word: String = chars[start..i].iter().collect();
            out.push((word, CharSpan::new(start, i)));
            continue;
        }
        if (c == '\'' || c == '\u{2019}')
            && i + 1 < chars.len()
            && chars[i + 1].is_alphabetic()
            && !out.is_empty()
        {
            // 's 're 'll 've 'd 'm
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_alphabetic() && i - start <= 2 {
                i += 1;
            }
            if i == chars.len() || !is_word_char(chars[i]) {
                let clitic: String = chars[start..i].iter().collect();
                out.push((clitic, CharSpan::new(start, i)));
                continue;
            }
            i = start;
        }
        out.push((c.to_string(), CharSpan::new(i, i + 1)));
        i += 1;
    }
    out
}

const IRREGULAR: &[(&str, &str)] = &[
    // be / have / do
    ("am", "be"),
    ("is", "be"),
    ("are", "be"),
    ("was", "be"),
    ("were", "be"),
    ("been", "be"),
    ("being", "be"),
    ("'m", "be"),
    ("'re", "be"),
    ("has", "have"),
    ("had", "have"),
    ("having", "have"),
    ("'ve", "have"),
    ("does", "do"),
    ("did", "do"),
    ("done", "do"),
    ("doing", "do"),
    ("n't", "not"),
    ("ca", "can"),
    ("wo", "will"),
    ("'ll", "will"),
    ("'d", "would"),
    // strong verbs
    ("went", "go"),
    ("gone", "go"),
    ("goes", "go"),
    ("going", "go"),
    ("got", "get"),
    ("gotten", "get"),
    ("getting", "get"),
    ("took", "take"),
    ("taken", "take"),
    ("taking", "take"),
    ("gave", "give"),
    ("given", "give"),
    ("giving", "give"),
    ("saw", "see"),
    ("seen", "see"),
    ("sees", "see"),
    ("knew", "know"),
    ("known", "know"),
    ("told", "tell"),
    ("felt", "feel"),
    ("ate", "eat"),
    ("eaten", "eat"),
    ("made", "make"),
    ("making", "make"),
    ("came", "come"),
    ("coming", "come"),
    ("ran", "run"),
    ("running", "run"),
    ("found", "find"),
    ("thought", "think"),
    ("bought", "buy"),
    ("brought", "bring"),
    ("caught", "catch"),
    ("taught", "teach"),
    ("fought", "fight"),
    ("held", "hold"),
    ("kept", "keep"),
    ("lost", "lose"),
    ("met", "meet"),
    ("said", "say"),
    ("says", "say"),
    ("sold", "sell"),
    ("sent", "send"),
    ("sat", "sit"),
    ("slept", "sleep"),
    ("spoke", "speak"),
    ("spoken", "speak"),
    ("spent", "spend"),
    ("stood", "stand"),
    ("swam", "swim"),
    ("threw", "throw"),
    ("thrown", "throw"),
    ("understood", "understand"),
    ("wore", "wear"),
    ("worn", "wear"),
    ("won", "win"),
    ("wrote", "write"),
    ("written", "write"),
    ("writing", "write"),
    ("drank", "drink"),
    ("drunk", "drink"),
    ("drove", "drive"),
    ("driven", "drive"),
    ("driving", "drive"),
    ("fell", "fall"),
    ("fallen", "fall"),
    ("flew", "fly"),
    ("flown", "fly"),
    ("forgot", "forget"),
    ("forgotten", "forget"),
    ("grew", "grow"),
    ("grown", "grow"),
    ("heard", "hear"),
    ("hid", "hide"),
    ("hidden", "hide"),
    ("hiding", "hide"),
    ("learnt", "learn"),
    ("lay", "lie"),
    ("lying", "lie"),
    ("meant", "mean"),
    ("paid", "pay"),
    ("rode", "ride"),
    ("riding", "ride"),
    ("rose", "rise"),
    ("shook", "shake"),
    ("shot", "shoot"),
    ("sang", "sing"),
    ("sung", "sing"),
    ("stole", "steal"),
    ("stolen", "steal"),
    ("stuck", "stick"),
    ("struck", "strike"),
    ("swept", "sweep"),
    ("tore", "tear"),
    ("torn", "tear"),
    ("woke", "wake"),
    ("began", "begin"),
    ("begun", "begin"),
    ("broke", "break"),
    ("broken", "break"),
    ("built", "build"),
    ("chose", "choose"),
    ("chosen", "choose"),
    ("dug", "dig"),
    ("drew", "draw"),
    ("drawn", "draw"),
    ("fed", "feed"),
    ("froze", "freeze"),
    ("frozen", "freeze"),
    ("left", "leave"),
    ("leaving", "leave"),
    ("led", "lead"),
    ("lent", "lend"),
    ("built", "build"),
    ("became", "become"),
    ("becoming", "become"),
    ("bit", "bite"),
    ("bitten", "bite"),
    ("blew", "blow"),
    ("blown", "blow"),
    ("hung", "hang"),
    ("slid", "slide"),
    ("spun", "spin"),
    ("taught", "teach"),
    ("threw", "throw"),
    ("using", "use"),
    ("used", "use"),
    ("uses", "use"),
    ("moving", "move"),
    ("moved", "move"),
    ("living", "live"),
    ("lived", "live"),
    ("having", "have"),
    ("closing", "close"),
    ("closed", "close"),
    ("quarantining", "quarantine"),
    ("quarantined", "quarantine"),
    ("sharing", "share"),
    ("shared", "share"),
    ("smiling", "smile"),
    ("smiled", "smile"),
    ("liked", "like"),
    ("liking", "like"),
    ("hoping", "hope"),
    ("hoped", "hope"),
    ("saving", "save"),
    ("saved", "save"),
    ("arriving", "arrive"),
    ("arrived", "arrive"),
    ("arrives", "arrive"),
    ("receiving", "receive"),
    ("received", "receive"),
    ("approaching", "approach"),
    ("approached", "approach"),
    ("approaches", "approach"),
    ("reaching", "reach"),
    ("reaches", "reach"),
    ("placed", "place"),
    ("placing", "place"),
    ("danced", "dance"),
    ("scored", "score"),
    ("scoring", "score"),
    ("exposed", "exposed"),
    ("tested", "test"),
    ("opened", "open"),
    ("opening", "open"),
    ("covered", "cover"),
    ("covering", "cover"),
    ("noticed", "notice"),
    ("noticing", "notice"),
    ("chased", "chase"),
    ("chasing", "chase"),
    ("loved", "love"),
    ("loving", "love"),
    ("tasted", "taste"),
    ("baked", "bake"),
    ("baking", "bake"),
    ("raced", "race"),
    ("wiped", "wipe"),
    // nouns
    ("children", "child"),
    ("men", "man"),
    ("women", "woman"),
    ("mice", "mouse"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("geese", "goose"),
    ("leaves", "leaf"),
    ("wolves", "wolf"),
    ("knives", "knife"),
    ("lives", "life"),
    ("wives", "wife"),
    ("halves", "half"),
    ("shelves", "shelf"),
    ("people", "people"),
    ("class", "class"),
    ("glasses", "glass"),
    ("news", "news"),
    ("species", "species"),
    ("series", "series"),
    ("bus", "bus"),
    ("gas", "gas"),
    ("this", "this"),
    ("his", "his"),
    ("its", "its"),
    ("us", "us"),
    ("yes", "yes"),
    ("always", "always"),
    ("sometimes", "sometimes"),
    ("perhaps", "perhaps"),
    ("towards", "towards"),
    ("days", "day"),
    ("always", "always"),
    ("symptoms", "symptom"),
    ("whereas", "whereas"),
    ("less", "less"),
    ("unless", "unless"),
    ("thanks", "thank"),
    ("tasty", "tasty"),
    ("during", "during"),
    ("morning", "morning"),
    ("evening", "evening"),
    ("building", "building"),
    ("ceiling", "ceiling"),
    ("thing", "thing"),
    ("nothing", "nothing"),
    ("something", "something"),
    ("anything", "anything"),
    ("everything", "everything"),
    ("fewer", "few"),
    // comparatives and superlatives
    ("larger", "large"),
    ("largest", "large"),
    ("smaller", "small"),
    ("smallest", "small"),
    ("bigger", "big"),
    ("biggest", "big"),
    ("greater", "greater"),
    ("better", "good"),
    ("best", "good"),
    ("worse", "bad"),
    ("worst", "bad"),
    ("older", "old"),
    ("younger", "young"),
    ("taller", "tall"),
    ("shorter", "short"),
    ("faster", "fast"),
    ("slower", "slow"),
    ("stronger", "strong"),
    ("heavier", "heavy"),
    ("lighter", "light"),
    ("higher", "high"),
    ("lower", "low"),
    // pronoun cases
    ("him", "him"),
    ("her", "her"),
    ("them", "them"),
    ("me", "me"),
];

fn irregular() -> &'static HashMap<&'static str, &'static str> {
    static TABLE: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    TABLE.get_or_init(|| IRREGULAR.iter().copied().collect())
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Restores a stem after stripping `-ing`/`-ed`.
fn restore_stem(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n >= 3
        && b[n - 1] == b[n - 2]
        && !is_vowel(b[n - 1])
        && !matches!(b[n - 1], b'l' | b's' | b'z' | b'f')
    {
        return stem[..n - 1].to_string();
    }
    if n >= 2 && matches!(b[n - 1], b'v' | b'z' | b'c') {
        return format!("{stem}e");
    }
    // isolat(e), obscur(e), scar(e), acquir(e), purchas(e), surpris(e), troubl(e)
    if n >= 4 {
        let tail = &stem[n - 2..];
        let before_vowel = is_vowel(b[n - 3]);
        let needs_e = matches!(tail, "bl" | "iz" | "as" | "dl" | "gl" | "tl" | "pl")
            || (!before_vowel && matches!(tail, "at" | "ur" | "ar" | "ir" | "is"));
        if needs_e {
            return format!("{stem}e");
        }
    }
    if n == 3
        && !is_vowel(b[0])
        && is_vowel(b[1])
        && !is_vowel(b[2])
        && !matches!(b[2], b'w' | b'x' | b'y')
    {
        return format!("{stem}e");
    }
    stem.to_string()
}

/// Lemmatizes every word of `phrase` and joins them with single spaces.
pub fn lemmatize_phrase(phrase: &str) -> String {
    tokenize(phrase)
        .iter()
        .map(|(w, _)| lemmatize(w))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Lowercases and reduces `word` to its lemma.
pub fn lemmatize(word: &str) -> String {
    let w = word.to_lowercase().replace('\u{2019}', "'");
    if let Some(l) = irregular().get(w.as_str()) {
        return (*l).to_string();
    }
    if !w.chars().all(|c| c.is_ascii_alphabetic()) || w.len() <= 3 {
        return w;
    }
    if let Some(stem) = w.strip_suffix("ies") {
        if w.len() > 4 {
            return format!("{stem}y");
        }
    }
    if w.ends_with("sses") {
        return w[..w.len() - 2].to_string();
    }
    for suf in ["xes", "ches", "shes", "zzes", "oes"] {
        if w.ends_with(suf) {
            return w[..w.len() - 2].to_string();
        }
    }
    if w.ends_with('s')
        && !(w.ends_with("ss") || w.ends_with("us") || w.ends_with("is") || w.ends_with("ous"))
    {
        return w[..w.len() - 1].to_string();
    }
    if let Some(stem) = w.strip_suffix("ing") {
        if stem.len() >= 3 && stem.bytes().any(is_vowel) {
            return restore_stem(stem);
        }
    }
    if let Some(stem) = w.strip_suffix("ied") {
        if stem.len() >= 2 {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = w.strip_suffix("ed") {
        if stem.len() >= 3 && stem.bytes().any(is_vowel) {
            return restore_stem(stem);
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lemmas(text: &str) -> Vec<String> {
        Analyzer::default()
            .analyze(text)
            .tokens
            .into_iter()
            .map(|t| t.lemma)
            .collect()
    }

    #[test]
    fn cookie_sentence_lemmas() {
        assert_eq!(
            lemmas("The child takes the cookie"),
            ["the", "child", "take", "the", "cookie"]
        );
    }

    #[test]
    fn empty_text() {
        assert!(Analyzer::default().analyze("").is_empty());
    }

    #[test]
    fn single_verb_forms() {
        assert_eq!(lemmatize("gets"), "get");
        assert_eq!(lemmatize("was"), "be");
        assert_eq!(lemmatize("children"), "child");
        assert_eq!(lemmatize("takes"), "take");
        assert_eq!(lemmatize("helped"), "help");
        assert_eq!(lemmatize("stopping"), "stop");
        assert_eq!(lemmatize("studies"), "study");
        assert_eq!(lemmatize("boxes"), "box");
        assert_eq!(lemmatize("classes"), "class");
        assert_eq!(lemmatize("glass"), "glass");
        assert_eq!(lemmatize("liked"), "like");
        assert_eq!(lemmatize("eating"), "eat");
        assert_eq!(lemmatize("thanks"), "thank");
    }

    #[test]
    fn clitics_split() {
        let seq = Analyzer::default().analyze("He doesn't know Mary's dog.");
        let surf: Vec<_> = seq.tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(
            surf,
            ["He", "does", "n't", "know", "Mary", "'s", "dog", "."]
        );
        assert_eq!(seq.tokens[2].lemma, "not");
        assert!(seq.tokens[2].is_function_word);
    }

    #[test]
    fn dates_and_hyphens_stay_whole() {
        let seq = Analyzer::default().analyze("co-location on 2021-09-04, 9/18");
        let surf: Vec<_> = seq.tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surf, ["co-location", "on", "2021-09-04", ",", "9/18"]);
    }

    #[test]
    fn spans_are_char_offsets() {
        let seq = Analyzer::default().analyze("café au lait");
        assert_eq!(seq.tokens[1].span, CharSpan::new(5, 7));
        assert_eq!(seq.slice(seq.tokens[2].span), "lait");
        assert_eq!(CharSpan::new(0, 4).slice("café au lait"), "café");
    }

    #[test]
    fn function_word_flags() {
        let seq = Analyzer::default().analyze("The child is in class");
        let flags: Vec<_> = seq.tokens.iter().map(|t| t.is_function_word).collect();
        assert_eq!(flags, [true, false, true, true, false]);
    }
}
