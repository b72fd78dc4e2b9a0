//! Flesch Reading Ease with a vowel-group syllable heuristic.

/// Score returned for text without words.
pub const DEGENERATE_READABILITY: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Readability {
    pub score: f64,
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    /// Set when the text has no words and `score` is the degenerate value.
    pub degenerate: bool,
}

fn is_vowel(c: char) -> bool {
    matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel-group count, minus one for a terminal silent `e` when more than
/// one group exists; at least 1 for any non-empty word.
pub fn count_syllables(word: &str) -> usize {
    if word.is_empty() {
        return 0;
    }
    let mut groups = 0;
    let mut in_group = false;
    for c in word.chars() {
        let v = is_vowel(c);
        if v && !in_group {
            groups += 1;
        }
        in_group = v;
    }
    if groups > 1 && word.ends_with(['e', 'E']) {
        groups -= 1;
    }
    groups.max(1)
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Words are maximal alphabetic runs; sentences are the terminator-delimited
/// segments that contain at least one word.
pub fn flesch_reading_ease(text: &str) -> Readability {
    let mut words = 0;
    let mut syllables = 0;
    let mut sentences = 0;
    let mut segment_has_word = false;
    let mut word = String::new();

    let flush = |word: &mut String, words: &mut usize, syllables: &mut usize| {
        if !word.is_empty() {
            *words += 1;
            *syllables += count_syllables(word);
            word.clear();
        }
    };

    for c in text.chars() {
        if c.is_alphabetic() {
            word.push(c);
            segment_has_word = true;
            continue;
        }
        flush(&mut word, &mut words, &mut syllables);
        if is_terminator(c) && segment_has_word {
            sentences += 1;
            segment_has_word = false;
        }
    }
    flush(&mut word, &mut words, &mut syllables);
    if segment_has_word {
        sentences += 1;
    }

    if words == 0 {
        return Readability {
            score: DEGENERATE_READABILITY,
            words,
            sentences,
            syllables,
            degenerate: true,
        };
    }
    let w = words as f64;
    let score = 206.835 - 1.015 * (w / sentences as f64) - 84.6 * (syllables as f64 / w);
    Readability {
        score,
        words,
        sentences,
        syllables,
        degenerate: false,
    }
}
