//! Lexicon-and-rules compound polarity.
//!
//! Implements a subset of the VADER heuristics: a three-token negation
//! window, booster words, ALL-CAPS emphasis, exclamation emphasis and the
//! `S / sqrt(S² + α)` squashing. Idioms, contrastive "but" re-weighting and
//! emoji handling are not implemented.

use super::lexicon::Lexicon;

pub const DEFAULT_ALPHA: f64 = 15.0;
pub const NEGATION_SCALAR: f64 = -0.74;
pub const CAPS_INCREMENT: f64 = 0.733;
pub const EXCLAMATION_INCREMENT: f64 = 0.292;
pub const MAX_EXCLAMATIONS: usize = 4;
const WINDOW: usize = 3;
/// Booster dampening by distance (1, 2, 3 tokens back).
const BOOSTER_DAMPING: [f64; WINDOW] = [1.0, 0.95, 0.9];

struct Token<'a> {
    text: &'a str,
    lower: String,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    text.split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric() && c != '\''))
        .map(|t| t.trim_matches('\''))
        .filter(|t| !t.is_empty())
        .map(|t| Token {
            text: t,
            lower: t.to_lowercase(),
        })
        .collect()
}

fn is_all_caps(word: &str) -> bool {
    word.chars().any(char::is_alphabetic) && !word.chars().any(char::is_lowercase)
}

fn is_negator(token: &Token<'_>, lexicon: &Lexicon) -> bool {
    lexicon.negators.contains(&token.lower) || token.lower.ends_with("n't")
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Sum of rule-adjusted valences before squashing.
pub fn adjusted_sum(text: &str, lexicon: &Lexicon) -> f64 {
    let tokens = tokenize(text);
    let caps_count = tokens.iter().filter(|t| is_all_caps(t.text)).count();
    let alpha_words = tokens
        .iter()
        .filter(|t| t.text.chars().any(char::is_alphabetic))
        .count();
    let mixed_case = caps_count > 0 && caps_count < alpha_words;

    let mut sum = 0.0;
    for (i, tok) in tokens.iter().enumerate() {
        let Some(base) = lexicon.valence(&tok.lower) else {
            continue;
        };
        let mut v = base;
        if mixed_case && is_all_caps(tok.text) {
            v += CAPS_INCREMENT * sign(base);
        }
        let mut negated = false;
        for k in 1..=WINDOW.min(i) {
            let prev = &tokens[i - k];
            if let Some(inc) = lexicon.boosters.get(&prev.lower) {
                v += inc * sign(base) * BOOSTER_DAMPING[k - 1];
            }
            negated |= is_negator(prev, lexicon);
        }
        if negated {
            v *= NEGATION_SCALAR;
        }
        sum += v;
    }

    let bangs = text
        .chars()
        .filter(|c| *c == '!')
        .count()
        .min(MAX_EXCLAMATIONS);
    let emphasis = bangs as f64 * EXCLAMATION_INCREMENT;
    if sum > 0.0 {
        sum += emphasis;
    } else if sum < 0.0 {
        sum -= emphasis;
    }
    sum
}

/// Squashes a raw valence sum into (−1, 1).
pub fn normalize(sum: f64, alpha: f64) -> f64 {
    (sum / (sum * sum + alpha).sqrt()).clamp(-1.0, 1.0)
}

/// Compound polarity of raw (uncleaned) text; 0 when no lexicon word occurs.
pub fn compound_sentiment(text: &str, lexicon: &Lexicon, alpha: f64) -> f64 {
    debug_assert!(alpha > 0.0);
    normalize(adjusted_sum(text, lexicon), alpha)
}
