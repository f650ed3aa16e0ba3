/// Token standing in for every run of digits.
pub const NUMBER_TOKEN: &str = "<num>";
/// Sentences are cut to this many tokens.
pub const MAX_SENTENCE_TOKENS: usize = 64;
/// A sentence-context pair, separator included, is cut to this many tokens.
pub const MAX_PAIR_TOKENS: usize = 196;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Letter,
    Digit,
}

/// Lowercase and split into letter runs, digit runs (collapsed to
/// [`NUMBER_TOKEN`]) and single punctuation characters. Whitespace only
/// separates.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut class = None;
    let flush = |current: &mut String, class: &mut Option<Class>, out: &mut Vec<String>| {
        match class.take() {
            Some(Class::Letter) => out.push(std::mem::take(current)),
            Some(Class::Digit) => {
                current.clear();
                out.push(NUMBER_TOKEN.to_string());
            }
            None => {}
        }
    };
    for ch in text.chars() {
        let c = if ch.is_numeric() {
            Some(Class::Digit)
        } else if ch.is_alphabetic() {
            Some(Class::Letter)
        } else {
            None
        };
        match c {
            Some(c) => {
                if class != Some(c) {
                    flush(&mut current, &mut class, &mut out);
                    class = Some(c);
                }
                current.extend(ch.to_lowercase());
            }
            None => {
                flush(&mut current, &mut class, &mut out);
                if !ch.is_whitespace() {
                    out.push(ch.to_string());
                }
            }
        }
    }
    flush(&mut current, &mut class, &mut out);
    out
}
