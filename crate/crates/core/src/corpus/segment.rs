//! Rule-based sentence segmentation.
//!
//! A sentence ends at `.`, `?` or `!` (plus any trailing quotes or closing
//! brackets) when the terminator sits outside parentheses and brackets, is
//! followed by whitespace, and the next word does not start in lowercase.
//! A period after a known abbreviation or a mid-sentence initial does not end
//! a sentence.

const ABBREVIATIONS: &[&str] = &[
    "al", "approx", "cf", "ch", "chap", "corp", "dept", "dr", "e.g", "eq", "eqn", "eqs",
    "fig", "figs", "i.e", "inc", "jr", "ltd", "mr", "mrs", "ms", "no", "nos", "p", "pp", "prof",
    "ref", "refs", "resp", "sec", "sect", "secs", "sr", "st", "tab", "tbl", "univ", "viz", "vol",
    "vs",
];

const TRAILING_CLOSERS: &[char] = &['.', '?', '!', '"', '\'', '”', '’', ')', ']'];

pub fn segment_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut out = Vec::new();
    let mut start = 0;
    let mut depth = 0usize;
    let mut i = 0;
    while i < n {
        let c = chars[i];
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth = depth.saturating_sub(1),
            _ => {}
        }
        if depth == 0 && matches!(c, '.' | '?' | '!') {
            let mut j = i + 1;
            while j < n && TRAILING_CLOSERS.contains(&chars[j]) {
                j += 1;
            }
            if j < n && chars[j].is_whitespace() {
                let mut k = j;
                while k < n && chars[k].is_whitespace() {
                    k += 1;
                }
                if k < n
                    && !chars[k].is_lowercase()
                    && !(c == '.' && j == i + 1 && is_abbreviation(&chars, start, i, k))
                {
                    push_trimmed(&mut out, &chars[start..j]);
                    start = k;
                    i = k;
                    continue;
                }
            }
            i = j;
            continue;
        }
        i += 1;
    }
    push_trimmed(&mut out, &chars[start.min(n)..]);
    out
}

fn push_trimmed(out: &mut Vec<String>, chars: &[char]) {
    let s: String = chars.iter().collect();
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

/// Whether the period at `dot` belongs to an abbreviation rather than ending
/// the sentence that began at `sentence_start`; `next` is the first character
/// of the following word.
fn is_abbreviation(chars: &[char], sentence_start: usize, dot: usize, next: usize) -> bool {
    let mut b = dot;
    while b > sentence_start && !chars[b - 1].is_whitespace() {
        b -= 1;
    }
    let token: String = chars[b..dot]
        .iter()
        .skip_while(|c| matches!(c, '(' | '[' | '"' | '\'' | '“' | '‘'))
        .collect();
    if token.is_empty() {
        return false;
    }
    let lower = token.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // Dotted acronyms such as "U.S" or "a.k.a".
    let parts: Vec<&str> = token.split('.').collect();
    if parts.len() > 1 && parts.iter().all(|p| p.chars().count() == 1 && p.chars().all(char::is_alphabetic)) {
        return true;
    }
    // Initials ("J. Smith") are abbreviations, except at the very start of a
    // sentence where a lone capital is more likely a label ("A. B? C!").
    let mut tc = token.chars();
    if let (Some(only), None) = (tc.next(), tc.next()) {
        if only.is_uppercase() && b > sentence_start {
            return looks_like_name(&chars[next..]);
        }
    }
    false
}

fn looks_like_name(rest: &[char]) -> bool {
    let word: Vec<char> = rest.iter().take_while(|c| !c.is_whitespace()).copied().collect();
    match word.as_slice() {
        [first, '.', ..] => first.is_uppercase(),
        [first, second, ..] => first.is_uppercase() && second.is_lowercase(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unambiguous_terminators() {
        assert_eq!(segment_sentences("A. B? C!"), vec!["A.", "B?", "C!"]);
    }

    #[test]
    fn abbreviation_does_not_split() {
        assert_eq!(segment_sentences("See Fig. 3. It works."), vec!["See Fig. 3.", "It works."]);
    }

    #[test]
    fn whitespace_only_yields_nothing() {
        assert!(segment_sentences("   ").is_empty());
        assert!(segment_sentences("").is_empty());
    }

    #[test]
    fn no_split_inside_parentheses() {
        assert_eq!(
            segment_sentences("This holds (Smith et al. 2019). Next one."),
            vec!["This holds (Smith et al. 2019).", "Next one."]
        );
    }

    #[test]
    fn et_al_and_eg_keep_sentence_together() {
        assert_eq!(
            segment_sentences("Smith et al. Showed this, e.g. Parsing works. Done."),
            vec!["Smith et al. Showed this, e.g. Parsing works.", "Done."]
        );
    }

    #[test]
    fn initials_inside_sentence() {
        assert_eq!(
            segment_sentences("This was shown by J. Smith in 2010. Then more."),
            vec!["This was shown by J. Smith in 2010.", "Then more."]
        );
    }

    #[test]
    fn decimals_and_quotes() {
        assert_eq!(
            segment_sentences("The score was 3.5 points. He said \"yes.\" Then left."),
            vec!["The score was 3.5 points.", "He said \"yes.\"", "Then left."]
        );
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(segment_sentences("We use approx. ten runs."), vec!["We use approx. ten runs."]);
        assert_eq!(segment_sentences("Odd. but kept"), vec!["Odd. but kept"]);
    }
}
