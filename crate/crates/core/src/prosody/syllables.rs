const ARPABET_VOWELS: [&str; 19] = [
    "AA", "AE", "AH", "AO", "AW", "AX", "AXR", "AY", "EH", "ER", "EY", "IH", "IX", "IY", "OW", "OY", "UH", "UW", "UX",
];

const IPA_VOWELS: &str = "aeiouyæɑɒɐɔəɘɚɛɜɝɞɤɨɪʉʊʌʏøœɶɯɵ";

/// A phone label is syllabic if it is an ARPABET vowel (stress digits
/// ignored) or starts with an IPA vowel symbol.
pub fn is_vowel_phone(label: &str) -> bool {
    let base = label.trim().trim_end_matches(|c: char| c.is_ascii_digit());
    if base.is_empty() {
        return false;
    }
    if base.chars().all(|c| c.is_ascii_uppercase()) {
        return ARPABET_VOWELS.contains(&base);
    }
    base.chars().next().is_some_and(|c| IPA_VOWELS.contains(c.to_ascii_lowercase()))
}

/// Orthographic estimate: vowel groups (counting `y`), minus a silent final
/// `e`.
pub fn orthographic_syllables(word: &str) -> u32 {
    let w: Vec<char> = word.chars().filter(|c| c.is_alphabetic()).flat_map(char::to_lowercase).collect();
    let is_v = |c: char| "aeiouy".contains(c);
    let mut groups = 0u32;
    let mut prev = false;
    for &c in &w {
        let v = is_v(c);
        if v && !prev {
            groups += 1;
        }
        prev = v;
    }
    let n = w.len();
    if groups > 1 && n >= 2 && w[n - 1] == 'e' && !is_v(w[n - 2]) && !(n >= 3 && w[n - 2] == 'l' && !is_v(w[n - 3])) {
        groups -= 1;
    }
    groups
}

/// Syllable count of a word, from its aligned phones when there are any,
/// otherwise from spelling. Never below 1.
pub fn count_syllables(word: &str, phones: Option<&[String]>) -> u32 {
    let n = match phones {
        Some(p) if !p.is_empty() => p.iter().filter(|l| is_vowel_phone(l)).count() as u32,
        _ => orthographic_syllables(word),
    };
    n.max(1)
}
