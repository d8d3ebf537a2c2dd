//! Porter stemmer, implemented per the published 1980 algorithm (the
//! original rule set, without the later maintenance departures).
//!
//! Within each step the longest matching suffix is selected; if its
//! condition fails, the step ends without trying shorter suffixes.
//! Words of length one or two, and tokens containing anything other than
//! ASCII letters (digit runs, accession fragments), are returned
//! unchanged.

/// Stem a lowercase token.
pub fn stem(token: &str) -> String {
    if token.len() <= 2 || !token.bytes().all(|b| b.is_ascii_lowercase()) {
        return token.to_string();
    }
    let mut w = token.as_bytes().to_vec();
    step_1a(&mut w);
    step_1b(&mut w);
    step_1c(&mut w);
    step_2(&mut w);
    step_3(&mut w);
    step_4(&mut w);
    step_5a(&mut w);
    step_5b(&mut w);
    String::from_utf8(w).expect("ascii")
}

/// A letter is a consonant unless it is a/e/i/o/u, or a y preceded by a
/// consonant.
fn is_cons(w: &[u8], i: usize) -> bool {
    match w[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => false,
        b'y' => i == 0 || !is_cons(w, i - 1),
        _ => true,
    }
}

/// The measure m of a word form [C](VC)^m[V].
fn measure(w: &[u8]) -> usize {
    let n = w.len();
    let mut m = 0;
    let mut i = 0;
    while i < n && is_cons(w, i) {
        i += 1;
    }
    loop {
        while i < n && !is_cons(w, i) {
            i += 1;
        }
        if i == n {
            return m;
        }
        while i < n && is_cons(w, i) {
            i += 1;
        }
        m += 1;
        if i == n {
            return m;
        }
    }
}

fn has_vowel(w: &[u8]) -> bool {
    (0..w.len()).any(|i| !is_cons(w, i))
}

fn ends_double_cons(w: &[u8]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == w[n - 2] && is_cons(w, n - 1)
}

/// *o: stem ends consonant-vowel-consonant where the final consonant is
/// not w, x or y.
fn ends_cvc(w: &[u8]) -> bool {
    let n = w.len();
    n >= 3
        && is_cons(w, n - 3)
        && !is_cons(w, n - 2)
        && is_cons(w, n - 1)
        && !matches!(w[n - 1], b'w' | b'x' | b'y')
}

// The stem left after removing a suffix may be empty (measure 0), so a
// whole-word match counts as an ending.
fn ends_with(w: &[u8], suffix: &[u8]) -> bool {
    w.len() >= suffix.len() && w.ends_with(suffix)
}

fn truncate_by(w: &mut Vec<u8>, n: usize) {
    let len = w.len();
    w.truncate(len - n);
}

#[allow(clippy::if_same_then_else)] // SSES -> SS and IES -> I are distinct rules
fn step_1a(w: &mut Vec<u8>) {
    if ends_with(w, b"sses") {
        truncate_by(w, 2);
    } else if ends_with(w, b"ies") {
        truncate_by(w, 2);
    } else if ends_with(w, b"ss") {
        // keep
    } else if w.last() == Some(&b's') {
        truncate_by(w, 1);
    }
}

fn step_1b(w: &mut Vec<u8>) {
    if ends_with(w, b"eed") {
        if measure(&w[..w.len() - 3]) > 0 {
            truncate_by(w, 1);
        }
        return;
    }
    let removed = if ends_with(w, b"ed") && has_vowel(&w[..w.len() - 2]) {
        truncate_by(w, 2);
        true
    } else if ends_with(w, b"ing") && has_vowel(&w[..w.len() - 3]) {
        truncate_by(w, 3);
        true
    } else {
        false
    };
    if removed {
        if w.ends_with(b"at") || w.ends_with(b"bl") || w.ends_with(b"iz") {
            w.push(b'e');
        } else if ends_double_cons(w) && !matches!(w[w.len() - 1], b'l' | b's' | b'z') {
            truncate_by(w, 1);
        } else if measure(w) == 1 && ends_cvc(w) {
            w.push(b'e');
        }
    }
}

fn step_1c(w: &mut [u8]) {
    let n = w.len();
    if w[n - 1] == b'y' && has_vowel(&w[..n - 1]) {
        w[n - 1] = b'i';
    }
}

const STEP2_RULES: &[(&[u8], &[u8])] = &[
    (b"ational", b"ate"),
    (b"tional", b"tion"),
    (b"enci", b"ence"),
    (b"anci", b"ance"),
    (b"izer", b"ize"),
    (b"abli", b"able"),
    (b"alli", b"al"),
    (b"entli", b"ent"),
    (b"eli", b"e"),
    (b"ousli", b"ous"),
    (b"ization", b"ize"),
    (b"ation", b"ate"),
    (b"ator", b"ate"),
    (b"alism", b"al"),
    (b"iveness", b"ive"),
    (b"fulness", b"ful"),
    (b"ousness", b"ous"),
    (b"aliti", b"al"),
    (b"iviti", b"ive"),
    (b"biliti", b"ble"),
];

const STEP3_RULES: &[(&[u8], &[u8])] = &[
    (b"icate", b"ic"),
    (b"ative", b""),
    (b"alize", b"al"),
    (b"iciti", b"ic"),
    (b"ical", b"ic"),
    (b"ful", b""),
    (b"ness", b""),
];

/// Longest matching suffix wins; if its (m > 0) condition fails the step
/// ends without trying shorter suffixes.
fn apply_rule_table(w: &mut Vec<u8>, rules: &[(&[u8], &[u8])]) {
    let longest = rules
        .iter()
        .filter(|(suffix, _)| ends_with(w, suffix))
        .max_by_key(|(suffix, _)| suffix.len());
    if let Some((suffix, replacement)) = longest {
        let stem_len = w.len() - suffix.len();
        if measure(&w[..stem_len]) > 0 {
            w.truncate(stem_len);
            w.extend_from_slice(replacement);
        }
    }
}

fn step_2(w: &mut Vec<u8>) {
    apply_rule_table(w, STEP2_RULES);
}

fn step_3(w: &mut Vec<u8>) {
    apply_rule_table(w, STEP3_RULES);
}

const STEP4_SUFFIXES: &[&[u8]] = &[
    b"al", b"ance", b"ence", b"er", b"ic", b"able", b"ible", b"ant", b"ement", b"ment", b"ent",
    b"ion", b"ou", b"ism", b"ate", b"iti", b"ous", b"ive", b"ize",
];

fn step_4(w: &mut Vec<u8>) {
    let longest = STEP4_SUFFIXES
        .iter()
        .filter(|suffix| ends_with(w, suffix))
        .max_by_key(|suffix| suffix.len());
    if let Some(suffix) = longest {
        let stem_len = w.len() - suffix.len();
        let stem = &w[..stem_len];
        let ok = measure(stem) > 1
            && (*suffix != b"ion" || matches!(stem.last(), Some(b's') | Some(b't')));
        if ok {
            w.truncate(stem_len);
        }
    }
}

fn step_5a(w: &mut Vec<u8>) {
    if w.last() == Some(&b'e') {
        let stem = &w[..w.len() - 1];
        let m = measure(stem);
        if m > 1 || (m == 1 && !ends_cvc(stem)) {
            truncate_by(w, 1);
        }
    }
}

fn step_5b(w: &mut Vec<u8>) {
    if measure(w) > 1 && ends_double_cons(w) && w.last() == Some(&b'l') {
        truncate_by(w, 1);
    }
}
