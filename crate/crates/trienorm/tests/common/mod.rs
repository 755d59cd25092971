//! Independent distance oracle for the candidate-generation tests.
//!
//! `dl` is the unrestricted Damerau-Levenshtein distance (edits may overlap
//! a transposition), computed with the full Lowrance-Wagner recurrence.
//! `within_two` enumerates every lowercase string at distance exactly one
//! and exactly two by brute force, pruned only by the multiset bound: a
//! string within distance d carries at most d characters the token lacks.

#![allow(dead_code)]

use std::collections::BTreeSet;

const MAX: usize = 10; // token <= 4 chars, candidates <= 6, DP dims <= 8

/// Unrestricted Damerau-Levenshtein distance over lowercase ASCII.
pub fn dl(a: &str, b: &str) -> usize {
    let a = a.as_bytes();
    let b = b.as_bytes();
    let (n, m) = (a.len(), b.len());
    assert!(n + 2 <= MAX && m + 2 <= MAX);
    let inf = n + m;
    let mut d = [[0usize; MAX]; MAX];
    d[0][0] = inf;
    for i in 0..=n {
        d[i + 1][0] = inf;
        d[i + 1][1] = i;
    }
    for j in 0..=m {
        d[0][j + 1] = inf;
        d[1][j + 1] = j;
    }
    let mut da = [0usize; 26];
    for i in 1..=n {
        let mut db = 0usize;
        for j in 1..=m {
            let k = da[(b[j - 1] - b'a') as usize];
            let l = db;
            let cost = if a[i - 1] == b[j - 1] {
                db = j;
                0
            } else {
                1
            };
            d[i + 1][j + 1] = (d[i][j] + cost)
                .min(d[i + 1][j] + 1)
                .min(d[i][j + 1] + 1)
                .min(d[k][l] + (i - k - 1) + 1 + (j - l - 1));
        }
        da[(a[i - 1] - b'a') as usize] = i;
    }
    d[n + 1][m + 1]
}

/// All nonempty lowercase strings at distance exactly 1 and exactly 2.
pub fn within_two(token: &str) -> (BTreeSet<String>, BTreeSet<String>) {
    let bytes = token.as_bytes();
    let mut counts = [0i32; 26];
    for &c in bytes {
        counts[(c - b'a') as usize] += 1;
    }
    let min_len = 1.max(bytes.len().saturating_sub(2));
    let max_len = bytes.len() + 2;
    let mut d1 = BTreeSet::new();
    let mut d2 = BTreeSet::new();
    let mut buf = Vec::with_capacity(max_len);
    enumerate(
        token,
        &mut counts,
        0,
        min_len,
        max_len,
        &mut buf,
        &mut d1,
        &mut d2,
    );
    (d1, d2)
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    token: &str,
    counts: &mut [i32; 26],
    excess: usize,
    min_len: usize,
    max_len: usize,
    buf: &mut Vec<u8>,
    d1: &mut BTreeSet<String>,
    d2: &mut BTreeSet<String>,
) {
    if buf.len() >= min_len {
        let s = std::str::from_utf8(buf).unwrap();
        match dl(s, token) {
            1 => {
                d1.insert(s.to_string());
            }
            2 => {
                d2.insert(s.to_string());
            }
            _ => {}
        }
    }
    if buf.len() == max_len {
        return;
    }
    for c in 0..26u8 {
        let i = c as usize;
        let foreign = counts[i] <= 0;
        let next_excess = excess + usize::from(foreign);
        // A prefix already carrying 3 characters the token cannot supply
        // can never reach distance <= 2.
        if next_excess > 2 {
            continue;
        }
        counts[i] -= 1;
        buf.push(b'a' + c);
        enumerate(token, counts, next_excess, min_len, max_len, buf, d1, d2);
        buf.pop();
        counts[i] += 1;
    }
}

#[cfg(test)]
mod oracle_sanity {
    use super::*;

    #[test]
    fn known_distances() {
        assert_eq!(dl("bill", "bill"), 0);
        assert_eq!(dl("tran", "train"), 1);
        assert_eq!(dl("ab", "ba"), 1);
        assert_eq!(dl("cin", "seen"), 3);
        // Overlapping edits after a transposition: the unrestricted
        // distance is 2, the restricted variant would say 3.
        assert_eq!(dl("ca", "abc"), 2);
        assert_eq!(dl("a", ""), 1);
    }

    #[test]
    fn single_letter_token_sets() {
        let (d1, d2) = within_two("a");
        // 25 replacements + 26 one-letter prefixes + 26 suffixes minus the
        // double-counted "aa" which is one insertion.
        assert_eq!(d1.len(), 25 + 51);
        assert!(d1.contains("b") && d1.contains("ab") && d1.contains("aa"));
        assert!(d2.contains("abc") && !d2.contains("ab"));
        for s in d1.iter().chain(d2.iter()) {
            assert!(!s.is_empty());
        }
    }
}
