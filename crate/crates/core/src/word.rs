//! Words in the infinite generating set `x_0, x_1, x_2, ...` of F and the
//! normal form `x_{i_1}..x_{i_u} x_{j_v}^-1..x_{j_1}^-1`.
//!
//! Normal forms are computed by a merge scheme over index lists: a word is
//! split in halves, each half is normalized, and the two seminormal halves
//! are multiplied by index-shifting merges derived from the relations
//! `x_n x_k = x_k x_{n+1}` (k < n). The final pass enforces the extra
//! cancellation condition (if `x_i` and `x_i^-1` both occur then `x_{i+1}`
//! or `x_{i+1}^-1` occurs). Cost is O(n log n) merge steps.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One letter `x_index^sign`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Letter {
    pub index: u32,
    pub sign: i8,
}

impl Letter {
    pub fn pos(index: u32) -> Self {
        Letter { index, sign: 1 }
    }
    pub fn neg(index: u32) -> Self {
        Letter { index, sign: -1 }
    }
    pub fn inverse(self) -> Self {
        Letter { index: self.index, sign: -self.sign }
    }
}

/// A word in the generators; `normal` marks words known to be in normal form.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
    #[serde(default)]
    normal: bool,
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "ε");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if l.sign > 0 {
                write!(f, "x{}", l.index)?;
            } else {
                write!(f, "x{}^-1", l.index)?;
            }
        }
        Ok(())
    }
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new(), normal: true }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters, normal: false }
    }

    /// `x_k` as a one-letter word.
    pub fn gen(k: u32) -> Self {
        Word { letters: vec![Letter::pos(k)], normal: true }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_normal_flag(&self) -> bool {
        self.normal
    }

    /// Parse whitespace-separated tokens `x<k>` and `x<k>^-1`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let rest = tok
                .strip_prefix('x')
                .ok_or_else(|| Error::BadWord(format!("token `{tok}` must start with x")))?;
            let (idx, sign) = match rest.strip_suffix("^-1") {
                Some(i) => (i, -1),
                None => (rest, 1),
            };
            let index: u32 = idx
                .parse()
                .map_err(|_| Error::BadWord(format!("bad generator index in `{tok}`")))?;
            letters.push(Letter { index, sign });
        }
        Ok(Word { letters, normal: false })
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            normal: false,
        }
    }

    /// Concatenation `self * other` (apply `other` first under the
    /// composition convention; as written, `self` letters precede).
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters, normal: false }
    }

    /// The unique normal form of the element represented by this word.
    pub fn normal_form(&self) -> Word {
        if self.normal {
            return self.clone();
        }
        let semi = semi_normalize(&self.letters);
        let (pos, neg) = epsilon_pass(semi);
        Word::from_parts(&pos, &neg)
    }

    /// Build a (normal-flagged) word from sorted index parts: positives
    /// `i_1 <= ... <= i_u` and negatives `j_1 <= ... <= j_v`, written as
    /// `x_{i_1}..x_{i_u} x_{j_v}^-1..x_{j_1}^-1`.
    pub fn from_parts(pos: &[u32], neg: &[u32]) -> Word {
        let mut letters = Vec::with_capacity(pos.len() + neg.len());
        letters.extend(pos.iter().map(|&i| Letter::pos(i)));
        letters.extend(neg.iter().rev().map(|&i| Letter::neg(i)));
        Word { letters, normal: true }
    }

    /// Split a normal-form word into its sorted index parts `(pos, neg)`.
    /// Errors if the word is not in seminormal shape.
    pub fn to_parts(&self) -> Result<(Vec<u32>, Vec<u32>)> {
        let mut pos = Vec::new();
        let mut neg_rev = Vec::new();
        let mut seen_neg = false;
        for l in &self.letters {
            if l.sign > 0 {
                if seen_neg {
                    return Err(Error::BadWord("positive letter after negative part".into()));
                }
                pos.push(l.index);
            } else {
                seen_neg = true;
                neg_rev.push(l.index);
            }
        }
        let neg: Vec<u32> = neg_rev.into_iter().rev().collect();
        if pos.windows(2).any(|w| w[0] > w[1]) || neg.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::BadWord("parts not sorted".into()));
        }
        Ok((pos, neg))
    }

    /// Group product with normalization.
    pub fn mul_normal(&self, other: &Word) -> Word {
        self.concat(other).normal_form()
    }

    /// Normal-form length (the metric used for protocol parameters).
    pub fn nf_len(&self) -> usize {
        self.normal_form().len()
    }

    /// Largest generator index occurring.
    pub fn max_index(&self) -> Option<u32> {
        self.letters.iter().map(|l| l.index).max()
    }
}

/// Seminormal form: ascending positive indices and ascending negative
/// indices (`neg[0]` is the innermost written letter `x_{neg[0]}^-1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiNormal {
    pub pos: Vec<u32>,
    pub neg: Vec<u32>,
}

impl SemiNormal {
    fn empty() -> Self {
        SemiNormal { pos: Vec::new(), neg: Vec::new() }
    }

    fn letter(l: Letter) -> Self {
        if l.sign > 0 {
            SemiNormal { pos: vec![l.index], neg: Vec::new() }
        } else {
            SemiNormal { pos: Vec::new(), neg: vec![l.index] }
        }
    }
}

/// Merge of two ascending positive index lists `A . B` (word order) into a
/// single ascending list, using `x_n x_k -> x_k x_{n+1}` (k < n).
///
/// Two-pointer scheme: a B letter is placed before the remaining A letters
/// while the current A value (raw plus the number of B letters already
/// placed) exceeds it; each placed B letter shifts all remaining A letters
/// up by one.
fn pos_merge(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut i = 0;
    let mut j = 0;
    while i < a.len() && j < b.len() {
        let cur = a[i] as u64 + j as u64;
        if cur > b[j] as u64 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(u32::try_from(cur).expect("index overflow"));
            i += 1;
        }
    }
    while i < a.len() {
        out.push(u32::try_from(a[i] as u64 + j as u64).expect("index overflow"));
        i += 1;
    }
    out.extend_from_slice(&b[j..]);
    debug_assert!(out.windows(2).all(|w| w[0] <= w[1]));
    out
}

/// Push the ascending positive list `pos` through the ascending negative
/// list `neg` (word order `neg^-1 . pos`), producing `(pos_out, neg_out)`.
///
/// Rules for the adjacent pair `x_j^-1 x_p`:
///   p < j  ->  x_p x_{j+1}^-1   (letter shifts, p passes)
///   p = j  ->  cancels
///   p > j  ->  x_{p+1} x_j^-1   (p shifts and passes)
fn cross_merge(neg: &[u32], pos: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut frozen: Vec<u32> = Vec::new();
    let mut rest: VecDeque<u32> = neg.iter().copied().collect();
    let mut bump: u64 = 0; // pending shift on every letter in `rest`
    let mut out_pos: Vec<u32> = Vec::new();
    'outer: for &p in pos {
        let mut v = p as u64 + frozen.len() as u64;
        while let Some(&front) = rest.front() {
            let val = front as u64 + bump;
            if val < v {
                frozen.push(u32::try_from(val).expect("index overflow"));
                rest.pop_front();
                v += 1;
            } else if val == v {
                rest.pop_front();
                continue 'outer; // cancelled
            } else {
                bump += 1;
                out_pos.push(u32::try_from(v).expect("index overflow"));
                continue 'outer;
            }
        }
        out_pos.push(u32::try_from(v).expect("index overflow"));
    }
    let mut out_neg = frozen;
    out_neg.extend(rest.into_iter().map(|x| u32::try_from(x as u64 + bump).expect("overflow")));
    debug_assert!(out_pos.windows(2).all(|w| w[0] <= w[1]));
    debug_assert!(out_neg.windows(2).all(|w| w[0] <= w[1]));
    (out_pos, out_neg)
}

/// Product of seminormal forms, staying seminormal.
pub(crate) fn semi_mul(a: &SemiNormal, b: &SemiNormal) -> SemiNormal {
    let (mid_pos, mid_neg) = cross_merge(&a.neg, &b.pos);
    let pos = pos_merge(&a.pos, &mid_pos);
    // negative part: written word is mid_neg reversed then b.neg reversed;
    // inverting turns it into pos_merge(b.neg, mid_neg).
    let neg = pos_merge(&b.neg, &mid_neg);
    SemiNormal { pos, neg }
}

/// Divide-and-conquer seminormalization of a letter sequence.
fn semi_normalize(letters: &[Letter]) -> SemiNormal {
    match letters.len() {
        0 => SemiNormal::empty(),
        1 => SemiNormal::letter(letters[0]),
        n => {
            let (l, r) = letters.split_at(n / 2);
            semi_mul(&semi_normalize(l), &semi_normalize(r))
        }
    }
}

/// Enforce the normal-form condition: whenever `x_i` and `x_i^-1` both
/// occur but neither `x_{i+1}` nor `x_{i+1}^-1` occurs, cancel the
/// innermost such pair, shifting the enclosed indices down by one.
fn epsilon_pass(mut s: SemiNormal) -> (Vec<u32>, Vec<u32>) {
    loop {
        let Some(i) = find_violation(&s) else {
            return (s.pos, s.neg);
        };
        // last occurrence of i on each side
        let pi = s.pos.iter().rposition(|&x| x == i).expect("violation");
        let ni = s.neg.iter().rposition(|&x| x == i).expect("violation");
        s.pos.remove(pi);
        s.neg.remove(ni);
        // letters between the cancelled pair: pos tail from pi, neg tail
        // from ni (all have index >= i+2); shift them down
        for x in &mut s.pos[pi..] {
            debug_assert!(*x >= i + 2);
            *x -= 1;
        }
        for x in &mut s.neg[ni..] {
            debug_assert!(*x >= i + 2);
            *x -= 1;
        }
    }
}

fn find_violation(s: &SemiNormal) -> Option<u32> {
    // walk the two sorted lists for common values i with no i+1 anywhere
    let mut i = 0usize;
    let mut j = 0usize;
    while i < s.pos.len() && j < s.neg.len() {
        match s.pos[i].cmp(&s.neg[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let v = s.pos[i];
                if !contains(&s.pos, v + 1) && !contains(&s.neg, v + 1) {
                    return Some(v);
                }
                // skip all copies of v on both sides
                while i < s.pos.len() && s.pos[i] == v {
                    i += 1;
                }
                while j < s.neg.len() && s.neg[j] == v {
                    j += 1;
                }
            }
        }
    }
    None
}

fn contains(sorted: &[u32], v: u32) -> bool {
    sorted.binary_search(&v).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nf(s: &str) -> String {
        Word::parse(s).unwrap().normal_form().to_string()
    }

    #[test]
    fn parse_and_display() {
        let w = Word::parse("x0 x12^-1 x3").unwrap();
        assert_eq!(w.to_string(), "x0 x12^-1 x3");
        assert!(Word::parse("y0").is_err());
        assert!(Word::parse("x-1").is_err());
    }

    #[test]
    fn basic_normal_forms() {
        assert_eq!(nf("x0 x0^-1"), "ε");
        assert_eq!(nf("x0^-1 x1 x0"), "x2");
        assert_eq!(nf("x1 x0"), "x0 x2");
        assert_eq!(nf("x0 x2 x0^-1"), "x1");
        assert_eq!(nf("x5^-1 x0^-1 x3"), "x4 x6^-1 x0^-1");
    }

    #[test]
    fn normal_form_is_projection() {
        let w = Word::parse("x3 x1^-1 x0 x0 x2^-1 x1").unwrap();
        let n1 = w.normal_form();
        let n2 = n1.normal_form();
        assert_eq!(n1, n2);
    }

    #[test]
    fn xk_via_x0_conjugation() {
        // x_k = x_0^{1-k} x_1 x_0^{k-1}
        for k in 2..7u32 {
            let mut letters = Vec::new();
            for _ in 0..(k - 1) {
                letters.push(Letter::neg(0));
            }
            letters.push(Letter::pos(1));
            for _ in 0..(k - 1) {
                letters.push(Letter::pos(0));
            }
            let w = Word::from_letters(letters);
            assert_eq!(w.normal_form(), Word::gen(k));
        }
    }

    #[test]
    fn inverse_normalizes_to_empty() {
        let w = Word::parse("x2 x0 x3^-1 x1").unwrap();
        let p = w.concat(&w.inverse());
        assert_eq!(p.normal_form(), Word::empty());
    }
}
