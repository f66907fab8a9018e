//! Words in `g` noncommuting letters, ordered graded-lexicographically.

use std::cmp::Ordering;
use std::fmt;

/// A word in the letters `x_1, ..., x_g`, stored as 1-based letter indices.
/// The empty word is the multiplicative identity.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(j: u8) -> Self {
        Word(vec![j])
    }

    pub fn from_letters(letters: &[u8]) -> Self {
        Word(letters.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Prepend a single letter: `x_j · self`.
    pub fn prepend(&self, j: u8) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(j);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// All `(u, v)` with `self = u · v`, including the trivial splits.
    pub fn splits(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        (0..=self.0.len()).map(move |k| (Word(self.0[..k].to_vec()), Word(self.0[k..].to_vec())))
    }

    /// The reversed word (transpose of the monomial).
    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    /// True iff every letter lies in `1..=g`.
    pub fn fits(&self, g: usize) -> bool {
        self.0.iter().all(|&j| j >= 1 && (j as usize) <= g)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "x{j}")?;
        }
        Ok(())
    }
}

/// Number of words of length at most `n` in `g` letters: `sigma_#(n)`.
pub fn word_count(g: usize, n: usize) -> usize {
    let mut total = 0usize;
    let mut level = 1usize;
    for _ in 0..=n {
        total += level;
        level *= g;
    }
    total
}

/// All words of length at most `n` in graded-lexicographic order.
pub fn words_up_to(g: usize, n: usize) -> Vec<Word> {
    let mut out = Vec::with_capacity(word_count(g, n));
    out.push(Word::empty());
    let mut frontier = vec![Word::empty()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(frontier.len() * g);
        for w in &frontier {
            for j in 1..=g as u8 {
                let mut v = w.0.clone();
                v.push(j);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// All words of exactly length `n` in lexicographic order.
pub fn words_of_len(g: usize, n: usize) -> Vec<Word> {
    let mut frontier = vec![Word::empty()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(frontier.len() * g);
        for w in &frontier {
            for j in 1..=g as u8 {
                let mut v = w.0.clone();
                v.push(j);
                next.push(Word(v));
            }
        }
        frontier = next;
    }
    frontier
}
