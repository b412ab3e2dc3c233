use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a letter in its alphabet.
pub type Letter = usize;

/// Largest supported alphabet; cliques are single `u64` masks.
pub const MAX_LETTERS: usize = 64;

/// A set of pairwise independent letters, stored as a bit mask.
///
/// The empty mask is the empty clique. Whether a mask really is a clique
/// depends on the independence pair it is used with, see
/// [`IndependencePair::is_clique`].
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clique(pub u64);

impl Clique {
    pub const EMPTY: Clique = Clique(0);

    pub fn singleton(letter: Letter) -> Self {
        Clique(1 << letter)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, letter: Letter) -> bool {
        self.0 >> letter & 1 == 1
    }

    pub fn with(self, letter: Letter) -> Self {
        Clique(self.0 | 1 << letter)
    }

    pub fn without(self, letter: Letter) -> Self {
        Clique(self.0 & !(1 << letter))
    }

    pub fn is_subset_of(self, other: Clique) -> bool {
        self.0 & !other.0 == 0
    }

    /// Letters in increasing index order.
    pub fn letters(self) -> impl Iterator<Item = Letter> {
        BitIter(self.0)
    }
}

impl fmt::Debug for Clique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.letters()).finish()
    }
}

/// Iterator over the set bits of a mask, lowest first.
#[derive(Clone)]
pub(crate) struct BitIter(pub(crate) u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// An alphabet together with an irreflexive, symmetric independence
/// relation: the presentation of a trace monoid.
#[derive(Clone, PartialEq, Eq)]
pub struct IndependencePair {
    letters: Vec<String>,
    index: HashMap<String, Letter>,
    /// `independent[a]` has bit `b` set iff `(a, b)` commute.
    independent: Vec<u64>,
}

impl IndependencePair {
    /// Validates raw input. Both orientations of every pair must be listed.
    pub fn new<S: AsRef<str>>(letters: &[S], pairs: &[(S, S)]) -> Result<Self> {
        Self::build(letters, pairs, false)
    }

    /// Like [`IndependencePair::new`] but each pair may be given in one
    /// orientation only.
    pub fn with_symmetric_closure<S: AsRef<str>>(letters: &[S], pairs: &[(S, S)]) -> Result<Self> {
        Self::build(letters, pairs, true)
    }

    fn build<S: AsRef<str>>(letters: &[S], pairs: &[(S, S)], close: bool) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if letters.len() > MAX_LETTERS {
            return Err(Error::AlphabetTooLarge(letters.len()));
        }
        let mut index = HashMap::with_capacity(letters.len());
        let mut names = Vec::with_capacity(letters.len());
        for (i, name) in letters.iter().enumerate() {
            let name = name.as_ref().to_owned();
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateLetter(name));
            }
            names.push(name);
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownLetterInPair(s.to_owned()))
        };
        let mut independent = vec![0u64; letters.len()];
        for (a, b) in pairs {
            let (ia, ib) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            if ia == ib {
                return Err(Error::ReflexivePair(names[ia].clone()));
            }
            independent[ia] |= 1 << ib;
            if close {
                independent[ib] |= 1 << ia;
            }
        }
        for a in 0..names.len() {
            for b in BitIter(independent[a]) {
                if independent[b] >> a & 1 == 0 {
                    return Err(Error::AsymmetricPair(names[a].clone(), names[b].clone()));
                }
            }
        }
        Ok(Self { letters: names, index, independent })
    }

    /// Builds a pair directly from neighbor masks; used when restricting
    /// to a sub-alphabet, where validity is inherited.
    pub(crate) fn from_masks(letters: Vec<String>, independent: Vec<u64>) -> Self {
        let index = letters.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Self { letters, index, independent }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.letters[letter]
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLetter(name.to_owned()))
    }

    pub fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    pub fn independent(&self, a: Letter, b: Letter) -> bool {
        self.independent[a] >> b & 1 == 1
    }

    /// Letters commuting with `a`.
    pub fn independent_mask(&self, a: Letter) -> u64 {
        self.independent[a]
    }

    /// Letters not commuting with `a`, including `a` itself.
    pub fn dependent_mask(&self, a: Letter) -> u64 {
        !self.independent[a] & self.full_mask()
    }

    /// Unordered independent pairs `(a, b)` with `a < b`.
    pub fn independent_pairs(&self) -> Vec<(Letter, Letter)> {
        (0..self.len())
            .flat_map(|a| BitIter(self.independent[a] >> a >> 1).map(move |d| (a, a + 1 + d)))
            .collect()
    }

    pub fn is_clique(&self, c: Clique) -> bool {
        c.0 & !self.full_mask() == 0 && c.letters().all(|a| c.0 & self.dependent_mask(a) == 1 << a)
    }

    /// Cartier-Foata admissibility `c -> next`: every letter of `next`
    /// depends on some letter of `c`. Anything may be followed by the empty
    /// clique, and the empty clique only by itself.
    pub fn cf_admissible(&self, c: Clique, next: Clique) -> bool {
        next.letters().all(|a| self.dependent_mask(a) & c.0 != 0)
    }

    /// Parses a word. Letters are separated by whitespace or `.`; if no
    /// separator occurs, every character is a letter.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        let text = text.trim();
        if text.contains(|c: char| c.is_whitespace() || c == '.') {
            text.split(|c: char| c.is_whitespace() || c == '.')
                .filter(|s| !s.is_empty())
                .map(|s| self.letter(s))
                .collect()
        } else {
            let mut buf = [0u8; 4];
            text.chars().map(|c| self.letter(c.encode_utf8(&mut buf))).collect()
        }
    }

    pub fn word_to_string(&self, word: &[Letter]) -> String {
        let single = self.letters.iter().all(|s| s.chars().count() == 1);
        let names: Vec<&str> = word.iter().map(|&a| self.name(a)).collect();
        if single {
            names.concat()
        } else {
            names.join(".")
        }
    }
}

impl fmt::Debug for IndependencePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<_> = self
            .independent_pairs()
            .into_iter()
            .map(|(a, b)| (self.name(a), self.name(b)))
            .collect();
        f.debug_struct("IndependencePair")
            .field("letters", &self.letters)
            .field("independent", &pairs)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_figure_monoid() {
        let pair = IndependencePair::new(&["a", "b", "c"], &[("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(pair.len(), 3);
        assert!(pair.independent(0, 1));
        assert!(pair.independent(1, 0));
        assert!(!pair.independent(0, 2));
        assert_eq!(pair.independent_pairs(), vec![(0, 1)]);
    }

    #[test]
    fn accepts_single_letter() {
        let pair = IndependencePair::new::<&str>(&["a"], &[]).unwrap();
        assert_eq!(pair.len(), 1);
        assert_eq!(pair.dependent_mask(0), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            IndependencePair::new(&["a", "b"], &[("a", "a")]),
            Err(Error::ReflexivePair(_))
        ));
        assert!(matches!(
            IndependencePair::new(&["a", "b"], &[("a", "b")]),
            Err(Error::AsymmetricPair(..))
        ));
        assert!(matches!(
            IndependencePair::new(&["a", "a"], &[]),
            Err(Error::DuplicateLetter(_))
        ));
        assert!(matches!(
            IndependencePair::new(&["a", "b"], &[("a", "z"), ("z", "a")]),
            Err(Error::UnknownLetterInPair(_))
        ));
        let many: Vec<String> = (0..65).map(|i| format!("x{i}")).collect();
        assert!(matches!(
            IndependencePair::new::<String>(&many, &[]),
            Err(Error::AlphabetTooLarge(65))
        ));
        assert!(matches!(IndependencePair::new::<&str>(&[], &[]), Err(Error::EmptyAlphabet)));
    }

    #[test]
    fn symmetric_closure_fills_in_reverse() {
        let pair = IndependencePair::with_symmetric_closure(&["a", "b"], &[("a", "b")]).unwrap();
        assert!(pair.independent(1, 0));
    }

    #[test]
    fn admissibility_rule() {
        let pair = IndependencePair::new(&["a", "b", "c"], &[("a", "b"), ("b", "a")]).unwrap();
        let (a, b, c) = (Clique(0b001), Clique(0b010), Clique(0b100));
        let ab = Clique(0b011);
        assert!(pair.cf_admissible(c, ab));
        assert!(!pair.cf_admissible(a, b));
        assert!(pair.cf_admissible(a, a));
        assert!(pair.cf_admissible(ab, Clique::EMPTY));
        assert!(pair.cf_admissible(Clique::EMPTY, Clique::EMPTY));
        assert!(!pair.cf_admissible(Clique::EMPTY, a));
        assert!(pair.is_clique(ab));
        assert!(!pair.is_clique(Clique(0b101)));
    }

    #[test]
    fn word_parsing() {
        let pair = IndependencePair::new(&["a", "b", "c"], &[("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(pair.parse_word("acab").unwrap(), vec![0, 2, 0, 1]);
        assert_eq!(pair.parse_word("a c a.b").unwrap(), vec![0, 2, 0, 1]);
        assert!(matches!(pair.parse_word("ax"), Err(Error::UnknownLetter(_))));
        assert_eq!(pair.word_to_string(&[0, 2, 1]), "acb");
    }
}
