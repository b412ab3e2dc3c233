use super::alphabet::{Clique, IndependencePair, Letter};
use crate::error::{Error, Result};

/// A finite trace in Cartier-Foata normal form.
///
/// `layers` holds the non-empty cliques `c_1 -> c_2 -> ... -> c_n`; the
/// empty trace has no layers.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Trace {
    layers: Vec<Clique>,
    len: usize,
}

impl Trace {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Wraps layers that are already a valid normal form.
    pub(crate) fn from_layers_unchecked(layers: Vec<Clique>) -> Self {
        let len = layers.iter().map(|c| c.len()).sum();
        Self { layers, len }
    }

    /// Checks that `layers` are non-empty cliques forming an admissible chain.
    pub fn from_layers(pair: &IndependencePair, layers: Vec<Clique>) -> Result<Self> {
        for (i, &c) in layers.iter().enumerate() {
            let chained = i == 0 || pair.cf_admissible(layers[i - 1], c);
            if c.is_empty() || !pair.is_clique(c) || !chained {
                return Err(Error::InvalidTrace { layer: i });
            }
        }
        Ok(Self::from_layers_unchecked(layers))
    }

    pub fn layers(&self) -> &[Clique] {
        &self.layers
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of layers.
    pub fn height(&self) -> usize {
        self.layers.len()
    }

    /// The trace made of the first `n` layers.
    pub fn topping(&self, n: usize) -> Trace {
        topping(&self.layers, n)
    }

    /// A representative word: layers in order, letters ascending inside
    /// each layer.
    pub fn word(&self) -> Vec<Letter> {
        self.layers.iter().flat_map(|c| c.letters()).collect()
    }

    /// Multiplicity of every letter.
    pub fn letter_counts(&self, alphabet_len: usize) -> Vec<usize> {
        let mut counts = vec![0; alphabet_len];
        for a in self.layers.iter().flat_map(|c| c.letters()) {
            counts[a] += 1;
        }
        counts
    }
}

/// Trace of the first `min(n, layers.len())` cliques of an admissible chain.
/// Empty cliques (the absorbed tail of a finite trace) are dropped.
pub fn topping(layers: &[Clique], n: usize) -> Trace {
    let kept: Vec<Clique> = layers.iter().take(n).copied().take_while(|c| !c.is_empty()).collect();
    Trace::from_layers_unchecked(kept)
}

impl IndependencePair {
    /// Drops `a` onto the heap: it lands just above the highest layer
    /// holding a letter it depends on.
    fn push_letter(&self, layers: &mut Vec<Clique>, a: Letter) {
        let dep = self.dependent_mask(a);
        let level = layers
            .iter()
            .rposition(|c| c.mask() & dep != 0)
            .map_or(0, |j| j + 1);
        if level == layers.len() {
            layers.push(Clique::singleton(a));
        } else {
            layers[level] = layers[level].with(a);
        }
    }

    /// Cartier-Foata normal form of the class of `word`.
    pub fn normalize(&self, word: &[Letter]) -> Result<Trace> {
        let mut layers = Vec::new();
        for &a in word {
            if a >= self.len() {
                return Err(Error::UnknownLetter(format!("#{a}")));
            }
            self.push_letter(&mut layers, a);
        }
        Ok(Trace { layers, len: word.len() })
    }

    pub fn normalize_str(&self, word: &str) -> Result<Trace> {
        self.normalize(&self.parse_word(word)?)
    }

    pub fn concat(&self, u: &Trace, v: &Trace) -> Trace {
        let mut layers = u.layers.clone();
        for a in v.layers.iter().flat_map(|c| c.letters()) {
            self.push_letter(&mut layers, a);
        }
        Trace { layers, len: u.len + v.len }
    }

    /// Left divisibility: `u <= v` iff `v = u . w` for some trace `w`.
    pub fn divides(&self, u: &Trace, v: &Trace) -> bool {
        if u.len > v.len {
            return false;
        }
        let mut u = u.clone();
        let mut v = v.topping(u.height());
        // First layers are the minimal letters; cancel them one at a time.
        while let Some(&first) = u.layers.first() {
            let a = first.letters().next().expect("layers are non-empty");
            match v.layers.first() {
                Some(c) if c.contains(a) => {}
                _ => return false,
            }
            u = self.cancel_minimal(&u, a);
            v = self.cancel_minimal(&v, a);
        }
        true
    }

    /// `a^{-1} . t` for a letter `a` of the first layer of `t`.
    fn cancel_minimal(&self, t: &Trace, a: Letter) -> Trace {
        let mut word = t.word();
        let pos = word.iter().position(|&b| b == a).expect("letter of the first layer");
        word.remove(pos);
        let mut layers = Vec::new();
        for b in word {
            self.push_letter(&mut layers, b);
        }
        Trace { layers, len: t.len - 1 }
    }
}
