//! Text formats: the JSON monoid description and trace serialization.
//!
//! A monoid file looks like
//!
//! ```json
//! { "letters": ["a", "b", "c"], "independence": [["a", "b"], ["b", "a"]] }
//! ```
//!
//! Both orientations of each pair are required unless the object sets
//! `"symmetric_closure": true`. A trace is serialized as its list of
//! layers, each layer the list of its letters in alphabet order, e.g.
//! `[["a"],["c"],["a","b"]]`.

use serde::{Deserialize, Serialize};

use super::alphabet::{Clique, IndependencePair};
use super::trace::Trace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoidSpec {
    pub letters: Vec<String>,
    #[serde(default)]
    pub independence: Vec<[String; 2]>,
    #[serde(default)]
    pub symmetric_closure: bool,
}

impl MonoidSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_pair(&self) -> Result<IndependencePair> {
        let pairs: Vec<(&str, &str)> = self
            .independence
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let letters: Vec<&str> = self.letters.iter().map(String::as_str).collect();
        if self.symmetric_closure {
            IndependencePair::with_symmetric_closure(&letters, &pairs)
        } else {
            IndependencePair::new(&letters, &pairs)
        }
    }

    pub fn from_pair(pair: &IndependencePair) -> Self {
        let independence = pair
            .independent_pairs()
            .into_iter()
            .flat_map(|(a, b)| {
                let (x, y) = (pair.name(a).to_owned(), pair.name(b).to_owned());
                [[x.clone(), y.clone()], [y, x]]
            })
            .collect();
        Self { letters: pair.letters().to_vec(), independence, symmetric_closure: false }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Reads and validates a monoid description.
pub fn parse_monoid(text: &str) -> Result<IndependencePair> {
    MonoidSpec::parse(text)?.to_pair()
}

pub fn layers_to_json(pair: &IndependencePair, layers: &[Clique]) -> String {
    let names: Vec<Vec<&str>> = layers
        .iter()
        .map(|c| c.letters().map(|a| pair.name(a)).collect())
        .collect();
    serde_json::to_string(&names).expect("plain data serializes")
}

pub fn trace_to_json(pair: &IndependencePair, trace: &Trace) -> String {
    layers_to_json(pair, trace.layers())
}

/// Parses a serialized trace and checks that it is a normal form.
pub fn trace_from_json(pair: &IndependencePair, text: &str) -> Result<Trace> {
    let raw: Vec<Vec<String>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut layers = Vec::with_capacity(raw.len());
    for (i, layer) in raw.iter().enumerate() {
        let mut c = Clique::EMPTY;
        let mut last = None;
        for name in layer {
            let a = pair.letter(name)?;
            if last.is_some_and(|l| l >= a) {
                return Err(Error::InvalidTrace { layer: i });
            }
            last = Some(a);
            c = c.with(a);
        }
        layers.push(c);
    }
    Trace::from_layers(pair, layers)
}
