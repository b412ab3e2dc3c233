use super::alphabet::{BitIter, Clique, IndependencePair, Letter};
use super::trace::Trace;

/// Irreducible components: the connected components of the dependence
/// graph, each with the restricted independence relation.
#[derive(Debug, Clone)]
pub struct ComponentDecomposition {
    components: Vec<IndependencePair>,
    /// Global letters of each component, in increasing order.
    members: Vec<Vec<Letter>>,
    /// `(component, local index)` of every global letter.
    letter_map: Vec<(usize, Letter)>,
}

impl ComponentDecomposition {
    pub fn new(pair: &IndependencePair) -> Self {
        let n = pair.len();
        let mut component_of = vec![usize::MAX; n];
        let mut members: Vec<Vec<Letter>> = Vec::new();
        for start in 0..n {
            if component_of[start] != usize::MAX {
                continue;
            }
            let id = members.len();
            let mut seen = 1u64 << start;
            let mut frontier = seen;
            while frontier != 0 {
                let mut next = 0;
                for a in BitIter(frontier) {
                    next |= pair.dependent_mask(a);
                }
                frontier = next & !seen;
                seen |= next;
            }
            let letters: Vec<Letter> = BitIter(seen).collect();
            for &a in &letters {
                component_of[a] = id;
            }
            members.push(letters);
        }

        let mut letter_map = vec![(0, 0); n];
        let components = members
            .iter()
            .enumerate()
            .map(|(id, letters)| {
                for (local, &a) in letters.iter().enumerate() {
                    letter_map[a] = (id, local);
                }
                let names = letters.iter().map(|&a| pair.name(a).to_owned()).collect();
                let masks = letters
                    .iter()
                    .map(|&a| {
                        letters
                            .iter()
                            .enumerate()
                            .filter(|&(_, &b)| pair.independent(a, b))
                            .fold(0u64, |m, (j, _)| m | 1 << j)
                    })
                    .collect();
                IndependencePair::from_masks(names, masks)
            })
            .collect();
        Self { components, members, letter_map }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }

    pub fn components(&self) -> &[IndependencePair] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &IndependencePair {
        &self.components[i]
    }

    /// Global letters of component `i`.
    pub fn members(&self, i: usize) -> &[Letter] {
        &self.members[i]
    }

    pub fn locate(&self, letter: Letter) -> (usize, Letter) {
        self.letter_map[letter]
    }

    /// The part of a global clique lying in component `i`, in local letters.
    pub fn restrict_clique(&self, i: usize, c: Clique) -> Clique {
        self.members[i]
            .iter()
            .enumerate()
            .filter(|&(_, &a)| c.contains(a))
            .fold(Clique::EMPTY, |acc, (local, _)| acc.with(local))
    }

    /// A local clique of component `i` in global letters.
    pub fn embed_clique(&self, i: usize, c: Clique) -> Clique {
        c.letters()
            .fold(Clique::EMPTY, |acc, local| acc.with(self.members[i][local]))
    }

    /// Erases the letters outside component `i`; the result lives over
    /// the component's own alphabet.
    pub fn project(&self, u: &Trace, i: usize) -> Trace {
        // Component letters are independent of all others, so the global
        // layers restrict to the component's normal form directly.
        let layers: Vec<Clique> = u
            .layers()
            .iter()
            .map(|&c| self.restrict_clique(i, c))
            .filter(|c| !c.is_empty())
            .collect();
        Trace::from_layers_unchecked(layers)
    }

    /// A trace of component `i` seen as a global trace.
    pub fn embed(&self, i: usize, u: &Trace) -> Trace {
        Trace::from_layers_unchecked(u.layers().iter().map(|&c| self.embed_clique(i, c)).collect())
    }

    /// Global layer sequence whose `j`-th layer is the union of the
    /// components' `j`-th layers. Component sequences may have different
    /// lengths; missing layers count as empty.
    pub fn merge_layers(&self, parts: &[Vec<Clique>]) -> Vec<Clique> {
        let height = parts.iter().map(Vec::len).max().unwrap_or(0);
        (0..height)
            .map(|j| {
                parts.iter().enumerate().fold(Clique::EMPTY, |acc, (i, layers)| {
                    let local = layers.get(j).copied().unwrap_or_default();
                    Clique(acc.mask() | self.embed_clique(i, local).mask())
                })
            })
            .take_while(|c| !c.is_empty())
            .collect()
    }
}
