//! Small named monoids used in tests, examples and documentation.

use crate::monoid::IndependencePair;

fn closed(letters: &[&str], pairs: &[(&str, &str)]) -> IndependencePair {
    IndependencePair::with_symmetric_closure(letters, pairs).expect("catalog entries are valid")
}

/// `{a, b, c}` with `a` and `b` commuting.
pub fn abc() -> IndependencePair {
    closed(&["a", "b", "c"], &[("a", "b")])
}

/// The free monoid on `n` letters `x0, x1, ...`.
pub fn free(n: usize) -> IndependencePair {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    closed(&refs, &[])
}

/// `A* x B*` with `|A| = left` letters `a1..` and `|B| = right` letters `b1..`,
/// every `a` commuting with every `b`.
pub fn commuting_product(left: usize, right: usize) -> IndependencePair {
    let a: Vec<String> = (1..=left).map(|i| format!("a{i}")).collect();
    let b: Vec<String> = (1..=right).map(|i| format!("b{i}")).collect();
    let letters: Vec<&str> = a.iter().chain(&b).map(String::as_str).collect();
    let pairs: Vec<(&str, &str)> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| (x.as_str(), y.as_str())))
        .collect();
    closed(&letters, &pairs)
}

/// Four letters, `a-b` and `c-d` commuting.
pub fn two_dominoes() -> IndependencePair {
    closed(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")])
}

/// Five letters whose independence graph is the 5-cycle.
pub fn pentagon() -> IndependencePair {
    closed(
        &["a", "b", "c", "d", "e"],
        &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")],
    )
}

/// `a, b, c` pairwise commuting and `d` commuting with nothing.
pub fn triangle_and_blocker() -> IndependencePair {
    closed(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("a", "c")])
}

/// Irreducible monoids with varied clique structure.
pub fn irreducible_suite() -> Vec<(&'static str, IndependencePair)> {
    vec![
        ("abc", abc()),
        ("free2", free(2)),
        ("two_dominoes", two_dominoes()),
        ("pentagon", pentagon()),
        ("triangle_and_blocker", triangle_and_blocker()),
    ]
}

/// Monoids with more than one irreducible component.
pub fn reducible_suite() -> Vec<(&'static str, IndependencePair)> {
    vec![
        ("product_3_2", commuting_product(3, 2)),
        ("product_2_2", commuting_product(2, 2)),
        ("abc_x_free1", closed(&["a", "b", "c", "z"], &[("a", "b"), ("a", "z"), ("b", "z"), ("c", "z")])),
    ]
}
