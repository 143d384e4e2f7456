//! Alphabets, words, labeled-graph presentations and the structural operations on them.

mod alphabet;
pub mod determinize;
mod entropy;
pub mod graph;
mod language;
pub mod poly;
mod presentation;
mod structure;

pub use alphabet::{Alphabet, Sym, Word, BLANK};
pub use determinize::{determinize, language_included, SubsetAutomaton};
pub use entropy::{compare_entropy, counting_presentation, entropy, spectral_radius, EntropyOrder, Interval};
pub use language::{
    count_blocks, from_forbidden, higher_block, intersect, language_blocks, markov_approximation, markov_of, random_word,
    membership, ForbiddenWordSet,
};
pub use presentation::{Edge, EdgeDoc, Presentation, PresentationDoc};
pub use structure::{graph_structure, structure, Structure};

#[cfg(test)]
pub(crate) use language::fixtures;
