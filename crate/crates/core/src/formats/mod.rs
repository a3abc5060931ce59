//! Corpus I/O: bilexical graphs in SDP or enhanced CoNLL-U form, and the
//! label TSV that carries encoder output.

mod conllu;
mod labels;
mod sdp;

pub use conllu::{read_conllu, write_conllu, EmptyNodePolicy};
pub use labels::{read_labels, write_labels, LabeledSentence};
pub use sdp::{read_sdp, write_sdp};

use thiserror::Error;

use crate::graph::{Arc, DepGraph, GraphBuildError, Token};

#[derive(Debug, Default, Clone, PartialEq)]
pub struct CorpusDocument {
    pub sentences: Vec<DepGraph>,
}

impl CorpusDocument {
    pub fn new(sentences: Vec<DepGraph>) -> Self {
        CorpusDocument { sentences }
    }
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphBuildError,
    },
}

pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// The six-token worked example used throughout the tests: one cycle
/// (3 -> 5 -> 6 -> 3), a reentrancy at token 5, and two crossing arcs.
pub fn fixture_fig1() -> DepGraph {
    let tokens = (1..=6).map(|i| Token::new(i, format!("w{i}"))).collect();
    let arcs = vec![
        Arc::new(2, 1, "r21"),
        Arc::new(2, 3, "r23"),
        Arc::new(3, 5, "r35"),
        Arc::new(4, 5, "r45"),
        Arc::new(5, 6, "r56"),
        Arc::new(6, 3, "r63"),
        Arc::new(1, 4, "r14"),
        Arc::new(1, 5, "r15"),
    ];
    DepGraph::new("fig1", tokens, arcs).expect("fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shape() {
        let g = fixture_fig1();
        assert_eq!(g.len(), 6);
        assert_eq!(g.arcs().len(), 8);
        assert!(g.root_arcs().next().is_none());
        assert!(g.has_cycle());
        let in_degrees: Vec<usize> = (1..=6).map(|i| g.in_arcs(i).count()).collect();
        assert_eq!(in_degrees, [1, 0, 2, 1, 3, 1]);
    }
}
