//! graphlin turns bilexical dependency graphs into one label per token and
//! back. Five encodings are provided: absolute and relative positional
//! head tuples (lossless for arbitrary graphs), multiplanar brackets, and
//! two fixed-size bit encodings over k planes or k direction pairs. The
//! bounded families trade a bounded label vocabulary for coverage; the
//! greedy plane assignment keeps what fits and the coverage report says
//! what did not.
//!
//! ```
//! use graphlin::{encodings, formats};
//!
//! let graph = formats::fixture_fig1();
//! let spec: encodings::EncodingSpec = "b4:3".parse().unwrap();
//! let labels = encodings::encode(&graph, &spec);
//! let back = encodings::decode(&graph.sentence_id, &graph.tokens, &labels, &spec, true).unwrap();
//! assert_eq!(back, graph);
//! ```

pub mod encodings;
pub mod formats;
pub mod graph;
pub mod metrics;
pub mod par;
pub mod planes;
pub mod stats;
pub mod synth;

pub use encodings::{decode, encode, EncodingFamily, EncodingSpec, LabelSeq};
pub use formats::CorpusDocument;
pub use graph::{Arc, DepGraph, Token};
