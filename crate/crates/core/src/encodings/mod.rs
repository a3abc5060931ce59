//! The five label-sequence codecs: absolute and relative positional,
//! multiplanar brackets, and the bounded 4k- and 6k-bit encodings.
//!
//! `encode` turns a graph into one structural label per token plus two side
//! channels: the relation tuples d_i (relations of the kept arcs entering
//! token i, ordered by head position) and a per-token root relation where a
//! family routes head-0 arcs out of band. `decode` inverts it; on labels
//! that no graph could have produced it repairs what it can, reports every
//! repair, and in strict mode turns any repair into an error.
//!
//! The relation label "NULL" is reserved: it marks the padding arcs of the
//! 4k-bit encoding and is stripped during decoding.

mod bits;
mod bracket;
mod positional;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::formats::{CorpusDocument, LabeledSentence};
use crate::graph::{Arc, DepGraph, Token};

/// Relation carried by dummy and null arcs; never a real dependency label.
pub const NULL_RELATION: &str = "NULL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncodingFamily {
    AbsolutePositional,
    RelativePositional,
    Bracket,
    Bits4,
    Bits6,
}

impl EncodingFamily {
    pub fn bounded(self) -> bool {
        !matches!(
            self,
            EncodingFamily::AbsolutePositional | EncodingFamily::RelativePositional
        )
    }

    fn name(self) -> &'static str {
        match self {
            EncodingFamily::AbsolutePositional => "abs",
            EncodingFamily::RelativePositional => "rel",
            EncodingFamily::Bracket => "b",
            EncodingFamily::Bits4 => "b4",
            EncodingFamily::Bits6 => "b6",
        }
    }
}

/// A parsed encoding, e.g. `abs`, `b:2`, `b4:3`. Bracket defaults to k = 2,
/// the bit families to k = 3; the positional families take no bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncodingSpec {
    pub family: EncodingFamily,
    pub k: usize,
}

impl EncodingSpec {
    pub fn new(family: EncodingFamily, k: usize) -> Self {
        EncodingSpec { family, k }
    }

    /// Width of one structural label in bits, for the bit families.
    pub fn label_bits(&self) -> Option<usize> {
        match self.family {
            EncodingFamily::Bits4 => Some(4 * self.k),
            EncodingFamily::Bits6 => Some(6 * self.k),
            _ => None,
        }
    }
}

impl fmt::Display for EncodingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            EncodingFamily::AbsolutePositional | EncodingFamily::RelativePositional => {
                write!(f, "{}", self.family.name())
            }
            _ => write!(f, "{}:{}", self.family.name(), self.k),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecParseError {
    #[error("unknown encoding family {0:?}; expected abs, rel, b, b4 or b6")]
    UnknownFamily(String),
    #[error("{0} takes no plane bound")]
    UnexpectedBound(String),
    #[error("invalid plane bound {0:?}; expected an integer >= 1")]
    InvalidBound(String),
}

impl FromStr for EncodingSpec {
    type Err = SpecParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, bound) = match s.split_once(':') {
            Some((name, bound)) => (name, Some(bound)),
            None => (s, None),
        };
        let family = match name {
            "abs" => EncodingFamily::AbsolutePositional,
            "rel" => EncodingFamily::RelativePositional,
            "b" => EncodingFamily::Bracket,
            "b4" => EncodingFamily::Bits4,
            "b6" => EncodingFamily::Bits6,
            other => return Err(SpecParseError::UnknownFamily(other.to_string())),
        };
        if !family.bounded() {
            if bound.is_some() {
                return Err(SpecParseError::UnexpectedBound(name.to_string()));
            }
            return Ok(EncodingSpec::new(family, 1));
        }
        let k = match bound {
            None if family == EncodingFamily::Bracket => 2,
            None => 3,
            Some(text) => match text.parse::<usize>() {
                Ok(k) if k >= 1 => k,
                _ => return Err(SpecParseError::InvalidBound(text.to_string())),
            },
        };
        Ok(EncodingSpec::new(family, k))
    }
}

/// Arcs kept by the encoder but unrepresentable within the plane bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CoverageReport {
    pub dropped_arcs: usize,
    pub total_arcs: usize,
}

/// Per-sentence encoder output.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelSeq {
    pub structural: Vec<String>,
    /// d_i: relations of the kept arcs entering token i, head-position order.
    pub relations: Vec<Vec<String>>,
    /// Root relation per token, for families routing head-0 arcs out of band.
    pub roots: Vec<Option<String>>,
    pub coverage: CoverageReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepairKind {
    /// Positional head outside 0..=n.
    HeadOutOfRange { head: i64 },
    /// Positional tuple naming the token itself.
    SelfHead,
    /// The same (head, dep) pair decoded more than once.
    DuplicateArc { head: usize },
    /// A closing symbol or dependent bit found nothing to attach to.
    EmptyStack,
    /// An opener or declared head was never consumed.
    Dangling,
    /// d_i length does not match the token's decoded arc count.
    RelationCountMismatch { arcs: usize, relations: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    pub token: usize,
    pub kind: RepairKind,
}

impl fmt::Display for Repair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RepairKind::HeadOutOfRange { head } => {
                write!(f, "token {}: head {} out of range", self.token, head)
            }
            RepairKind::SelfHead => write!(f, "token {}: names itself as head", self.token),
            RepairKind::DuplicateArc { head } => {
                write!(f, "token {}: duplicate arc from {}", self.token, head)
            }
            RepairKind::EmptyStack => {
                write!(f, "token {}: attachment with an empty stack", self.token)
            }
            RepairKind::Dangling => write!(f, "token {}: unconsumed opener", self.token),
            RepairKind::RelationCountMismatch { arcs, relations } => write!(
                f,
                "token {}: {} decoded arcs but {} relations",
                self.token, arcs, relations
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairReport {
    pub well_formed: bool,
    pub repairs: Vec<Repair>,
}

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("token {token}: label {label:?} does not parse: {msg}")]
    Grammar {
        token: usize,
        label: String,
        msg: String,
    },
    #[error("{channel} channel has {found} entries for {expected} tokens")]
    LengthMismatch {
        channel: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("ill-formed label sequence (repairs: {}; first: {})", repairs.len(), repairs[0])]
    IllFormed { repairs: Vec<Repair> },
}

/// What a family-specific encoder hands back to the shared pipeline.
struct EncodeParts {
    structural: Vec<String>,
    /// Kept arcs (including dummy and null padding) with their plane index.
    placed: Vec<(Arc, usize)>,
    dropped: usize,
    /// Whether head-0 arcs travel in the root channel instead of the labels.
    roots_out_of_band: bool,
}

/// A raw arc recovered from the structural channel, before relations are
/// attached. `plane` disambiguates entries with equal heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct DecodedArc {
    head: usize,
    dep: usize,
    plane: usize,
}

pub fn encode(graph: &DepGraph, spec: &EncodingSpec) -> LabelSeq {
    let parts = match spec.family {
        EncodingFamily::AbsolutePositional => positional::encode(graph, false),
        EncodingFamily::RelativePositional => positional::encode(graph, true),
        EncodingFamily::Bracket => bracket::encode(graph, spec.k),
        EncodingFamily::Bits4 => bits::encode4(graph, spec.k),
        EncodingFamily::Bits6 => bits::encode6(graph, spec.k),
    };
    let n = graph.len();

    let mut incoming: Vec<Vec<(usize, usize, &str)>> = vec![Vec::new(); n + 1];
    for (arc, plane) in &parts.placed {
        incoming[arc.dep].push((arc.head, *plane, arc.relation.as_str()));
    }
    let relations = incoming
        .drain(1..)
        .map(|mut entries| {
            entries.sort_unstable();
            entries
                .into_iter()
                .map(|(_, _, rel)| rel.to_string())
                .collect()
        })
        .collect();

    let roots = (1..=n)
        .map(|i| {
            if parts.roots_out_of_band {
                graph
                    .in_arcs(i)
                    .find(|a| a.is_root())
                    .map(|a| a.relation.clone())
            } else {
                None
            }
        })
        .collect();

    LabelSeq {
        structural: parts.structural,
        relations,
        roots,
        coverage: CoverageReport {
            dropped_arcs: parts.dropped,
            total_arcs: graph.arcs().len(),
        },
    }
}

/// Rebuilds a graph over `tokens` from `labels`. Non-strict decoding is
/// total once the labels parse: anything unattachable is repaired away.
/// Strict decoding fails on the first sequence that needed any repair.
pub fn decode(
    sentence_id: &str,
    tokens: &[Token],
    labels: &LabelSeq,
    spec: &EncodingSpec,
    strict: bool,
) -> Result<DepGraph, DecodeError> {
    let (graph, repairs) = decode_with_repairs(sentence_id, tokens, labels, spec)?;
    if strict && !repairs.is_empty() {
        return Err(DecodeError::IllFormed { repairs });
    }
    Ok(graph)
}

/// Runs the decoder in audit mode: the sequence is well-formed iff decoding
/// needed no repairs. Labels that do not parse at all are errors, not repairs.
pub fn repair_report(
    tokens: &[Token],
    labels: &LabelSeq,
    spec: &EncodingSpec,
) -> Result<RepairReport, DecodeError> {
    let (_, repairs) = decode_with_repairs("", tokens, labels, spec)?;
    Ok(RepairReport {
        well_formed: repairs.is_empty(),
        repairs,
    })
}

fn decode_with_repairs(
    sentence_id: &str,
    tokens: &[Token],
    labels: &LabelSeq,
    spec: &EncodingSpec,
) -> Result<(DepGraph, Vec<Repair>), DecodeError> {
    let n = tokens.len();
    for (channel, found) in [
        ("structural", labels.structural.len()),
        ("relations", labels.relations.len()),
        ("roots", labels.roots.len()),
    ] {
        if found != n {
            return Err(DecodeError::LengthMismatch {
                channel,
                expected: n,
                found,
            });
        }
    }

    let (decoded, mut repairs) = match spec.family {
        EncodingFamily::AbsolutePositional => positional::decode(&labels.structural, false)?,
        EncodingFamily::RelativePositional => positional::decode(&labels.structural, true)?,
        EncodingFamily::Bracket => bracket::decode(&labels.structural, spec.k)?,
        EncodingFamily::Bits4 => bits::decode4(&labels.structural, spec.k)?,
        EncodingFamily::Bits6 => bits::decode6(&labels.structural, spec.k)?,
    };
    let strip_head0 = spec.family == EncodingFamily::Bits4;

    let mut per_dep: Vec<Vec<DecodedArc>> = vec![Vec::new(); n + 1];
    for arc in decoded {
        per_dep[arc.dep].push(arc);
    }

    let mut arcs: Vec<Arc> = Vec::new();
    for (i, incoming) in per_dep.iter_mut().enumerate().skip(1) {
        incoming.sort_unstable_by_key(|a| (a.head, a.plane));
        let rels = &labels.relations[i - 1];
        if incoming.len() != rels.len() {
            repairs.push(Repair {
                token: i,
                kind: RepairKind::RelationCountMismatch {
                    arcs: incoming.len(),
                    relations: rels.len(),
                },
            });
        }
        for (slot, arc) in incoming.iter().enumerate() {
            let relation = rels.get(slot).map(String::as_str).unwrap_or("_");
            if relation == NULL_RELATION {
                continue;
            }
            if strip_head0 && arc.head == 0 {
                continue;
            }
            arcs.push(Arc::new(arc.head, arc.dep, relation));
        }
    }
    for (idx, root) in labels.roots.iter().enumerate() {
        if let Some(relation) = root {
            arcs.push(Arc::new(0, idx + 1, relation.clone()));
        }
    }

    let mut seen = BTreeSet::new();
    let mut unique = Vec::with_capacity(arcs.len());
    for arc in arcs {
        if seen.insert((arc.head, arc.dep)) {
            unique.push(arc);
        } else {
            repairs.push(Repair {
                token: arc.dep,
                kind: RepairKind::DuplicateArc { head: arc.head },
            });
        }
    }

    let graph = DepGraph::new(sentence_id, tokens.to_vec(), unique)
        .expect("decoder output satisfies the graph invariants");
    Ok((graph, repairs))
}

pub fn encode_corpus(doc: &CorpusDocument, spec: &EncodingSpec) -> Vec<LabelSeq> {
    crate::par::map_slice(&doc.sentences, |g| encode(g, spec))
}

#[derive(Debug, Error)]
#[error("sentence {index} ({id:?}): {source}")]
pub struct CorpusDecodeError {
    pub index: usize,
    pub id: String,
    #[source]
    pub source: DecodeError,
}

pub fn decode_corpus(
    sentences: &[LabeledSentence],
    spec: &EncodingSpec,
    strict: bool,
) -> Result<CorpusDocument, Box<CorpusDecodeError>> {
    let results = crate::par::map_slice(sentences, |s| {
        decode(&s.sentence_id, &s.tokens, &s.labels, spec, strict)
    });
    let mut out = Vec::with_capacity(results.len());
    for (index, result) in results.into_iter().enumerate() {
        match result {
            Ok(graph) => out.push(graph),
            Err(source) => {
                return Err(Box::new(CorpusDecodeError {
                    index: index + 1,
                    id: sentences[index].sentence_id.clone(),
                    source,
                }))
            }
        }
    }
    Ok(CorpusDocument { sentences: out })
}
