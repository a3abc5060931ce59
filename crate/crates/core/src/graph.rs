//! Sentence-level dependency graphs and the predicates everything else is
//! built on: arc crossings, directions, cycle detection and degree counts.
//!
//! Graphs are deliberately general: a token may have zero, one or several
//! heads, arcs may form cycles, and tokens may be isolated. A head of 0
//! denotes a root arc.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

/// One token of a sentence. Positions are 1-based; position 0 is reserved
/// for the artificial root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub form: String,
    /// Pass-through columns from the source format (lemma, pos, ...).
    pub extra: BTreeMap<String, String>,
}

impl Token {
    pub fn new(index: usize, form: impl Into<String>) -> Self {
        Token {
            index,
            form: form.into(),
            extra: BTreeMap::new(),
        }
    }
}

/// How an arc came to exist. Corpora only ever contain `Regular` arcs; the
/// other kinds are created while preparing the bounded bit encodings and
/// never leave the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArcKind {
    Regular,
    /// Arc from position 0 to a token without a head anywhere in the graph.
    Dummy,
    /// Arc from position i-1 to i, padding a plane where token i has no head.
    Null,
}

/// A labeled dependency from `head` to `dep`. `head == 0` marks a root arc.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub head: usize,
    pub dep: usize,
    pub relation: String,
    pub kind: ArcKind,
}

impl Arc {
    pub fn new(head: usize, dep: usize, relation: impl Into<String>) -> Self {
        Arc {
            head,
            dep,
            relation: relation.into(),
            kind: ArcKind::Regular,
        }
    }

    pub(crate) fn dummy(dep: usize) -> Self {
        Arc {
            head: 0,
            dep,
            relation: crate::encodings::NULL_RELATION.to_string(),
            kind: ArcKind::Dummy,
        }
    }

    pub(crate) fn null(dep: usize) -> Self {
        debug_assert!(dep >= 1);
        Arc {
            head: dep - 1,
            dep,
            relation: crate::encodings::NULL_RELATION.to_string(),
            kind: ArcKind::Null,
        }
    }

    pub fn is_root(&self) -> bool {
        self.head == 0
    }

    pub fn direction(&self) -> ArcDirection {
        if self.head < self.dep {
            ArcDirection::Rightward
        } else {
            ArcDirection::Leftward
        }
    }

    /// Smaller endpoint of the arc's span.
    pub fn lo(&self) -> usize {
        self.head.min(self.dep)
    }

    /// Larger endpoint of the arc's span.
    pub fn hi(&self) -> usize {
        self.head.max(self.dep)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcDirection {
    Rightward,
    Leftward,
}

/// Whether two arcs cross: ordering them so the first has the strictly
/// smaller minimum endpoint, the second must start strictly inside the
/// first's span and end strictly outside it. Arcs sharing their minimum
/// endpoint never cross.
pub fn crosses(a: &Arc, b: &Arc) -> bool {
    let (x, y) = if (a.lo(), a.hi()) <= (b.lo(), b.hi()) {
        (a, b)
    } else {
        (b, a)
    };
    x.lo() < y.lo() && y.lo() < x.hi() && x.hi() < y.hi()
}

/// Crossing restricted to arcs pointing the same way; this is the pair
/// relation that relaxed planarity forbids within a plane.
pub fn same_direction_cross(a: &Arc, b: &Arc) -> bool {
    a.direction() == b.direction() && crosses(a, b)
}

#[derive(Debug, Error)]
pub enum GraphBuildError {
    #[error("token {found} where position {expected} was expected")]
    NonContiguousTokens { expected: usize, found: usize },
    #[error("arc {head}->{dep} leaves the sentence (length {len})")]
    EndpointOutOfRange { head: usize, dep: usize, len: usize },
    #[error("arc {head}->{dep} attaches a token to itself")]
    SelfLoop { head: usize, dep: usize },
    #[error("duplicate arc {head}->{dep}")]
    DuplicateArc { head: usize, dep: usize },
    #[error("arc {head}->{dep} has internal kind {kind:?}")]
    InternalArcKind {
        head: usize,
        dep: usize,
        kind: ArcKind,
    },
}

/// A sentence together with its arcs. Arcs are stored sorted by
/// (head, dep) and hold no duplicates, so derived equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepGraph {
    pub sentence_id: String,
    pub tokens: Vec<Token>,
    arcs: Vec<Arc>,
}

impl DepGraph {
    pub fn new(
        sentence_id: impl Into<String>,
        tokens: Vec<Token>,
        mut arcs: Vec<Arc>,
    ) -> Result<Self, GraphBuildError> {
        let n = tokens.len();
        for (i, tok) in tokens.iter().enumerate() {
            if tok.index != i + 1 {
                return Err(GraphBuildError::NonContiguousTokens {
                    expected: i + 1,
                    found: tok.index,
                });
            }
        }
        for arc in &arcs {
            if arc.kind != ArcKind::Regular {
                return Err(GraphBuildError::InternalArcKind {
                    head: arc.head,
                    dep: arc.dep,
                    kind: arc.kind,
                });
            }
            if arc.dep < 1 || arc.dep > n || arc.head > n {
                return Err(GraphBuildError::EndpointOutOfRange {
                    head: arc.head,
                    dep: arc.dep,
                    len: n,
                });
            }
            if arc.head == arc.dep {
                return Err(GraphBuildError::SelfLoop {
                    head: arc.head,
                    dep: arc.dep,
                });
            }
        }
        arcs.sort();
        if let Some(pair) = arcs
            .windows(2)
            .find(|w| w[0].head == w[1].head && w[0].dep == w[1].dep)
        {
            return Err(GraphBuildError::DuplicateArc {
                head: pair[0].head,
                dep: pair[0].dep,
            });
        }
        Ok(DepGraph {
            sentence_id: sentence_id.into(),
            tokens,
            arcs,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn root_arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(|a| a.is_root())
    }

    pub fn non_root_arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(|a| !a.is_root())
    }

    pub fn in_arcs(&self, dep: usize) -> impl Iterator<Item = &Arc> {
        self.arcs.iter().filter(move |a| a.dep == dep)
    }

    pub fn cycle_count(&self) -> usize {
        cycle_count(self)
    }

    pub fn has_cycle(&self) -> bool {
        has_cycle(self)
    }
}

/// Strongly connected components over the non-root arcs, iterative Tarjan.
/// Nodes are 0-based internally.
fn strongly_connected_components(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0usize;
    let mut components = Vec::new();

    for start in 0..n {
        if index[start] != UNSEEN {
            continue;
        }
        call.push((start, 0));
        while let Some(frame) = call.last_mut() {
            let (v, child) = *frame;
            if child == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if child < adj[v].len() {
                frame.1 += 1;
                let w = adj[v][child];
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("Tarjan stack underflow");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    components.push(component);
                }
            }
        }
    }
    components
}

/// Number of nontrivial strongly connected components (two or more tokens)
/// reachable over non-root arcs. Self-loops cannot be constructed, so
/// single-token components never count.
pub fn cycle_count(graph: &DepGraph) -> usize {
    let n = graph.len();
    let mut adj = vec![Vec::new(); n];
    for arc in graph.non_root_arcs() {
        adj[arc.head - 1].push(arc.dep - 1);
    }
    strongly_connected_components(n, &adj)
        .iter()
        .filter(|c| c.len() >= 2)
        .count()
}

pub fn has_cycle(graph: &DepGraph) -> bool {
    cycle_count(graph) > 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub max_in_degree: usize,
    pub arc_count: usize,
    pub token_count: usize,
    /// Tokens touching no counted arc in either direction.
    pub isolated_count: usize,
}

impl DegreeStats {
    pub fn arcs_per_token(&self) -> f64 {
        if self.token_count == 0 {
            0.0
        } else {
            self.arc_count as f64 / self.token_count as f64
        }
    }
}

/// Degree summary of one graph. With `include_root_arcs` false, head-0 arcs
/// are left out of every count.
pub fn degree_stats(graph: &DepGraph, include_root_arcs: bool) -> DegreeStats {
    let n = graph.len();
    let mut in_degree = vec![0usize; n + 1];
    let mut out_degree = vec![0usize; n + 1];
    let mut arc_count = 0;
    for arc in graph.arcs() {
        if arc.is_root() && !include_root_arcs {
            continue;
        }
        arc_count += 1;
        in_degree[arc.dep] += 1;
        if arc.head > 0 {
            out_degree[arc.head] += 1;
        }
    }
    DegreeStats {
        max_in_degree: in_degree.iter().copied().max().unwrap_or(0),
        arc_count,
        token_count: n,
        isolated_count: (1..=n)
            .filter(|&i| in_degree[i] == 0 && out_degree[i] == 0)
            .count(),
    }
}
