//! Seeded random graphs and projective trees for tests, benches and the
//! `gen` subcommand. Everything runs off ChaCha8, so a seed pins the corpus
//! across platforms and thread counts.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formats::CorpusDocument;
use crate::graph::{Arc, DepGraph, Token};

#[derive(Debug, Clone)]
pub struct GraphGenConfig {
    pub sentences: usize,
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Target regular arcs per token.
    pub density: f64,
    /// Probability that a sampled arc points rightward.
    pub right_bias: f64,
    pub allow_cycles: bool,
    /// Per-token probability of an arc from the root.
    pub root_prob: f64,
    /// Number of distinct relation names (`r0` .. `r{v-1}`).
    pub relation_vocab: usize,
    pub seed: u64,
}

impl Default for GraphGenConfig {
    fn default() -> Self {
        GraphGenConfig {
            sentences: 100,
            min_tokens: 1,
            max_tokens: 20,
            density: 1.0,
            right_bias: 0.55,
            allow_cycles: true,
            root_prob: 0.15,
            relation_vocab: 8,
            seed: 42,
        }
    }
}

fn relation(rng: &mut ChaCha8Rng, vocab: usize) -> String {
    format!("r{}", rng.gen_range(0..vocab.max(1)))
}

/// True if `to` is reachable from `from` along the chosen arcs.
fn reachable(pairs: &[(usize, usize)], from: usize, to: usize) -> bool {
    let mut stack = vec![from];
    let mut seen = vec![from];
    while let Some(node) = stack.pop() {
        if node == to {
            return true;
        }
        for &(head, dep) in pairs {
            if head == node && !seen.contains(&dep) {
                seen.push(dep);
                stack.push(dep);
            }
        }
    }
    false
}

pub fn random_graph(rng: &mut ChaCha8Rng, cfg: &GraphGenConfig, id: &str) -> DepGraph {
    assert!(
        1 <= cfg.min_tokens && cfg.min_tokens <= cfg.max_tokens,
        "token bounds must satisfy 1 <= min <= max"
    );
    let n = rng.gen_range(cfg.min_tokens..=cfg.max_tokens);
    let tokens = (1..=n).map(|i| Token::new(i, format!("w{i}"))).collect();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut arcs = Vec::new();
    if n >= 2 {
        let target = ((cfg.density * n as f64).round() as usize).min(n * (n - 1));
        let mut attempts = 0;
        let budget = 30 * target + 100;
        while pairs.len() < target && attempts < budget {
            attempts += 1;
            let a = rng.gen_range(1..=n);
            let b = rng.gen_range(1..=n);
            if a == b {
                continue;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            let (head, dep) = if rng.gen_bool(cfg.right_bias) {
                (lo, hi)
            } else {
                (hi, lo)
            };
            if pairs.contains(&(head, dep)) {
                continue;
            }
            if !cfg.allow_cycles && reachable(&pairs, dep, head) {
                continue;
            }
            pairs.push((head, dep));
            arcs.push(Arc::new(head, dep, relation(rng, cfg.relation_vocab)));
        }
    }
    for i in 1..=n {
        if cfg.root_prob > 0.0 && rng.gen_bool(cfg.root_prob) {
            arcs.push(Arc::new(0, i, "root"));
        }
    }
    DepGraph::new(id, tokens, arcs).expect("generator respects the graph invariants")
}

/// A uniform-ish projective tree over `n` tokens with one explicit root arc.
pub fn random_projective_tree(rng: &mut ChaCha8Rng, n: usize, vocab: usize) -> DepGraph {
    assert!(n >= 1);
    let tokens = (1..=n).map(|i| Token::new(i, format!("w{i}"))).collect();
    let mut arcs = Vec::new();
    segment(rng, 1, n, 0, vocab, &mut arcs);
    DepGraph::new("tree", tokens, arcs).expect("tree construction is valid")
}

/// Heads the interval [lo, hi] with one node attached to `parent`, then
/// carves what remains into child intervals of that node.
fn segment(
    rng: &mut ChaCha8Rng,
    lo: usize,
    hi: usize,
    parent: usize,
    vocab: usize,
    arcs: &mut Vec<Arc>,
) {
    if lo > hi {
        return;
    }
    let head = rng.gen_range(lo..=hi);
    if parent == 0 {
        arcs.push(Arc::new(0, head, "root"));
    } else {
        arcs.push(Arc::new(parent, head, relation(rng, vocab)));
    }
    carve(rng, lo, head.wrapping_sub(1), head, vocab, arcs);
    carve(rng, head + 1, hi, head, vocab, arcs);
}

fn carve(
    rng: &mut ChaCha8Rng,
    lo: usize,
    hi: usize,
    parent: usize,
    vocab: usize,
    arcs: &mut Vec<Arc>,
) {
    let mut start = lo;
    while start >= 1 && start <= hi {
        let end = rng.gen_range(start..=hi);
        segment(rng, start, end, parent, vocab, arcs);
        start = end + 1;
    }
}

pub fn generate_corpus(cfg: &GraphGenConfig) -> CorpusDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sentences = (1..=cfg.sentences)
        .map(|i| random_graph(&mut rng, cfg, &format!("synth-{i}")))
        .collect();
    CorpusDocument::new(sentences)
}

pub fn generate_trees(cfg: &GraphGenConfig) -> CorpusDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sentences = (1..=cfg.sentences)
        .map(|i| {
            let n = rng.gen_range(cfg.min_tokens..=cfg.max_tokens);
            let mut tree = random_projective_tree(&mut rng, n, cfg.relation_vocab);
            tree.sentence_id = format!("synth-{i}");
            tree
        })
        .collect();
    CorpusDocument::new(sentences)
}
