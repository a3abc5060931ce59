//! Corpus-level structure counts: degrees, cycles, reentrancies and the
//! histogram of planes the relaxed greedy assignment needs per sentence.
//! Counts are exact; the f64 views divide them out.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::encodings::{encode, EncodingSpec};
use crate::formats::CorpusDocument;
use crate::planes::{greedy_assign, IncompatibilityRule};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorpusStats {
    pub sentences: usize,
    pub tokens: usize,
    /// All arcs, root arcs included.
    pub arcs: usize,
    pub root_arcs: usize,
    /// Tokens with at least two incoming arcs.
    pub reentrant_tokens: usize,
    pub isolated_tokens: usize,
    pub max_in_degree: usize,
    /// Nontrivial strongly connected components, summed over sentences.
    pub cycle_count: usize,
    /// Sentences containing at least one cycle.
    pub cycle_sentences: usize,
    /// Sentences whose non-root arcs need more than one relaxed plane.
    pub crossing_sentences: usize,
    /// Relaxed planes needed per sentence -> number of sentences. Sentences
    /// without regular arcs land in bucket 0.
    pub plane_histogram: BTreeMap<usize, usize>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl CorpusStats {
    /// Heads per token, root arcs included.
    pub fn avg_in_degree(&self) -> f64 {
        ratio(self.arcs, self.tokens)
    }
    /// Regular dependents per token; lower than `avg_in_degree` whenever
    /// the corpus marks roots explicitly.
    pub fn avg_out_degree(&self) -> f64 {
        ratio(self.arcs - self.root_arcs, self.tokens)
    }
    pub fn reentrancy_rate(&self) -> f64 {
        ratio(self.reentrant_tokens, self.tokens)
    }
    pub fn cycle_rate(&self) -> f64 {
        ratio(self.cycle_sentences, self.sentences)
    }
    pub fn crossing_rate(&self) -> f64 {
        ratio(self.crossing_sentences, self.sentences)
    }
    pub fn max_planes(&self) -> usize {
        self.plane_histogram.keys().copied().max().unwrap_or(0)
    }
}

pub fn corpus_stats(doc: &CorpusDocument) -> CorpusStats {
    let mut stats = CorpusStats {
        sentences: doc.sentences.len(),
        ..CorpusStats::default()
    };
    for graph in &doc.sentences {
        let n = graph.len();
        stats.tokens += n;
        stats.arcs += graph.arcs().len();
        stats.root_arcs += graph.root_arcs().count();

        let mut in_degree = vec![0usize; n + 1];
        let mut attached = vec![false; n + 1];
        for arc in graph.arcs() {
            in_degree[arc.dep] += 1;
            attached[arc.dep] = true;
            if !arc.is_root() {
                attached[arc.head] = true;
            }
        }
        for i in 1..=n {
            if in_degree[i] >= 2 {
                stats.reentrant_tokens += 1;
            }
            if !attached[i] {
                stats.isolated_tokens += 1;
            }
            stats.max_in_degree = stats.max_in_degree.max(in_degree[i]);
        }

        let cycles = graph.cycle_count();
        stats.cycle_count += cycles;
        if cycles > 0 {
            stats.cycle_sentences += 1;
        }

        let regular: Vec<_> = graph.non_root_arcs().cloned().collect();
        let planes =
            greedy_assign(&regular, IncompatibilityRule::SameDirectionCross, None).plane_count();
        *stats.plane_histogram.entry(planes).or_insert(0) += 1;
        if planes > 1 {
            stats.crossing_sentences += 1;
        }
    }
    stats
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VocabStats {
    pub spec: String,
    /// Distinct structural labels realized on this corpus.
    pub distinct_labels: usize,
    /// Theoretical label-space bound, where one exists and fits in u128.
    pub bound: Option<u128>,
    pub max_label_len: usize,
}

/// Distinct structural labels per encoding, against the spaces 2^(4k) and
/// 2^(6k) for the bit families. Unbounded families report no bound.
pub fn vocab_stats(doc: &CorpusDocument, specs: &[EncodingSpec]) -> Vec<VocabStats> {
    specs
        .iter()
        .map(|spec| {
            let mut labels: BTreeSet<String> = BTreeSet::new();
            let mut max_len = 0;
            for labeled in crate::par::map_slice(&doc.sentences, |g| encode(g, spec)) {
                for label in labeled.structural {
                    max_len = max_len.max(label.chars().count());
                    labels.insert(label);
                }
            }
            let bound = spec
                .label_bits()
                .and_then(|bits| 2u128.checked_pow(bits as u32));
            VocabStats {
                spec: spec.to_string(),
                distinct_labels: labels.len(),
                bound,
                max_label_len: max_len,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::fixture_fig1;
    use crate::synth::{generate_trees, GraphGenConfig};

    #[test]
    fn fixture_statistics() {
        let doc = CorpusDocument::new(vec![fixture_fig1()]);
        let stats = corpus_stats(&doc);
        assert_eq!(stats.sentences, 1);
        assert_eq!(stats.tokens, 6);
        assert_eq!(stats.arcs, 8);
        assert_eq!(stats.root_arcs, 0);
        assert_eq!(stats.reentrant_tokens, 2);
        assert_eq!(stats.isolated_tokens, 0);
        assert_eq!(stats.max_in_degree, 3);
        assert_eq!(stats.cycle_count, 1);
        assert_eq!(stats.cycle_sentences, 1);
        assert_eq!(stats.plane_histogram, BTreeMap::from([(2, 1)]));
        assert_eq!(stats.crossing_sentences, 1);
        assert!((stats.avg_in_degree() - 8.0 / 6.0).abs() < 1e-12);
        assert_eq!(stats.avg_in_degree(), stats.avg_out_degree());
    }

    #[test]
    fn trees_show_the_in_out_degree_gap() {
        let cfg = GraphGenConfig {
            sentences: 20,
            min_tokens: 5,
            max_tokens: 12,
            ..GraphGenConfig::default()
        };
        let doc = generate_trees(&cfg);
        let stats = corpus_stats(&doc);
        assert_eq!(stats.arcs, stats.tokens);
        assert_eq!(stats.root_arcs, doc.sentences.len());
        assert!((stats.avg_in_degree() - 1.0).abs() < 1e-12);
        assert!(stats.avg_out_degree() < 1.0);
        assert_eq!(stats.cycle_count, 0);
        assert_eq!(stats.reentrant_tokens, 0);
        assert_eq!(stats.plane_histogram, BTreeMap::from([(1, 20)]));
    }

    #[test]
    fn empty_sentences_land_in_bucket_zero() {
        let tokens = vec![crate::graph::Token::new(1, "w1")];
        let g = crate::graph::DepGraph::new("s", tokens, vec![]).unwrap();
        let stats = corpus_stats(&CorpusDocument::new(vec![g]));
        assert_eq!(stats.plane_histogram, BTreeMap::from([(0, 1)]));
        assert_eq!(stats.isolated_tokens, 1);
        assert_eq!(stats.crossing_sentences, 0);
    }

    #[test]
    fn vocab_growth_tracks_the_bound() {
        let doc = CorpusDocument::new(vec![fixture_fig1()]);
        let specs: Vec<EncodingSpec> = ["abs", "b4:1", "b6:2"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let report = vocab_stats(&doc, &specs);
        assert_eq!(report[0].bound, None);
        assert_eq!(report[1].bound, Some(16));
        assert_eq!(report[2].bound, Some(4096));
        assert!(report[1].distinct_labels <= 16);
        assert_eq!(report[1].max_label_len, 4);
        assert_eq!(report[2].max_label_len, 12);
    }
}
