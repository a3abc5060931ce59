//! Micro-averaged arc metrics and the oracle-coverage harness. An arc is
//! counted as the pair (head, dep), labeled variants as the triple with its
//! relation; root arcs participate as head 0. Exact-match rates compare
//! whole sentences. Macro averages treat an empty-vs-empty sentence as a
//! perfect match.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::encodings::{decode, encode, EncodingSpec};
use crate::formats::CorpusDocument;
use crate::graph::DepGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("corpus size mismatch: {gold} gold sentences, {predicted} predicted")]
    SentenceCountMismatch { gold: usize, predicted: usize },
    #[error("sentence {index} ({id:?}): token count mismatch ({gold} vs {predicted})")]
    TokenCountMismatch {
        index: usize,
        id: String,
        gold: usize,
        predicted: usize,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EvalResult {
    pub sentences: usize,
    pub gold_arcs: usize,
    pub predicted_arcs: usize,
    pub correct_unlabeled: usize,
    pub correct_labeled: usize,
    pub unlabeled_exact: usize,
    pub labeled_exact: usize,
    macro_unlabeled_f1_sum: f64,
    macro_labeled_f1_sum: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn prf(correct: usize, predicted: usize, gold: usize) -> (f64, f64, f64) {
    if predicted == 0 && gold == 0 {
        return (1.0, 1.0, 1.0);
    }
    let p = ratio(correct, predicted);
    let r = ratio(correct, gold);
    let f = if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    };
    (p, r, f)
}

impl EvalResult {
    pub fn unlabeled_precision(&self) -> f64 {
        prf(self.correct_unlabeled, self.predicted_arcs, self.gold_arcs).0
    }
    pub fn unlabeled_recall(&self) -> f64 {
        prf(self.correct_unlabeled, self.predicted_arcs, self.gold_arcs).1
    }
    pub fn unlabeled_f1(&self) -> f64 {
        prf(self.correct_unlabeled, self.predicted_arcs, self.gold_arcs).2
    }
    pub fn labeled_precision(&self) -> f64 {
        prf(self.correct_labeled, self.predicted_arcs, self.gold_arcs).0
    }
    pub fn labeled_recall(&self) -> f64 {
        prf(self.correct_labeled, self.predicted_arcs, self.gold_arcs).1
    }
    pub fn labeled_f1(&self) -> f64 {
        prf(self.correct_labeled, self.predicted_arcs, self.gold_arcs).2
    }
    pub fn unlabeled_match(&self) -> f64 {
        ratio(self.unlabeled_exact, self.sentences)
    }
    pub fn labeled_match(&self) -> f64 {
        ratio(self.labeled_exact, self.sentences)
    }
    pub fn macro_unlabeled_f1(&self) -> f64 {
        if self.sentences == 0 {
            0.0
        } else {
            self.macro_unlabeled_f1_sum / self.sentences as f64
        }
    }
    pub fn macro_labeled_f1(&self) -> f64 {
        if self.sentences == 0 {
            0.0
        } else {
            self.macro_labeled_f1_sum / self.sentences as f64
        }
    }
}

pub fn evaluate(
    gold: &CorpusDocument,
    predicted: &CorpusDocument,
) -> Result<EvalResult, EvalError> {
    if gold.sentences.len() != predicted.sentences.len() {
        return Err(EvalError::SentenceCountMismatch {
            gold: gold.sentences.len(),
            predicted: predicted.sentences.len(),
        });
    }
    let mut result = EvalResult::default();
    for (index, (g, p)) in gold.sentences.iter().zip(&predicted.sentences).enumerate() {
        if g.len() != p.len() {
            return Err(EvalError::TokenCountMismatch {
                index: index + 1,
                id: g.sentence_id.clone(),
                gold: g.len(),
                predicted: p.len(),
            });
        }
        let gold_u: BTreeSet<(usize, usize)> = g.arcs().iter().map(|a| (a.head, a.dep)).collect();
        let pred_u: BTreeSet<(usize, usize)> = p.arcs().iter().map(|a| (a.head, a.dep)).collect();
        let gold_l: BTreeSet<(usize, usize, &str)> = g
            .arcs()
            .iter()
            .map(|a| (a.head, a.dep, a.relation.as_str()))
            .collect();
        let pred_l: BTreeSet<(usize, usize, &str)> = p
            .arcs()
            .iter()
            .map(|a| (a.head, a.dep, a.relation.as_str()))
            .collect();
        let correct_u = gold_u.intersection(&pred_u).count();
        let correct_l = gold_l.intersection(&pred_l).count();

        result.sentences += 1;
        result.gold_arcs += gold_u.len();
        result.predicted_arcs += pred_u.len();
        result.correct_unlabeled += correct_u;
        result.correct_labeled += correct_l;
        result.unlabeled_exact += usize::from(gold_u == pred_u);
        result.labeled_exact += usize::from(gold_l == pred_l);
        result.macro_unlabeled_f1_sum += prf(correct_u, pred_u.len(), gold_u.len()).2;
        result.macro_labeled_f1_sum += prf(correct_l, pred_l.len(), gold_l.len()).2;
    }
    Ok(result)
}

/// Encodes and decodes the corpus, then scores the reconstruction against
/// the original. The labeled F1 of the result is the oracle coverage of the
/// encoding on this corpus.
pub fn oracle_coverage(doc: &CorpusDocument, spec: &EncodingSpec) -> EvalResult {
    let decoded: Vec<DepGraph> = crate::par::map_slice(&doc.sentences, |g| {
        let labels = encode(g, spec);
        decode(&g.sentence_id, &g.tokens, &labels, spec, false)
            .expect("encoder output always decodes")
    });
    evaluate(doc, &CorpusDocument::new(decoded)).expect("shape is preserved")
}
