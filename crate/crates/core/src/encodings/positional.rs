//! Positional encodings: each token carries the full tuple of its head
//! positions, absolute (`(2,6)`) or as signed offsets (`(-1,3)`). Head 0 is
//! the root and appears in the tuple like any other head, so these two
//! families need no root channel and are lossless for arbitrary graphs.

use std::collections::BTreeSet;

use super::{DecodeError, DecodedArc, EncodeParts, Repair, RepairKind};
use crate::graph::DepGraph;

pub(super) fn encode(graph: &DepGraph, relative: bool) -> EncodeParts {
    let n = graph.len();
    let mut structural = Vec::with_capacity(n);
    let mut placed = Vec::new();
    for i in 1..=n {
        let mut incoming: Vec<_> = graph.in_arcs(i).collect();
        incoming.sort_by_key(|a| a.head);
        let entries: Vec<String> = incoming
            .iter()
            .map(|a| {
                if relative {
                    (a.head as i64 - i as i64).to_string()
                } else {
                    a.head.to_string()
                }
            })
            .collect();
        structural.push(format!("({})", entries.join(",")));
        placed.extend(incoming.into_iter().map(|a| (a.clone(), 0)));
    }
    EncodeParts {
        structural,
        placed,
        dropped: 0,
        roots_out_of_band: false,
    }
}

pub(super) fn decode(
    structural: &[String],
    relative: bool,
) -> Result<(Vec<DecodedArc>, Vec<Repair>), DecodeError> {
    let n = structural.len();
    let mut decoded = Vec::new();
    let mut repairs = Vec::new();
    for (idx, label) in structural.iter().enumerate() {
        let i = idx + 1;
        let inner = label
            .strip_prefix('(')
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| DecodeError::Grammar {
                token: i,
                label: label.clone(),
                msg: "expected a parenthesized head tuple".to_string(),
            })?;
        if inner.is_empty() {
            continue;
        }
        let mut seen = BTreeSet::new();
        for part in inner.split(',') {
            let value: i64 = part.parse().map_err(|_| DecodeError::Grammar {
                token: i,
                label: label.clone(),
                msg: format!("bad head entry {part:?}"),
            })?;
            let head = if relative { i as i64 + value } else { value };
            if head == i as i64 {
                repairs.push(Repair {
                    token: i,
                    kind: RepairKind::SelfHead,
                });
                continue;
            }
            if !(0..=n as i64).contains(&head) {
                repairs.push(Repair {
                    token: i,
                    kind: RepairKind::HeadOutOfRange { head },
                });
                continue;
            }
            let head = head as usize;
            if !seen.insert(head) {
                repairs.push(Repair {
                    token: i,
                    kind: RepairKind::DuplicateArc { head },
                });
                continue;
            }
            decoded.push(DecodedArc {
                head,
                dep: i,
                plane: 0,
            });
        }
    }
    Ok((decoded, repairs))
}
