//! Enhanced CoNLL-U. Graphs are taken from the DEPS column only: each
//! `head:rel` pair becomes an arc, with head 0 as a root arc. Relations may
//! themselves contain colons, so a pair splits at the first one. Multiword
//! token ranges are surface sugar and are skipped. Sentences containing
//! empty nodes (decimal ids) fall outside the positional graph model; by
//! default they are skipped with a warning, or rejected under
//! `EmptyNodePolicy::Error`. The remaining columns travel in token extras.

use std::io::{BufRead, Write};

use super::{syntax, CorpusDocument, FormatError};
use crate::graph::{Arc, DepGraph, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyNodePolicy {
    #[default]
    Skip,
    Error,
}

const EXTRA_KEYS: [&str; 7] = ["lemma", "upos", "xpos", "feats", "head", "deprel", "misc"];

pub fn read_conllu<R: BufRead>(
    reader: R,
    policy: EmptyNodePolicy,
) -> Result<CorpusDocument, FormatError> {
    let mut sentences = Vec::new();
    let mut block: Vec<(usize, String)> = Vec::new();
    let mut sent_id: Option<String> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() {
            flush_block(&mut block, &mut sent_id, &mut sentences, policy)?;
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "sent_id" {
                    sent_id = Some(value.trim().to_string());
                }
            }
            continue;
        }
        block.push((lineno, trimmed.to_string()));
    }
    flush_block(&mut block, &mut sent_id, &mut sentences, policy)?;
    Ok(CorpusDocument { sentences })
}

fn flush_block(
    block: &mut Vec<(usize, String)>,
    sent_id: &mut Option<String>,
    sentences: &mut Vec<DepGraph>,
    policy: EmptyNodePolicy,
) -> Result<(), FormatError> {
    if block.is_empty() {
        *sent_id = None;
        return Ok(());
    }
    let rows = std::mem::take(block);
    let id = sent_id
        .take()
        .unwrap_or_else(|| format!("s{}", sentences.len() + 1));
    let first_line = rows[0].0;

    let mut tokens = Vec::new();
    let mut arcs = Vec::new();
    for (lineno, line) in &rows {
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 10 {
            return Err(syntax(
                *lineno,
                format!("expected 10 columns, found {}", cells.len()),
            ));
        }
        if cells[0].contains('-') {
            continue;
        }
        if cells[0].contains('.') {
            match policy {
                EmptyNodePolicy::Skip => {
                    log::warn!(
                        "sentence {id}: skipped (empty node {} at line {lineno})",
                        cells[0]
                    );
                    return Ok(());
                }
                EmptyNodePolicy::Error => {
                    return Err(syntax(
                        *lineno,
                        format!("empty node {} not representable", cells[0]),
                    ));
                }
            }
        }
        let position: usize = cells[0]
            .parse()
            .map_err(|_| syntax(*lineno, format!("bad token id {:?}", cells[0])))?;
        if position != tokens.len() + 1 {
            return Err(syntax(
                *lineno,
                format!(
                    "token id {position} out of sequence (expected {})",
                    tokens.len() + 1
                ),
            ));
        }
        let mut token = Token::new(position, cells[1]);
        for (key, cell) in EXTRA_KEYS.iter().zip([
            cells[2], cells[3], cells[4], cells[5], cells[6], cells[7], cells[9],
        ]) {
            if cell != "_" {
                token.extra.insert((*key).to_string(), cell.to_string());
            }
        }
        tokens.push(token);

        if cells[8] != "_" {
            for pair in cells[8].split('|') {
                let (head, relation) = pair
                    .split_once(':')
                    .ok_or_else(|| syntax(*lineno, format!("bad deps entry {pair:?}")))?;
                let head: usize = head
                    .parse()
                    .map_err(|_| syntax(*lineno, format!("bad deps head {head:?}")))?;
                arcs.push(Arc::new(head, position, relation));
            }
        }
    }

    let graph = DepGraph::new(id, tokens, arcs).map_err(|source| FormatError::Graph {
        line: first_line,
        source,
    })?;
    sentences.push(graph);
    Ok(())
}

pub fn write_conllu<W: Write>(writer: &mut W, doc: &CorpusDocument) -> Result<(), FormatError> {
    for graph in &doc.sentences {
        if !graph.sentence_id.is_empty() {
            writeln!(writer, "# sent_id = {}", graph.sentence_id)?;
        }
        for token in &graph.tokens {
            let i = token.index;
            let mut incoming: Vec<_> = graph.in_arcs(i).collect();
            incoming.sort_by_key(|a| a.head);
            let deps = if incoming.is_empty() {
                "_".to_string()
            } else {
                incoming
                    .iter()
                    .map(|a| format!("{}:{}", a.head, a.relation))
                    .collect::<Vec<_>>()
                    .join("|")
            };
            let extra = |key: &str| {
                token
                    .extra
                    .get(key)
                    .cloned()
                    .unwrap_or_else(|| "_".to_string())
            };
            writeln!(
                writer,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                i,
                token.form,
                extra("lemma"),
                extra("upos"),
                extra("xpos"),
                extra("feats"),
                extra("head"),
                extra("deprel"),
                deps,
                extra("misc"),
            )?;
        }
        writeln!(writer)?;
    }
    Ok(())
}
