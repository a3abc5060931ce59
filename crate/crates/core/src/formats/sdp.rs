//! SDP tabular format (the 2014 and 2015 layouts). Columns are
//! id, form, lemma, pos, top, pred, [frame,] then one argument column per
//! token flagged as a predicate. The frame column is present exactly when
//! the column count works out to 7 + #preds.
//!
//! A `+` in the top column becomes a root arc with relation "TOP"; the flag
//! itself carries no label, so writing maps any root arc back to `+`. The
//! pred flags are derived from out-degree on write. Lemma, pos and frame
//! ride along in the token extras.

use std::io::{BufRead, Write};

use super::{syntax, CorpusDocument, FormatError};
use crate::graph::{Arc, DepGraph, Token};

pub const TOP_RELATION: &str = "TOP";

pub fn read_sdp<R: BufRead>(reader: R) -> Result<CorpusDocument, FormatError> {
    let mut sentences = Vec::new();
    let mut block: Vec<(usize, String)> = Vec::new();
    let mut pending_id: Option<String> = None;
    let mut block_id: Option<String> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() {
            flush_block(&mut block, &mut block_id, &mut sentences)?;
            block_id = pending_id.take();
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if comment.starts_with("SDP") {
                continue;
            }
            if block.is_empty() {
                block_id = Some(comment.trim().to_string());
            } else {
                pending_id = Some(comment.trim().to_string());
            }
            continue;
        }
        block.push((lineno, trimmed.to_string()));
    }
    flush_block(&mut block, &mut block_id, &mut sentences)?;
    Ok(CorpusDocument { sentences })
}

fn flush_block(
    block: &mut Vec<(usize, String)>,
    block_id: &mut Option<String>,
    sentences: &mut Vec<DepGraph>,
) -> Result<(), FormatError> {
    if block.is_empty() {
        return Ok(());
    }
    let rows: Vec<(usize, Vec<&str>)> = block
        .iter()
        .map(|(lineno, line)| (*lineno, line.split('\t').collect()))
        .collect();
    let first_line = rows[0].0;

    let pred_count = rows
        .iter()
        .filter(|(_, cells)| cells.get(5) == Some(&"+"))
        .count();
    let ncols = rows[0].1.len();
    let has_frame = if ncols == 7 + pred_count {
        true
    } else if ncols == 6 + pred_count {
        false
    } else {
        return Err(syntax(
            first_line,
            format!(
                "{ncols} columns do not fit {pred_count} predicates (expected {} or {})",
                6 + pred_count,
                7 + pred_count
            ),
        ));
    };
    let args_start = if has_frame { 7 } else { 6 };

    let mut tokens = Vec::with_capacity(rows.len());
    let mut predicates = Vec::new();
    for (position, (lineno, cells)) in rows.iter().enumerate() {
        if cells.len() != ncols {
            return Err(syntax(
                *lineno,
                format!("expected {ncols} columns, found {}", cells.len()),
            ));
        }
        let id: usize = cells[0]
            .parse()
            .map_err(|_| syntax(*lineno, format!("bad token id {:?}", cells[0])))?;
        if id != position + 1 {
            return Err(syntax(
                *lineno,
                format!("token id {id} out of sequence (expected {})", position + 1),
            ));
        }
        let mut token = Token::new(id, cells[1]);
        for (key, cell) in [("lemma", cells[2]), ("pos", cells[3])] {
            if cell != "_" {
                token.extra.insert(key.to_string(), cell.to_string());
            }
        }
        if has_frame && cells[6] != "_" {
            token
                .extra
                .insert("frame".to_string(), cells[6].to_string());
        }
        tokens.push(token);
        if cells[5] == "+" {
            predicates.push(id);
        }
    }

    let mut arcs = Vec::new();
    for (position, (_, cells)) in rows.iter().enumerate() {
        let dep = position + 1;
        if cells[4] == "+" {
            arcs.push(Arc::new(0, dep, TOP_RELATION));
        }
        for (slot, cell) in cells[args_start..].iter().enumerate() {
            if *cell != "_" {
                arcs.push(Arc::new(predicates[slot], dep, *cell));
            }
        }
    }

    let id = block_id.take().unwrap_or_default();
    let id = if id.is_empty() {
        format!("s{}", sentences.len() + 1)
    } else {
        id
    };
    let graph = DepGraph::new(id, tokens, arcs).map_err(|source| FormatError::Graph {
        line: first_line,
        source,
    })?;
    sentences.push(graph);
    block.clear();
    Ok(())
}

pub fn write_sdp<W: Write>(writer: &mut W, doc: &CorpusDocument) -> Result<(), FormatError> {
    for graph in &doc.sentences {
        if !graph.sentence_id.is_empty() {
            writeln!(writer, "#{}", graph.sentence_id)?;
        }
        let n = graph.len();
        let mut is_pred = vec![false; n + 1];
        for arc in graph.non_root_arcs() {
            is_pred[arc.head] = true;
        }
        let predicates: Vec<usize> = (1..=n).filter(|&i| is_pred[i]).collect();
        let has_frame = graph.tokens.iter().any(|t| t.extra.contains_key("frame"));

        for token in &graph.tokens {
            let i = token.index;
            let top = if graph.in_arcs(i).any(|a| a.is_root()) {
                "+"
            } else {
                "-"
            };
            let pred = if is_pred[i] { "+" } else { "-" };
            let mut cells = vec![
                i.to_string(),
                token.form.clone(),
                token
                    .extra
                    .get("lemma")
                    .cloned()
                    .unwrap_or_else(|| "_".to_string()),
                token
                    .extra
                    .get("pos")
                    .cloned()
                    .unwrap_or_else(|| "_".to_string()),
                top.to_string(),
                pred.to_string(),
            ];
            if has_frame {
                cells.push(
                    token
                        .extra
                        .get("frame")
                        .cloned()
                        .unwrap_or_else(|| "_".to_string()),
                );
            }
            for &p in &predicates {
                let cell = graph
                    .in_arcs(i)
                    .find(|a| a.head == p)
                    .map(|a| a.relation.clone())
                    .unwrap_or_else(|| "_".to_string());
                cells.push(cell);
            }
            writeln!(writer, "{}", cells.join("\t"))?;
        }
        writeln!(writer)?;
    }
    Ok(())
}
