//! The label TSV carrying encoder output. A file starts with
//! `# encoding=<spec>`; each sentence is an optional `# sent_id = <id>`
//! line followed by one row per token and a blank line:
//!
//! ```text
//! index  form  structural  relations  root
//! ```
//!
//! Relations are joined with `|`. `_` stands in for an empty structural
//! label, an empty relation list, and an absent root relation, so `_` and
//! `|` cannot appear in relation names.

use std::io::{BufRead, Write};

use super::{syntax, FormatError};
use crate::encodings::{EncodingSpec, LabelSeq};
use crate::graph::Token;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSentence {
    pub sentence_id: String,
    pub tokens: Vec<Token>,
    pub labels: LabelSeq,
}

pub fn write_labels<W: Write>(
    writer: &mut W,
    spec: &EncodingSpec,
    sentences: &[LabeledSentence],
) -> Result<(), FormatError> {
    writeln!(writer, "# encoding={spec}")?;
    for sentence in sentences {
        if !sentence.sentence_id.is_empty() {
            writeln!(writer, "# sent_id = {}", sentence.sentence_id)?;
        }
        let labels = &sentence.labels;
        for (idx, token) in sentence.tokens.iter().enumerate() {
            let structural = if labels.structural[idx].is_empty() {
                "_"
            } else {
                labels.structural[idx].as_str()
            };
            let relations = if labels.relations[idx].is_empty() {
                "_".to_string()
            } else {
                labels.relations[idx].join("|")
            };
            let root = labels.roots[idx].as_deref().unwrap_or("_");
            writeln!(
                writer,
                "{}\t{}\t{}\t{}\t{}",
                token.index, token.form, structural, relations, root
            )?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

pub fn read_labels<R: BufRead>(
    reader: R,
) -> Result<(EncodingSpec, Vec<LabeledSentence>), FormatError> {
    let mut lines = reader.lines().enumerate();
    let spec = loop {
        match lines.next() {
            Some((idx, line)) => {
                let line = line?;
                let trimmed = line.trim();
                if trimmed.is_empty() {
                    continue;
                }
                let value = trimmed
                    .strip_prefix("# encoding=")
                    .ok_or_else(|| syntax(idx + 1, "expected a # encoding=<spec> header"))?;
                break value
                    .trim()
                    .parse::<EncodingSpec>()
                    .map_err(|e| syntax(idx + 1, e.to_string()))?;
            }
            None => return Err(syntax(1, "empty label file")),
        }
    };

    let mut sentences = Vec::new();
    let mut sent_id: Option<String> = None;
    let mut tokens: Vec<Token> = Vec::new();
    let mut labels = LabelSeq::default();

    let flush = |sent_id: &mut Option<String>,
                 tokens: &mut Vec<Token>,
                 labels: &mut LabelSeq,
                 sentences: &mut Vec<LabeledSentence>| {
        if tokens.is_empty() {
            *sent_id = None;
            return;
        }
        let id = sent_id
            .take()
            .unwrap_or_else(|| format!("s{}", sentences.len() + 1));
        sentences.push(LabeledSentence {
            sentence_id: id,
            tokens: std::mem::take(tokens),
            labels: std::mem::take(labels),
        });
    };

    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() {
            flush(&mut sent_id, &mut tokens, &mut labels, &mut sentences);
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
        let cells: Vec<&str> = trimmed.split('\t').collect();
        if cells.len() != 5 {
            return Err(syntax(
                lineno,
                format!("expected 5 columns, found {}", cells.len()),
            ));
        }
        let position: usize = cells[0]
            .parse()
            .map_err(|_| syntax(lineno, format!("bad token index {:?}", cells[0])))?;
        if position != tokens.len() + 1 {
            return Err(syntax(
                lineno,
                format!(
                    "token index {position} out of sequence (expected {})",
                    tokens.len() + 1
                ),
            ));
        }
        tokens.push(Token::new(position, cells[1]));
        labels.structural.push(if cells[2] == "_" {
            String::new()
        } else {
            cells[2].to_string()
        });
        labels.relations.push(if cells[3] == "_" {
            Vec::new()
        } else {
            cells[3].split('|').map(str::to_string).collect()
        });
        labels.roots.push(if cells[4] == "_" {
            None
        } else {
            Some(cells[4].to_string())
        });
    }
    flush(&mut sent_id, &mut tokens, &mut labels, &mut sentences);
    Ok((spec, sentences))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::encode;
    use crate::formats::fixture_fig1;

    #[test]
    fn label_files_round_trip() {
        let g = fixture_fig1();
        for text in ["abs", "rel", "b:2", "b4:2", "b6:2"] {
            let spec: EncodingSpec = text.parse().unwrap();
            let sentence = LabeledSentence {
                sentence_id: g.sentence_id.clone(),
                tokens: g.tokens.clone(),
                labels: encode(&g, &spec),
            };
            let mut out = Vec::new();
            write_labels(&mut out, &spec, &[sentence.clone()]).unwrap();
            let (parsed_spec, sentences) = read_labels(out.as_slice()).unwrap();
            assert_eq!(parsed_spec, spec);
            assert_eq!(sentences.len(), 1);
            assert_eq!(sentences[0].sentence_id, sentence.sentence_id);
            assert_eq!(sentences[0].tokens, sentence.tokens);
            assert_eq!(sentences[0].labels.structural, sentence.labels.structural);
            assert_eq!(sentences[0].labels.relations, sentence.labels.relations);
            assert_eq!(sentences[0].labels.roots, sentence.labels.roots);
        }
    }

    #[test]
    fn empty_bracket_labels_survive() {
        let text = "# encoding=b:2\n# sent_id = x\n1\tw1\t_\t_\t_\n\n";
        let (spec, sentences) = read_labels(text.as_bytes()).unwrap();
        assert_eq!(spec.to_string(), "b:2");
        assert_eq!(sentences[0].labels.structural, [""]);
        assert_eq!(sentences[0].labels.relations, [Vec::<String>::new()]);
        assert_eq!(sentences[0].labels.roots, [None]);
    }

    #[test]
    fn missing_header_is_an_error() {
        let text = "1\tw1\t()\t_\t_\n\n";
        assert!(matches!(
            read_labels(text.as_bytes()),
            Err(FormatError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn ragged_rows_are_errors() {
        let text = "# encoding=abs\n1\tw1\t()\t_\n\n";
        assert!(matches!(
            read_labels(text.as_bytes()),
            Err(FormatError::Syntax { line: 2, .. })
        ));
    }
}
