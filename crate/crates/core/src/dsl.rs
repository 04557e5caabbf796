//! The `.proof` text format. See `docs/dsl.md` for the grammar.
//!
//! A document is a sequence of sections introduced by an unindented header
//! line (`THEOREM <id>`, `DEFINITIONS`, `EXTERNAL`, `GADGETS`, `STRUCTURE`,
//! `PROOF`). Inside a section nesting is by indentation. Lines whose first
//! non-blank character is `#` are comments.

use std::collections::BTreeSet;
use std::path::PathBuf;

use thiserror::Error;

use crate::expr::{parse_answer, parse_equation, Formula};
use crate::logic::parse_statement;
use crate::proof::{
    Conclusion, Definition, ExternalKind, ExternalResult, Gadget, GadgetKind, Hypothesis,
    InductionParts, Justification, Proof, ProofStatement, Role, Span, StructureKind, StructureNode,
    Theorem, TheoremKind, Warrant,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
        expected: Vec<String>,
    },
    #[error("unresolved references: {}", .unresolved.join(", "))]
    Reference { unresolved: Vec<String> },
    #[error("statement {0} has no warrant or backing to omit")]
    NoWarrantPresent(usize),
    #[error("no statement {0}")]
    UnknownStatement(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofDocument {
    pub source_path: Option<PathBuf>,
    pub proof: Proof,
    pub raw_text: String,
}

impl ProofDocument {
    pub fn parse(source_path: Option<PathBuf>, raw_text: String) -> Result<Self, DslError> {
        let proof = parse_proof(&raw_text)?;
        Ok(ProofDocument {
            source_path,
            proof,
            raw_text,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderStyle {
    Plain,
    /// Adds comment headers for the structure tree above the statements.
    Structured,
}

// ---------------------------------------------------------------------------
// line blocks

#[derive(Debug, Clone)]
struct Line {
    no: usize,
    indent: usize,
    text: String,
}

#[derive(Debug, Clone)]
struct Block {
    line: Line,
    children: Vec<Block>,
}

fn err<T>(
    line: usize,
    column: usize,
    message: impl Into<String>,
    expected: &[&str],
) -> Result<T, DslError> {
    Err(DslError::Parse {
        line,
        column,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    })
}

impl Line {
    fn fail<T>(
        &self,
        offset: usize,
        message: impl Into<String>,
        expected: &[&str],
    ) -> Result<T, DslError> {
        err(self.no, self.indent + offset + 1, message, expected)
    }
}

fn build_blocks(lines: &[Line]) -> Result<Vec<Block>, DslError> {
    let mut pos = 0;
    let base = lines.iter().map(|l| l.indent).min().unwrap_or(0);
    let blocks = build_level(lines, &mut pos, base)?;
    debug_assert_eq!(pos, lines.len());
    Ok(blocks)
}

fn build_level(lines: &[Line], pos: &mut usize, indent: usize) -> Result<Vec<Block>, DslError> {
    let mut out: Vec<Block> = Vec::new();
    while *pos < lines.len() {
        let line = &lines[*pos];
        if line.indent < indent {
            break;
        }
        if line.indent > indent {
            return err(line.no, line.indent + 1, "unexpected indentation", &[]);
        }
        *pos += 1;
        let children = match lines.get(*pos) {
            Some(next) if next.indent > indent => {
                let child_indent = next.indent;
                build_level(lines, pos, child_indent)?
            }
            _ => Vec::new(),
        };
        if let Some(next) = lines.get(*pos) {
            if next.indent > indent && !children.is_empty() {
                return err(next.no, next.indent + 1, "inconsistent indentation", &[]);
            }
        }
        out.push(Block {
            line: line.clone(),
            children,
        });
    }
    Ok(out)
}

const SECTIONS: [&str; 6] = [
    "THEOREM",
    "DEFINITIONS",
    "EXTERNAL",
    "GADGETS",
    "STRUCTURE",
    "PROOF",
];

fn section_header(text: &str) -> Option<(&'static str, &str)> {
    let (head, rest) = match text.split_once(char::is_whitespace) {
        Some((h, r)) => (h, r.trim()),
        None => (text, ""),
    };
    SECTIONS.iter().find(|s| **s == head).map(|s| (*s, rest))
}

fn is_key_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-'
}

/// `key: value` with a lowercase key.
fn key_value(text: &str) -> Option<(&str, &str)> {
    let (k, v) = text.split_once(':')?;
    if k.is_empty() || !k.chars().all(is_key_char) {
        return None;
    }
    Some((k, v.trim()))
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || c == '-' || c == '_' || c == '.')
}

fn unescape(quoted: &str) -> Option<String> {
    let inner = quoted.strip_prefix('"')?.strip_suffix('"')?;
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => out.push(chars.next()?),
            '"' => return None,
            other => out.push(other),
        }
    }
    Some(out)
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Default)]
struct Refs {
    unresolved: Vec<String>,
}

pub fn parse_proof(text: &str) -> Result<Proof, DslError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let trimmed = raw.trim_start_matches([' ', '\t']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let lead = &raw[..raw.len() - trimmed.len()];
        if lead.contains('\t') {
            return err(no, 1, "tabs are not allowed for indentation", &[]);
        }
        lines.push(Line {
            no,
            indent: lead.chars().count(),
            text: trimmed.trim_end().to_string(),
        });
    }

    let Some(first) = lines.first() else {
        return err(1, 1, "empty document", &["THEOREM"]);
    };
    if first.indent != 0 || section_header(&first.text).is_none() {
        return first.fail(0, "expected a section header", &SECTIONS);
    }

    // Split into sections at unindented header lines.
    let mut sections: Vec<(&'static str, Line, Vec<Line>)> = Vec::new();
    for line in lines {
        match section_header(&line.text).filter(|_| line.indent == 0) {
            Some((name, _)) => {
                if sections.iter().any(|(n, _, _)| *n == name) {
                    return line.fail(0, format!("duplicate {name} section"), &[]);
                }
                sections.push((name, line, Vec::new()));
            }
            None => sections.last_mut().unwrap().2.push(line),
        }
    }

    let mut theorem = None;
    let mut definitions = Vec::new();
    let mut externals = Vec::new();
    let mut gadgets = Vec::new();
    let mut structure = None;
    let mut statements = None;
    for (name, header, body) in &sections {
        let blocks = build_blocks(body)?;
        match *name {
            "THEOREM" => theorem = Some(parse_theorem(header, &blocks)?),
            "DEFINITIONS" => definitions = parse_definitions(&blocks)?,
            "EXTERNAL" => externals = parse_externals(&blocks)?,
            "GADGETS" => gadgets = parse_gadgets(&blocks)?,
            "STRUCTURE" => {
                if blocks.len() != 1 {
                    return header.fail(0, "STRUCTURE must contain exactly one root block", &[]);
                }
                structure = Some(parse_node(&blocks[0])?);
            }
            "PROOF" => statements = Some(parse_statements(header, &blocks)?),
            _ => unreachable!(),
        }
    }
    let Some(theorem) = theorem else {
        return err(1, 1, "missing THEOREM section", &["THEOREM"]);
    };
    let Some(statements) = statements else {
        let last = text.lines().count().max(1);
        return err(last, 1, "missing PROOF section", &["PROOF"]);
    };
    let structure = structure.unwrap_or_else(|| {
        StructureNode::new(StructureKind::Direct, Span::new(1, statements.len()))
    });

    let proof = Proof {
        theorem,
        definitions,
        externals,
        statements,
        structure,
        gadgets,
    };
    resolve(&proof)?;
    Ok(proof)
}

fn resolve(p: &Proof) -> Result<(), DslError> {
    let mut refs = Refs::default();
    let mut need = |ok: bool, what: String| {
        if !ok {
            refs.unresolved.push(what);
        }
    };
    let th = &p.theorem;
    for h in &th.hypotheses {
        if let Some(d) = &h.definition {
            need(
                p.definition(d).is_some(),
                format!("definition '{d}' (hypothesis {})", h.id),
            );
        }
    }
    if let Some(Conclusion {
        definition: Some(d),
        id,
        ..
    }) = &th.conclusion
    {
        need(
            p.definition(d).is_some(),
            format!("definition '{d}' (conclusion {id})"),
        );
    }
    for s in &p.statements {
        for u in &s.uses {
            need(
                p.hypothesis(u).is_some(),
                format!("hypothesis '{u}' (statement {})", s.number),
            );
        }
        let hidden = s.hidden.clone().unwrap_or_default();
        for w in [&s.warrant, &hidden.warrant].into_iter().flatten() {
            if let Warrant::Rule(id) = w {
                need(
                    p.external(id).is_some(),
                    format!("warrant rule '{id}' (statement {})", s.number),
                );
            }
        }
        for b in [&s.backing, &hidden.backing].into_iter().flatten() {
            need(
                p.external(b).is_some(),
                format!("backing '{b}' (statement {})", s.number),
            );
        }
    }
    if refs.unresolved.is_empty() {
        Ok(())
    } else {
        Err(DslError::Reference {
            unresolved: refs.unresolved,
        })
    }
}

struct Fields<'a> {
    block: &'a Block,
    seen: BTreeSet<&'a str>,
}

impl<'a> Fields<'a> {
    fn new(block: &'a Block) -> Self {
        Fields {
            block,
            seen: BTreeSet::new(),
        }
    }

    /// Key-value children. Other children are returned untouched.
    fn split(
        &mut self,
        allowed: &[&str],
    ) -> Result<(Vec<(&'a str, &'a str, &'a Line)>, Vec<&'a Block>), DslError> {
        let mut kvs = Vec::new();
        let mut rest = Vec::new();
        for child in &self.block.children {
            match key_value(&child.line.text) {
                Some((k, v)) => {
                    if !allowed.contains(&k) {
                        return child.line.fail(0, format!("unknown field `{k}`"), allowed);
                    }
                    if !self.seen.insert(k) {
                        return child.line.fail(0, format!("duplicate field `{k}`"), &[]);
                    }
                    if !child.children.is_empty() {
                        return child.children[0]
                            .line
                            .fail(0, "unexpected indentation", &[]);
                    }
                    kvs.push((k, v, &child.line));
                }
                None => rest.push(child),
            }
        }
        Ok((kvs, rest))
    }
}

fn value_offset(line: &Line) -> usize {
    let colon = line.text.find(':').unwrap_or(0);
    let after = &line.text[colon + 1..];
    colon + 1 + (after.len() - after.trim_start().len())
}

fn char_offset(s: &str, byte: usize) -> usize {
    s[..byte].chars().count()
}

fn required<'a>(
    kvs: &[(&str, &'a str, &'a Line)],
    key: &str,
    owner: &Line,
) -> Result<(&'a str, &'a Line), DslError> {
    match kvs.iter().find(|(k, _, _)| *k == key) {
        Some((_, v, l)) if !v.is_empty() => Ok((v, l)),
        Some((_, _, l)) => l.fail(value_offset(l), format!("`{key}` must not be empty"), &[]),
        None => owner.fail(0, format!("missing field `{key}`"), &[key]),
    }
}

fn optional<'a>(kvs: &[(&str, &'a str, &'a Line)], key: &str) -> Option<(&'a str, &'a Line)> {
    kvs.iter()
        .find(|(k, _, _)| *k == key)
        .map(|(_, v, l)| (*v, *l))
}

fn logic_field(value: &str, line: &Line) -> Result<crate::logic::LogicStatement, DslError> {
    parse_statement(value).map_err(|e| {
        let offset = match &e {
            crate::logic::LogicError::Syntax { position, .. } => *position,
            _ => 0,
        };
        DslError::Parse {
            line: line.no,
            column: line.indent + char_offset(&line.text, value_offset(line)) + offset + 1,
            message: format!("invalid statement: {e}"),
            expected: Vec::new(),
        }
    })
}

fn parse_theorem(header: &Line, blocks: &[Block]) -> Result<Theorem, DslError> {
    let id = section_header(&header.text)
        .map(|(_, rest)| rest)
        .unwrap_or("");
    if !is_identifier(id) {
        return header.fail(8, "THEOREM needs an identifier", &["identifier"]);
    }
    let holder = Block {
        line: header.clone(),
        children: blocks.to_vec(),
    };
    let mut fields = Fields::new(&holder);
    let (kvs, rest) = fields.split(&["kind", "text", "statement"])?;
    let (kind, kind_line) = required(&kvs, "kind", header)?;
    let kind = match kind {
        "specific" => TheoremKind::Specific,
        "general" => TheoremKind::General,
        _ => {
            return kind_line.fail(
                value_offset(kind_line),
                "unknown theorem kind",
                &["specific", "general"],
            )
        }
    };
    let (text, _) = required(&kvs, "text", header)?;
    let statement = match optional(&kvs, "statement") {
        Some((v, l)) => Some(logic_field(v, l)?),
        None => None,
    };

    let mut hypotheses = Vec::new();
    let mut conclusion = None;
    for b in rest {
        let (head, id) = b.line.text.split_once(' ').unwrap_or((&b.line.text, ""));
        let id = id.trim();
        match head {
            "hypothesis" | "conclusion" => {
                if !is_identifier(id) {
                    return b.line.fail(
                        head.len() + 1,
                        format!("{head} needs an identifier"),
                        &["identifier"],
                    );
                }
                let mut f = Fields::new(b);
                let (kvs, extra) = f.split(&["label", "definition", "note"])?;
                if let Some(x) = extra.first() {
                    return x.line.fail(
                        0,
                        "expected a `key: value` field",
                        &["label", "definition", "note"],
                    );
                }
                let (label, _) = required(&kvs, "label", &b.line)?;
                let definition = optional(&kvs, "definition").map(|(v, _)| v.to_string());
                if head == "hypothesis" {
                    if hypotheses.iter().any(|h: &Hypothesis| h.id == id) {
                        return b.line.fail(0, format!("duplicate hypothesis `{id}`"), &[]);
                    }
                    hypotheses.push(Hypothesis {
                        id: id.to_string(),
                        label: label.to_string(),
                        definition,
                        note: optional(&kvs, "note").map(|(v, _)| v.to_string()),
                    });
                } else {
                    if conclusion.is_some() {
                        return b.line.fail(0, "duplicate conclusion", &[]);
                    }
                    if optional(&kvs, "note").is_some() {
                        return b.line.fail(0, "a conclusion has no `note`", &[]);
                    }
                    conclusion = Some(Conclusion {
                        id: id.to_string(),
                        label: label.to_string(),
                        definition,
                    });
                }
            }
            _ => {
                return b.line.fail(
                    0,
                    "unexpected line in THEOREM",
                    &["kind", "text", "statement", "hypothesis", "conclusion"],
                )
            }
        }
    }
    Ok(Theorem {
        id: id.to_string(),
        kind,
        text: text.to_string(),
        statement,
        hypotheses,
        conclusion,
    })
}

fn entry_id(b: &Block, section: &str) -> Result<String, DslError> {
    let id = b.line.text.as_str();
    if !is_identifier(id) || key_value(id).is_some() {
        return b.line.fail(
            0,
            format!("expected an entry identifier in {section}"),
            &["identifier"],
        );
    }
    Ok(id.to_string())
}

fn parse_definitions(blocks: &[Block]) -> Result<Vec<Definition>, DslError> {
    let mut out: Vec<Definition> = Vec::new();
    for b in blocks {
        let id = entry_id(b, "DEFINITIONS")?;
        if out.iter().any(|d| d.id == id) {
            return b.line.fail(0, format!("duplicate definition `{id}`"), &[]);
        }
        let mut f = Fields::new(b);
        let (kvs, extra) = f.split(&["name", "formal", "notation", "statement"])?;
        if let Some(x) = extra.first() {
            return x.line.fail(
                0,
                "expected a `key: value` field",
                &["name", "formal", "notation", "statement"],
            );
        }
        let (name, _) = required(&kvs, "name", &b.line)?;
        let (formal, _) = required(&kvs, "formal", &b.line)?;
        let notation = optional(&kvs, "notation")
            .map(|(v, _)| {
                v.split(';')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default();
        let statement = match optional(&kvs, "statement") {
            Some((v, l)) => Some(logic_field(v, l)?),
            None => None,
        };
        out.push(Definition {
            id,
            name: name.to_string(),
            formal: formal.to_string(),
            notation,
            statement,
        });
    }
    Ok(out)
}

fn parse_externals(blocks: &[Block]) -> Result<Vec<ExternalResult>, DslError> {
    let mut out: Vec<ExternalResult> = Vec::new();
    for b in blocks {
        let id = entry_id(b, "EXTERNAL")?;
        if out.iter().any(|d| d.id == id) {
            return b
                .line
                .fail(0, format!("duplicate external result `{id}`"), &[]);
        }
        let mut f = Fields::new(b);
        let (kvs, extra) = f.split(&["name", "kind", "statement", "rewrite"])?;
        if let Some(x) = extra.first() {
            return x.line.fail(
                0,
                "expected a `key: value` field",
                &["name", "kind", "statement", "rewrite"],
            );
        }
        let (name, _) = required(&kvs, "name", &b.line)?;
        let (kind, kl) = required(&kvs, "kind", &b.line)?;
        let kind = match kind {
            "theorem" => ExternalKind::Theorem,
            "axiom" => ExternalKind::Axiom,
            "rule" => ExternalKind::Rule,
            _ => {
                return kl.fail(
                    value_offset(kl),
                    "unknown result kind",
                    &["theorem", "axiom", "rule"],
                )
            }
        };
        let (statement, _) = required(&kvs, "statement", &b.line)?;
        let rewrite = match optional(&kvs, "rewrite") {
            Some((v, l)) => {
                let eq = parse_equation(v).map_err(|e| DslError::Parse {
                    line: l.no,
                    column: l.indent + char_offset(&l.text, value_offset(l)) + e.position + 1,
                    message: format!("invalid rewrite: {e}"),
                    expected: e.expected.clone(),
                })?;
                if let Err(e) = crate::expr::PowerRule::from_equation(&eq) {
                    return l.fail(value_offset(l), format!("invalid rewrite: {e}"), &[]);
                }
                Some(eq)
            }
            None => None,
        };
        out.push(ExternalResult {
            id,
            name: name.to_string(),
            kind,
            statement: statement.to_string(),
            rewrite,
        });
    }
    Ok(out)
}

fn parse_gadgets(blocks: &[Block]) -> Result<Vec<Gadget>, DslError> {
    let mut out: Vec<Gadget> = Vec::new();
    for b in blocks {
        let id = entry_id(b, "GADGETS")?;
        if out.iter().any(|d| d.id == id) {
            return b.line.fail(0, format!("duplicate gadget `{id}`"), &[]);
        }
        let mut f = Fields::new(b);
        let (kvs, extra) = f.split(&["name", "kind", "at", "description"])?;
        if let Some(x) = extra.first() {
            return x.line.fail(
                0,
                "expected a `key: value` field",
                &["name", "kind", "at", "description"],
            );
        }
        let (name, _) = required(&kvs, "name", &b.line)?;
        let (kind, kl) = required(&kvs, "kind", &b.line)?;
        let kind = match kind {
            "constructed-object" => GadgetKind::ConstructedObject,
            "facilitator-object" => GadgetKind::FacilitatorObject,
            _ => {
                return kl.fail(
                    value_offset(kl),
                    "unknown gadget kind",
                    &["constructed-object", "facilitator-object"],
                )
            }
        };
        let (at, al) = required(&kvs, "at", &b.line)?;
        let statement: usize = at
            .parse()
            .or_else(|_| al.fail(value_offset(al), "expected a statement number", &["number"]))?;
        let (description, _) = required(&kvs, "description", &b.line)?;
        out.push(Gadget {
            id,
            name: name.to_string(),
            statement,
            description: description.to_string(),
            kind,
        });
    }
    Ok(out)
}

const NODE_FIELDS: [&str; 6] = [
    "hypothesis",
    "base",
    "step",
    "conclusion",
    "exhaustive",
    "contradicts",
];

fn parse_node(b: &Block) -> Result<StructureNode, DslError> {
    let line = &b.line;
    let text = line.text.as_str();
    let (head, label) = match text.find('[') {
        Some(i) => {
            let Some(inner) = text[i + 1..].strip_suffix(']') else {
                return line.fail(char_offset(text, i), "unterminated label", &["]"]);
            };
            (text[..i].trim_end(), Some(inner.trim().to_string()))
        }
        None => (text, None),
    };
    let mut parts = head.split_whitespace();
    let kind_word = parts.next().unwrap_or("");
    let kind: StructureKind = kind_word.parse().or_else(|_| {
        let names: Vec<&str> = StructureKind::ALL.iter().map(|k| k.name()).collect();
        line.fail(0, format!("unknown structure kind `{kind_word}`"), &names)
    })?;
    let span_text = parts.next().unwrap_or("");
    let span: Span = span_text
        .parse()
        .or_else(|m: String| line.fail(kind_word.len() + 1, m, &["range"]))?;
    if let Some(extra) = parts.next() {
        let off = text.find(extra).unwrap_or(0);
        return line.fail(
            char_offset(text, off),
            format!("unexpected `{extra}`"),
            &["[label]"],
        );
    }

    let mut node = StructureNode::new(kind, span);
    node.label = label;
    let mut fields = Fields::new(b);
    let (kvs, rest) = fields.split(&NODE_FIELDS)?;
    let mut induction = InductionParts::default();
    let mut any_induction = false;
    for (k, v, l) in kvs {
        let span_of = |v: &str| -> Result<Span, DslError> {
            v.parse::<Span>()
                .or_else(|m| l.fail(value_offset(l), m, &["range"]))
        };
        match k {
            "hypothesis" | "base" | "step" | "conclusion" => {
                if kind != StructureKind::Induction {
                    return l.fail(0, format!("`{k}` is only allowed on induction blocks"), &[]);
                }
                any_induction = true;
                let s = Some(span_of(v)?);
                match k {
                    "hypothesis" => induction.hypothesis = s,
                    "base" => induction.base = s,
                    "step" => induction.step = s,
                    _ => induction.conclusion = s,
                }
            }
            "exhaustive" => node.exhaustive = Some(v.to_string()),
            "contradicts" => {
                node.contradicts = Some(v.parse().or_else(|_| {
                    l.fail(value_offset(l), "expected a statement number", &["number"])
                })?)
            }
            _ => unreachable!(),
        }
    }
    if kind == StructureKind::Induction || any_induction {
        node.induction = Some(induction);
    }
    for c in rest {
        node.children.push(parse_node(c)?);
    }
    Ok(node)
}

fn parse_statements(header: &Line, blocks: &[Block]) -> Result<Vec<ProofStatement>, DslError> {
    let mut out = Vec::new();
    for b in blocks {
        if let Some(c) = b.children.first() {
            return c.line.fail(0, "statements are single lines", &[]);
        }
        let s = parse_statement_line(&b.line)?;
        if s.number != out.len() + 1 {
            return b
                .line
                .fail(0, format!("expected statement {}", out.len() + 1), &[]);
        }
        out.push(s);
    }
    if out.is_empty() {
        return header.fail(0, "PROOF has no statements", &["1."]);
    }
    Ok(out)
}

/// Finds a trailing `{ key: ... }` annotation block, if there is one.
fn split_annotations(text: &str) -> Option<(usize, &str)> {
    if !text.ends_with('}') {
        return None;
    }
    let mut depth = 0i32;
    let mut in_quote = false;
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    for &(i, c) in bytes.iter().rev() {
        match c {
            '"' => in_quote = !in_quote,
            '}' if !in_quote => depth += 1,
            '{' if !in_quote => {
                depth -= 1;
                if depth == 0 {
                    let inner = &text[i + 1..text.len() - 1];
                    let key: String = inner
                        .trim_start()
                        .chars()
                        .take_while(|c| is_key_char(*c))
                        .collect();
                    let after = inner.trim_start()[key.len()..].trim_start();
                    if !key.is_empty() && after.starts_with(':') {
                        return Some((i, inner));
                    }
                    return None;
                }
            }
            _ => {}
        }
    }
    None
}

const ANNOTATION_KEYS: [&str; 9] = [
    "uses",
    "warrant",
    "warrant-rule",
    "backing",
    "roles",
    "error",
    "hidden-warrant",
    "hidden-warrant-rule",
    "hidden-backing",
];

fn split_fields(inner: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut in_quote = false;
    let mut escaped = false;
    for (i, c) in inner.char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match c {
            '\\' if in_quote => escaped = true,
            '"' => in_quote = !in_quote,
            ';' if !in_quote => {
                out.push((start, &inner[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &inner[start..]));
    out
}

fn parse_statement_line(line: &Line) -> Result<ProofStatement, DslError> {
    let text = line.text.as_str();
    let digits: String = text.chars().take_while(|c| c.is_ascii_digit()).collect();
    let number: usize = match digits.parse() {
        Ok(n) if n > 0 && text[digits.len()..].starts_with(". ") => n,
        _ => return line.fail(0, "expected a numbered statement `n. text`", &["number"]),
    };
    let body_start = digits.len() + 2;
    let body = &text[body_start..];
    let (stmt_text, annotations) = match split_annotations(body) {
        Some((i, inner)) => (body[..i].trim_end(), Some((body_start + i + 1, inner))),
        None => (body.trim_end(), None),
    };
    if stmt_text.trim().is_empty() {
        return line.fail(body_start, "statement text is empty", &["text"]);
    }
    let mut s = ProofStatement::new(number, stmt_text);

    // Inline formulas.
    let mut rest = stmt_text;
    let mut consumed = body_start;
    while let Some(open) = rest.find('`') {
        let after = &rest[open + 1..];
        let Some(close) = after.find('`') else {
            return line.fail(
                char_offset(text, consumed + open),
                "unterminated inline formula",
                &["`"],
            );
        };
        let src = &after[..close];
        let formula: Formula = parse_answer(src).map_err(|e| DslError::Parse {
            line: line.no,
            column: line.indent + char_offset(text, consumed + open + 1) + e.position + 1,
            message: format!("invalid inline formula: {e}"),
            expected: e.expected.clone(),
        })?;
        s.expressions.push(formula);
        let step = open + 1 + close + 1;
        consumed += step;
        rest = &rest[step..];
    }

    let Some((ann_start, inner)) = annotations else {
        return Ok(s);
    };
    let mut seen = BTreeSet::new();
    let mut hidden = Justification::default();
    let mut has_hidden = false;
    for (off, field) in split_fields(inner) {
        let col = char_offset(
            text,
            ann_start + off + (field.len() - field.trim_start().len()),
        );
        let field = field.trim();
        if field.is_empty() {
            continue;
        }
        let Some((key, value)) = field.split_once(':') else {
            return line.fail(col, "expected `key: value` annotation", &ANNOTATION_KEYS);
        };
        let key = key.trim();
        let value = value.trim();
        if !ANNOTATION_KEYS.contains(&key) {
            return line.fail(col, format!("unknown annotation `{key}`"), &ANNOTATION_KEYS);
        }
        if !seen.insert(key) {
            return line.fail(col, format!("duplicate annotation `{key}`"), &[]);
        }
        let quoted = || {
            unescape(value).map_or_else(
                || line.fail(col, format!("`{key}` needs a quoted string"), &["\"text\""]),
                Ok,
            )
        };
        let ident = || {
            if is_identifier(value) {
                Ok(value.to_string())
            } else {
                line.fail(col, format!("`{key}` needs an identifier"), &["identifier"])
            }
        };
        match key {
            "uses" => {
                for u in value.split(',').map(str::trim) {
                    if !is_identifier(u) {
                        return line.fail(
                            col,
                            "`uses` needs hypothesis identifiers",
                            &["identifier"],
                        );
                    }
                    s.uses.push(u.to_string());
                }
            }
            "warrant" => s.warrant = Some(Warrant::Text(quoted()?)),
            "warrant-rule" => s.warrant = Some(Warrant::Rule(ident()?)),
            "backing" => s.backing = Some(ident()?),
            "roles" => {
                for r in value.split(',').map(str::trim) {
                    if !is_identifier(r) {
                        return line.fail(col, "`roles` needs role names", &["role"]);
                    }
                    s.roles.insert(r.parse().unwrap());
                }
            }
            "error" => s.error = Some(quoted()?),
            "hidden-warrant" => {
                has_hidden = true;
                hidden.warrant = Some(Warrant::Text(quoted()?));
            }
            "hidden-warrant-rule" => {
                has_hidden = true;
                hidden.warrant = Some(Warrant::Rule(ident()?));
            }
            "hidden-backing" => {
                has_hidden = true;
                hidden.backing = Some(ident()?);
            }
            _ => unreachable!(),
        }
    }
    if seen.contains("warrant") && seen.contains("warrant-rule") {
        return line.fail(
            0,
            "a statement has either `warrant` or `warrant-rule`, not both",
            &[],
        );
    }
    if seen.contains("hidden-warrant") && seen.contains("hidden-warrant-rule") {
        return line.fail(
            0,
            "a statement has either `hidden-warrant` or `hidden-warrant-rule`, not both",
            &[],
        );
    }
    if has_hidden {
        s.hidden = Some(hidden);
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// rendering

fn render_warrant(key: &str, w: &Warrant) -> String {
    match w {
        Warrant::Text(t) => format!("{key}: {}", quote(t)),
        Warrant::Rule(id) => format!("{key}-rule: {id}"),
    }
}

fn annotation_block(s: &ProofStatement) -> String {
    let mut parts = Vec::new();
    if !s.uses.is_empty() {
        parts.push(format!("uses: {}", s.uses.join(", ")));
    }
    if let Some(w) = &s.warrant {
        parts.push(render_warrant("warrant", w));
    }
    if let Some(b) = &s.backing {
        parts.push(format!("backing: {b}"));
    }
    if !s.roles.is_empty() {
        let roles: Vec<&str> = s.roles.iter().map(Role::name).collect();
        parts.push(format!("roles: {}", roles.join(", ")));
    }
    if let Some(e) = &s.error {
        parts.push(format!("error: {}", quote(e)));
    }
    if let Some(h) = &s.hidden {
        if let Some(w) = &h.warrant {
            parts.push(render_warrant("hidden-warrant", w));
        }
        if let Some(b) = &h.backing {
            parts.push(format!("hidden-backing: {b}"));
        }
    }
    if parts.is_empty() {
        String::new()
    } else {
        format!(" {{{}}}", parts.join("; "))
    }
}

fn render_node(node: &StructureNode, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth + 1);
    out.push_str(&format!("{pad}{} {}", node.kind, node.span));
    if let Some(l) = &node.label {
        out.push_str(&format!(" [{l}]"));
    }
    out.push('\n');
    if let Some(parts) = &node.induction {
        for (k, v) in [
            ("hypothesis", parts.hypothesis),
            ("base", parts.base),
            ("step", parts.step),
            ("conclusion", parts.conclusion),
        ] {
            if let Some(span) = v {
                out.push_str(&format!("{pad}  {k}: {span}\n"));
            }
        }
    }
    if let Some(e) = &node.exhaustive {
        out.push_str(&format!("{pad}  exhaustive: {e}\n"));
    }
    if let Some(c) = node.contradicts {
        out.push_str(&format!("{pad}  contradicts: {c}\n"));
    }
    for c in &node.children {
        render_node(c, depth + 1, out);
    }
}

fn structure_headers(node: &StructureNode, depth: usize, out: &mut Vec<(usize, String)>) {
    let pad = "  ".repeat(depth);
    let label = node
        .label
        .as_ref()
        .map(|l| format!(" [{l}]"))
        .unwrap_or_default();
    out.push((
        node.span.start,
        format!("# {pad}{} {}{label}", node.kind, node.span),
    ));
    if let Some(parts) = &node.induction {
        for (name, span) in [
            ("hypothesis", parts.hypothesis),
            ("base case", parts.base),
            ("induction step", parts.step),
            ("conclusion", parts.conclusion),
        ] {
            if let Some(span) = span {
                out.push((span.start, format!("# {pad}  {name} {span}")));
            }
        }
    }
    for c in &node.children {
        structure_headers(c, depth + 1, out);
    }
}

/// Canonical document text. Parsing the output gives back `p`.
pub fn render_numbered(p: &Proof, style: RenderStyle) -> String {
    let mut out = String::new();
    let th = &p.theorem;
    out.push_str(&format!("THEOREM {}\n", th.id));
    out.push_str(&format!(
        "  kind: {}\n",
        match th.kind {
            TheoremKind::Specific => "specific",
            TheoremKind::General => "general",
        }
    ));
    out.push_str(&format!("  text: {}\n", th.text));
    if let Some(s) = &th.statement {
        out.push_str(&format!("  statement: {}\n", s.to_prefix()));
    }
    for h in &th.hypotheses {
        out.push_str(&format!("  hypothesis {}\n    label: {}\n", h.id, h.label));
        if let Some(d) = &h.definition {
            out.push_str(&format!("    definition: {d}\n"));
        }
        if let Some(n) = &h.note {
            out.push_str(&format!("    note: {n}\n"));
        }
    }
    if let Some(c) = &th.conclusion {
        out.push_str(&format!("  conclusion {}\n    label: {}\n", c.id, c.label));
        if let Some(d) = &c.definition {
            out.push_str(&format!("    definition: {d}\n"));
        }
    }

    if !p.definitions.is_empty() {
        out.push_str("\nDEFINITIONS\n");
        for d in &p.definitions {
            out.push_str(&format!(
                "  {}\n    name: {}\n    formal: {}\n",
                d.id, d.name, d.formal
            ));
            if !d.notation.is_empty() {
                out.push_str(&format!("    notation: {}\n", d.notation.join("; ")));
            }
            if let Some(s) = &d.statement {
                out.push_str(&format!("    statement: {}\n", s.to_prefix()));
            }
        }
    }

    if !p.externals.is_empty() {
        out.push_str("\nEXTERNAL\n");
        for e in &p.externals {
            let kind = match e.kind {
                ExternalKind::Theorem => "theorem",
                ExternalKind::Axiom => "axiom",
                ExternalKind::Rule => "rule",
            };
            out.push_str(&format!(
                "  {}\n    name: {}\n    kind: {kind}\n    statement: {}\n",
                e.id, e.name, e.statement
            ));
            if let Some(r) = &e.rewrite {
                out.push_str(&format!("    rewrite: {r}\n"));
            }
        }
    }

    if !p.gadgets.is_empty() {
        out.push_str("\nGADGETS\n");
        for g in &p.gadgets {
            out.push_str(&format!(
                "  {}\n    name: {}\n    kind: {}\n    at: {}\n    description: {}\n",
                g.id,
                g.name,
                g.kind.name(),
                g.statement,
                g.description
            ));
        }
    }

    out.push_str("\nSTRUCTURE\n");
    render_node(&p.structure, 0, &mut out);

    out.push_str("\nPROOF\n");
    let mut headers = Vec::new();
    if style == RenderStyle::Structured {
        structure_headers(&p.structure, 0, &mut headers);
        headers.sort_by_key(|(start, _)| *start);
    }
    let mut next_header = 0;
    for s in &p.statements {
        while next_header < headers.len() && headers[next_header].0 <= s.number {
            out.push_str(&headers[next_header].1);
            out.push('\n');
            next_header += 1;
        }
        out.push_str(&format!(
            "{}. {}{}\n",
            s.number,
            s.text,
            annotation_block(s)
        ));
    }
    out
}

/// Numbered statements as shown to students. With `show_justifications`
/// each visible warrant and backing is appended in brackets.
pub fn render_student(p: &Proof, show_justifications: bool) -> String {
    let mut out = String::new();
    for s in &p.statements {
        out.push_str(&format!("{}. {}", s.number, s.plain_text()));
        if show_justifications {
            let mut notes = Vec::new();
            match &s.warrant {
                Some(Warrant::Text(t)) => notes.push(t.clone()),
                Some(Warrant::Rule(id)) => {
                    notes.push(p.external(id).map_or(id.clone(), |e| e.name.clone()))
                }
                None => {}
            }
            if let Some(b) = &s.backing {
                notes.push(format!(
                    "by {}",
                    p.external(b).map_or(b.as_str(), |e| e.name.as_str())
                ));
            }
            if !notes.is_empty() {
                out.push_str(&format!(" [{}]", notes.join("; ")));
            }
        }
        out.push('\n');
    }
    out
}

/// Moves the warrant and backing of statement `number` into the hidden
/// answer-key field.
pub fn omit_warrant(p: &Proof, number: usize) -> Result<Proof, DslError> {
    let mut out = p.clone();
    let s = out
        .statements
        .iter_mut()
        .find(|s| s.number == number)
        .ok_or(DslError::UnknownStatement(number))?;
    if s.warrant.is_none() && s.backing.is_none() {
        return Err(DslError::NoWarrantPresent(number));
    }
    let hidden = s.hidden.get_or_insert_with(Justification::default);
    if let Some(w) = s.warrant.take() {
        hidden.warrant = Some(w);
    }
    if let Some(b) = s.backing.take() {
        hidden.backing = Some(b);
    }
    Ok(out)
}
