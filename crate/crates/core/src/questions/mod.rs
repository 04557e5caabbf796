//! Question items and banks, checklist-driven generation, and faded worked
//! examples.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::combos::CombinationTable;
use crate::config::DerivationWeights;
use crate::expr::{Equation, Expr, Formula};

pub mod fade;
mod gen;

pub use gen::{checklist_coverage, generate, SkipEntry};

pub const BANK_FORMAT: &str = "proofcomp-bank/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Template {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
    T11,
}

impl Template {
    pub const ALL: [Template; 11] = [
        Template::T1,
        Template::T2,
        Template::T3,
        Template::T4,
        Template::T5,
        Template::T6,
        Template::T7,
        Template::T8,
        Template::T9,
        Template::T10,
        Template::T11,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::T1 => "definition",
            Template::T2 => "instantiation",
            Template::T3 => "proof-type",
            Template::T4 => "hypothesis-lines",
            Template::T5 => "warrant-backing",
            Template::T6 => "structural-role",
            Template::T7 => "examples",
            Template::T8 => "gadget",
            Template::T9 => "logic-transform",
            Template::T10 => "transfer",
            Template::T11 => "fallacy",
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponseType {
    LineSelect,
    McqSingle,
    McqMulti,
    AlgebraicInput,
    AlgebraicDerivation,
    FreeTextUngraded,
}

impl ResponseType {
    pub fn name(self) -> &'static str {
        match self {
            ResponseType::LineSelect => "line-select",
            ResponseType::McqSingle => "mcq-single",
            ResponseType::McqMulti => "mcq-multi",
            ResponseType::AlgebraicInput => "algebraic-input",
            ResponseType::AlgebraicDerivation => "algebraic-derivation",
            ResponseType::FreeTextUngraded => "free-text-ungraded",
        }
    }

    pub fn is_mcq(self) -> bool {
        matches!(self, ResponseType::McqSingle | ResponseType::McqMulti)
    }
}

impl fmt::Display for ResponseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where an item comes from: a checklist item such as `3a`, or a question
/// type outside the checklist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "ref", rename_all = "kebab-case")]
pub enum ItemSource {
    Checklist(String),
    Taxonomy(String),
}

impl ItemSource {
    pub fn checklist_item(&self) -> Option<u8> {
        match self {
            ItemSource::Checklist(r) => r
                .chars()
                .take_while(char::is_ascii_digit)
                .collect::<String>()
                .parse()
                .ok(),
            ItemSource::Taxonomy(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct McqOption {
    pub id: String,
    pub text: String,
    pub is_key: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnswerKey {
    Lines {
        lines: Vec<usize>,
    },
    Options {
        options: Vec<String>,
    },
    Formula {
        formula: Formula,
    },
    /// Reasoning by equivalence from `start` to a line in the form `target`.
    Derivation {
        start: Expr,
        target: Expr,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionItem {
    pub id: String,
    pub template: Template,
    pub source: ItemSource,
    pub proof_id: String,
    pub stem: String,
    /// Numbered proof text shown with the stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excerpt: Option<String>,
    pub response_type: ResponseType,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<McqOption>,
    /// Display order of option ids.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub option_order: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<AnswerKey>,
    /// Number of selectable lines for line-select items.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line_count: Option<usize>,
    /// Power rewrite rules used when checking algebraic answers.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rewrites: Vec<Equation>,
    /// Model answer for ungraded items, for the teacher.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_answer: Option<String>,
    /// Feedback by answer class; `default` is the fallback.
    pub feedback: BTreeMap<String, String>,
    pub shuffle_seed: u64,
}

impl QuestionItem {
    pub fn option(&self, id: &str) -> Option<&McqOption> {
        self.options.iter().find(|o| o.id == id)
    }

    pub fn key_options(&self) -> Vec<&str> {
        self.options
            .iter()
            .filter(|o| o.is_key)
            .map(|o| o.id.as_str())
            .collect()
    }

    /// Problems with the key, empty when the item is consistent.
    pub fn key_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let id = &self.id;
        match (self.response_type, &self.key) {
            (ResponseType::FreeTextUngraded, None) => {}
            (ResponseType::FreeTextUngraded, Some(_)) => {
                out.push(format!("{id}: free-text item has a key"))
            }
            (ResponseType::LineSelect, Some(AnswerKey::Lines { lines })) => {
                let n = self.line_count.unwrap_or(0);
                if lines.is_empty() {
                    out.push(format!("{id}: empty line key"));
                }
                for l in lines {
                    if *l == 0 || *l > n {
                        out.push(format!("{id}: key line {l} is not a statement number"));
                    }
                }
            }
            (t, Some(AnswerKey::Options { options })) if t.is_mcq() => {
                if options.is_empty() {
                    out.push(format!("{id}: no key option"));
                }
                if t == ResponseType::McqSingle && options.len() != 1 {
                    out.push(format!(
                        "{id}: single-answer item has {} keys",
                        options.len()
                    ));
                }
                for o in options {
                    if self.option(o).is_none() {
                        out.push(format!("{id}: key option {o} does not exist"));
                    }
                }
                let flagged: Vec<&str> = self.key_options();
                if flagged != options.iter().map(String::as_str).collect::<Vec<_>>() {
                    out.push(format!("{id}: option key flags disagree with the key"));
                }
                let mut order = self.option_order.clone();
                order.sort();
                let mut ids: Vec<String> = self.options.iter().map(|o| o.id.clone()).collect();
                ids.sort();
                if order != ids {
                    out.push(format!(
                        "{id}: option order is not a permutation of the options"
                    ));
                }
            }
            (ResponseType::AlgebraicInput, Some(AnswerKey::Formula { .. })) => {}
            (ResponseType::AlgebraicDerivation, Some(AnswerKey::Derivation { .. })) => {}
            (t, k) => out.push(format!("{id}: {t} item has key {k:?}")),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionBank {
    pub format: String,
    /// Bumped whenever feedback is registered.
    pub version: u64,
    pub proof_id: String,
    pub seed: u64,
    pub derivation_weights: DerivationWeights,
    pub items: Vec<QuestionItem>,
    pub skipped: Vec<SkipEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<CombinationTable>,
}

#[derive(Debug, Error)]
pub enum BankError {
    #[error("invalid question bank: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported bank format `{0}`")]
    Format(String),
}

impl QuestionBank {
    pub fn item(&self, id: &str) -> Option<&QuestionItem> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bank serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, BankError> {
        let bank: QuestionBank = serde_json::from_str(text)?;
        if bank.format != BANK_FORMAT {
            return Err(BankError::Format(bank.format));
        }
        Ok(bank)
    }

    pub fn key_problems(&self) -> Vec<String> {
        self.items
            .iter()
            .flat_map(QuestionItem::key_problems)
            .collect()
    }

    /// Markdown rendering. With `teacher` the keys, feedback and sample
    /// answers are included; without it the output is what students see.
    pub fn to_markdown(&self, teacher: bool) -> String {
        let mut out = format!("# Questions: {}\n", self.proof_id);
        if teacher {
            out.push_str(&format!(
                "\nBank version {}, seed {}.\n",
                self.version, self.seed
            ));
        }
        for (n, item) in self.items.iter().enumerate() {
            out.push_str(&format!("\n## {}. {}\n\n", n + 1, item.id));
            if teacher {
                let src = match &item.source {
                    ItemSource::Checklist(r) => format!("checklist {r}"),
                    ItemSource::Taxonomy(t) => t.clone(),
                };
                out.push_str(&format!(
                    "_{} {}, {}, {}_\n\n",
                    item.template,
                    item.template.name(),
                    item.response_type,
                    src
                ));
            }
            if let Some(ex) = &item.excerpt {
                out.push_str("```text\n");
                out.push_str(ex);
                if !ex.ends_with('\n') {
                    out.push('\n');
                }
                out.push_str("```\n\n");
            }
            out.push_str(&item.stem);
            out.push('\n');
            if !item.options.is_empty() {
                out.push('\n');
                for id in &item.option_order {
                    let o = item.option(id).expect("order lists existing options");
                    let mark = if teacher && o.is_key {
                        " **(key)**"
                    } else {
                        ""
                    };
                    out.push_str(&format!("- {}. {}{mark}\n", o.id, o.text));
                }
            }
            if teacher {
                match &item.key {
                    Some(AnswerKey::Lines { lines }) => {
                        let l: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
                        out.push_str(&format!("\nKey: line {}\n", l.join(", ")));
                    }
                    Some(AnswerKey::Formula { formula }) => {
                        out.push_str(&format!("\nKey: `{formula}`\n"))
                    }
                    Some(AnswerKey::Derivation { start, target }) => out.push_str(&format!(
                        "\nStart: `{start}`; final line in the form `{target}`\n"
                    )),
                    Some(AnswerKey::Options { .. }) | None => {}
                }
                if let Some(s) = &item.sample_answer {
                    out.push_str(&format!("\nSample answer: {s}\n"));
                }
                if !item.feedback.is_empty() {
                    out.push_str("\nFeedback:\n");
                    for (class, text) in &item.feedback {
                        out.push_str(&format!("- {class}: {text}\n"));
                    }
                }
            }
        }
        if teacher && !self.skipped.is_empty() {
            out.push_str("\n## Skipped templates\n\n");
            for s in &self.skipped {
                let src = s
                    .checklist
                    .as_deref()
                    .map(|c| format!(" (checklist {c})"))
                    .unwrap_or_default();
                out.push_str(&format!("- {}{src}: {}\n", s.template, s.reason));
            }
        }
        out
    }
}

/// Per-item seed derived from the bank seed and the item id.
pub fn item_seed(seed: u64, item_id: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(item_id.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}
