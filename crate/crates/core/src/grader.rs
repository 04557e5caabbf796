//! Grading response records against a question bank.

use std::collections::BTreeSet;
use std::io::{BufRead, Read};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::DerivationWeights;
use crate::expr::{matches_form, parse_answer, parse_expr, Equivalence, Expr, Formula, PowerRule};
use crate::questions::{AnswerKey, QuestionBank, QuestionItem, ResponseType};

pub const CORRECT: &str = "correct";
pub const NO_RESPONSE: &str = "no-response";
pub const INVALID: &str = "invalid";
pub const UNGRADED: &str = "ungraded";
pub const INCORRECT: &str = "incorrect";
pub const PARTIAL: &str = "partial";
/// A bare value given where an equation was asked for.
pub const VALUE_ONLY: &str = "value-only";
/// An equation given where a value was asked for.
pub const EQUATION_FOR_VALUE: &str = "equation-for-value";

pub const FLAG_NO_RESPONSE: &str = "no-response";
pub const FLAG_UNPARSEABLE: &str = "unparseable";
pub const FLAG_EQUATION_VALUE: &str = "equation-value-confusion";
pub const FLAG_UNDECIDABLE: &str = "undecidable";

#[derive(Debug, Error)]
pub enum GradeError {
    #[error("item `{item}` is {expected} but its key is {found}")]
    TypeMismatch {
        item: String,
        expected: String,
        found: String,
    },
    #[error("unknown item `{0}`")]
    UnknownItem(String),
    #[error("invalid rewrite rule on item `{item}`: {message}")]
    Rules { item: String, message: String },
    #[error("response log line {line}: {message}")]
    Log { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub student_id: String,
    pub item_id: String,
    /// Line number, option ids, an expression, or expression lines
    /// separated by newlines or `;`.
    #[serde(default, deserialize_with = "de_raw")]
    pub raw_answer: String,
    #[serde(default)]
    pub timestamp: Option<String>,
}

/// Accepts a string, a number, or an array (joined with newlines).
fn de_raw<'de, D: serde::Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    use serde_json::Value;
    Ok(match Value::deserialize(d)? {
        Value::Null => String::new(),
        Value::String(s) => s,
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Array(items) => items
            .into_iter()
            .map(|v| match v {
                Value::String(s) => s,
                other => other.to_string(),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => {
            return Err(serde::de::Error::custom(format!(
                "unsupported raw_answer {other}"
            )))
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeResult {
    pub item_id: String,
    pub student_id: String,
    pub bank_version: u64,
    pub response_type: ResponseType,
    /// None for ungraded free text.
    pub score: Option<f64>,
    pub answer_class: String,
    /// Normalized answer, e.g. `line 2` or `A,D`. None when blank or
    /// unreadable.
    #[serde(default)]
    pub answer: Option<String>,
    /// Options chosen, for MCQ items.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub selected: Vec<String>,
    #[serde(default)]
    pub feedback: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl GradeResult {
    pub fn is_respondent(&self) -> bool {
        self.answer_class != NO_RESPONSE
    }
}

/// Outcome of checking a chain of expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationGrade {
    pub score: f64,
    /// One entry per adjacent pair, starting with (start, first line).
    pub pairs: Vec<bool>,
    /// Index into `pairs` of the first pair that is not equivalent.
    pub first_broken: Option<usize>,
    pub form_matches: bool,
    pub undecidable: bool,
}

/// Scores a derivation: the steps weight times the fraction of equivalent
/// adjacent pairs, plus the form weight if the last line is in the target
/// form.
pub fn grade_derivation(
    lines: &[Expr],
    start: &Expr,
    target: &Expr,
    weights: DerivationWeights,
    eq: &Equivalence,
) -> DerivationGrade {
    let mut pairs = Vec::with_capacity(lines.len());
    let mut undecidable = false;
    let mut prev = start;
    for line in lines {
        let ok = match eq.equivalent(prev, line) {
            Ok(b) => b,
            Err(_) => {
                undecidable = true;
                false
            }
        };
        pairs.push(ok);
        prev = line;
    }
    let form_matches = lines.last().is_some_and(|l| matches_form(l, target));
    let good = pairs.iter().filter(|b| **b).count();
    let steps = if pairs.is_empty() {
        0.0
    } else {
        good as f64 / pairs.len() as f64
    };
    let score = weights.steps * steps + if form_matches { weights.form } else { 0.0 };
    DerivationGrade {
        score,
        first_broken: pairs.iter().position(|b| !b),
        pairs,
        form_matches,
        undecidable,
    }
}

struct Outcome {
    class: String,
    answer: Option<String>,
    selected: Vec<String>,
    score: Option<f64>,
    flags: Vec<String>,
    /// Feedback that overrides the class lookup, e.g. a parse error.
    note: Option<String>,
}

impl Outcome {
    fn new(class: &str, answer: Option<String>, score: Option<f64>) -> Self {
        Outcome {
            class: class.to_string(),
            answer,
            selected: Vec::new(),
            score,
            flags: Vec::new(),
            note: None,
        }
    }

    fn invalid(message: String) -> Self {
        let mut o = Outcome::new(INVALID, None, Some(0.0));
        o.flags.push(FLAG_UNPARSEABLE.to_string());
        o.note = Some(message);
        o
    }
}

/// Grades one response. Unreadable answers score 0 with class `invalid`;
/// errors are reserved for a bank whose key does not fit the item.
pub fn grade_item(
    item: &QuestionItem,
    r: &ResponseRecord,
    bank_version: u64,
    weights: DerivationWeights,
) -> Result<GradeResult, GradeError> {
    let raw = r.raw_answer.trim();
    let out = if raw.is_empty() {
        let score = (item.response_type != ResponseType::FreeTextUngraded).then_some(0.0);
        let mut o = Outcome::new(NO_RESPONSE, None, score);
        o.flags.push(FLAG_NO_RESPONSE.to_string());
        o
    } else {
        match (item.response_type, &item.key) {
            (ResponseType::FreeTextUngraded, _) => {
                Outcome::new(UNGRADED, Some(raw.to_string()), None)
            }
            (ResponseType::LineSelect, Some(AnswerKey::Lines { lines })) => {
                grade_line(item, lines, raw)
            }
            (
                ResponseType::McqSingle | ResponseType::McqMulti,
                Some(AnswerKey::Options { options }),
            ) => grade_options(item, options, raw),
            (ResponseType::AlgebraicInput, Some(AnswerKey::Formula { formula })) => {
                grade_formula(item, formula, raw)?
            }
            (ResponseType::AlgebraicDerivation, Some(AnswerKey::Derivation { start, target })) => {
                grade_chain(item, start, target, raw, weights)?
            }
            (t, key) => {
                return Err(GradeError::TypeMismatch {
                    item: item.id.clone(),
                    expected: t.to_string(),
                    found: match key {
                        None => "missing".to_string(),
                        Some(AnswerKey::Lines { .. }) => "a line key".to_string(),
                        Some(AnswerKey::Options { .. }) => "an option key".to_string(),
                        Some(AnswerKey::Formula { .. }) => "a formula key".to_string(),
                        Some(AnswerKey::Derivation { .. }) => "a derivation key".to_string(),
                    },
                })
            }
        }
    };
    let feedback = out.note.clone().or_else(|| match out.class.as_str() {
        UNGRADED => None,
        NO_RESPONSE => item.feedback.get(NO_RESPONSE).cloned(),
        class => item
            .feedback
            .get(class)
            .or_else(|| item.feedback.get("default"))
            .cloned(),
    });
    Ok(GradeResult {
        item_id: item.id.clone(),
        student_id: r.student_id.clone(),
        bank_version,
        response_type: item.response_type,
        score: out.score,
        answer_class: out.class,
        answer: out.answer,
        selected: out.selected,
        feedback,
        flags: out.flags,
        timestamp: r.timestamp.clone(),
    })
}

fn grade_line(item: &QuestionItem, key: &[usize], raw: &str) -> Outcome {
    let lower = raw.to_lowercase();
    let digits = lower.strip_prefix("line").unwrap_or(&lower).trim();
    let n = match digits.parse::<usize>() {
        Ok(n) if n >= 1 && n <= item.line_count.unwrap_or(usize::MAX) => n,
        Ok(n) => return Outcome::invalid(format!("There is no line {n} in this proof.")),
        Err(_) => return Outcome::invalid(format!("Could not read `{raw}` as a line number.")),
    };
    let answer = format!("line {n}");
    if key.contains(&n) {
        Outcome::new(CORRECT, Some(answer), Some(1.0))
    } else {
        Outcome::new(&answer.clone(), Some(answer), Some(0.0))
    }
}

fn grade_options(item: &QuestionItem, key: &[String], raw: &str) -> Outcome {
    let mut chosen = BTreeSet::new();
    for tok in raw
        .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let id = tok.to_uppercase();
        match item.options.iter().find(|o| o.id.to_uppercase() == id) {
            Some(o) => {
                chosen.insert(o.id.clone());
            }
            None => return Outcome::invalid(format!("`{tok}` is not one of the options.")),
        }
    }
    if item.response_type == ResponseType::McqSingle && chosen.len() != 1 {
        return Outcome::invalid("Choose exactly one option.".to_string());
    }
    let selected: Vec<String> = chosen.iter().cloned().collect();
    let answer = selected.join(",");
    let keyset: BTreeSet<String> = key.iter().cloned().collect();
    let mut o = if chosen == keyset {
        Outcome::new(CORRECT, Some(answer), Some(1.0))
    } else {
        Outcome::new(&answer.clone(), Some(answer), Some(0.0))
    };
    o.selected = selected;
    o
}

fn equivalence(item: &QuestionItem) -> Result<Equivalence, GradeError> {
    let rules = item
        .rewrites
        .iter()
        .map(PowerRule::from_equation)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| GradeError::Rules {
            item: item.id.clone(),
            message: e.to_string(),
        })?;
    Equivalence::with_rules(&rules).map_err(|e| GradeError::Rules {
        item: item.id.clone(),
        message: e.to_string(),
    })
}

fn grade_formula(item: &QuestionItem, key: &Formula, raw: &str) -> Result<Outcome, GradeError> {
    let answer = match parse_answer(raw) {
        Ok(a) => a,
        Err(e) => {
            return Ok(Outcome::invalid(format!(
                "Could not read your answer: {e}."
            )))
        }
    };
    let text = Some(answer.to_string());
    let eq = equivalence(item)?;
    let decided = match (key, &answer) {
        (Formula::Equation(_), Formula::Expr(_)) => {
            let mut o = Outcome::new(VALUE_ONLY, text, Some(0.0));
            o.flags.push(FLAG_EQUATION_VALUE.to_string());
            return Ok(o);
        }
        (Formula::Expr(_), Formula::Equation(_)) => {
            return Ok(Outcome::new(EQUATION_FOR_VALUE, text, Some(0.0)))
        }
        (Formula::Equation(k), Formula::Equation(a)) => eq.equivalent_equations(a, k),
        (Formula::Expr(k), Formula::Expr(a)) => eq.equivalent(a, k),
    };
    Ok(match decided {
        Ok(true) => Outcome::new(CORRECT, text, Some(1.0)),
        Ok(false) => Outcome::new(INCORRECT, text, Some(0.0)),
        Err(e) => {
            let mut o = Outcome::new(INCORRECT, text, Some(0.0));
            o.flags.push(FLAG_UNDECIDABLE.to_string());
            o.note = Some(format!(
                "Your answer could not be checked automatically: {e}."
            ));
            o
        }
    })
}

/// Splits a derivation answer into expressions. A leading `=` on a line
/// is ignored.
pub fn parse_derivation_lines(raw: &str) -> Result<Vec<Expr>, (usize, String)> {
    raw.split(['\n', ';'])
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            let l = l.strip_prefix('=').unwrap_or(l);
            parse_expr(l).map_err(|e| (i + 1, e.to_string()))
        })
        .collect()
}

fn grade_chain(
    item: &QuestionItem,
    start: &Expr,
    target: &Expr,
    raw: &str,
    weights: DerivationWeights,
) -> Result<Outcome, GradeError> {
    let lines = match parse_derivation_lines(raw) {
        Ok(l) => l,
        Err((n, e)) => return Ok(Outcome::invalid(format!("Could not read line {n}: {e}."))),
    };
    let g = grade_derivation(&lines, start, target, weights, &equivalence(item)?);
    let rendered: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
    let class = if g.first_broken.is_none() && g.form_matches {
        CORRECT
    } else if g.score > 0.0 {
        PARTIAL
    } else {
        INCORRECT
    };
    let mut o = Outcome::new(class, Some(rendered.join("; ")), Some(g.score));
    if let Some(i) = g.first_broken {
        let from = if i == 0 {
            "start".to_string()
        } else {
            format!("line {i}")
        };
        o.flags
            .push(format!("broken-pair: {from} -> line {}", i + 1));
        o.note = Some(format!(
            "Line {} does not follow from {}: the two expressions are not equal.",
            i + 1,
            if i == 0 {
                "the starting expression".to_string()
            } else {
                format!("line {i}")
            }
        ));
    }
    if !g.form_matches {
        o.flags.push("form-mismatch".to_string());
        if o.note.is_none() {
            o.note = Some(format!(
                "Every step is correct, but the last line is not written in the form `{target}`."
            ));
        }
    }
    if g.undecidable {
        o.flags.push(FLAG_UNDECIDABLE.to_string());
    }
    Ok(o)
}

/// Grades every record; records for unknown items are an error.
pub fn grade_all(
    bank: &QuestionBank,
    records: &[ResponseRecord],
) -> Result<Vec<GradeResult>, GradeError> {
    records
        .iter()
        .map(|r| {
            let item = bank
                .item(&r.item_id)
                .ok_or_else(|| GradeError::UnknownItem(r.item_id.clone()))?;
            grade_item(item, r, bank.version, bank.derivation_weights)
        })
        .collect()
}

/// Adds or replaces the feedback for an answer class and bumps the bank
/// version.
pub fn register_feedback(
    bank: &QuestionBank,
    item_id: &str,
    class: &str,
    text: &str,
) -> Result<QuestionBank, GradeError> {
    let mut out = bank.clone();
    let item = out
        .items
        .iter_mut()
        .find(|i| i.id == item_id)
        .ok_or_else(|| GradeError::UnknownItem(item_id.to_string()))?;
    item.feedback.insert(class.to_string(), text.to_string());
    out.version += 1;
    Ok(out)
}

/// Reads `student_id,item_id,raw_answer,timestamp` with a header row; the
/// timestamp column may be omitted.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResponseRecord>, GradeError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| GradeError::Log {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (Some(s), Some(i), Some(a)) = (col("student_id"), col("item_id"), col("raw_answer")) else {
        return Err(GradeError::Log {
            line: 1,
            message: "header must name student_id, item_id and raw_answer".to_string(),
        });
    };
    let t = col("timestamp");
    let mut out = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| GradeError::Log {
            line: n + 2,
            message: e.to_string(),
        })?;
        let field = |k: usize| rec.get(k).unwrap_or("").to_string();
        out.push(ResponseRecord {
            student_id: field(s),
            item_id: field(i),
            raw_answer: field(a),
            timestamp: t.map(field).filter(|x| !x.is_empty()),
        });
    }
    Ok(out)
}

/// One JSON object per line; blank lines are skipped.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<ResponseRecord>, GradeError> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| GradeError::Log {
            line: n + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn read_grades<R: BufRead>(input: R) -> Result<Vec<GradeResult>, GradeError> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| GradeError::Log {
            line: n + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn grades_to_jsonl(grades: &[GradeResult]) -> String {
    let mut out = String::new();
    for g in grades {
        out.push_str(&serde_json::to_string(g).expect("grade serializes"));
        out.push('\n');
    }
    out
}

/// The key as text, for reports.
pub fn key_text(item: &QuestionItem) -> Option<String> {
    match item.key.as_ref()? {
        AnswerKey::Formula { formula } => Some(formula.to_string()),
        AnswerKey::Lines { lines } => Some(
            lines
                .iter()
                .map(|l| format!("line {l}"))
                .collect::<Vec<_>>()
                .join(", "),
        ),
        AnswerKey::Options { options } => Some(options.join(",")),
        AnswerKey::Derivation { target, .. } => Some(target.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GenConfig;
    use crate::corpus;
    use crate::dsl::parse_proof;
    use crate::questions::generate;

    fn bank(src: &str) -> QuestionBank {
        generate(&parse_proof(src).unwrap(), None, &GenConfig::default())
    }

    fn rec(item: &str, raw: &str) -> ResponseRecord {
        ResponseRecord {
            student_id: "s1".into(),
            item_id: item.into(),
            raw_answer: raw.into(),
            timestamp: None,
        }
    }

    fn grade(bank: &QuestionBank, item: &str, raw: &str) -> GradeResult {
        grade_all(bank, &[rec(item, raw)]).unwrap().remove(0)
    }

    #[test]
    fn p3_value_versus_equation() {
        let b = bank(corpus::INDUCTION);
        let id = "sum-of-squares/T2/instantiate/P(3)";
        let g = grade(&b, id, "3*(3+1)*(2*3+1)/6");
        assert_eq!(g.score, Some(0.0));
        assert_eq!(g.answer_class, VALUE_ONLY);
        assert!(g.flags.contains(&FLAG_EQUATION_VALUE.to_string()));
        let g = grade(&b, id, "1+4+9 = 3*(3+1)*(2*3+1)/6");
        assert_eq!(g.score, Some(1.0));
        let g = grade(&b, id, "1+4+9 = 15");
        assert_eq!(g.answer_class, INCORRECT);
        let g = grade(&b, id, "1+4+");
        assert_eq!(g.answer_class, INVALID);
        assert!(g.flags.contains(&FLAG_UNPARSEABLE.to_string()));
    }

    #[test]
    fn line_answers() {
        let b = bank(corpus::FALLACY);
        let id = "minus-one-is-one/T11/error-line";
        assert_eq!(grade(&b, id, "3").score, Some(1.0));
        assert_eq!(grade(&b, id, "Line 3").answer.as_deref(), Some("line 3"));
        assert_eq!(grade(&b, id, "4").answer_class, "line 4");
        assert_eq!(grade(&b, id, "9").answer_class, INVALID);
        assert_eq!(grade(&b, id, "  ").answer_class, NO_RESPONSE);
        assert!(matches!(
            grade_all(&b, &[rec("nope", "1")]),
            Err(GradeError::UnknownItem(_))
        ));
    }

    #[test]
    fn feedback_registration() {
        let b = bank(corpus::FALLACY);
        let id = "minus-one-is-one/T11/error-line";
        let b2 = register_feedback(&b, id, "line 4", "look earlier").unwrap();
        assert_eq!(b2.version, b.version + 1);
        assert_eq!(
            grade(&b2, id, "4").feedback.as_deref(),
            Some("look earlier")
        );
        let b3 = register_feedback(&b2, id, "line 4", "newer").unwrap();
        assert_eq!(grade(&b3, id, "4").feedback.as_deref(), Some("newer"));
        assert_eq!(b3.version, b.version + 2);
        assert!(register_feedback(&b, "x", "c", "t").is_err());
    }

    #[test]
    fn derivation_chain() {
        let b = bank(corpus::INDUCTION);
        let id = "sum-of-squares/T6/induction-step";
        let good =
            "n*(n+1)*(2*n+1)/6 + (n+1)^2\n(n+1)*(2*n^2+7*n+6)/6\n(n+1)*((n+1)+1)*(2*(n+1)+1)/6";
        assert_eq!(grade(&b, id, good).score, Some(1.0));
        let g = grade(&b, id, "(n+1)*(2*n^2+7*n+6)/6; (n+1)*(n+2)*(2*n+3)/6");
        assert_eq!(g.score, Some(0.5));
        assert!(g.flags.contains(&"form-mismatch".to_string()));
        let g = grade(
            &b,
            id,
            "(n+1)*(2*n^2+8*n+6)/6; (n+1)*((n+1)+1)*(2*(n+1)+1)/6",
        );
        assert_eq!(g.answer_class, PARTIAL);
        assert!(g.flags.iter().any(|f| f == "broken-pair: start -> line 1"));
    }

    #[test]
    fn jsonl_raw_forms() {
        let text = "{\"student_id\":\"a\",\"item_id\":\"i\",\"raw_answer\":3}\n\n{\"student_id\":\"b\",\"item_id\":\"i\",\"raw_answer\":[\"A\",\"D\"]}\n";
        let recs = read_jsonl(text.as_bytes()).unwrap();
        assert_eq!(recs[0].raw_answer, "3");
        assert_eq!(recs[1].raw_answer, "A\nD");
        let csv = "student_id,item_id,raw_answer,timestamp\ns,i,\"A,D\",2020-01-01\n";
        let recs = read_csv(csv.as_bytes()).unwrap();
        assert_eq!(recs[0].raw_answer, "A,D");
        assert_eq!(recs[0].timestamp.as_deref(), Some("2020-01-01"));
    }
}
