//! Item statistics from graded responses: facility, answer frequencies,
//! option tallies and distractor rankings.
//!
//! Every count is reported against two bases: everyone who saw the item
//! (attempts) and everyone who gave a non-empty answer (respondents).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::grader::{GradeResult, CORRECT, INVALID, NO_RESPONSE, UNGRADED};
use crate::questions::{QuestionBank, ResponseType};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error("grades come from several bank versions: {0:?}")]
    MixedBankVersions(Vec<u64>),
}

/// A percentage in hundredths, rounded half-up: `Pct(7064)` is 70.64%.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pct(pub u64);

impl Pct {
    /// `count / total` as a percentage. A zero total gives 0.
    pub fn of(count: u64, total: u64) -> Pct {
        if total == 0 {
            return Pct(0);
        }
        let num = count as u128 * 10_000 * 2 + total as u128;
        Pct((num / (2 * total as u128)) as u64)
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Pct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

impl Serialize for Pct {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Pct {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if !(0.0..=100.0).contains(&v) {
            return Err(serde::de::Error::custom(format!(
                "percentage {v} out of range"
            )));
        }
        Ok(Pct((v * 100.0).round() as u64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Share {
    pub count: u64,
    pub of_attempts: Pct,
    pub of_respondents: Pct,
}

impl Share {
    fn new(count: u64, attempts: u64, respondents: u64) -> Share {
        Share {
            count,
            of_attempts: Pct::of(count, attempts),
            of_respondents: Pct::of(count, respondents),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerCount {
    /// Normalized answer, or `(invalid)`.
    pub answer: String,
    pub class: String,
    pub share: Share,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionTally {
    pub option: String,
    pub selected: Share,
    pub not_selected: Share,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemStats {
    pub item_id: String,
    pub bank_version: u64,
    pub response_type: ResponseType,
    pub attempts: u64,
    pub respondents: u64,
    pub blank: Share,
    pub correct: Share,
    /// Readable answers that are wrong.
    pub incorrect: Share,
    pub invalid: Share,
    pub ungraded: u64,
    /// Mean score over respondents, for partially credited items.
    pub mean_score: Option<f64>,
    /// Per distinct answer, most frequent first; sums to `respondents`.
    pub answers: Vec<AnswerCount>,
    pub classes: BTreeMap<String, u64>,
    /// MCQ only: option choices over all respondents. An unreadable answer
    /// selects nothing.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<OptionTally>,
    /// MCQ only: option choices among readable wrong answers.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub incorrect_options: Vec<OptionTally>,
}

/// Latest record per (item, student); ties broken by content so the result
/// does not depend on input order.
fn dedupe(grades: &[GradeResult]) -> BTreeMap<(&str, &str), &GradeResult> {
    let mut out: BTreeMap<(&str, &str), &GradeResult> = BTreeMap::new();
    for g in grades {
        let k = (g.item_id.as_str(), g.student_id.as_str());
        let rank = |g: &GradeResult| {
            (
                g.timestamp.clone(),
                g.is_respondent(),
                g.answer_class.clone(),
                g.answer.clone(),
            )
        };
        match out.get(&k) {
            Some(prev) if rank(prev) >= rank(g) => {}
            _ => {
                out.insert(k, g);
            }
        }
    }
    out
}

/// Statistics per item, sorted by item id. `roster` lists every student who
/// saw the items; without it, the students present in the grades are the
/// attempts. `bank` supplies the option ids of MCQ items so that options
/// nobody chose still appear.
pub fn compute_stats(
    grades: &[GradeResult],
    roster: Option<&BTreeSet<String>>,
    bank: Option<&QuestionBank>,
) -> Result<Vec<ItemStats>, AnalyticsError> {
    let versions: BTreeSet<u64> = grades.iter().map(|g| g.bank_version).collect();
    if versions.len() > 1 {
        return Err(AnalyticsError::MixedBankVersions(
            versions.into_iter().collect(),
        ));
    }
    let version = versions.into_iter().next().unwrap_or(0);
    let mut by_item: BTreeMap<&str, Vec<&GradeResult>> = BTreeMap::new();
    for ((item, _), g) in dedupe(grades) {
        by_item.entry(item).or_default().push(g);
    }
    let mut out = Vec::new();
    for (item_id, gs) in by_item {
        let students: BTreeSet<&str> = gs.iter().map(|g| g.student_id.as_str()).collect();
        let attempts = match roster {
            Some(r) => r
                .iter()
                .map(String::as_str)
                .chain(students.iter().copied())
                .collect::<BTreeSet<_>>()
                .len(),
            None => students.len(),
        } as u64;
        let resp: Vec<&GradeResult> = gs.iter().copied().filter(|g| g.is_respondent()).collect();
        let respondents = resp.len() as u64;
        let share = |n: u64| Share::new(n, attempts, respondents);
        let count = |f: &dyn Fn(&GradeResult) -> bool| resp.iter().filter(|g| f(g)).count() as u64;

        let correct = count(&|g| g.answer_class == CORRECT);
        let invalid = count(&|g| g.answer_class == INVALID);
        let ungraded = count(&|g| g.answer_class == UNGRADED);
        let incorrect = respondents - correct - invalid - ungraded;

        let mut answers: BTreeMap<(String, String), u64> = BTreeMap::new();
        let mut classes: BTreeMap<String, u64> = BTreeMap::new();
        for g in &resp {
            let a = g.answer.clone().unwrap_or_else(|| "(invalid)".to_string());
            *answers.entry((a, g.answer_class.clone())).or_default() += 1;
            *classes.entry(g.answer_class.clone()).or_default() += 1;
        }
        let mut answers: Vec<AnswerCount> = answers
            .into_iter()
            .map(|((answer, class), n)| AnswerCount {
                answer,
                class,
                share: share(n),
            })
            .collect();
        answers.sort_by(|a, b| {
            b.share
                .count
                .cmp(&a.share.count)
                .then_with(|| a.answer.cmp(&b.answer))
        });

        let rtype = gs[0].response_type;
        let scores: Vec<f64> = resp.iter().filter_map(|g| g.score).collect();
        let mean_score = (rtype == ResponseType::AlgebraicDerivation && !scores.is_empty())
            .then(|| scores.iter().sum::<f64>() / scores.len() as f64);

        let (mut options, mut incorrect_options) = (Vec::new(), Vec::new());
        if rtype.is_mcq() {
            let mut ids: BTreeSet<String> = resp
                .iter()
                .flat_map(|g| g.selected.iter().cloned())
                .collect();
            if let Some(item) = bank.and_then(|b| b.item(item_id)) {
                ids.extend(item.options.iter().map(|o| o.id.clone()));
            }
            let wrong: Vec<&&GradeResult> = resp
                .iter()
                .filter(|g| g.answer_class != CORRECT && g.answer_class != INVALID)
                .collect();
            for id in &ids {
                let sel = resp.iter().filter(|g| g.selected.contains(id)).count() as u64;
                options.push(OptionTally {
                    option: id.clone(),
                    selected: share(sel),
                    not_selected: share(respondents - sel),
                });
                if rtype == ResponseType::McqMulti {
                    let sel = wrong.iter().filter(|g| g.selected.contains(id)).count() as u64;
                    incorrect_options.push(OptionTally {
                        option: id.clone(),
                        selected: share(sel),
                        not_selected: share(wrong.len() as u64 - sel),
                    });
                }
            }
        }

        out.push(ItemStats {
            item_id: item_id.to_string(),
            bank_version: version,
            response_type: rtype,
            attempts,
            respondents,
            blank: share(attempts - respondents),
            correct: share(correct),
            incorrect: share(incorrect),
            invalid: share(invalid),
            ungraded,
            mean_score,
            answers,
            classes,
            options,
            incorrect_options,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distractor {
    pub class: String,
    pub share: Share,
    /// Whether the bank has feedback written for this class.
    pub has_feedback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistractorList {
    pub item_id: String,
    pub correct: Share,
    pub distractors: Vec<Distractor>,
}

/// Wrong answer classes per item, most frequent first. Blank, unreadable
/// and ungraded answers are left out.
pub fn distractor_report(stats: &[ItemStats], bank: Option<&QuestionBank>) -> Vec<DistractorList> {
    stats
        .iter()
        .map(|s| {
            let item = bank.and_then(|b| b.item(&s.item_id));
            let mut distractors: Vec<Distractor> = s
                .classes
                .iter()
                .filter(|(c, _)| ![CORRECT, INVALID, NO_RESPONSE, UNGRADED].contains(&c.as_str()))
                .map(|(c, n)| Distractor {
                    class: c.clone(),
                    share: Share::new(*n, s.attempts, s.respondents),
                    has_feedback: item.is_some_and(|i| i.feedback.contains_key(c)),
                })
                .collect();
            distractors.sort_by(|a, b| {
                b.share
                    .count
                    .cmp(&a.share.count)
                    .then_with(|| a.class.cmp(&b.class))
            });
            DistractorList {
                item_id: s.item_id.clone(),
                correct: s.correct,
                distractors,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub items: Vec<ItemStats>,
    pub distractors: Vec<DistractorList>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Item statistics\n");
        for s in &self.items {
            out.push_str(&format!(
                "\n## {}\n\n{} attempts, {} respondents, {} blank. Correct: {} ({}% of attempts, {}% of respondents).\n",
                s.item_id, s.attempts, s.respondents, s.blank.count, s.correct.count, s.correct.of_attempts, s.correct.of_respondents
            ));
            if let Some(m) = s.mean_score {
                out.push_str(&format!("Mean score: {m:.3}.\n"));
            }
            out.push_str("\n| Answer | Class | Count | % of attempts | % of respondents |\n| :-- | :-- | --: | --: | --: |\n");
            for a in &s.answers {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} |\n",
                    a.answer.replace('|', "\\|"),
                    a.class,
                    a.share.count,
                    a.share.of_attempts,
                    a.share.of_respondents
                ));
            }
            for (title, tallies) in [
                ("all respondents", &s.options),
                ("wrong answers", &s.incorrect_options),
            ] {
                if tallies.is_empty() {
                    continue;
                }
                out.push_str(&format!(
                    "\nOptions, {title}:\n\n| Option | Selected | % of attempts | Not selected | % of attempts |\n| :-: | --: | --: | --: | --: |\n"
                ));
                for t in tallies {
                    out.push_str(&format!(
                        "| {} | {} | {} | {} | {} |\n",
                        t.option,
                        t.selected.count,
                        t.selected.of_attempts,
                        t.not_selected.count,
                        t.not_selected.of_attempts
                    ));
                }
            }
            if let Some(d) = self.distractors.iter().find(|d| d.item_id == s.item_id) {
                if !d.distractors.is_empty() {
                    out.push_str("\nDistractors:\n\n");
                    for x in &d.distractors {
                        let fb = if x.has_feedback {
                            "has feedback"
                        } else {
                            "no feedback yet"
                        };
                        out.push_str(&format!(
                            "- {}: {} ({}% of respondents), {fb}\n",
                            x.class, x.share.count, x.share.of_respondents
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Stats and distractor report together.
pub fn analyze(
    grades: &[GradeResult],
    roster: Option<&BTreeSet<String>>,
    bank: Option<&QuestionBank>,
) -> Result<Report, AnalyticsError> {
    let items = compute_stats(grades, roster, bank)?;
    let distractors = distractor_report(&items, bank);
    Ok(Report { items, distractors })
}
