//! Faded worked examples: a worked solution with progressively more steps
//! left for the learner.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse_answer, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionStep {
    pub formula: Formula,
    #[serde(default)]
    pub prose: String,
}

/// A problem and its worked solution, as read from a TOML solution file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub problem: String,
    pub steps: Vec<SolutionStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FadeStrategy {
    /// Level k hides the last k steps.
    Backward,
    /// Hidden step indices (0-based) for levels 1, 2, ...
    Custom(Vec<BTreeSet<usize>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FadedExample {
    pub problem: String,
    pub steps: Vec<SolutionStep>,
    pub level: usize,
    /// 0-based indices into `steps`.
    pub hidden: BTreeSet<usize>,
    pub strategy: FadeStrategy,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FadeError {
    #[error("cannot fade {levels} levels from a solution with {steps} steps")]
    TooManyLevels { levels: usize, steps: usize },
    #[error(
        "level {level} does not hide a strict superset of the steps hidden at the previous level"
    )]
    MonotonicityViolation { level: usize },
    #[error("custom strategy gives {given} levels, expected {expected}")]
    LevelCount { given: usize, expected: usize },
    #[error("step index {index} is out of range")]
    StepOutOfRange { index: usize },
    #[error("invalid solution file: {0}")]
    Solution(String),
}

/// Levels 0..=`levels`; level 0 is the fully worked example.
pub fn fade(
    solution: &Solution,
    levels: usize,
    strategy: &FadeStrategy,
) -> Result<Vec<FadedExample>, FadeError> {
    let n = solution.steps.len();
    if levels > n {
        return Err(FadeError::TooManyLevels { levels, steps: n });
    }
    let mut hidden_sets = vec![BTreeSet::new()];
    match strategy {
        FadeStrategy::Backward => {
            for k in 1..=levels {
                hidden_sets.push((n - k..n).collect());
            }
        }
        FadeStrategy::Custom(sets) => {
            if sets.len() != levels {
                return Err(FadeError::LevelCount {
                    given: sets.len(),
                    expected: levels,
                });
            }
            for (i, set) in sets.iter().enumerate() {
                if let Some(&index) = set.iter().find(|&&i| i >= n) {
                    return Err(FadeError::StepOutOfRange { index });
                }
                let prev = &hidden_sets[i];
                if !(set.is_superset(prev) && set.len() > prev.len()) {
                    return Err(FadeError::MonotonicityViolation { level: i + 1 });
                }
                hidden_sets.push(set.clone());
            }
        }
    }
    Ok(hidden_sets
        .into_iter()
        .enumerate()
        .map(|(level, hidden)| FadedExample {
            problem: solution.problem.clone(),
            steps: solution.steps.clone(),
            level,
            hidden,
            strategy: strategy.clone(),
        })
        .collect())
}

#[derive(Deserialize)]
struct RawSolution {
    problem: String,
    steps: Vec<RawStep>,
}

#[derive(Deserialize)]
struct RawStep {
    formula: String,
    #[serde(default)]
    prose: String,
}

impl Solution {
    /// Reads `problem = "..."` and `[[steps]] formula = "...", prose = "..."`.
    pub fn from_toml(text: &str) -> Result<Self, FadeError> {
        let raw: RawSolution =
            toml::from_str(text).map_err(|e| FadeError::Solution(e.to_string()))?;
        let steps = raw
            .steps
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                let formula = parse_answer(&s.formula)
                    .map_err(|e| FadeError::Solution(format!("step {}: {e}", i + 1)))?;
                Ok(SolutionStep {
                    formula,
                    prose: s.prose,
                })
            })
            .collect::<Result<Vec<_>, FadeError>>()?;
        Ok(Solution {
            problem: raw.problem,
            steps,
        })
    }
}

impl FadedExample {
    /// Steps in order; hidden ones are replaced by a numbered blank.
    pub fn to_markdown(&self) -> String {
        let mut out = format!("### Level {}\n\n{}\n\n", self.level, self.problem);
        for (i, s) in self.steps.iter().enumerate() {
            if self.hidden.contains(&i) {
                out.push_str(&format!("{}. _(step {} to complete)_\n", i + 1, i + 1));
            } else if s.prose.is_empty() {
                out.push_str(&format!("{}. `{}`\n", i + 1, s.formula));
            } else {
                out.push_str(&format!("{}. `{}`  ({})\n", i + 1, s.formula, s.prose));
            }
        }
        out
    }
}
