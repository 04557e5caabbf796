//! Per-proof generation settings, read from a TOML file next to the proof.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combos::{
    combination_table, parse_signature, CombinationTable, ComboError, ImpossibilityRule, Witness,
};
use crate::expr::Expr;
use crate::questions::Template;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid combination table: {0}")]
    Table(#[from] ComboError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    #[serde(default)]
    pub seed: u64,
    /// Shuffle MCQ options. Off keeps the authored order and letters.
    #[serde(default = "yes")]
    pub shuffle: bool,
    /// Templates to run; empty means all.
    #[serde(default)]
    pub templates: BTreeSet<Template>,
    #[serde(default)]
    pub disabled: BTreeSet<Template>,
    /// Checklist items in the order they are visited.
    #[serde(default = "default_order")]
    pub checklist_order: Vec<u8>,
    /// Value substituted for the bound variable in instantiation items.
    #[serde(default = "default_instantiate")]
    pub instantiate_at: i64,
    /// Statements for which a free-text warrant prompt is generated.
    #[serde(default)]
    pub warrant_prompts: Vec<usize>,
    #[serde(default)]
    pub derivation: DerivationWeights,
    #[serde(default)]
    pub definition_mcq: Vec<DefinitionMcq>,
    #[serde(default)]
    pub table: Option<TableConfig>,
    #[serde(default)]
    pub transfer: Vec<String>,
}

fn yes() -> bool {
    true
}

fn default_order() -> Vec<u8> {
    (1..=8).collect()
}

fn default_instantiate() -> i64 {
    3
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            shuffle: true,
            templates: BTreeSet::new(),
            disabled: BTreeSet::new(),
            checklist_order: default_order(),
            instantiate_at: default_instantiate(),
            warrant_prompts: Vec::new(),
            derivation: DerivationWeights::default(),
            definition_mcq: Vec::new(),
            table: None,
            transfer: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationWeights {
    pub steps: f64,
    pub form: f64,
}

impl Default for DerivationWeights {
    fn default() -> Self {
        DerivationWeights {
            steps: 0.5,
            form: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McqOptionConfig {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub key: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefinitionMcq {
    /// Definition id in the proof.
    pub definition: String,
    pub stem: String,
    pub options: Vec<McqOptionConfig>,
    /// Feedback keyed by answer class.
    #[serde(default)]
    pub feedback: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    pub signature: String,
    pub text: String,
    #[serde(default)]
    pub expr: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    /// Hypotheses first, conclusion last.
    pub properties: Vec<String>,
    /// Column headings for the markdown table.
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    /// How a property reads in a sentence, e.g. "converges" ->
    /// "converges" / "does not converge".
    #[serde(default)]
    pub phrases: Vec<PropertyPhrase>,
    /// What the examples are, e.g. "sequence".
    #[serde(default = "default_noun")]
    pub noun: String,
    #[serde(default)]
    pub rules: Vec<ImpossibilityRule>,
    #[serde(default)]
    pub witnesses: Vec<WitnessConfig>,
    #[serde(default)]
    pub strict: bool,
}

fn default_noun() -> String {
    "example".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyPhrase {
    pub positive: String,
    pub negative: String,
}

impl TableConfig {
    pub fn build(&self) -> Result<CombinationTable, ConfigError> {
        let mut witnesses = BTreeMap::new();
        for w in &self.witnesses {
            let sig = parse_signature(&w.signature)?;
            if sig.len() != self.properties.len() {
                return Err(ConfigError::Invalid(format!(
                    "witness signature `{}` does not have {} positions",
                    w.signature,
                    self.properties.len()
                )));
            }
            let expr = match &w.expr {
                Some(src) => Some(
                    src.parse::<Expr>()
                        .map_err(|e| ConfigError::Invalid(format!("witness `{}`: {e}", w.text)))?,
                ),
                None => None,
            };
            if witnesses
                .insert(
                    sig,
                    Witness {
                        text: w.text.clone(),
                        expr,
                    },
                )
                .is_some()
            {
                return Err(ConfigError::Invalid(format!(
                    "duplicate witness for `{}`",
                    w.signature
                )));
            }
        }
        Ok(combination_table(
            &self.properties,
            &self.rules,
            &witnesses,
            self.strict,
        )?)
    }

    /// "is increasing" / "is not increasing" style phrase for property `i`.
    pub fn phrase(&self, i: usize, value: bool) -> String {
        match self.phrases.get(i) {
            Some(p) if value => p.positive.clone(),
            Some(p) => p.negative.clone(),
            None if value => format!("is {}", self.properties[i]),
            None => format!("is not {}", self.properties[i]),
        }
    }
}

impl GenConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: GenConfig = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), ConfigError> {
        if let Some(bad) = self.checklist_order.iter().find(|i| !(1..=8).contains(*i)) {
            return Err(ConfigError::Invalid(format!(
                "checklist item {bad} does not exist"
            )));
        }
        let w = self.derivation;
        if w.steps < 0.0 || w.form < 0.0 || (w.steps + w.form - 1.0).abs() > 1e-9 {
            return Err(ConfigError::Invalid(
                "derivation weights must be non-negative and sum to 1".into(),
            ));
        }
        for mcq in &self.definition_mcq {
            if !mcq.options.iter().any(|o| o.key) {
                return Err(ConfigError::Invalid(format!(
                    "definition question for `{}` has no key option",
                    mcq.definition
                )));
            }
            let ids: BTreeSet<&str> = mcq.options.iter().map(|o| o.id.as_str()).collect();
            if ids.len() != mcq.options.len() {
                return Err(ConfigError::Invalid(format!(
                    "definition question for `{}` repeats an option id",
                    mcq.definition
                )));
            }
        }
        if let Some(t) = &self.table {
            if !t.phrases.is_empty() && t.phrases.len() != t.properties.len() {
                return Err(ConfigError::Invalid(
                    "table phrases must match the properties".into(),
                ));
            }
            if let Some(l) = &t.labels {
                if l.len() != t.properties.len() {
                    return Err(ConfigError::Invalid(
                        "table labels must match the properties".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn template_enabled(&self, t: Template) -> bool {
        (self.templates.is_empty() || self.templates.contains(&t)) && !self.disabled.contains(&t)
    }
}
