//! Example combination tables for general theorems: every truth assignment
//! to the hypotheses and conclusion, each either exemplified by a witness or
//! ruled out by a theorem.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComboError {
    #[error("a combination table needs at least one property")]
    NoProperties,
    #[error("rule `{rule}` has {found} positions but there are {expected} properties")]
    PatternLength {
        rule: String,
        expected: usize,
        found: usize,
    },
    #[error("signature {signature} is matched by rules with different justifications: {}", .rules.join(", "))]
    ConflictingRules {
        signature: String,
        rules: Vec<String>,
    },
    #[error("property `{0}` is missing")]
    MissingProperty(String),
    #[error("invalid pattern `{0}`: use T, F and *")]
    InvalidPattern(String),
}

/// Truth vector rendered as `T`/`F` letters.
pub fn signature_string(sig: &[bool]) -> String {
    sig.iter().map(|b| if *b { 'T' } else { 'F' }).collect()
}

pub fn parse_signature(s: &str) -> Result<Vec<bool>, ComboError> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            'T' => Ok(true),
            'F' => Ok(false),
            _ => Err(ComboError::InvalidPattern(s.to_string())),
        })
        .collect()
}

/// Booleans with `*` wildcards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern(pub Vec<Option<bool>>);

impl Pattern {
    pub fn matches(&self, sig: &[bool]) -> bool {
        self.0.len() == sig.len()
            && self
                .0
                .iter()
                .zip(sig)
                .all(|(p, s)| p.is_none_or(|p| p == *s))
    }
}

impl FromStr for Pattern {
    type Err = ComboError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                'T' => Ok(Some(true)),
                'F' => Ok(Some(false)),
                '*' => Ok(None),
                _ => Err(ComboError::InvalidPattern(s.to_string())),
            })
            .collect::<Result<_, _>>()
            .map(Pattern)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            f.write_str(match p {
                Some(true) => "T",
                Some(false) => "F",
                None => "*",
            })?;
        }
        Ok(())
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RuleBasis {
    /// The theorem being studied forbids the combination.
    TheoremUnderStudy,
    /// A separate, named result forbids it.
    ExternalTheorem { statement: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpossibilityRule {
    pub id: String,
    pub pattern: Pattern,
    pub basis: RuleBasis,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<Expr>,
}

impl Witness {
    pub fn text(text: &str) -> Self {
        Witness {
            text: text.to_string(),
            expr: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EntryStatus {
    ExemplifiesTheorem { witness: Option<Witness> },
    Impossible { rule: String },
    Example { witness: Witness },
    MissingWitness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleEntry {
    #[serde(serialize_with = "ser_sig", deserialize_with = "de_sig")]
    pub signature: Vec<bool>,
    #[serde(flatten)]
    pub status: EntryStatus,
}

fn ser_sig<S: Serializer>(sig: &[bool], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&signature_string(sig))
}

fn de_sig<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
    parse_signature(&String::deserialize(d)?).map_err(serde::de::Error::custom)
}

impl ExampleEntry {
    pub fn witness(&self) -> Option<&Witness> {
        match &self.status {
            EntryStatus::ExemplifiesTheorem { witness } => witness.as_ref(),
            EntryStatus::Example { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn is_impossible(&self) -> bool {
        matches!(self.status, EntryStatus::Impossible { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationTable {
    /// Hypotheses first, conclusion last.
    pub properties: Vec<String>,
    pub rules: Vec<ImpossibilityRule>,
    pub entries: Vec<ExampleEntry>,
}

/// All 2^n signatures, all-true first, last position flipping fastest.
pub fn signatures(n: usize) -> Vec<Vec<bool>> {
    let total = 1usize << n;
    (0..total)
        .map(|i| (0..n).map(|bit| (i >> (n - 1 - bit)) & 1 == 0).collect())
        .collect()
}

pub fn combination_table(
    properties: &[String],
    rules: &[ImpossibilityRule],
    witnesses: &BTreeMap<Vec<bool>, Witness>,
    strict: bool,
) -> Result<CombinationTable, ComboError> {
    let n = properties.len();
    if n == 0 {
        return Err(ComboError::NoProperties);
    }
    for r in rules {
        if r.pattern.0.len() != n {
            return Err(ComboError::PatternLength {
                rule: r.id.clone(),
                expected: n,
                found: r.pattern.0.len(),
            });
        }
    }
    let mut entries = Vec::with_capacity(1 << n);
    for sig in signatures(n) {
        let matching: Vec<&ImpossibilityRule> =
            rules.iter().filter(|r| r.pattern.matches(&sig)).collect();
        if strict {
            if let Some(first) = matching.first() {
                if matching.iter().any(|r| r.basis != first.basis) {
                    return Err(ComboError::ConflictingRules {
                        signature: signature_string(&sig),
                        rules: matching.iter().map(|r| r.id.clone()).collect(),
                    });
                }
            }
        }
        let witness = witnesses.get(&sig).cloned();
        let status = if let Some(rule) = matching.first() {
            EntryStatus::Impossible {
                rule: rule.id.clone(),
            }
        } else if sig.iter().all(|b| *b) {
            EntryStatus::ExemplifiesTheorem { witness }
        } else {
            match witness {
                Some(witness) => EntryStatus::Example { witness },
                None => EntryStatus::MissingWitness,
            }
        };
        entries.push(ExampleEntry {
            signature: sig,
            status,
        });
    }
    Ok(CombinationTable {
        properties: properties.to_vec(),
        rules: rules.to_vec(),
        entries,
    })
}

impl CombinationTable {
    pub fn rule(&self, id: &str) -> Option<&ImpossibilityRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Letters `A`, `B`, ... for external rules, in registration order.
    pub fn note_letter(&self, rule_id: &str) -> Option<char> {
        self.rules
            .iter()
            .filter(|r| matches!(r.basis, RuleBasis::ExternalTheorem { .. }))
            .position(|r| r.id == rule_id)
            .map(|i| (b'A' + i as u8) as char)
    }

    pub fn entry(&self, sig: &[bool]) -> Option<&ExampleEntry> {
        self.entries.iter().find(|e| e.signature == sig)
    }

    /// Witnessed rows whose conclusion holds but whose hypotheses do not all
    /// hold: counterexamples to the converse.
    pub fn converse_counterexamples(&self) -> Vec<&ExampleEntry> {
        self.entries
            .iter()
            .filter(|e| {
                let (hyps, concl) = e.signature.split_at(e.signature.len() - 1);
                concl[0]
                    && !hyps.iter().all(|b| *b)
                    && matches!(e.status, EntryStatus::Example { .. })
            })
            .collect()
    }

    pub fn cell_text(&self, entry: &ExampleEntry) -> String {
        match &entry.status {
            EntryStatus::ExemplifiesTheorem { witness: Some(w) } => {
                format!("Exemplify theorem: {}", w.text)
            }
            EntryStatus::ExemplifiesTheorem { witness: None } => "Exemplify theorem".to_string(),
            EntryStatus::Impossible { rule } => match self.rule(rule).map(|r| &r.basis) {
                Some(RuleBasis::TheoremUnderStudy) => "Counter example to theorem!".to_string(),
                _ => match self.note_letter(rule) {
                    Some(letter) => format!("Note {letter}."),
                    None => format!("Impossible ({rule})."),
                },
            },
            EntryStatus::Example { witness } => witness.text.clone(),
            EntryStatus::MissingWitness => "(missing witness)".to_string(),
        }
    }

    /// Markdown table, one column per property plus an example column.
    /// `labels` overrides the column headings of the properties.
    pub fn to_markdown(&self, labels: Option<&[String]>) -> String {
        let mut out = String::from("|");
        for (i, p) in self.properties.iter().enumerate() {
            let label = labels
                .and_then(|l| l.get(i))
                .cloned()
                .unwrap_or_else(|| capitalize(p));
            out.push_str(&format!(" {label} ? |"));
        }
        out.push_str(" Example |\n|");
        for _ in &self.properties {
            out.push_str(" :-: |");
        }
        out.push_str(" :-- |\n");
        for e in &self.entries {
            out.push('|');
            for b in &e.signature {
                out.push_str(if *b { " T |" } else { " F |" });
            }
            out.push_str(&format!(" {} |\n", self.cell_text(e)));
        }
        out
    }

    /// `Note A: ...` lines explaining the external rules.
    pub fn notes(&self) -> Vec<String> {
        self.rules
            .iter()
            .filter_map(|r| match &r.basis {
                RuleBasis::ExternalTheorem { statement } => {
                    Some(format!("Note {}: {statement}.", self.note_letter(&r.id)?))
                }
                RuleBasis::TheoremUnderStudy => None,
            })
            .collect()
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// The row for an example with the given properties.
pub fn classify_example<'t>(
    witness_properties: &BTreeMap<String, bool>,
    table: &'t CombinationTable,
) -> Result<&'t ExampleEntry, ComboError> {
    let sig = table
        .properties
        .iter()
        .map(|p| {
            witness_properties
                .get(p)
                .copied()
                .ok_or_else(|| ComboError::MissingProperty(p.clone()))
        })
        .collect::<Result<Vec<bool>, _>>()?;
    Ok(table.entry(&sig).expect("every signature has a row"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_order() {
        let sigs: Vec<String> = signatures(2).iter().map(|s| signature_string(s)).collect();
        assert_eq!(sigs, ["TT", "TF", "FT", "FF"]);
    }

    #[test]
    fn single_property_without_witnesses() {
        let t = combination_table(&["p".to_string()], &[], &BTreeMap::new(), true).unwrap();
        assert_eq!(t.entries.len(), 2);
        assert_eq!(
            t.entries[0].status,
            EntryStatus::ExemplifiesTheorem { witness: None }
        );
        assert_eq!(t.entries[1].status, EntryStatus::MissingWitness);
    }

    #[test]
    fn wildcard_rule_saturates() {
        let props: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let rule = ImpossibilityRule {
            id: "all".into(),
            pattern: "***".parse().unwrap(),
            basis: RuleBasis::TheoremUnderStudy,
        };
        let t = combination_table(&props, &[rule], &BTreeMap::new(), true).unwrap();
        assert!(t.entries.iter().all(ExampleEntry::is_impossible));
    }

    #[test]
    fn strict_mode_reports_conflicts() {
        let props: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let rules = vec![
            ImpossibilityRule {
                id: "r1".into(),
                pattern: "T*".parse().unwrap(),
                basis: RuleBasis::TheoremUnderStudy,
            },
            ImpossibilityRule {
                id: "r2".into(),
                pattern: "*F".parse().unwrap(),
                basis: RuleBasis::ExternalTheorem {
                    statement: "x".into(),
                },
            },
        ];
        assert!(matches!(
            combination_table(&props, &rules, &BTreeMap::new(), true),
            Err(ComboError::ConflictingRules { .. })
        ));
        let t = combination_table(&props, &rules, &BTreeMap::new(), false).unwrap();
        assert_eq!(
            t.entries[1].status,
            EntryStatus::Impossible { rule: "r1".into() }
        );
    }

    #[test]
    fn pattern_length_is_checked() {
        let rule = ImpossibilityRule {
            id: "r".into(),
            pattern: "TT".parse().unwrap(),
            basis: RuleBasis::TheoremUnderStudy,
        };
        assert!(matches!(
            combination_table(&["a".to_string()], &[rule], &BTreeMap::new(), false),
            Err(ComboError::PatternLength { .. })
        ));
    }
}
