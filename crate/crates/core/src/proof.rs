//! Annotated proofs: theorem, definitions, numbered statements with warrant
//! and backing annotations, a recursive structure tree and proof-gadgets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Equation, Formula, PowerRule};
use crate::logic::LogicStatement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremKind {
    Specific,
    General,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis {
    pub id: String,
    pub label: String,
    /// Id of the definition this hypothesis invokes.
    pub definition: Option<String>,
    /// Free-form author note, e.g. whether the hypothesis is needed for the
    /// truth of the theorem or only to make a gadget work.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conclusion {
    pub id: String,
    pub label: String,
    pub definition: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem {
    pub id: String,
    pub kind: TheoremKind,
    pub text: String,
    pub statement: Option<LogicStatement>,
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion: Option<Conclusion>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub id: String,
    pub name: String,
    pub formal: String,
    pub notation: Vec<String>,
    pub statement: Option<LogicStatement>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExternalKind {
    Theorem,
    Axiom,
    Rule,
}

/// A named result the proof appeals to: a theorem or axiom used as backing,
/// or an algebraic rule used as a warrant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalResult {
    pub id: String,
    pub name: String,
    pub kind: ExternalKind,
    pub statement: String,
    /// `base^k = replacement`, registered with the equivalence checker.
    pub rewrite: Option<Equation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Warrant {
    Text(String),
    /// Id of an [`ExternalResult`].
    Rule(String),
}

/// Justification removed from view by `omit_warrant`, kept as the key.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Justification {
    pub warrant: Option<Warrant>,
    pub backing: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Assumption,
    Goal,
    InductionHypothesis,
    InductionHypothesisUsed,
    InductionBase,
    InductionStep,
    InductionConclusion,
    CaseOpening,
    ContradictionAssumption,
    ContradictionReached,
    Conclusion,
    GadgetConstruction,
    IfDirection,
    OnlyIfDirection,
    Other(String),
}

const ROLE_NAMES: &[(&str, Role)] = &[
    ("assumption", Role::Assumption),
    ("goal", Role::Goal),
    ("induction-hypothesis", Role::InductionHypothesis),
    ("induction-hypothesis-used", Role::InductionHypothesisUsed),
    ("induction-base", Role::InductionBase),
    ("induction-step", Role::InductionStep),
    ("induction-conclusion", Role::InductionConclusion),
    ("case-opening", Role::CaseOpening),
    ("contradiction-assumption", Role::ContradictionAssumption),
    ("contradiction-reached", Role::ContradictionReached),
    ("conclusion", Role::Conclusion),
    ("gadget-construction", Role::GadgetConstruction),
    ("if-direction", Role::IfDirection),
    ("only-if-direction", Role::OnlyIfDirection),
];

impl Role {
    pub fn name(&self) -> &str {
        match self {
            Role::Other(s) => s,
            known => ROLE_NAMES
                .iter()
                .find(|(_, r)| r == known)
                .map(|(n, _)| *n)
                .unwrap(),
        }
    }

    /// Statements that open a block (an assumption, a goal, a case) need no
    /// warrant.
    pub fn is_opening(&self) -> bool {
        matches!(
            self,
            Role::Assumption
                | Role::Goal
                | Role::InductionHypothesis
                | Role::CaseOpening
                | Role::ContradictionAssumption
                | Role::IfDirection
                | Role::OnlyIfDirection
        )
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Role {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(ROLE_NAMES
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, r)| r.clone())
            .unwrap_or_else(|| Role::Other(s.to_string())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStatement {
    pub number: usize,
    /// Statement text; backtick-delimited segments are the inline formulas.
    pub text: String,
    pub expressions: Vec<Formula>,
    pub uses: Vec<String>,
    pub warrant: Option<Warrant>,
    pub backing: Option<String>,
    pub roles: BTreeSet<Role>,
    /// Explanation of the mistake on an error line of a fallacy proof.
    pub error: Option<String>,
    pub hidden: Option<Justification>,
}

impl ProofStatement {
    pub fn new(number: usize, text: &str) -> Self {
        ProofStatement {
            number,
            text: text.to_string(),
            expressions: Vec::new(),
            uses: Vec::new(),
            warrant: None,
            backing: None,
            roles: BTreeSet::new(),
            error: None,
            hidden: None,
        }
    }

    pub fn is_error_line(&self) -> bool {
        self.error.is_some()
    }

    pub fn has_role(&self, role: &Role) -> bool {
        self.roles.contains(role)
    }

    /// Text with the backtick delimiters removed.
    pub fn plain_text(&self) -> String {
        self.text.replace('`', "")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureKind {
    Direct,
    DefinitionChasing,
    Iff,
    Cases,
    Induction,
    Contrapositive,
    Contradiction,
    EquivalenceChain,
}

impl StructureKind {
    pub const ALL: [StructureKind; 8] = [
        StructureKind::Direct,
        StructureKind::DefinitionChasing,
        StructureKind::Iff,
        StructureKind::Cases,
        StructureKind::Induction,
        StructureKind::Contrapositive,
        StructureKind::Contradiction,
        StructureKind::EquivalenceChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Direct => "direct",
            StructureKind::DefinitionChasing => "definition-chasing",
            StructureKind::Iff => "iff",
            StructureKind::Cases => "cases",
            StructureKind::Induction => "induction",
            StructureKind::Contrapositive => "contrapositive",
            StructureKind::Contradiction => "contradiction",
            StructureKind::EquivalenceChain => "equivalence-chain",
        }
    }

    /// Wording used in question stems.
    pub fn description(self) -> &'static str {
        match self {
            StructureKind::Direct => "Direct proof",
            StructureKind::DefinitionChasing => "Definition chasing",
            StructureKind::Iff => "If and only if (both directions)",
            StructureKind::Cases => "Exhaustive cases",
            StructureKind::Induction => "Induction",
            StructureKind::Contrapositive => "Proof of the contrapositive",
            StructureKind::Contradiction => "Proof by contradiction",
            StructureKind::EquivalenceChain => "Chain of equivalences",
        }
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StructureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown structure kind `{s}`"))
    }
}

/// Inclusive range of statement numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn single(n: usize) -> Self {
        Span { start: n, end: n }
    }

    pub fn contains(&self, n: usize) -> bool {
        self.start <= n && n <= self.end
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn numbers(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected a statement range like `3-7`, found `{s}`");
        let (a, b) = match s.split_once('-') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), s.trim()),
        };
        let start: usize = a.parse().map_err(|_| bad())?;
        let end: usize = b.parse().map_err(|_| bad())?;
        if start == 0 || end < start {
            return Err(bad());
        }
        Ok(Span { start, end })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InductionParts {
    pub hypothesis: Option<Span>,
    pub base: Option<Span>,
    pub step: Option<Span>,
    pub conclusion: Option<Span>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureNode {
    pub kind: StructureKind,
    pub span: Span,
    /// Case label for children of a `cases` node, direction for `iff`.
    pub label: Option<String>,
    pub children: Vec<StructureNode>,
    pub induction: Option<InductionParts>,
    /// Author's note on why the cases are exhaustive.
    pub exhaustive: Option<String>,
    /// Statement whose assumption a contradiction refutes.
    pub contradicts: Option<usize>,
}

impl StructureNode {
    pub fn new(kind: StructureKind, span: Span) -> Self {
        StructureNode {
            kind,
            span,
            label: None,
            children: Vec::new(),
            induction: None,
            exhaustive: None,
            contradicts: None,
        }
    }

    pub fn with_children(mut self, children: Vec<StructureNode>) -> Self {
        self.children = children;
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn leaves(&self) -> Vec<&StructureNode> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a StructureNode>) {
        if self.children.is_empty() {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }

    /// Pre-order traversal.
    pub fn walk(&self) -> Vec<&StructureNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.walk());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    ConstructedObject,
    FacilitatorObject,
}

impl GadgetKind {
    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::ConstructedObject => "constructed-object",
            GadgetKind::FacilitatorObject => "facilitator-object",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub id: String,
    pub name: String,
    /// Statement in which the object is constructed.
    pub statement: usize,
    pub description: String,
    pub kind: GadgetKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub theorem: Theorem,
    pub definitions: Vec<Definition>,
    pub externals: Vec<ExternalResult>,
    pub statements: Vec<ProofStatement>,
    pub structure: StructureNode,
    pub gadgets: Vec<Gadget>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("unknown hypothesis `{0}`")]
    UnknownHypothesis(String),
    #[error("unknown statement {0}")]
    UnknownStatement(usize),
}

impl Proof {
    pub fn statement(&self, number: usize) -> Option<&ProofStatement> {
        number
            .checked_sub(1)
            .and_then(|i| self.statements.get(i))
            .filter(|s| s.number == number)
            .or_else(|| self.statements.iter().find(|s| s.number == number))
    }

    pub fn hypothesis(&self, id: &str) -> Option<&Hypothesis> {
        self.theorem.hypotheses.iter().find(|h| h.id == id)
    }

    pub fn definition(&self, id: &str) -> Option<&Definition> {
        self.definitions.iter().find(|d| d.id == id)
    }

    pub fn external(&self, id: &str) -> Option<&ExternalResult> {
        self.externals.iter().find(|e| e.id == id)
    }

    pub fn statement_numbers(&self) -> Vec<usize> {
        self.statements.iter().map(|s| s.number).collect()
    }

    /// Rewrite rules declared by the proof's external results.
    pub fn power_rules(&self) -> Vec<PowerRule> {
        self.externals
            .iter()
            .filter_map(|e| e.rewrite.as_ref())
            .filter_map(|eq| PowerRule::from_equation(eq).ok())
            .collect()
    }

    pub fn statements_with_role(&self, role: &Role) -> Vec<usize> {
        self.statements
            .iter()
            .filter(|s| s.has_role(role))
            .map(|s| s.number)
            .collect()
    }

    pub fn error_lines(&self) -> Vec<usize> {
        self.statements
            .iter()
            .filter(|s| s.is_error_line())
            .map(|s| s.number)
            .collect()
    }
}

/// Statement numbers whose `uses` annotation names `hyp_id`, ascending.
pub fn hypothesis_usage(p: &Proof, hyp_id: &str) -> Result<Vec<usize>, ProofError> {
    if p.hypothesis(hyp_id).is_none() {
        return Err(ProofError::UnknownHypothesis(hyp_id.to_string()));
    }
    let mut lines: Vec<usize> = p
        .statements
        .iter()
        .filter(|s| s.uses.iter().any(|u| u == hyp_id))
        .map(|s| s.number)
        .collect();
    lines.sort_unstable();
    Ok(lines)
}

// ---------------------------------------------------------------------------
// validation

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Finding {
    /// Short machine-readable category.
    pub code: String,
    pub message: String,
    pub statement: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn contains(&self, fragment: &str) -> bool {
        self.findings.iter().any(|f| f.message.contains(fragment))
    }

    fn push(&mut self, code: &str, statement: Option<usize>, message: String) {
        self.findings.push(Finding {
            code: code.to_string(),
            message,
            statement,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            writeln!(f, "{}: {}", finding.code, finding.message)?;
        }
        Ok(())
    }
}

pub fn validate(p: &Proof) -> ValidationReport {
    let mut r = ValidationReport::default();
    let n = p.statements.len();

    for (i, s) in p.statements.iter().enumerate() {
        if s.number != i + 1 {
            r.push(
                "numbering",
                Some(s.number),
                format!(
                    "statement {} is numbered {} (numbers must run 1..{n})",
                    i + 1,
                    s.number
                ),
            );
        }
    }

    check_theorem(p, &mut r);
    check_statements(p, &mut r);
    check_structure(p, &mut r);

    for g in &p.gadgets {
        if g.statement == 0 || g.statement > n {
            r.push(
                "gadget",
                None,
                format!(
                    "gadget '{}' refers to statement {}, which does not exist",
                    g.id, g.statement
                ),
            );
        }
    }
    r
}

fn check_theorem(p: &Proof, r: &mut ValidationReport) {
    let th = &p.theorem;
    if th.kind == TheoremKind::General && !th.hypotheses.iter().any(|h| h.definition.is_some()) {
        r.push(
            "theorem",
            None,
            "general theorem needs a hypothesis that refers to a definition".to_string(),
        );
    }
    let mut names = BTreeSet::new();
    for d in &p.definitions {
        if !names.insert(d.name.as_str()) {
            r.push(
                "definition",
                None,
                format!("definition name '{}' is not unique", d.name),
            );
        }
    }
    for h in &th.hypotheses {
        if let Some(def) = &h.definition {
            if p.definition(def).is_none() {
                r.push(
                    "reference",
                    None,
                    format!("hypothesis '{}' refers to unknown definition '{def}'", h.id),
                );
            }
        }
        if !p.statements.iter().any(|s| s.uses.contains(&h.id)) {
            r.push(
                "hypothesis",
                None,
                format!("hypothesis '{}' never used", h.id),
            );
        }
    }
}

fn check_statements(p: &Proof, r: &mut ValidationReport) {
    for s in &p.statements {
        for u in &s.uses {
            if p.hypothesis(u).is_none() {
                r.push(
                    "reference",
                    Some(s.number),
                    format!("statement {} uses unknown hypothesis '{u}'", s.number),
                );
            }
        }
        let mut rule_refs: Vec<&str> = Vec::new();
        let hidden = s.hidden.as_ref();
        for w in [s.warrant.as_ref(), hidden.and_then(|h| h.warrant.as_ref())]
            .into_iter()
            .flatten()
        {
            if let Warrant::Rule(id) = w {
                rule_refs.push(id);
            }
        }
        for b in [s.backing.as_ref(), hidden.and_then(|h| h.backing.as_ref())]
            .into_iter()
            .flatten()
        {
            rule_refs.push(b);
        }
        for id in rule_refs {
            if p.external(id).is_none() {
                r.push(
                    "reference",
                    Some(s.number),
                    format!("statement {} refers to unknown result '{id}'", s.number),
                );
            }
        }
        let justified = s.warrant.is_some()
            || s.backing.is_some()
            || hidden.is_some_and(|h| h.warrant.is_some() || h.backing.is_some());
        if !justified && !s.roles.iter().any(Role::is_opening) {
            r.push(
                "warrant",
                Some(s.number),
                format!("statement {} has neither a warrant nor a backing", s.number),
            );
        }
        if let Some(e) = &s.error {
            if e.trim().is_empty() {
                r.push(
                    "error-line",
                    Some(s.number),
                    format!("error line {} has no explanation", s.number),
                );
            }
        }
    }
}

fn check_structure(p: &Proof, r: &mut ValidationReport) {
    let root = &p.structure;
    let n = p.statements.len();
    if n > 0 && root.span != Span::new(1, n) {
        r.push(
            "structure",
            None,
            format!(
                "structure root covers {} but the proof has statements 1-{n}",
                root.span
            ),
        );
    }
    check_node(p, root, r);

    let leaves = root.leaves();
    let mut covered: BTreeMap<usize, usize> = BTreeMap::new();
    for leaf in &leaves {
        for k in leaf.span.numbers() {
            *covered.entry(k).or_default() += 1;
        }
        let conclusions = leaf
            .span
            .numbers()
            .filter(|&k| {
                p.statement(k)
                    .is_some_and(|s| s.has_role(&Role::Conclusion))
            })
            .count();
        if conclusions > 1 {
            r.push(
                "structure",
                None,
                format!(
                    "{} at {} has {conclusions} conclusion statements",
                    leaf.kind, leaf.span
                ),
            );
        }
    }
    let uncovered: Vec<String> = root
        .span
        .numbers()
        .filter(|k| !covered.contains_key(k))
        .map(|k| k.to_string())
        .collect();
    if !uncovered.is_empty() {
        r.push(
            "structure",
            None,
            format!(
                "statements {} are not covered by any leaf block",
                uncovered.join(", ")
            ),
        );
    }
}

fn check_node(p: &Proof, node: &StructureNode, r: &mut ValidationReport) {
    let at = format!("{} at {}", node.kind, node.span);
    for (i, c) in node.children.iter().enumerate() {
        if !node.span.contains_span(&c.span) {
            r.push(
                "structure",
                None,
                format!("{} at {} lies outside its parent {at}", c.kind, c.span),
            );
        }
        for d in &node.children[i + 1..] {
            if c.span.overlaps(&d.span) {
                r.push(
                    "structure",
                    None,
                    format!("blocks {} and {} inside {at} overlap", c.span, d.span),
                );
            }
        }
    }
    match node.kind {
        StructureKind::Induction => {
            let parts = node.induction.clone().unwrap_or_default();
            for (part, name) in [
                (parts.hypothesis, "a clear hypothesis statement"),
                (parts.base, "a base case"),
                (parts.step, "an induction step"),
                (parts.conclusion, "a conclusion"),
            ] {
                match part {
                    None => r.push("induction", None, format!("{at} must have {name}")),
                    Some(span) if !node.span.contains_span(&span) => r.push(
                        "induction",
                        None,
                        format!("{at}: {name} at {span} lies outside the induction"),
                    ),
                    Some(_) => {}
                }
            }
        }
        StructureKind::Cases => {
            if node.children.len() < 2 {
                r.push("cases", None, format!("{at} must have at least two cases"));
            }
            if node.exhaustive.is_none() {
                r.push(
                    "cases",
                    None,
                    format!("{at} does not say why the cases are exhaustive"),
                );
            }
            for c in &node.children {
                if c.label.is_none() {
                    r.push(
                        "cases",
                        None,
                        format!("case {} of {at} has no label", c.span),
                    );
                }
            }
        }
        StructureKind::Iff => {
            if node.children.len() != 2 {
                r.push(
                    "iff",
                    None,
                    format!(
                        "{at} must have both directions (found {})",
                        node.children.len()
                    ),
                );
            }
        }
        StructureKind::Contradiction => {
            if let Some(k) = node.contradicts {
                if p.statement(k).is_none() {
                    r.push(
                        "contradiction",
                        None,
                        format!("{at} contradicts statement {k}, which does not exist"),
                    );
                }
            }
        }
        _ => {}
    }
    for c in &node.children {
        check_node(p, c, r);
    }
}

// ---------------------------------------------------------------------------
// outlines

/// One line per node, children indented by two spaces.
pub fn structure_outline(p: &Proof) -> String {
    let mut out = String::new();
    outline_node(&p.structure, 0, &mut out);
    out
}

fn outline_node(node: &StructureNode, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    out.push_str(&pad);
    if let Some(label) = &node.label {
        out.push_str(&format!("[{label}] "));
    }
    out.push_str(&format!("{} {}", node.kind, node.span));
    if let Some(k) = node.contradicts {
        out.push_str(&format!(" (contradicts {k})"));
    }
    out.push('\n');
    if let Some(parts) = &node.induction {
        for (name, span) in [
            ("hypothesis", parts.hypothesis),
            ("base case", parts.base),
            ("induction step", parts.step),
            ("conclusion", parts.conclusion),
        ] {
            if let Some(span) = span {
                out.push_str(&format!("{pad}  {name} {span}\n"));
            }
        }
    }
    if let Some(note) = &node.exhaustive {
        out.push_str(&format!("{pad}  exhaustive: {note}\n"));
    }
    for c in &node.children {
        outline_node(c, depth + 1, out);
    }
}

/// Compact one-line summary, e.g. `equivalence-chain; cases: [b≠d:
/// contradiction], [b=d: direct]`. A direct block with children is read as
/// "do these in sequence" and shows only its children.
pub fn structure_summary(p: &Proof) -> String {
    summarize(&p.structure)
}

fn summarize(node: &StructureNode) -> String {
    if node.children.is_empty() {
        return node.kind.to_string();
    }
    let parts: Vec<String> = match node.kind {
        StructureKind::Cases | StructureKind::Iff => node
            .children
            .iter()
            .map(|c| match &c.label {
                Some(l) => format!("[{l}: {}]", summarize(c)),
                None => format!("[{}]", summarize(c)),
            })
            .collect(),
        _ => node.children.iter().map(summarize).collect(),
    };
    match node.kind {
        StructureKind::Direct => parts.join("; "),
        StructureKind::Cases | StructureKind::Iff => format!("{}: {}", node.kind, parts.join(", ")),
        _ => format!("{} ({})", node.kind, parts.join("; ")),
    }
}
