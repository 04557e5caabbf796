use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    item_seed, AnswerKey, ItemSource, McqOption, QuestionBank, QuestionItem, ResponseType,
    Template, BANK_FORMAT,
};
use crate::combos::{CombinationTable, EntryStatus, ExampleEntry, RuleBasis};
use crate::config::{GenConfig, TableConfig};
use crate::dsl::{omit_warrant, render_student};
use crate::expr::{expand_sum, parse_equation, Equation, Expr, Formula};
use crate::logic::{self, LogicStatement};
use crate::proof::{hypothesis_usage, Proof, Role, StructureKind, TheoremKind, Warrant};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipEntry {
    pub template: Template,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checklist: Option<String>,
    pub reason: String,
}

const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";

fn letter(i: usize) -> String {
    (LETTERS[i] as char).to_string()
}

/// Role line-select questions, in the order they are asked.
const ROLE_STEMS: &[(Role, &str)] = &[
    (
        Role::InductionBase,
        "In which line is the base case established?",
    ),
    (
        Role::InductionHypothesis,
        "In which line is the induction hypothesis assumed?",
    ),
    (
        Role::InductionHypothesisUsed,
        "Where is the induction hypothesis used?",
    ),
    (
        Role::InductionStep,
        "In which line is the induction step completed?",
    ),
    (
        Role::ContradictionAssumption,
        "Which line makes the assumption that is later shown to be false?",
    ),
    (
        Role::ContradictionReached,
        "In which line is the contradiction reached?",
    ),
    (Role::CaseOpening, "Which line opens a new case?"),
    (
        Role::IfDirection,
        "Which line begins the proof of the \"if\" direction?",
    ),
    (
        Role::OnlyIfDirection,
        "Which line begins the proof of the \"only if\" direction?",
    ),
];

struct Gen<'a> {
    p: &'a Proof,
    cfg: &'a GenConfig,
    table: Option<&'a CombinationTable>,
    pid: String,
    excerpt: String,
    items: Vec<QuestionItem>,
    skipped: Vec<SkipEntry>,
}

/// Walks the checklist over `p` and returns the question bank. Templates
/// that do not apply are recorded in `skipped` with a reason.
pub fn generate(p: &Proof, table: Option<&CombinationTable>, cfg: &GenConfig) -> QuestionBank {
    let mut g = Gen {
        p,
        cfg,
        table,
        pid: p.theorem.id.clone(),
        excerpt: render_student(p, false),
        items: Vec::new(),
        skipped: Vec::new(),
    };
    for n in &cfg.checklist_order {
        match n {
            1 => {
                g.t2_instantiation();
                g.t1_definitions();
            }
            2 => {
                g.t3_proof_type();
                g.t6_roles();
            }
            3 => {
                g.t4_hypotheses();
                g.t7_examples();
            }
            4 => g.t5_warrants(),
            5 => g.t5_backing(),
            6 => g.t8_gadgets(),
            7 => g.t9_converse(),
            8 => g.t10_walkthrough(),
            _ => {}
        }
    }
    g.t9_taxonomy();
    g.t10_transfer();
    g.t11_fallacy();
    QuestionBank {
        format: BANK_FORMAT.to_string(),
        version: 1,
        proof_id: g.pid,
        seed: cfg.seed,
        derivation_weights: cfg.derivation,
        items: g.items,
        skipped: g.skipped,
        table: table.cloned(),
    }
}

/// Per checklist item 1 to 8: the number of items emitted and the skip
/// reasons logged.
pub fn checklist_coverage(bank: &QuestionBank) -> BTreeMap<u8, (usize, Vec<String>)> {
    let mut out: BTreeMap<u8, (usize, Vec<String>)> =
        (1..=8).map(|n| (n, (0, Vec::new()))).collect();
    for item in &bank.items {
        if let Some(n) = item.source.checklist_item() {
            if let Some(e) = out.get_mut(&n) {
                e.0 += 1;
            }
        }
    }
    for s in &bank.skipped {
        let n = s
            .checklist
            .as_deref()
            .and_then(|c| ItemSource::Checklist(c.to_string()).checklist_item());
        if let Some(e) = n.and_then(|n| out.get_mut(&n)) {
            e.1.push(format!("{}: {}", s.template, s.reason));
        }
    }
    out
}

impl<'a> Gen<'a> {
    fn skip(&mut self, template: Template, checklist: Option<&str>, reason: impl Into<String>) {
        self.skipped.push(SkipEntry {
            template,
            checklist: checklist.map(str::to_string),
            reason: reason.into(),
        });
    }

    fn enabled(&mut self, template: Template, checklist: Option<&str>) -> bool {
        if self.cfg.template_enabled(template) {
            true
        } else {
            self.skip(template, checklist, "disabled in the config");
            false
        }
    }

    fn item(
        &self,
        template: Template,
        source: ItemSource,
        suffix: &str,
        stem: String,
        rt: ResponseType,
    ) -> QuestionItem {
        let mut feedback = BTreeMap::new();
        if rt != ResponseType::FreeTextUngraded {
            feedback.insert("correct".to_string(), "Correct.".to_string());
            feedback.insert(
                "default".to_string(),
                "Not correct. Read the proof again carefully.".to_string(),
            );
        }
        QuestionItem {
            id: format!("{}/{}/{}", self.pid, template, suffix),
            template,
            source,
            proof_id: self.pid.clone(),
            stem,
            excerpt: None,
            response_type: rt,
            options: Vec::new(),
            option_order: Vec::new(),
            key: None,
            line_count: None,
            rewrites: Vec::new(),
            sample_answer: None,
            feedback,
            shuffle_seed: 0,
        }
    }

    fn line_select(
        &self,
        template: Template,
        source: ItemSource,
        suffix: &str,
        stem: String,
        lines: Vec<usize>,
    ) -> QuestionItem {
        let mut it = self.item(template, source, suffix, stem, ResponseType::LineSelect);
        it.excerpt = Some(self.excerpt.clone());
        it.line_count = Some(self.p.statements.len());
        it.key = Some(AnswerKey::Lines { lines });
        it
    }

    fn free_text(
        &self,
        template: Template,
        source: ItemSource,
        suffix: &str,
        stem: String,
        sample: Option<String>,
    ) -> QuestionItem {
        let mut it = self.item(
            template,
            source,
            suffix,
            stem,
            ResponseType::FreeTextUngraded,
        );
        it.sample_answer = sample;
        it
    }

    /// MCQ from (text, is_key) pairs; options are lettered in order.
    fn mcq(
        &self,
        template: Template,
        source: ItemSource,
        suffix: &str,
        stem: String,
        options: Vec<(String, bool)>,
    ) -> QuestionItem {
        let keys = options.iter().filter(|(_, k)| *k).count();
        let rt = if keys == 1 {
            ResponseType::McqSingle
        } else {
            ResponseType::McqMulti
        };
        let mut it = self.item(template, source, suffix, stem, rt);
        it.options = options
            .into_iter()
            .enumerate()
            .map(|(i, (text, is_key))| McqOption {
                id: letter(i),
                text,
                is_key,
            })
            .collect();
        it.key = Some(AnswerKey::Options {
            options: it.key_options().into_iter().map(str::to_string).collect(),
        });
        it
    }

    fn push(&mut self, mut it: QuestionItem) {
        it.shuffle_seed = item_seed(self.cfg.seed, &it.id);
        it.option_order = it.options.iter().map(|o| o.id.clone()).collect();
        if self.cfg.shuffle {
            let mut rng = ChaCha8Rng::seed_from_u64(it.shuffle_seed);
            it.option_order.shuffle(&mut rng);
        }
        self.items.push(it);
    }

    // Checklist 1a: notation and instantiation.
    fn t2_instantiation(&mut self) {
        if !self.enabled(Template::T2, Some("1a")) {
            return;
        }
        let mut emitted = false;
        if let Some(it) = self.instantiation_item() {
            self.push(it);
            emitted = true;
        }
        for d in &self.p.definitions {
            if d.notation.is_empty() {
                continue;
            }
            let stem = format!(
                "The definition of {} uses the notation {}. What does each piece of notation mean?",
                d.name,
                d.notation.join(", ")
            );
            let it = self.free_text(
                Template::T2,
                ItemSource::Checklist("1a".into()),
                &format!("notation/{}", d.id),
                stem,
                Some(d.formal.clone()),
            );
            self.push(it);
            emitted = true;
        }
        if !emitted {
            self.skip(
                Template::T2,
                Some("1a"),
                "the theorem is not a quantified equation and no definition declares notation",
            );
        }
    }

    fn instantiation_item(&self) -> Option<QuestionItem> {
        let (var, label, eq) = quantified_equation(self.p.theorem.statement.as_ref()?)?;
        let k = Expr::int(self.cfg.instantiate_at);
        let at = eq.substitute(&var, &k);
        let lhs = expand_sum(&at.lhs).ok()?;
        let rhs = expand_sum(&at.rhs).ok()?;
        let key = Equation::new(lhs, rhs);
        let name = format!("{label}({})", self.cfg.instantiate_at);
        let stem = format!("Write out {name} explicitly, as an equation.");
        let mut it = self.item(
            Template::T2,
            ItemSource::Checklist("1a".into()),
            &format!("instantiate/{name}"),
            stem,
            ResponseType::AlgebraicInput,
        );
        it.excerpt = Some(format!("{label}({var}): {eq}\n"));
        it.key = Some(AnswerKey::Formula {
            formula: Formula::Equation(key),
        });
        it.rewrites = self
            .p
            .externals
            .iter()
            .filter_map(|e| e.rewrite.clone())
            .collect();
        it.feedback.insert(
            "value-only".to_string(),
            format!("{name} is an equation, with a left hand side and a right hand side. You have written a single value. Write out both sides with an equals sign between them."),
        );
        Some(it)
    }

    // Checklist 1b: definitions.
    fn t1_definitions(&mut self) {
        if !self.enabled(Template::T1, Some("1b")) {
            return;
        }
        if self.p.definitions.is_empty() {
            self.skip(
                Template::T1,
                Some("1b"),
                "the proof declares no definitions",
            );
            return;
        }
        for d in &self.p.definitions {
            let it = match self
                .cfg
                .definition_mcq
                .iter()
                .find(|m| m.definition == d.id)
            {
                Some(m) => {
                    let rt = if m.options.iter().filter(|o| o.key).count() == 1 {
                        ResponseType::McqSingle
                    } else {
                        ResponseType::McqMulti
                    };
                    let mut it = self.item(
                        Template::T1,
                        ItemSource::Checklist("1b".into()),
                        &d.id,
                        m.stem.clone(),
                        rt,
                    );
                    it.options = m
                        .options
                        .iter()
                        .map(|o| McqOption {
                            id: o.id.clone(),
                            text: o.text.clone(),
                            is_key: o.key,
                        })
                        .collect();
                    it.key = Some(AnswerKey::Options {
                        options: it.key_options().into_iter().map(str::to_string).collect(),
                    });
                    for (class, text) in &m.feedback {
                        it.feedback.insert(class.clone(), text.clone());
                    }
                    it
                }
                None => self.free_text(
                    Template::T1,
                    ItemSource::Checklist("1b".into()),
                    &d.id,
                    format!(
                        "Write out the definition of \"{}\", using the notation of the proof.",
                        d.name
                    ),
                    Some(d.formal.clone()),
                ),
            };
            self.push(it);
        }
    }

    // Checklist 2 and 2b: overall structure and the type of each part.
    fn t3_proof_type(&mut self) {
        if !self.enabled(Template::T3, Some("2")) {
            return;
        }
        let root = &self.p.structure;
        let it = self.kind_mcq(
            "type",
            "What is the type of proof?".to_string(),
            root.kind,
            "2",
        );
        self.push(it);
        let parts: Vec<_> = root
            .children
            .iter()
            .filter(|c| c.kind != StructureKind::Direct)
            .cloned()
            .collect();
        for c in parts {
            let span = format!("{}-{}", c.span.start, c.span.end);
            let stem = format!("What type of argument is used in lines {span}?");
            let it = self.kind_mcq(&format!("part/{span}"), stem, c.kind, "2b");
            self.push(it);
        }
    }

    fn kind_mcq(
        &self,
        suffix: &str,
        stem: String,
        kind: StructureKind,
        checklist: &str,
    ) -> QuestionItem {
        let options = StructureKind::ALL
            .iter()
            .map(|k| (k.description().to_string(), *k == kind))
            .collect();
        let mut it = self.mcq(
            Template::T3,
            ItemSource::Checklist(checklist.into()),
            suffix,
            stem,
            options,
        );
        it.excerpt = Some(self.excerpt.clone());
        it
    }

    // Checklist 2a: structural parts.
    fn t6_roles(&mut self) {
        if !self.enabled(Template::T6, Some("2a")) {
            return;
        }
        let mut emitted = false;
        for (role, stem) in ROLE_STEMS {
            let lines = self.p.statements_with_role(role);
            if lines.is_empty() {
                continue;
            }
            let it = self.line_select(
                Template::T6,
                ItemSource::Checklist("2a".into()),
                &format!("role/{role}"),
                stem.to_string(),
                lines,
            );
            self.push(it);
            emitted = true;
        }
        if let Some(it) = self.derivation_item() {
            self.push(it);
            emitted = true;
        }
        if !emitted {
            self.skip(
                Template::T6,
                Some("2a"),
                "no statement carries a structural role",
            );
        }
    }

    /// Induction step for a sum identity: from the hypothesis plus the next
    /// term, reach the right hand side at n+1.
    fn derivation_item(&self) -> Option<QuestionItem> {
        if !self
            .p
            .structure
            .walk()
            .iter()
            .any(|n| n.kind == StructureKind::Induction)
        {
            return None;
        }
        let (var, label, eq) = quantified_equation(self.p.theorem.statement.as_ref()?)?;
        let Expr::Sum {
            body, index, upper, ..
        } = &eq.lhs
        else {
            return None;
        };
        if **upper != Expr::var(&var) {
            return None;
        }
        let next = Expr::add(vec![Expr::var(&var), Expr::int(1)]);
        let start = Expr::add(vec![eq.rhs.clone(), body.substitute(index, &next)]);
        let target = eq.rhs.substitute(&var, &next);
        let stem = format!(
            "Complete the induction step. Starting from `{start}`, write a chain of equivalent expressions, one per line, ending with the right hand side of {label}({next}) in the form `{target}`."
        );
        let mut it = self.item(
            Template::T6,
            ItemSource::Checklist("2a".into()),
            "induction-step",
            stem,
            ResponseType::AlgebraicDerivation,
        );
        it.excerpt = Some(self.excerpt.clone());
        it.key = Some(AnswerKey::Derivation { start, target });
        it.rewrites = self
            .p
            .externals
            .iter()
            .filter_map(|e| e.rewrite.clone())
            .collect();
        Some(it)
    }

    // Checklist 3a: where each hypothesis is used.
    fn t4_hypotheses(&mut self) {
        if !self.enabled(Template::T4, Some("3a")) {
            return;
        }
        if self.p.theorem.hypotheses.is_empty() {
            self.skip(Template::T4, Some("3a"), "the theorem has no hypotheses");
            return;
        }
        for h in &self.p.theorem.hypotheses {
            let lines = hypothesis_usage(self.p, &h.id).unwrap_or_default();
            if lines.is_empty() {
                self.skip(
                    Template::T4,
                    Some("3a"),
                    format!("hypothesis '{}' is never used", h.id),
                );
                continue;
            }
            let stem = format!(
                "In which step of the proof is the assumption that {} used?",
                h.label
            );
            let it = self.line_select(
                Template::T4,
                ItemSource::Checklist("3a".into()),
                &h.id,
                stem,
                lines,
            );
            self.push(it);
        }
    }

    // Checklist 3b: examples for each combination of properties.
    fn t7_examples(&mut self) {
        if !self.enabled(Template::T7, Some("3b")) {
            return;
        }
        if self.p.theorem.kind == TheoremKind::Specific {
            self.skip(
                Template::T7,
                Some("3b"),
                "the theorem is specific, so there are no examples to classify",
            );
            return;
        }
        let Some(table) = self.table else {
            self.skip(
                Template::T7,
                Some("3b"),
                "no combination table is configured",
            );
            return;
        };
        let tcfg = self.cfg.table.as_ref();
        let noun = tcfg.map_or("example", |t| t.noun.as_str());
        let src = || ItemSource::Checklist("3b".into());
        for e in &table.entries {
            let sig: String = e
                .signature
                .iter()
                .map(|b| if *b { 'T' } else { 'F' })
                .collect();
            let desc = describe(table, tcfg, e);
            if let Some(w) = e.witness() {
                let mut options: Vec<(String, bool)> = (0..table.properties.len())
                    .map(|i| {
                        (
                            format!("It {}.", phrase(table, tcfg, i, true)),
                            e.signature[i],
                        )
                    })
                    .collect();
                options.push(("None of these.".to_string(), e.signature.iter().all(|b| !b)));
                let stem = format!(
                    "Which of the following properties does the {noun} {} have? Choose all that apply.",
                    w.text
                );
                let mut it = self.mcq(
                    Template::T7,
                    src(),
                    &format!("classify/{sig}"),
                    stem,
                    options,
                );
                it.response_type = ResponseType::McqMulti;
                self.push(it);
            }
            match &e.status {
                EntryStatus::Impossible { rule } => {
                    let sample = table.rule(rule).map(|r| match &r.basis {
                        RuleBasis::TheoremUnderStudy => {
                            format!("Such a {noun} would be a counterexample to the theorem.")
                        }
                        RuleBasis::ExternalTheorem { statement } => format!("{statement}."),
                    });
                    let stem = format!("Explain why there is no {noun} which {desc}.");
                    let it = self.free_text(
                        Template::T7,
                        src(),
                        &format!("impossible/{sig}"),
                        stem,
                        sample,
                    );
                    self.push(it);
                }
                _ => {
                    let stem = format!("Give an example of a {noun} which {desc}.");
                    let sample = e.witness().map(|w| w.text.clone());
                    let it = self.free_text(
                        Template::T7,
                        src(),
                        &format!("provide/{sig}"),
                        stem,
                        sample,
                    );
                    self.push(it);
                }
            }
        }
    }

    // Checklist 4: warrants.
    fn t5_warrants(&mut self) {
        if !self.enabled(Template::T5, Some("4")) {
            return;
        }
        let mut numbers = self.cfg.warrant_prompts.clone();
        if numbers.is_empty() {
            numbers = self
                .p
                .statements
                .iter()
                .filter(|s| s.hidden.is_some())
                .map(|s| s.number)
                .collect();
        }
        if numbers.is_empty() {
            self.skip(
                Template::T5,
                Some("4"),
                "no warrant prompts are configured and no warrant is hidden in the proof",
            );
            return;
        }
        for n in numbers {
            let Some(s) = self.p.statement(n) else {
                self.skip(
                    Template::T5,
                    Some("4"),
                    format!("statement {n} does not exist"),
                );
                continue;
            };
            let (view, hidden) = if s.warrant.is_some() || s.backing.is_some() {
                (
                    omit_warrant(self.p, n).expect("statement has a warrant"),
                    true,
                )
            } else {
                (self.p.clone(), s.hidden.is_some())
            };
            if !hidden {
                self.skip(
                    Template::T5,
                    Some("4"),
                    format!("statement {n} has no warrant to ask about"),
                );
                continue;
            }
            let sample = view.statement(n).and_then(|s| s.hidden.as_ref()).map(|j| {
                let mut parts = Vec::new();
                match &j.warrant {
                    Some(Warrant::Text(t)) => parts.push(t.clone()),
                    Some(Warrant::Rule(id)) => parts.push(self.external_name(id)),
                    None => {}
                }
                if let Some(b) = &j.backing {
                    parts.push(format!("by the {}", self.external_name(b)));
                }
                parts.join("; ")
            });
            let stem = format!("Why can we proceed to statement {n}? Give a justification.");
            let mut it = self.free_text(
                Template::T5,
                ItemSource::Checklist("4".into()),
                &format!("warrant/{n}"),
                stem,
                sample,
            );
            it.excerpt = Some(render_student(&view, true));
            self.push(it);
        }
    }

    fn external_name(&self, id: &str) -> String {
        self.p
            .external(id)
            .map_or(id.to_string(), |e| e.name.clone())
    }

    // Checklist 5: previously known results.
    fn t5_backing(&mut self) {
        if !self.enabled(Template::T5, Some("5")) {
            return;
        }
        let mut emitted = false;
        for ext in &self.p.externals {
            let lines: Vec<usize> = self
                .p
                .statements
                .iter()
                .filter(|s| {
                    let hidden = s.hidden.as_ref();
                    s.backing.as_deref() == Some(ext.id.as_str())
                        || s.warrant == Some(Warrant::Rule(ext.id.clone()))
                        || hidden.and_then(|h| h.backing.as_deref()) == Some(ext.id.as_str())
                        || hidden.and_then(|h| h.warrant.as_ref())
                            == Some(&Warrant::Rule(ext.id.clone()))
                })
                .map(|s| s.number)
                .collect();
            if lines.is_empty() {
                continue;
            }
            let name = if ext.name.starts_with("the ") {
                ext.name.clone()
            } else {
                format!("the {}", ext.name)
            };
            let stem = format!("In which step of the proof is {name} used?");
            let it = self.line_select(
                Template::T5,
                ItemSource::Checklist("5".into()),
                &format!("backing/{}", ext.id),
                stem,
                lines,
            );
            self.push(it);
            emitted = true;
        }
        if !emitted {
            self.skip(
                Template::T5,
                Some("5"),
                "the proof makes no use of previously known results",
            );
        }
    }

    // Checklist 6: proof gadgets.
    fn t8_gadgets(&mut self) {
        if !self.enabled(Template::T8, Some("6")) {
            return;
        }
        if self.p.gadgets.is_empty() {
            self.skip(Template::T8, Some("6"), "the proof declares no gadgets");
            return;
        }
        for g in &self.p.gadgets {
            let stem = format!(
                "What is the motivation for constructing {} in statement {}? How is it used in the rest of the proof?",
                g.name, g.statement
            );
            let mut it = self.free_text(
                Template::T8,
                ItemSource::Checklist("6".into()),
                &g.id,
                stem,
                Some(g.description.clone()),
            );
            it.excerpt = Some(self.excerpt.clone());
            self.push(it);
        }
    }

    // Checklist 7: the converse.
    fn t9_converse(&mut self) {
        if !self.enabled(Template::T9, Some("7")) {
            return;
        }
        let Some(s) = self.implication() else {
            self.skip(
                Template::T9,
                Some("7"),
                "the theorem is not stated as an implication",
            );
            return;
        };
        let conv = logic::converse(&s).expect("implication");
        let options = vec![
            (conv.to_string(), true),
            (
                logic::contrapositive(&s).expect("implication").to_string(),
                false,
            ),
            (logic::inverse(&s).expect("implication").to_string(), false),
            (s.to_string(), false),
        ];
        let it = self.mcq(
            Template::T9,
            ItemSource::Checklist("7".into()),
            "converse",
            "Which of the following is the converse of the theorem?".to_string(),
            dedupe(options),
        );
        self.push(it);
        match self.table {
            Some(table) => {
                let counter = table.converse_counterexamples();
                let options = vec![
                    ("True".to_string(), counter.is_empty()),
                    ("False".to_string(), !counter.is_empty()),
                ];
                let it = self.mcq(
                    Template::T9,
                    ItemSource::Checklist("7".into()),
                    "converse-truth",
                    format!("Is the converse, {conv}, true or false?"),
                    options,
                );
                self.push(it);
                if !counter.is_empty() {
                    let sample = counter
                        .iter()
                        .filter_map(|e| e.witness())
                        .map(|w| w.text.clone())
                        .collect::<Vec<_>>()
                        .join("; ");
                    let it = self.free_text(
                        Template::T9,
                        ItemSource::Checklist("7".into()),
                        "converse-counterexample",
                        "Give a counterexample to the converse.".to_string(),
                        Some(sample),
                    );
                    self.push(it);
                }
            }
            None => {
                let it = self.free_text(
                    Template::T9,
                    ItemSource::Checklist("7".into()),
                    "converse-truth",
                    format!("Is the converse, {conv}, true or false? If it is false, give a counterexample."),
                    None,
                );
                self.push(it);
            }
        }
    }

    fn implication(&self) -> Option<LogicStatement> {
        let s = self.p.theorem.statement.as_ref()?;
        matches!(s, LogicStatement::Implies(..)).then(|| s.clone())
    }

    // Contrapositive and negation of the theorem statement.
    fn t9_taxonomy(&mut self) {
        if !self.enabled(Template::T9, None) {
            return;
        }
        let Some(s) = self.implication() else {
            self.skip(
                Template::T9,
                None,
                "no contrapositive or negation items: the theorem is not stated as an implication",
            );
            return;
        };
        let (h, c) = (
            s.hypothesis().unwrap().clone(),
            s.conclusion().unwrap().clone(),
        );
        let contra = logic::contrapositive(&s).unwrap();
        let options = vec![
            (contra.to_string(), true),
            (logic::converse(&s).unwrap().to_string(), false),
            (logic::inverse(&s).unwrap().to_string(), false),
            (logic::negate(&s).to_string(), false),
        ];
        let it = self.mcq(
            Template::T9,
            ItemSource::Taxonomy("contrapositive".into()),
            "contrapositive",
            "What is the statement of the contrapositive of the theorem?".to_string(),
            dedupe(options),
        );
        self.push(it);
        let options = vec![
            (logic::negate(&s).to_string(), true),
            (logic::inverse(&s).unwrap().to_string(), false),
            (
                logic::negate(&logic::converse(&s).unwrap()).to_string(),
                false,
            ),
            (
                LogicStatement::implies(h, LogicStatement::not(c)).to_string(),
                false,
            ),
        ];
        let it = self.mcq(
            Template::T9,
            ItemSource::Taxonomy("negation".into()),
            "negation",
            "Which of the following is the negation of the theorem?".to_string(),
            dedupe(options),
        );
        self.push(it);
    }

    // Checklist 8: follow the proof with a specific example.
    fn t10_walkthrough(&mut self) {
        if !self.enabled(Template::T10, Some("8")) {
            return;
        }
        if self.p.theorem.kind == TheoremKind::Specific {
            self.skip(
                Template::T10,
                Some("8"),
                "the theorem is specific, so there is no specific example to follow through",
            );
            return;
        }
        let example = self
            .table
            .and_then(|t| t.entries.first())
            .and_then(|e| e.witness())
            .map(|w| format!(", for example {},", w.text))
            .unwrap_or_default();
        let gadgets: Vec<&str> = self.p.gadgets.iter().map(|g| g.name.as_str()).collect();
        let mut stem = format!(
            "Choose a simple specific example which satisfies the hypotheses{example} and follow the steps of the proof through with it"
        );
        if !gadgets.is_empty() {
            stem.push_str(&format!(", including {}", gadgets.join(" and ")));
        }
        stem.push('.');
        let mut it = self.free_text(
            Template::T10,
            ItemSource::Checklist("8".into()),
            "walkthrough",
            stem,
            None,
        );
        it.excerpt = Some(self.excerpt.clone());
        self.push(it);
    }

    fn t10_transfer(&mut self) {
        if !self.enabled(Template::T10, None) {
            return;
        }
        if self.cfg.transfer.is_empty() {
            self.skip(Template::T10, None, "no transfer prompts are configured");
            return;
        }
        for (i, prompt) in self.cfg.transfer.iter().enumerate() {
            let it = self.free_text(
                Template::T10,
                ItemSource::Taxonomy("transfer".into()),
                &format!("transfer/{}", i + 1),
                prompt.clone(),
                None,
            );
            self.push(it);
        }
    }

    fn t11_fallacy(&mut self) {
        if !self.enabled(Template::T11, None) {
            return;
        }
        let lines = self.p.error_lines();
        if lines.is_empty() {
            self.skip(Template::T11, None, "the proof has no error lines");
            return;
        }
        let it = self.line_select(
            Template::T11,
            ItemSource::Taxonomy("fallacy".into()),
            "error-line",
            "This proof contains an error. In which line does the error occur?".to_string(),
            lines.clone(),
        );
        self.push(it);
        let first = lines[0];
        let sample = self.p.statement(first).and_then(|s| s.error.clone());
        let mut it = self.free_text(
            Template::T11,
            ItemSource::Taxonomy("fallacy".into()),
            "explain",
            format!("Explain what is wrong with line {first}."),
            sample,
        );
        it.excerpt = Some(self.excerpt.clone());
        self.push(it);
    }
}

/// `forall v (atom L "lhs = rhs")` as (v, L, equation).
fn quantified_equation(s: &LogicStatement) -> Option<(String, String, Equation)> {
    let LogicStatement::ForAll { var, body, .. } = s else {
        return None;
    };
    let LogicStatement::Atom { label, text } = body.as_ref() else {
        return None;
    };
    let eq = parse_equation(text).ok()?;
    Some((var.clone(), label.clone(), eq))
}

fn phrase(table: &CombinationTable, tcfg: Option<&TableConfig>, i: usize, value: bool) -> String {
    match tcfg {
        Some(t) => t.phrase(i, value),
        None if value => format!("is {}", table.properties[i]),
        None => format!("is not {}", table.properties[i]),
    }
}

/// "is increasing, is bounded and does not converge"
fn describe(table: &CombinationTable, tcfg: Option<&TableConfig>, e: &ExampleEntry) -> String {
    let parts: Vec<String> = e
        .signature
        .iter()
        .enumerate()
        .map(|(i, v)| phrase(table, tcfg, i, *v))
        .collect();
    match parts.split_last() {
        Some((last, rest)) if !rest.is_empty() => format!("{} and {last}", rest.join(", ")),
        Some((last, _)) => last.clone(),
        None => String::new(),
    }
}

/// Drops options whose text repeats an earlier one.
fn dedupe(options: Vec<(String, bool)>) -> Vec<(String, bool)> {
    let mut seen = BTreeSet::new();
    options
        .into_iter()
        .filter(|(t, _)| seen.insert(t.clone()))
        .collect()
}
