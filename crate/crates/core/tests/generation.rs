use std::collections::BTreeSet;

use proofcomp::config::GenConfig;
use proofcomp::corpus;
use proofcomp::dsl::parse_proof;
use proofcomp::questions::{
    checklist_coverage, generate, item_seed, AnswerKey, BankError, QuestionBank, ResponseType,
    Template,
};

fn bank(text: &str, cfg: &GenConfig) -> QuestionBank {
    let table = cfg.table.as_ref().map(|t| t.build().unwrap());
    generate(&parse_proof(text).unwrap(), table.as_ref(), cfg)
}

fn theorem1_config() -> GenConfig {
    GenConfig::from_toml(corpus::THEOREM1_CONFIG).unwrap()
}

#[test]
fn every_template_is_generated_or_skipped_with_a_reason() {
    for (name, text) in corpus::PROOFS {
        let b = bank(text, &GenConfig::default());
        assert!(
            b.key_problems().is_empty(),
            "{name}: {:?}",
            b.key_problems()
        );
        for t in Template::ALL {
            let made = b.items.iter().any(|i| i.template == t);
            let skipped = b
                .skipped
                .iter()
                .any(|s| s.template == t && !s.reason.is_empty());
            assert!(made || skipped, "{name}: {t} neither generated nor skipped");
        }
        for (n, (count, reasons)) in checklist_coverage(&b) {
            assert!(
                count > 0 || !reasons.is_empty(),
                "{name}: checklist item {n} silently empty"
            );
        }
    }
}

#[test]
fn item_ids_are_unique_and_prefixed_by_the_proof() {
    for (name, text) in corpus::PROOFS {
        let b = bank(text, &GenConfig::default());
        let ids: BTreeSet<&str> = b.items.iter().map(|i| i.id.as_str()).collect();
        assert_eq!(ids.len(), b.items.len(), "{name}");
        assert!(b
            .items
            .iter()
            .all(|i| i.id.starts_with(&format!("{}/", b.proof_id))));
    }
}

#[test]
fn option_orders_are_permutations_and_depend_only_on_seed_and_id() {
    let mut cfg = theorem1_config();
    cfg.shuffle = true;
    let mut orders = BTreeSet::new();
    for seed in 0..8 {
        cfg.seed = seed;
        let b = bank(corpus::THEOREM1, &cfg);
        for item in b.items.iter().filter(|i| i.response_type.is_mcq()) {
            let mut sorted = item.option_order.clone();
            sorted.sort();
            let mut ids: Vec<String> = item.options.iter().map(|o| o.id.clone()).collect();
            ids.sort();
            assert_eq!(sorted, ids, "{}", item.id);
            assert_eq!(item.shuffle_seed, item_seed(seed, &item.id));
        }
        let d = b.item("theorem1/T1/bounded").unwrap();
        orders.insert(d.option_order.clone());
    }
    assert!(orders.len() > 1, "shuffling never changed the order");
    assert_ne!(item_seed(42, "a"), item_seed(42, "b"));
    assert_ne!(item_seed(1, "a"), item_seed(2, "a"));
}

#[test]
fn unshuffled_options_keep_authored_letters() {
    let b = bank(corpus::THEOREM1, &theorem1_config());
    let d = b.item("theorem1/T1/bounded").unwrap();
    assert_eq!(d.option_order, ["A", "B", "C", "D", "E"]);
    assert_eq!(d.response_type, ResponseType::McqMulti);
}

#[test]
fn bank_json_round_trips_and_checks_its_format() {
    let b = bank(corpus::THEOREM1, &theorem1_config());
    let json = b.to_json();
    assert_eq!(QuestionBank::from_json(&json).unwrap(), b);
    let other = json.replacen("proofcomp-bank/1", "proofcomp-bank/9", 1);
    assert!(matches!(
        QuestionBank::from_json(&other),
        Err(BankError::Format(_))
    ));
}

#[test]
fn disabled_templates_are_skipped() {
    let mut cfg = theorem1_config();
    cfg.disabled.insert(Template::T7);
    let b = bank(corpus::THEOREM1, &cfg);
    assert!(b.items.iter().all(|i| i.template != Template::T7));
    assert!(b
        .skipped
        .iter()
        .any(|s| s.template == Template::T7 && s.reason.contains("disabled")));
}

#[test]
fn induction_bank_asks_for_the_step_as_a_derivation() {
    let b = bank(corpus::INDUCTION, &GenConfig::default());
    let step = b.item("sum-of-squares/T6/induction-step").unwrap();
    assert_eq!(step.response_type, ResponseType::AlgebraicDerivation);
    assert!(matches!(step.key, Some(AnswerKey::Derivation { .. })));
    let p3 = b.item("sum-of-squares/T2/instantiate/P(3)").unwrap();
    assert_eq!(p3.response_type, ResponseType::AlgebraicInput);
    assert!(p3.feedback.contains_key("value-only"));
}

#[test]
fn fallacy_bank_keys_the_error_line() {
    let b = bank(corpus::FALLACY, &GenConfig::default());
    match &b.item("minus-one-is-one/T11/error-line").unwrap().key {
        Some(AnswerKey::Lines { lines }) => assert_eq!(lines, &[3]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn converse_items_use_the_table_counterexample() {
    let b = bank(corpus::THEOREM1, &theorem1_config());
    let truth = b.item("theorem1/T9/converse-truth").unwrap();
    assert!(truth.response_type.is_mcq());
    let sample = &b
        .item("theorem1/T9/converse-counterexample")
        .unwrap()
        .sample_answer;
    assert!(
        sample.as_deref().unwrap_or_default().contains("1/n"),
        "{sample:?}"
    );
}

#[test]
fn markdown_hides_keys_from_students() {
    let b = bank(corpus::THEOREM1, &theorem1_config());
    let student = b.to_markdown(false);
    let teacher = b.to_markdown(true);
    assert!(teacher.len() > student.len());
    assert!(teacher.contains("Key: line 2") && teacher.contains("**(key)**"));
    assert!(!student.contains("Key:") && !student.contains("(key)"));
}
