mod common;

use std::collections::BTreeSet;

use common::golden;
use proofcomp::analytics::{analyze, compute_stats, distractor_report, AnalyticsError, Pct};
use proofcomp::grader::{grade_all, register_feedback, ResponseRecord};
use proptest::prelude::*;

fn answers() -> impl Strategy<Value = Vec<String>> {
    let answer = prop_oneof![
        Just(String::new()),
        (1usize..=9).prop_map(|n| n.to_string()),
        Just("seven".to_string()),
    ];
    prop::collection::vec(answer, 1..60)
}

fn records(item: &str, answers: &[String]) -> Vec<ResponseRecord> {
    answers
        .iter()
        .enumerate()
        .map(|(i, a)| ResponseRecord {
            student_id: format!("s{i:03}"),
            item_id: item.to_string(),
            raw_answer: a.clone(),
            timestamp: None,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_partition_the_attempts(answers in answers()) {
        let bank = golden::theorem1_bank();
        let grades = grade_all(&bank, &records(golden::PART_B, &answers)).unwrap();
        let s = &compute_stats(&grades, None, Some(&bank)).unwrap()[0];
        prop_assert_eq!(s.attempts, answers.len() as u64);
        prop_assert_eq!(s.blank.count + s.respondents, s.attempts);
        prop_assert_eq!(s.correct.count + s.incorrect.count + s.invalid.count + s.ungraded, s.respondents);
        prop_assert_eq!(s.answers.iter().map(|a| a.share.count).sum::<u64>(), s.respondents);
        prop_assert_eq!(s.classes.values().sum::<u64>(), s.respondents);
        prop_assert!(s.answers.windows(2).all(|w| w[0].share.count >= w[1].share.count));
        prop_assert_eq!(s.correct.of_attempts, Pct::of(s.correct.count, s.attempts));
    }

    #[test]
    fn record_order_does_not_matter(answers in answers(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let bank = golden::theorem1_bank();
        let mut grades = grade_all(&bank, &records(golden::PART_B, &answers)).unwrap();
        let a = analyze(&grades, None, Some(&bank)).unwrap();
        grades.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let b = analyze(&grades, None, Some(&bank)).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn option_tallies_cover_every_respondent(picks in prop::collection::vec(prop::sample::subsequence(vec!["A", "B", "C", "D", "E"], 0..=5), 1..60)) {
        let bank = golden::theorem1_bank();
        let answers: Vec<String> = picks.iter().map(|p| p.join(",")).collect();
        let grades = grade_all(&bank, &records(golden::PART_D, &answers)).unwrap();
        let s = &compute_stats(&grades, None, Some(&bank)).unwrap()[0];
        prop_assert_eq!(s.options.len(), 5);
        for t in &s.options {
            prop_assert_eq!(t.selected.count + t.not_selected.count, s.respondents);
        }
        for t in &s.incorrect_options {
            prop_assert_eq!(t.selected.count + t.not_selected.count, s.incorrect.count);
        }
    }
}

#[test]
fn percentages_round_half_up() {
    assert_eq!(Pct::of(1, 8), Pct(1250));
    assert_eq!(Pct::of(1, 3), Pct(3333));
    assert_eq!(Pct::of(2, 3), Pct(6667));
    assert_eq!(Pct::of(6, 338), Pct(178));
    assert_eq!(Pct::of(5, 0), Pct(0));
    assert_eq!(Pct(7064).to_string(), "70.64");
    assert_eq!(Pct(5).to_string(), "0.05");
}

#[test]
fn roster_students_without_records_count_as_blank() {
    let bank = golden::theorem1_bank();
    let grades = grade_all(&bank, &records(golden::PART_A, &["2".into(), "1".into()])).unwrap();
    let roster: BTreeSet<String> = ["s000", "s001", "s002", "s003"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let s = &compute_stats(&grades, Some(&roster), Some(&bank)).unwrap()[0];
    assert_eq!((s.attempts, s.respondents, s.blank.count), (4, 2, 2));
    assert_eq!(s.correct.of_attempts, Pct(2500));
    assert_eq!(s.correct.of_respondents, Pct(5000));
}

#[test]
fn the_latest_attempt_per_student_counts() {
    let bank = golden::theorem1_bank();
    let mut recs = records(golden::PART_A, &["1".into()]);
    recs[0].timestamp = Some("2024-01-01T10:00:00Z".into());
    let mut later = recs[0].clone();
    later.raw_answer = "2".into();
    later.timestamp = Some("2024-01-01T11:00:00Z".into());
    recs.push(later);
    let grades = grade_all(&bank, &recs).unwrap();
    let s = &compute_stats(&grades, None, None).unwrap()[0];
    assert_eq!((s.attempts, s.correct.count), (1, 1));
}

#[test]
fn grades_from_different_bank_versions_are_not_mixed() {
    let bank = golden::fallacy_bank();
    let newer =
        register_feedback(&bank, golden::FALLACY, "line 4", "Look again at line 3.").unwrap();
    let mut grades = grade_all(&bank, &records(golden::FALLACY, &["4".into()])).unwrap();
    grades.extend(grade_all(&newer, &records(golden::FALLACY, &["2".into()])).unwrap());
    assert_eq!(
        compute_stats(&grades, None, None),
        Err(AnalyticsError::MixedBankVersions(vec![1, 2]))
    );
}

#[test]
fn distractors_rank_wrong_answers_and_note_missing_feedback() {
    let bank = golden::fallacy_bank();
    let bank = register_feedback(
        &bank,
        golden::FALLACY,
        "line 4",
        "Line 4 only uses arithmetic.",
    )
    .unwrap();
    let grades = grade_all(&bank, &golden::fallacy()).unwrap();
    let stats = compute_stats(&grades, None, Some(&bank)).unwrap();
    let report = distractor_report(&stats, Some(&bank));
    let d = &report[0];
    let classes: Vec<&str> = d.distractors.iter().map(|x| x.class.as_str()).collect();
    assert_eq!(classes, ["line 4", "line 2", "line 1", "line 5"]);
    assert!(d.distractors[0].has_feedback);
    assert!(!d.distractors[1].has_feedback);
    assert_eq!(d.correct.of_respondents, Pct(4768));
}
