//! Acceptance suite. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.
//!
//!     cargo test -p proofcomp --test acceptance -- --nocapture

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::{golden, oracle};
use proofcomp::analytics::{analyze, compute_stats, ItemStats, Pct};
use proofcomp::combos::{EntryStatus, RuleBasis};
use proofcomp::config::{DerivationWeights, GenConfig};
use proofcomp::corpus;
use proofcomp::dsl::{parse_proof, render_numbered, RenderStyle};
use proofcomp::expr::{parse_expr, Equivalence, Expr, Formula};
use proofcomp::grader::{
    grade_all, grade_derivation, grade_item, ResponseRecord, CORRECT, FLAG_EQUATION_VALUE,
    NO_RESPONSE,
};
use proofcomp::logic::{contrapositive, converse, negate, LogicStatement};
use proofcomp::questions::fade::{fade, FadeStrategy, Solution, SolutionStep};
use proofcomp::questions::{generate, AnswerKey, QuestionBank};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// 1. golden statistics

#[derive(Clone, Copy)]
enum Base {
    Attempts,
    Respondents,
}

fn pct_of(share: &proofcomp::analytics::Share, base: Base) -> Pct {
    match base {
        Base::Attempts => share.of_attempts,
        Base::Respondents => share.of_respondents,
    }
}

enum Quantity {
    Correct,
    Incorrect,
    Line(usize),
    Selected(&'static str),
    WrongSelected(&'static str),
    WrongNotSelected(&'static str),
}

struct Published {
    log: &'static str,
    what: Quantity,
    count: u64,
    hundredths: u64,
    base: Base,
}

fn p(log: &'static str, what: Quantity, count: u64, hundredths: u64, base: Base) -> Published {
    Published {
        log,
        what,
        count,
        hundredths,
        base,
    }
}

fn published() -> Vec<Published> {
    use Base::*;
    use Quantity::*;
    vec![
        p("part_a", Correct, 243, 7064, Attempts),
        p("part_a", Incorrect, 95, 2762, Attempts),
        p("part_a", Line(1), 56, 1657, Respondents),
        p("part_a", Line(4), 23, 680, Respondents),
        p("part_a", Line(5), 6, 178, Respondents),
        p("part_b", Correct, 261, 7587, Attempts),
        p("part_b", Incorrect, 78, 2267, Attempts),
        p("part_b", Correct, 261, 7699, Respondents),
        p("part_b", Line(2), 19, 560, Respondents),
        p("part_b", Line(3), 14, 413, Respondents),
        p("part_b", Line(4), 34, 1003, Respondents),
        p("part_b", Line(6), 11, 324, Respondents),
        p("part_c", Correct, 303, 8938, Respondents),
        p("part_c", Incorrect, 32, 930, Attempts),
        p("part_c", Line(4), 18, 531, Respondents),
        p("part_c", Line(3), 8, 236, Respondents),
        p("part_d", Correct, 85, 2471, Attempts),
        p("part_d", WrongSelected("A"), 133, 3866, Attempts),
        p("part_d", WrongNotSelected("A"), 109, 3169, Attempts),
        p("part_d", WrongSelected("B"), 43, 1250, Attempts),
        p("part_d", WrongNotSelected("B"), 199, 5785, Attempts),
        p("part_d", WrongSelected("C"), 197, 5727, Attempts),
        p("part_d", WrongNotSelected("C"), 45, 1308, Attempts),
        p("part_d", WrongSelected("D"), 147, 4273, Attempts),
        p("part_d", WrongNotSelected("D"), 95, 2762, Attempts),
        p("part_d", WrongSelected("E"), 63, 1831, Attempts),
        p("part_d", WrongNotSelected("E"), 179, 5203, Attempts),
        p("part_d", Selected("A"), 218, 6337, Attempts),
        p("part_d", Selected("D"), 232, 6744, Attempts),
        p("part_e", Correct, 208, 6047, Attempts),
        p("part_e", WrongSelected("A"), 52, 1512, Attempts),
        p("part_e", WrongNotSelected("A"), 70, 2035, Attempts),
        p("part_e", WrongSelected("B"), 75, 2180, Attempts),
        p("part_e", WrongNotSelected("B"), 47, 1366, Attempts),
        p("part_e", WrongSelected("C"), 61, 1773, Attempts),
        p("part_e", WrongNotSelected("C"), 61, 1773, Attempts),
        p("part_e", WrongSelected("D"), 57, 1657, Attempts),
        p("part_e", WrongNotSelected("D"), 65, 1890, Attempts),
        p("part_e", WrongSelected("E"), 35, 1017, Attempts),
        p("part_e", WrongNotSelected("E"), 87, 2529, Attempts),
        p("part_e", Selected("B"), 283, 8227, Attempts),
        p("part_e", Selected("E"), 243, 7064, Attempts),
        p("fallacy", Correct, 154, 4768, Respondents),
        p("fallacy", Line(4), 73, 2260, Respondents),
        p("fallacy", Line(2), 53, 1641, Respondents),
    ]
}

fn lookup(s: &ItemStats, what: &Quantity) -> Option<proofcomp::analytics::Share> {
    let tally = |list: &[proofcomp::analytics::OptionTally], id: &str| {
        list.iter().find(|t| t.option == id).cloned()
    };
    match what {
        Quantity::Correct => Some(s.correct),
        Quantity::Incorrect => Some(s.incorrect),
        Quantity::Line(n) => {
            let class = format!("line {n}");
            s.answers.iter().find(|a| a.class == class).map(|a| a.share)
        }
        Quantity::Selected(id) => tally(&s.options, id).map(|t| t.selected),
        Quantity::WrongSelected(id) => tally(&s.incorrect_options, id).map(|t| t.selected),
        Quantity::WrongNotSelected(id) => tally(&s.incorrect_options, id).map(|t| t.not_selected),
    }
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let mut stats: BTreeMap<&str, ItemStats> = BTreeMap::new();
    for (name, log) in golden::all_logs() {
        if name == "p3" {
            continue;
        }
        let bank = golden::bank_for(name);
        let grades = grade_all(&bank, &log).map_err(|e| format!("{name}: {e}"))?;
        let report = analyze(&grades, None, Some(&bank)).map_err(|e| format!("{name}: {e}"))?;
        ensure(report.items.len() == 1, || {
            format!("{name}: expected one item")
        })?;
        stats.insert(name, report.items.into_iter().next().unwrap());
    }
    let checks = published();
    for c in &checks {
        let s = &stats[c.log];
        let share =
            lookup(s, &c.what).ok_or_else(|| format!("{}: quantity missing from report", c.log))?;
        ensure(share.count == c.count, || {
            format!("{}: count {} != published {}", c.log, share.count, c.count)
        })?;
        let got = pct_of(&share, c.base);
        ensure(got.0.abs_diff(c.hundredths) <= 1, || {
            format!("{}: {} != published {}", c.log, got, Pct(c.hundredths))
        })?;
    }
    // The fallacy distractors are ranked line 4 then line 2.
    let ranked: Vec<&str> = stats["fallacy"]
        .answers
        .iter()
        .map(|a| a.class.as_str())
        .filter(|c| *c != CORRECT)
        .collect();
    ensure(ranked.starts_with(&["line 4", "line 2"]), || {
        format!("fallacy ranking {ranked:?}")
    })?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} published percentages within 0.01, {:.0?}",
        checks.len(),
        elapsed
    ))
}

// ---------------------------------------------------------------------------
// 2. item generation for the theorem 1 comprehension question

fn criterion_2() -> Outcome {
    let bank = golden::theorem1_bank();
    ensure(bank.seed == 42, || {
        format!("corpus config seed is {}", bank.seed)
    })?;
    let lines = |id: &str| match bank.item(id).and_then(|i| i.key.clone()) {
        Some(AnswerKey::Lines { lines }) => Ok(lines),
        other => Err(format!("{id}: key {other:?}")),
    };
    let options = |id: &str| match bank.item(id).and_then(|i| i.key.clone()) {
        Some(AnswerKey::Options { options }) => Ok(options),
        other => Err(format!("{id}: key {other:?}")),
    };
    ensure(lines(golden::PART_A)? == [2], || "part (a) key".into())?;
    ensure(lines(golden::PART_B)? == [1], || "part (b) key".into())?;
    ensure(lines(golden::PART_C)? == [5], || "part (c) key".into())?;
    ensure(options(golden::PART_D)? == ["A", "D"], || {
        "part (d) key".into()
    })?;
    ensure(options(golden::PART_E)? == ["B", "E"], || {
        "part (e) key".into()
    })?;
    ensure(bank.key_problems().is_empty(), || {
        format!("{:?}", bank.key_problems())
    })?;

    let again = golden::theorem1_bank().to_json();
    ensure(bank.to_json() == again, || "two runs differ".into())?;

    // Shuffled options too: same seed, same order.
    let mut cfg = GenConfig::from_toml(corpus::THEOREM1_CONFIG).unwrap();
    cfg.shuffle = true;
    let proof = parse_proof(corpus::THEOREM1).unwrap();
    let table = cfg.table.as_ref().unwrap().build().unwrap();
    let a = generate(&proof, Some(&table), &cfg).to_json();
    let b = generate(&proof, Some(&table), &cfg).to_json();
    ensure(a == b, || "shuffled runs differ".into())?;
    Ok(format!(
        "keys 2, 1, 5, {{A,D}}, {{B,E}}; {} items byte-identical over two runs",
        bank.items.len()
    ))
}

// ---------------------------------------------------------------------------
// 3. combination table

const TABLE_1: &str = "\
| Increasing ? | Bounded ? | Converges ? | Example |
| :-: | :-: | :-: | :-- |
| T | T | T | Exemplify theorem: a_n=1-1/n |
| T | T | F | Counter example to theorem! |
| T | F | T | Note A. |
| T | F | F | a_n=n |
| F | T | T | a_n=1/n |
| F | T | F | a_n=(-1)^n |
| F | F | T | Note A. |
| F | F | F | a_n=(-n)^n |
";

fn criterion_3() -> Outcome {
    let cfg = GenConfig::from_toml(corpus::THEOREM1_CONFIG).unwrap();
    let table = cfg
        .table
        .as_ref()
        .unwrap()
        .build()
        .map_err(|e| e.to_string())?;
    let md = table.to_markdown(None);
    ensure(md == TABLE_1, || format!("markdown differs:\n{md}"))?;
    let golden_file = concat!(env!("CARGO_MANIFEST_DIR"), "/../../golden/table1.md");
    if let Ok(on_disk) = std::fs::read_to_string(golden_file) {
        ensure(on_disk == md, || "golden/table1.md is stale".into())?;
    }
    let (mut exemplify, mut by_theorem, mut by_external, mut witnessed) = (0, 0, 0, 0);
    for e in &table.entries {
        match &e.status {
            EntryStatus::ExemplifiesTheorem { .. } => exemplify += 1,
            EntryStatus::Impossible { rule } => match table.rule(rule).map(|r| &r.basis) {
                Some(RuleBasis::TheoremUnderStudy) => by_theorem += 1,
                Some(RuleBasis::ExternalTheorem { .. }) => by_external += 1,
                None => return Err(format!("unknown rule {rule}")),
            },
            EntryStatus::Example { .. } => witnessed += 1,
            EntryStatus::MissingWitness => return Err("row without witness".into()),
        }
    }
    let counts = (
        table.entries.len(),
        exemplify,
        by_theorem,
        by_external,
        witnessed,
    );
    ensure(counts == (8, 1, 1, 2, 4), || {
        format!("row counts {counts:?}")
    })?;
    Ok("8 rows byte-identical; 1 exemplifies, 1 by theorem, 2 Note A, 4 witnessed".into())
}

// ---------------------------------------------------------------------------
// 4. reasoning by equivalence

fn e(s: &str) -> Expr {
    parse_expr(s).unwrap_or_else(|err| panic!("{s}: {err}"))
}

/// Every pair decision made by the grader must agree with the numeric oracle.
fn check_pairs(lines: &[Expr], start: &Expr, pairs: &[bool]) -> Result<usize, String> {
    let mut prev = start;
    for (i, (line, ok)) in lines.iter().zip(pairs).enumerate() {
        let truth = oracle::agree(prev, line, 20, 7 + i as u64)
            .ok_or_else(|| format!("pair {i} undefined everywhere"))?;
        ensure(truth == *ok, || {
            format!("pair {i}: grader {ok}, oracle {truth}")
        })?;
        prev = line;
    }
    Ok(pairs.len())
}

fn criterion_4() -> Outcome {
    let eq = Equivalence::new();
    let w = DerivationWeights::default();
    let start = e("n*(n+1)*(2*n+1)/6 + (n+1)^2");
    let target = e("(n+1)*(n+2)*(2*n+3)/6");
    let chain = [
        "(n+1)*(n*(2*n+1) + 6*(n+1))/6",
        "(n+1)*(2*n^2 + 7*n + 6)/6",
        "(n+1)*(n+2)*(2*n+3)/6",
    ];
    let lines: Vec<Expr> = chain.iter().map(|s| e(s)).collect();
    let mut decisions = 0;

    let g = grade_derivation(&lines, &start, &target, w, &eq);
    decisions += check_pairs(&lines, &start, &g.pairs)?;
    ensure(g.score == 1.0 && g.first_broken.is_none(), || {
        format!("clean chain: {g:?}")
    })?;

    // Perturb each integer in each line by one.
    let mut perturbed = 0;
    for k in 0..lines.len() {
        let mut count = 0;
        lines[k].clone().for_each_int_mut(&mut |_| count += 1);
        for j in 0..count {
            let mut bad = lines.clone();
            let mut seen = 0;
            bad[k].for_each_int_mut(&mut |n| {
                if seen == j {
                    *n += 1;
                }
                seen += 1;
            });
            let prev = if k == 0 { &start } else { &lines[k - 1] };
            if oracle::agree(prev, &bad[k], 20, 99) != Some(false) {
                continue;
            }
            let g = grade_derivation(&bad, &start, &target, w, &eq);
            decisions += check_pairs(&bad, &start, &g.pairs)?;
            ensure(g.score < 1.0, || {
                format!("line {} int {j}: score {}", k + 1, g.score)
            })?;
            ensure(g.first_broken == Some(k), || {
                format!("line {} int {j}: first broken {:?}", k + 1, g.first_broken)
            })?;
            perturbed += 1;
        }
    }
    ensure(perturbed >= 10, || {
        format!("only {perturbed} perturbations")
    })?;

    // Equivalent final line not in target form: only the form weight is lost.
    let mut unfactored = lines.clone();
    unfactored[2] = e("(2*n^3 + 9*n^2 + 13*n + 6)/6");
    let g = grade_derivation(&unfactored, &start, &target, w, &eq);
    decisions += check_pairs(&unfactored, &start, &g.pairs)?;
    ensure(!g.form_matches && g.first_broken.is_none(), || {
        format!("unfactored: {g:?}")
    })?;
    ensure((g.score - w.steps).abs() < 1e-12, || {
        format!("unfactored score {}", g.score)
    })?;

    Ok(format!("clean 1.0; {perturbed} perturbations flagged at the right pair; form-only loss {}; {decisions} decisions checked", w.form))
}

// ---------------------------------------------------------------------------
// 5. equation/value confusion

fn criterion_5() -> Outcome {
    let bank = golden::induction_bank();
    let log = golden::p3();
    let grades = grade_all(&bank, &log).map_err(|e| e.to_string())?;
    let bare: BTreeSet<&str> = log
        .iter()
        .filter(|r| !r.raw_answer.contains('='))
        .map(|r| r.student_id.as_str())
        .collect();
    let flagged: BTreeSet<&str> = grades
        .iter()
        .filter(|g| g.flags.iter().any(|f| f == FLAG_EQUATION_VALUE))
        .map(|g| g.student_id.as_str())
        .collect();
    ensure(bare.len() == golden::P3_VALUE_ONLY, || {
        format!("log has {} bare answers", bare.len())
    })?;
    ensure(flagged == bare, || {
        format!(
            "flagged {} students, expected {}",
            flagged.len(),
            bare.len()
        )
    })?;
    ensure(
        grades
            .iter()
            .filter(|g| flagged.contains(g.student_id.as_str()))
            .all(|g| g.score == Some(0.0)),
        || "flagged answer with nonzero score".into(),
    )?;
    let share = Pct::of(flagged.len() as u64, log.len() as u64);
    ensure(share == Pct(2600), || format!("share {share}"))?;
    let correct = grades.iter().filter(|g| g.answer_class == CORRECT).count();
    Ok(format!(
        "{} of {} ({share}%) flagged and scored 0; {correct} correct",
        flagged.len(),
        log.len()
    ))
}

// ---------------------------------------------------------------------------
// 6. property suites

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..3) {
            0 => Expr::var("x"),
            1 => Expr::var("y"),
            _ => Expr::int(rng.gen_range(-5..=7)),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_expr(rng, depth - 1);
    match rng.gen_range(0..6) {
        0 => Expr::add(vec![sub(rng), sub(rng)]),
        1 => Expr::mul(vec![sub(rng), sub(rng)]),
        2 => Expr::neg(sub(rng)),
        3 => Expr::div(sub(rng), sub(rng)),
        4 => Expr::pow(sub(rng), rng.gen_range(-1..=3)),
        _ => Expr::add(vec![sub(rng), Expr::neg(sub(rng))]),
    }
}

/// A pair that is equivalent by an algebraic identity, or one that is
/// usually not, chosen at random.
fn random_pair(rng: &mut ChaCha8Rng) -> (Expr, Expr) {
    let p = random_expr(rng, 2);
    let q = random_expr(rng, 2);
    let r = random_expr(rng, 2);
    let sq = |x: Expr| Expr::pow(x, 2);
    match rng.gen_range(0..8) {
        0 => (
            Expr::mul(vec![Expr::add(vec![p.clone(), q.clone()]), r.clone()]),
            Expr::add(vec![Expr::mul(vec![p, r.clone()]), Expr::mul(vec![r, q])]),
        ),
        1 => (
            sq(Expr::add(vec![p.clone(), q.clone()])),
            Expr::add(vec![
                sq(p.clone()),
                Expr::mul(vec![Expr::int(2), p, q.clone()]),
                sq(q),
            ]),
        ),
        2 => (
            Expr::add(vec![
                Expr::div(p.clone(), q.clone()),
                Expr::div(r.clone(), q.clone()),
            ]),
            Expr::div(Expr::add(vec![p, r]), q),
        ),
        3 => (Expr::mul(vec![p.clone(), q.clone()]), Expr::mul(vec![q, p])),
        4 => (
            Expr::add(vec![p.clone(), Expr::neg(q.clone())]),
            Expr::neg(Expr::add(vec![q, Expr::neg(p)])),
        ),
        5 => (Expr::div(Expr::mul(vec![p.clone(), q.clone()]), q), p),
        6 => (
            Expr::mul(vec![Expr::add(vec![p.clone(), q.clone()]), r.clone()]),
            Expr::add(vec![
                Expr::mul(vec![p, r.clone()]),
                Expr::mul(vec![r, q]),
                Expr::int(1),
            ]),
        ),
        _ => (p, q),
    }
}

fn expr_suite() -> Result<String, String> {
    let eq = Equivalence::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut checked, mut same, mut errors) = (0, 0, 0);
    let mut attempts = 0;
    while checked < 400 && attempts < 4000 {
        attempts += 1;
        let (a, b) = random_pair(&mut rng);
        let Some(truth) = oracle::agree(&a, &b, 20, attempts) else {
            continue;
        };
        let decided = match eq.equivalent(&a, &b) {
            Ok(d) => d,
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        ensure(decided == truth, || {
            format!("{a:?} vs {b:?}: engine {decided}, oracle {truth}")
        })?;
        checked += 1;
        same += truth as usize;
    }
    ensure(checked >= 200, || format!("only {checked} pairs defined"))?;
    Ok(format!(
        "{checked} expr pairs ({same} equivalent, {errors} rejected as undefined)"
    ))
}

fn random_statement(rng: &mut ChaCha8Rng, atoms: &[&str], depth: u32) -> LogicStatement {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return LogicStatement::atom(atoms[rng.gen_range(0..atoms.len())]);
    }
    let sub = |rng: &mut ChaCha8Rng| random_statement(rng, atoms, depth - 1);
    match rng.gen_range(0..5) {
        0 => LogicStatement::not(sub(rng)),
        1 => LogicStatement::and(vec![sub(rng), sub(rng)]),
        2 => LogicStatement::or(vec![sub(rng), sub(rng)]),
        3 => LogicStatement::implies(sub(rng), sub(rng)),
        _ => LogicStatement::iff(sub(rng), sub(rng)),
    }
}

fn truth_table(s: &LogicStatement, atoms: &[&str]) -> Vec<bool> {
    (0..1u32 << atoms.len())
        .map(|bits| {
            let env: BTreeMap<String, bool> = atoms
                .iter()
                .enumerate()
                .map(|(i, a)| (a.to_string(), bits >> i & 1 == 1))
                .collect();
            s.evaluate(&env)
                .expect("quantifier-free statement evaluates")
        })
        .collect()
}

fn logic_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut n = 0;
    for size in 1..=4 {
        let atoms = &["p", "q", "r", "s"][..size];
        for _ in 0..150 {
            let s = random_statement(&mut rng, atoms, 3);
            let t = truth_table(&s, atoms);
            let neg = truth_table(&negate(&s), atoms);
            ensure(t.iter().zip(&neg).all(|(a, b)| a != b), || {
                format!("negate not complementary: {s:?}")
            })?;
            ensure(truth_table(&negate(&negate(&s)), atoms) == t, || {
                format!("double negation: {s:?}")
            })?;

            let h = random_statement(&mut rng, atoms, 2);
            let c = random_statement(&mut rng, atoms, 2);
            let imp = LogicStatement::implies(h.clone(), c.clone());
            let ti = truth_table(&imp, atoms);
            let cp = contrapositive(&imp).map_err(|e| e.to_string())?;
            ensure(truth_table(&cp, atoms) == ti, || {
                format!("contrapositive: {imp:?}")
            })?;
            let cv = converse(&imp).map_err(|e| e.to_string())?;
            let differs = truth_table(&cv, atoms) != ti;
            let h_equiv_c = truth_table(&h, atoms) == truth_table(&c, atoms);
            ensure(differs != h_equiv_c, || format!("converse: {imp:?}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} statements over 1-4 atoms"))
}

fn fading_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut runs = 0;
    for _ in 0..100 {
        let steps = rng.gen_range(1..=10);
        let solution = Solution {
            problem: "p".into(),
            steps: (0..steps)
                .map(|i| SolutionStep {
                    formula: Formula::Expr(Expr::int(i as i64)),
                    prose: String::new(),
                })
                .collect(),
        };
        let levels = rng.gen_range(0..=steps);
        let faded = fade(&solution, levels, &FadeStrategy::Backward).map_err(|e| e.to_string())?;
        ensure(faded.len() == levels + 1, || "level count".into())?;
        for (k, f) in faded.iter().enumerate() {
            let want: BTreeSet<usize> = (steps - k..steps).collect();
            ensure(f.level == k && f.hidden == want, || {
                format!("{steps} steps, level {k}: {:?}", f.hidden)
            })?;
            if k > 0 {
                ensure(faded[k - 1].hidden.is_subset(&f.hidden), || {
                    "not monotone".into()
                })?;
            }
        }
        ensure(
            fade(&solution, steps + 1, &FadeStrategy::Backward).is_err(),
            || "overfading accepted".into(),
        )?;
        runs += 1;
    }
    Ok(format!("{runs} fadings"))
}

fn corpus_suite() -> Result<String, String> {
    for (name, text) in corpus::PROOFS {
        let p = parse_proof(text).map_err(|e| format!("{name}: {e}"))?;
        for style in [RenderStyle::Plain, RenderStyle::Structured] {
            let q = parse_proof(&render_numbered(&p, style))
                .map_err(|e| format!("{name} re-parse: {e}"))?;
            ensure(p == q, || format!("{name}: round trip differs ({style:?})"))?;
        }
    }
    Ok(format!("{} proofs round-trip", corpus::PROOFS.len()))
}

fn mcq_suite(bank: &QuestionBank) -> Result<String, String> {
    let item = bank.item(golden::PART_D).ok_or("no part (d) item")?;
    let ids: Vec<String> = item.options.iter().map(|o| o.id.clone()).collect();
    ensure(ids.len() == 5, || "five options".into())?;
    let key: BTreeSet<String> = item.key_options().into_iter().map(String::from).collect();
    for mask in 0u32..32 {
        let chosen: BTreeSet<String> = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, id)| id.clone())
            .collect();
        let r = ResponseRecord {
            student_id: "s".into(),
            item_id: item.id.clone(),
            raw_answer: chosen.iter().cloned().collect::<Vec<_>>().join(","),
            timestamp: None,
        };
        let g = grade_item(item, &r, bank.version, DerivationWeights::default())
            .map_err(|e| e.to_string())?;
        let want = if chosen.is_empty() {
            NO_RESPONSE
        } else if chosen == key {
            CORRECT
        } else {
            "wrong"
        };
        let ok = match want {
            "wrong" => g.answer_class != CORRECT && g.score == Some(0.0),
            w => g.answer_class == w && g.score == Some((chosen == key) as u8 as f64),
        };
        ensure(ok, || {
            format!("selection {chosen:?}: {} {:?}", g.answer_class, g.score)
        })?;
    }
    Ok("32 selections".into())
}

fn criterion_6() -> Outcome {
    let started = Instant::now();
    let bank = golden::theorem1_bank();
    let parts = [
        expr_suite()?,
        logic_suite()?,
        fading_suite()?,
        corpus_suite()?,
        mcq_suite(&bank)?,
    ];
    Ok(format!("{}; {:.1?}", parts.join("; "), started.elapsed()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("golden statistics", criterion_1),
        ("item generation", criterion_2),
        ("combination table", criterion_3),
        ("equivalence grading", criterion_4),
        ("equation/value confusion", criterion_5),
        ("property suites", criterion_6),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn stats_do_not_depend_on_a_roster_when_blanks_are_logged() {
    let bank = golden::theorem1_bank();
    let grades = grade_all(&bank, &golden::part_a()).unwrap();
    let roster: BTreeSet<String> = grades.iter().map(|g| g.student_id.clone()).collect();
    let a = compute_stats(&grades, None, Some(&bank)).unwrap();
    let b = compute_stats(&grades, Some(&roster), Some(&bank)).unwrap();
    assert_eq!(a, b);
}
