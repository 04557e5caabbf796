//! Synthetic response logs rebuilt from published item counts, and the
//! banks they are graded against.

use proofcomp::config::GenConfig;
use proofcomp::corpus;
use proofcomp::dsl::parse_proof;
use proofcomp::grader::ResponseRecord;
use proofcomp::questions::{generate, QuestionBank};

pub const PART_A: &str = "theorem1/T5/backing/completeness-axiom";
pub const PART_B: &str = "theorem1/T4/bounded";
pub const PART_C: &str = "theorem1/T4/increasing";
pub const PART_D: &str = "theorem1/T1/bounded";
pub const PART_E: &str = "theorem1/T1/convergent";
pub const FALLACY: &str = "minus-one-is-one/T11/error-line";
pub const P3: &str = "sum-of-squares/T2/instantiate/P(3)";

pub fn theorem1_bank() -> QuestionBank {
    let cfg = GenConfig::from_toml(corpus::THEOREM1_CONFIG).unwrap();
    let table = cfg.table.as_ref().unwrap().build().unwrap();
    generate(&parse_proof(corpus::THEOREM1).unwrap(), Some(&table), &cfg)
}

pub fn fallacy_bank() -> QuestionBank {
    generate(
        &parse_proof(corpus::FALLACY).unwrap(),
        None,
        &GenConfig::default(),
    )
}

pub fn induction_bank() -> QuestionBank {
    generate(
        &parse_proof(corpus::INDUCTION).unwrap(),
        None,
        &GenConfig::default(),
    )
}

fn student(i: usize) -> String {
    format!("s{:04}", i + 1)
}

/// Builds a log in which the given answers occur the given number of times,
/// followed by `blanks` empty answers. Students are numbered from 1.
pub fn log(item: &str, answers: &[(&str, usize)], blanks: usize) -> Vec<ResponseRecord> {
    let mut out = Vec::new();
    for (answer, n) in answers {
        for _ in 0..*n {
            out.push(ResponseRecord {
                student_id: student(out.len()),
                item_id: item.to_string(),
                raw_answer: answer.to_string(),
                timestamp: None,
            });
        }
    }
    for _ in 0..blanks {
        out.push(ResponseRecord {
            student_id: student(out.len()),
            item_id: item.to_string(),
            raw_answer: String::new(),
            timestamp: None,
        });
    }
    out
}

/// Wrong multi-select answers with fixed per-option counts. Student `i` of
/// `m` picks option X iff `(i + offset_X) mod m < count_X`. The offsets are
/// chosen so that no student picks exactly the key or nothing at all.
pub fn multi_wrong(m: usize, tallies: &[(char, usize, usize)], key: &str) -> Vec<String> {
    let answers: Vec<String> = (0..m)
        .map(|i| {
            tallies
                .iter()
                .filter(|(_, count, off)| (i + off) % m < *count)
                .map(|(c, _, _)| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    assert!(
        answers.iter().all(|a| !a.is_empty() && a != key),
        "layout must avoid blank and key answers"
    );
    answers
}

fn with_multi(
    item: &str,
    correct: (&str, usize),
    wrong: Vec<String>,
    invalid: &[&str],
    blanks: usize,
) -> Vec<ResponseRecord> {
    let mut answers: Vec<(&str, usize)> = vec![correct];
    answers.extend(wrong.iter().map(|a| (a.as_str(), 1)));
    answers.extend(invalid.iter().map(|a| (*a, 1)));
    log(item, &answers, blanks)
}

/// 344 attempts, 6 blank: 243 line 2, then 56/23/6 on lines 1/4/5 and the
/// remaining 10 wrong answers on lines 6 and 3.
pub fn part_a() -> Vec<ResponseRecord> {
    log(
        PART_A,
        &[
            ("2", 243),
            ("1", 56),
            ("4", 23),
            ("5", 6),
            ("6", 7),
            ("3", 3),
        ],
        6,
    )
}

/// 344 attempts, 339 respondents, the full published line table.
pub fn part_b() -> Vec<ResponseRecord> {
    log(
        PART_B,
        &[("1", 261), ("2", 19), ("3", 14), ("4", 34), ("6", 11)],
        5,
    )
}

/// 344 attempts, 339 respondents: 303 correct, 32 readable wrong answers
/// and 4 answers that are not line numbers.
pub fn part_c() -> Vec<ResponseRecord> {
    log(
        PART_C,
        &[
            ("5", 303),
            ("4", 18),
            ("3", 8),
            ("2", 4),
            ("1", 2),
            ("line 9", 1),
            ("five", 1),
            ("5 or 4", 1),
            ("0", 1),
        ],
        5,
    )
}

/// 344 attempts, 16 blank, 85 exact {A,D}; 242 wrong selections with the
/// published per-option counts; one unreadable answer.
pub fn part_d() -> Vec<ResponseRecord> {
    let wrong = multi_wrong(
        242,
        &[
            ('A', 133, 0),
            ('B', 43, 0),
            ('C', 197, 0),
            ('D', 147, 0),
            ('E', 63, 49),
        ],
        "A,D",
    );
    with_multi(PART_D, ("A,D", 85), wrong, &["A,F"], 16)
}

/// 344 attempts, 14 blank, 208 exact {B,E}; 122 wrong selections with the
/// published per-option counts.
pub fn part_e() -> Vec<ResponseRecord> {
    let wrong = multi_wrong(
        122,
        &[
            ('A', 52, 0),
            ('B', 75, 0),
            ('C', 61, 0),
            ('D', 57, 49),
            ('E', 35, 0),
        ],
        "B,E",
    );
    with_multi(PART_E, ("B,E", 208), wrong, &[], 14)
}

/// 323 respondents; only the three percentages are published, the split of
/// the remaining 43 and the 7 blanks are invented.
pub fn fallacy() -> Vec<ResponseRecord> {
    log(
        FALLACY,
        &[("3", 154), ("4", 73), ("2", 53), ("1", 25), ("5", 18)],
        7,
    )
}

/// 350 attempts; 91 (26%) give only the value of the right hand side.
pub fn p3() -> Vec<ResponseRecord> {
    log(
        P3,
        &[
            ("1+4+9 = 3*(3+1)*(2*3+1)/6", 180),
            ("1^2 + 2^2 + 3^2 = 14", 40),
            ("3*(3+1)*(2*3+1)/6", 61),
            ("14", 30),
            ("1+4+9 = 3*4*7/6 + 1", 25),
            ("sum(k^2, k, 1, 3) = 3*(3+1)*(2*3+1)/6", 14),
        ],
        0,
    )
}

/// Number of bare-value answers in [`p3`].
pub const P3_VALUE_ONLY: usize = 91;

pub fn all_logs() -> Vec<(&'static str, Vec<ResponseRecord>)> {
    vec![
        ("part_a", part_a()),
        ("part_b", part_b()),
        ("part_c", part_c()),
        ("part_d", part_d()),
        ("part_e", part_e()),
        ("fallacy", fallacy()),
        ("p3", p3()),
    ]
}

pub fn bank_for(name: &str) -> QuestionBank {
    match name {
        "fallacy" => fallacy_bank(),
        "p3" => induction_bank(),
        _ => theorem1_bank(),
    }
}
