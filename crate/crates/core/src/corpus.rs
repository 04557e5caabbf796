//! The proofs shipped in `corpus/`, embedded at compile time.

pub const THEOREM1: &str = include_str!("../../../corpus/theorem1.proof");
pub const THEOREM1_CONFIG: &str = include_str!("../../../corpus/theorem1.cfg");
pub const THEOREM2A: &str = include_str!("../../../corpus/theorem2a.proof");
pub const THEOREM2B: &str = include_str!("../../../corpus/theorem2b.proof");
pub const INDUCTION: &str = include_str!("../../../corpus/induction.proof");
pub const FALLACY: &str = include_str!("../../../corpus/fallacy.proof");

/// `(file name, contents)` for every corpus proof.
pub const PROOFS: [(&str, &str); 5] = [
    ("theorem1.proof", THEOREM1),
    ("theorem2a.proof", THEOREM2A),
    ("theorem2b.proof", THEOREM2B),
    ("induction.proof", INDUCTION),
    ("fallacy.proof", FALLACY),
];
