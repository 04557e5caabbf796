//! Regenerates the files in `golden/`:
//!
//!     cargo run -p proofcomp --example make_golden

#[allow(dead_code)]
#[path = "../tests/common/golden.rs"]
mod golden;

use std::fs;
use std::path::Path;

use proofcomp::config::GenConfig;
use proofcomp::corpus;
use proofcomp::grader::{grade_all, grades_to_jsonl, ResponseRecord};

fn csv(records: &[ResponseRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["student_id", "item_id", "raw_answer"])
        .unwrap();
    for r in records {
        w.write_record([&r.student_id, &r.item_id, &r.raw_answer])
            .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn main() {
    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../golden");
    fs::create_dir_all(&out).unwrap();
    let write = |name: &str, text: &str| fs::write(out.join(name), text).unwrap();

    write("theorem1.bank.json", &golden::theorem1_bank().to_json());
    write("fallacy.bank.json", &golden::fallacy_bank().to_json());
    write("induction.bank.json", &golden::induction_bank().to_json());
    for (name, log) in golden::all_logs() {
        let bank = golden::bank_for(name);
        write(&format!("{name}_responses.csv"), &csv(&log));
        write(
            &format!("{name}_grades.jsonl"),
            &grades_to_jsonl(&grade_all(&bank, &log).unwrap()),
        );
    }
    let cfg = GenConfig::from_toml(corpus::THEOREM1_CONFIG).unwrap();
    let table = cfg.table.as_ref().unwrap().build().unwrap();
    write("table1.md", &table.to_markdown(None));
}
