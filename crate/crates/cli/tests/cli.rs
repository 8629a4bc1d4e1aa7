//! End-to-end tests of the installed binary: happy paths, exit codes,
//! and the sign/filter store handoff.

use ghirbal_core::doc::{Document, UnitMode};
use ghirbal_core::io::write_shard;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::tempdir;

const BIN: &str = env!("CARGO_BIN_EXE_ghirbal");

const LETTERS: [char; 28] = [
    'ا', 'ب', 'ت', 'ث', 'ج', 'ح', 'خ', 'د', 'ذ', 'ر', 'ز', 'س', 'ش', 'ص', 'ض', 'ط', 'ظ', 'ع',
    'غ', 'ف', 'ق', 'ك', 'ل', 'م', 'ن', 'ه', 'و', 'ي',
];

fn sentence(rng: &mut ChaCha8Rng, words: usize) -> String {
    let mut out = String::new();
    for w in 0..words {
        if w > 0 {
            out.push(' ');
        }
        let len = rng.gen_range(4..=8);
        for _ in 0..len {
            out.push(LETTERS[rng.gen_range(0..LETTERS.len())]);
        }
    }
    out.push('.');
    out
}

fn article(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..5).map(|_| sentence(&mut rng, 9)).collect::<Vec<_>>().join("\n")
}

fn shard(dir: &Path, name: &str, texts: &[(String, String)]) -> PathBuf {
    let docs: Vec<Document> = texts
        .iter()
        .map(|(id, text)| Document::new(id.clone(), text.clone(), name))
        .collect();
    let path = dir.join(format!("{name}-0000.jsonl"));
    write_shard(docs.iter(), &path, &UnitMode::Words).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited")
}

#[test]
fn pipeline_runs_end_to_end_and_analyze_recomputes() {
    let dir = tempdir().unwrap();
    let raw = dir.path().join("raw");
    std::fs::create_dir_all(&raw).unwrap();
    let a_texts: Vec<(String, String)> = (0..5)
        .map(|i| (format!("a/{i}"), article(100 + i)))
        .chain([(String::from("a/junk"), String::from("نص قصير."))])
        .collect();
    let b_texts: Vec<(String, String)> = vec![
        ("b/copy0".into(), article(100)),
        ("b/copy1".into(), article(101)),
        ("b/own".into(), article(900)),
    ];
    let shard_a = shard(&raw, "a", &a_texts);
    let shard_b = shard(&raw, "b", &b_texts);
    let out_root = dir.path().join("out");
    let config = dir.path().join("pipeline.toml");
    std::fs::write(
        &config,
        format!(
            r#"output_root = "{}"

[[sources]]
name = "a"
pattern = "{}"
priority = 1

[[sources]]
name = "b"
pattern = "{}"
priority = 2
"#,
            out_root.display(),
            shard_a.display(),
            shard_b.display()
        ),
    )
    .unwrap();

    let out = run(&["pipeline", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("filter:"), "stdout: {text}");
    assert!(text.contains("minhash:"), "stdout: {text}");
    assert!(text.contains("reports in"), "stdout: {text}");
    for file in [
        "filtered/a-0000.jsonl",
        "deduped/consensus.jsonl",
        "final/b-0000.jsonl",
        "report/report.md",
        "report/overlap_matrix.csv",
        "minhash_stats.json",
    ] {
        assert!(out_root.join(file).exists(), "missing {file}");
    }

    // recompute analytics from the same root into a fresh directory
    let report2 = dir.path().join("report2");
    let out = run(&[
        "analyze",
        "--root",
        out_root.to_str().unwrap(),
        "--report-dir",
        report2.to_str().unwrap(),
        "--mode",
        "docs",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(report2.join("depth_histogram.json").exists());
}

#[test]
fn usage_errors_exit_1() {
    let out = run(&["pipeline", "--config", "x.toml", "--bogus-flag"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--bogus-flag"));

    // a source argument without NAME=GLOB shape is a usage error
    let out = run(&["filter", "--input", "justaglob", "--output", "o"]);
    assert_eq!(code(&out), 1);

    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("pipeline"));
}

#[test]
fn invalid_config_exits_1() {
    let dir = tempdir().unwrap();
    let raw = dir.path().join("raw");
    std::fs::create_dir_all(&raw).unwrap();
    let shard_a = shard(&raw, "a", &[("a/0".into(), article(1))]);
    let config = dir.path().join("pipeline.toml");
    std::fs::write(
        &config,
        format!(
            r#"output_root = "{}"

[[sources]]
name = "a"
pattern = "{}"
priority = 1

[[sources]]
name = "b"
pattern = "{}"
priority = 1
"#,
            dir.path().join("out").display(),
            shard_a.display(),
            shard_a.display()
        ),
    )
    .unwrap();
    let out = run(&["pipeline", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("priority"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_priority_source_exits_2() {
    let dir = tempdir().unwrap();
    let raw = dir.path().join("raw");
    std::fs::create_dir_all(&raw).unwrap();
    let shard_a = shard(&raw, "a", &[("a/0".into(), article(1))]);
    let out = run(&[
        "minhash",
        "--input",
        &format!("a={}", shard_a.display()),
        "--output",
        dir.path().join("out").to_str().unwrap(),
        "--priority",
        "b",
    ]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("unknown source"), "stderr: {}", stderr(&out));
}

#[test]
fn missing_config_file_exits_3() {
    let out = run(&["pipeline", "--config", "/nonexistent/pipeline.toml"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn filter_flag_overrides_tighten_the_gate() {
    let dir = tempdir().unwrap();
    let raw = dir.path().join("raw");
    std::fs::create_dir_all(&raw).unwrap();
    // 27 words: past the default 20-word floor, under a 30-word override
    let text = {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        (0..3).map(|_| sentence(&mut rng, 9)).collect::<Vec<_>>().join("\n")
    };
    let shard_w = shard(&raw, "web", &[("web/0".into(), text)]);
    let input = format!("web={}", shard_w.display());

    let out_default = dir.path().join("kept");
    let out = run(&["filter", "--input", &input, "--output", out_default.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("kept 1/1"));

    let out_strict = dir.path().join("strict");
    let out = run(&[
        "filter",
        "--input",
        &input,
        "--output",
        out_strict.to_str().unwrap(),
        "--min-words",
        "30",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("kept 0/1"));
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_strict.join("filter_stats.json")).unwrap())
            .unwrap();
    assert_eq!(stats["reason_tallies"]["too_few_words"], 1);
}

#[test]
fn sentdedup_phases_share_a_store() {
    let dir = tempdir().unwrap();
    let raw = dir.path().join("raw");
    std::fs::create_dir_all(&raw).unwrap();
    let boiler = "تعلن الصحيفة عن جديد اخبارها كل صباح. \
                  جميع الحقوق محفوظة لدى الناشر الرسمي هنا. \
                  يمنع النسخ دون اذن خطي من الادارة.";
    let texts: Vec<(String, String)> = (0..5)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(600 + i);
            let body: Vec<String> = (0..7).map(|_| sentence(&mut rng, 8)).collect();
            (format!("web/{i}"), format!("{boiler}\n{}", body.join("\n")))
        })
        .collect();
    let shard_w = shard(&raw, "web", &texts);
    let input = format!("web={}", shard_w.display());
    let store = dir.path().join("spans.store");
    let out_dir = dir.path().join("deduped");

    let out = run(&[
        "sentdedup",
        "--input",
        &input,
        "--output",
        out_dir.to_str().unwrap(),
        "--store",
        store.to_str().unwrap(),
        "--phase",
        "sign",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("span counts written"));
    assert!(store.exists());
    assert!(!out_dir.exists(), "sign phase must not write shards");

    let out = run(&[
        "sentdedup",
        "--input",
        &input,
        "--output",
        out_dir.to_str().unwrap(),
        "--store",
        store.to_str().unwrap(),
        "--phase",
        "filter",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    // the three boilerplate sentences vanish from all five documents
    assert!(stdout(&out).contains("15 sentences removed"), "stdout: {}", stdout(&out));
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("sentdedup_stats.json")).unwrap())
            .unwrap();
    assert_eq!(stats["docs_modified"], 5);
    assert_eq!(stats["docs_discarded"], 0);
}
