use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_postedit"))
}

fn fixtures() -> PathBuf {
    postedit_core::fixtures::fixture_dir()
}

fn lexicon() -> String {
    fixtures()
        .join("cmudict_excerpt.dict")
        .display()
        .to_string()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "status {:?}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_json(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(stderr.lines().last().unwrap()).unwrap()
}

#[test]
fn unknown_subcommand_fails_with_usage() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn score_reports_table_one_counts() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = fs::read_to_string(fixtures().join("asr_pairs.tsv")).unwrap();
    let row = pairs.lines().find(|l| l.starts_with("t1-1\t")).unwrap();
    let cols: Vec<&str> = row.split('\t').collect();
    fs::write(dir.path().join("ref.txt"), format!("{}\n", cols[1])).unwrap();
    fs::write(dir.path().join("hyp.txt"), format!("{}\n", cols[2])).unwrap();
    let stdout = ok(&run_in(
        dir.path(),
        &[
            "score",
            "--reference",
            "ref.txt",
            "--hyp",
            "hyp.txt",
            "--per-sentence",
            "per.tsv",
        ],
    ));
    let wer_line = stdout.lines().find(|l| l.starts_with("WER")).unwrap();
    assert!(
        wer_line.contains("S=4\tD=0\tI=1\tN=13\terrors=5/13"),
        "{wer_line}"
    );
    assert!(wer_line.contains("0.384615"));
    let per = fs::read_to_string(dir.path().join("per.tsv")).unwrap();
    assert!(per.lines().nth(1).unwrap().starts_with("s1\t4\t0\t1\t13\t"));
    assert!(dir.path().join("per.tsv.manifest.json").exists());

    let json = ok(&run_in(
        dir.path(),
        &[
            "score",
            "--reference",
            "ref.txt",
            "--hyp",
            "hyp.txt",
            "--json",
        ],
    ));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["wer"]["substitutions"], 4);
    assert_eq!(v["wer"]["insertions"], 1);
    assert_eq!(v["wer"]["n_ref"], 13);
}

#[test]
fn synth_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixtures().join("lm_corpus.txt").display().to_string();
    let lex = lexicon();
    for name in ["a.jsonl", "b.jsonl"] {
        ok(&run_in(
            dir.path(),
            &[
                "--seed",
                "7",
                "synth",
                "--channel",
                "synthetic2",
                "--lexicon",
                &lex,
                "--input",
                &input,
                "-o",
                name,
            ],
        ));
    }
    let a = fs::read(dir.path().join("a.jsonl")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.jsonl")).unwrap());
    ok(&run_in(
        dir.path(),
        &[
            "--seed",
            "8",
            "synth",
            "--channel",
            "synthetic2",
            "--lexicon",
            &lex,
            "--input",
            &input,
            "-o",
            "c.jsonl",
        ],
    ));
    assert_ne!(a, fs::read(dir.path().join("c.jsonl")).unwrap());
}

#[test]
fn external_corrector_modes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("hyps.tsv"),
        "u1\tis it text it optible\nu2\ta cross the street\n",
    )
    .unwrap();
    ok(&run_in(
        dir.path(),
        &[
            "correct",
            "--input",
            "hyps.tsv",
            "--external",
            "cat",
            "-o",
            "out.tsv",
        ],
    ));
    assert_eq!(
        fs::read_to_string(dir.path().join("out.tsv")).unwrap(),
        "u1\tis it text it optible\nu2\ta cross the street\n"
    );

    let out = run_in(
        dir.path(),
        &[
            "correct",
            "--input",
            "hyps.tsv",
            "--external",
            "head -n 1",
            "-o",
            "bad.tsv",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_json(&out)["error"], "protocol");
    assert!(!dir.path().join("bad.tsv").exists());
}

#[test]
fn lm_correction_fixes_word_boundary() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("hyps.tsv"), "u1\ta cross the street\n").unwrap();
    let corpus = fixtures().join("lm_corpus.txt").display().to_string();
    ok(&run_in(
        dir.path(),
        &["train-lm", "--input", &corpus, "-o", "lm.txt"],
    ));
    assert!(fs::read_to_string(dir.path().join("lm.txt"))
        .unwrap()
        .starts_with("# order\t2\n"));
    let lex = lexicon();
    ok(&run_in(
        dir.path(),
        &[
            "correct",
            "--lexicon",
            &lex,
            "--input",
            "hyps.tsv",
            "--lm",
            "lm.txt",
            "-o",
            "out.tsv",
        ],
    ));
    assert_eq!(
        fs::read_to_string(dir.path().join("out.tsv")).unwrap(),
        "u1\tacross the street\n"
    );
}

#[test]
fn rover_combines_tables() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("asr.tsv"), "u1\tis it text it optible\n").unwrap();
    fs::write(dir.path().join("fix.tsv"), "u1\tis it tax deductible\n").unwrap();
    ok(&run_in(
        dir.path(),
        &[
            "rover", "--hyps", "asr.tsv", "--hyps", "fix.tsv", "-o", "a.tsv",
        ],
    ));
    assert_eq!(
        fs::read_to_string(dir.path().join("a.tsv")).unwrap(),
        "u1\tis it text it optible\n"
    );
    ok(&run_in(
        dir.path(),
        &[
            "rover", "--hyps", "asr.tsv", "--hyps", "fix.tsv", "--conf", "0.6", "--conf", "1.0",
            "-o", "b.tsv",
        ],
    ));
    assert_eq!(
        fs::read_to_string(dir.path().join("b.tsv")).unwrap(),
        "u1\tis it tax deductible\n"
    );

    fs::write(dir.path().join("other.tsv"), "u9\tis it\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "rover",
            "--hyps",
            "asr.tsv",
            "--hyps",
            "other.tsv",
            "-o",
            "c.tsv",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gleu_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("src.txt"), "a b c d\n").unwrap();
    fs::write(dir.path().join("ref.txt"), "a x c d\n").unwrap();
    let json = ok(&run_in(
        dir.path(),
        &[
            "gleu",
            "--source",
            "src.txt",
            "--reference",
            "ref.txt",
            "--hypothesis",
            "ref.txt",
        ],
    ));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["score"], 1.0);
    assert_eq!(v["n_max"], 4);
}

#[test]
fn gec_synth_on_tagged_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixtures().join("gec_tagged.conll").display().to_string();
    let table = fixtures()
        .join("inflection_table.tsv")
        .display()
        .to_string();
    ok(&run_in(
        dir.path(),
        &[
            "--seed",
            "1",
            "gec-synth",
            "--input",
            &input,
            "--table",
            &table,
            "--p-replace",
            "1",
            "-o",
            "gec.tsv",
            "--edits",
            "e.jsonl",
        ],
    ));
    let text = fs::read_to_string(dir.path().join("gec.tsv")).unwrap();
    assert_eq!(text.lines().count(), 2);
    for line in text.lines() {
        let (src, tgt) = line.split_once('\t').unwrap();
        assert_eq!(src.split(' ').count(), tgt.split(' ').count());
        assert_ne!(src, tgt);
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixtures().join("lm_corpus.txt").display().to_string();
    fs::write(
        dir.path().join("cfg.toml"),
        format!(
            "lexicon = {:?}\nseed = 7\n[synth]\np_replace = 0.0\n",
            lexicon()
        ),
    )
    .unwrap();
    ok(&run_in(
        dir.path(),
        &[
            "--config",
            "cfg.toml",
            "synth",
            "--input",
            &input,
            "-o",
            "zero.jsonl",
        ],
    ));
    let zero = fs::read_to_string(dir.path().join("zero.jsonl")).unwrap();
    let recs = postedit_core::corpus::parse_corpus_jsonl(&zero).unwrap();
    assert!(recs.iter().all(|r| r.hyp.as_ref() == Some(&r.reference)));

    ok(&run_in(
        dir.path(),
        &[
            "--config",
            "cfg.toml",
            "synth",
            "--input",
            &input,
            "--p-replace",
            "1.0",
            "-o",
            "one.jsonl",
        ],
    ));
    let recs = postedit_core::corpus::parse_corpus_jsonl(
        &fs::read_to_string(dir.path().join("one.jsonl")).unwrap(),
    )
    .unwrap();
    assert!(recs.iter().any(|r| r.hyp.as_ref() != Some(&r.reference)));
    let manifest = fs::read_to_string(dir.path().join("one.jsonl.manifest.json")).unwrap();
    assert!(manifest.contains("\"p_replace\": 1.0"));
    assert!(manifest.contains("\"seed\": 7"));
}

#[test]
fn error_classes_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth",
            "--input",
            "missing.txt",
            "--lexicon",
            &lexicon(),
            "-o",
            "x.jsonl",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["error"], "io");

    fs::write(dir.path().join("in.txt"), "there is\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth",
            "--input",
            "in.txt",
            "--lexicon",
            &lexicon(),
            "--p-replace",
            "2",
            "-o",
            "x.jsonl",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"], "validation");
    assert!(!dir.path().join("x.jsonl").exists());

    let out = run_in(dir.path(), &["synth", "--input", "in.txt", "-o", "x.jsonl"]);
    assert_eq!(out.status.code(), Some(2));

    fs::write(dir.path().join("bad.toml"), "[synth]\nnope = 1\n").unwrap();
    let out = run_in(
        dir.path(),
        &["--config", "bad.toml", "score", "--pairs", "in.txt"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn prep_writes_masked_records() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixtures().join("lm_corpus.txt").display().to_string();
    let lex = lexicon();
    ok(&run_in(
        dir.path(),
        &[
            "--seed",
            "3",
            "synth",
            "--lexicon",
            &lex,
            "--input",
            &input,
            "-o",
            "syn.jsonl",
        ],
    ));
    ok(&run_in(
        dir.path(),
        &[
            "--seed",
            "3",
            "prep",
            "--lexicon",
            &lex,
            "--input",
            "syn.jsonl",
            "--with-phonemes",
            "-o",
            "prep.jsonl",
        ],
    ));
    let text = fs::read_to_string(dir.path().join("prep.jsonl")).unwrap();
    let recs = postedit_core::dataprep::parse_records_jsonl(&text).unwrap();
    assert_eq!(recs.len(), 207);
    assert!(recs
        .iter()
        .all(|r| r.input.len() <= 70 && r.sep_index().is_some()));
    assert!(recs.iter().any(|r| !r.mask_positions.is_empty()));
    ok(&run_in(
        dir.path(),
        &[
            "prep",
            "--input",
            "syn.jsonl",
            "--format",
            "tsv",
            "-o",
            "prep.tsv",
        ],
    ));
    let tsv = fs::read_to_string(dir.path().join("prep.tsv")).unwrap();
    assert!(tsv
        .lines()
        .all(|l| l.split('\t').count() == 2 && !l.contains("[SEP]")));
}
