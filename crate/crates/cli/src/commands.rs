use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde_json::json;

use postedit_core::alignment::{cer, wer, WerReport};
use postedit_core::corpus::{
    corpus_from_lines, corpus_to_jsonl, parse_corpus_jsonl, parse_hyp_table, parse_tagged,
    CorpusRecord, HypEntry,
};
use postedit_core::corrector::{
    external_correct, CandidateOptions, CorrectorConfig, LanguageModel, NoisyChannelCorrector,
};
use postedit_core::dataprep::{
    default_max_len, prepare_corpus, records_to_jsonl, records_to_tsv, MaskScope, PrepConfig,
};
use postedit_core::fixtures::parse_pairs;
use postedit_core::gleu::gleu;
use postedit_core::lexicon::{Lexicon, LexiconOptions};
use postedit_core::rover::{combine_all, ScoredHypothesis};
use postedit_core::seed::derive_seed;
use postedit_core::synthesis::{
    corrupt_corpus, ingest_external_hypotheses, perturb_inflections, CandidateSource,
    InflectionTable, PhoneticChannel, PosTag,
};
use postedit_core::text::{join, tokenize};

use crate::args::*;
use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::output::Run;

/// Writes `text` to `path` when given, otherwise to stdout.
fn deliver(run: &mut Run, path: Option<&Path>, text: String) {
    match path {
        Some(p) => run.emit(p, text),
        None => print!("{text}"),
    }
}

fn load_lexicon(run: &mut Run, cfg: &PipelineConfig, args: &LexiconArgs) -> Result<Lexicon> {
    let path = args
        .lexicon
        .clone()
        .or_else(|| cfg.lexicon.clone())
        .ok_or_else(|| {
            CliError::validation("a lexicon is required (--lexicon or `lexicon` in the config)")
        })?;
    let options = LexiconOptions {
        strict_stress: cfg.g2p.strict_stress || args.strict_stress,
        fallback: cfg.g2p.fallback && !args.no_fallback,
    };
    let text = run.read(&path)?;
    Lexicon::parse(&text, options)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn looks_like_jsonl(text: &str) -> bool {
    text.lines()
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.trim_start().starts_with('{'))
}

/// JSONL corpus, or plain text with one reference per line.
fn read_corpus(run: &mut Run, path: &Path) -> Result<Vec<CorpusRecord>> {
    let text = run.read(path)?;
    if looks_like_jsonl(&text) {
        Ok(parse_corpus_jsonl(&text)?)
    } else {
        Ok(corpus_from_lines(&text))
    }
}

/// Hypothesis rows from a table, or from the `hyp` field of a JSONL corpus.
fn read_hyp_table(run: &mut Run, path: &Path) -> Result<Vec<HypEntry>> {
    let text = run.read(path)?;
    let rows = if looks_like_jsonl(&text) {
        parse_corpus_jsonl(&text)?
            .into_iter()
            .map(|r| match r.hyp {
                Some(h) => Ok(HypEntry {
                    id: r.id,
                    sentence: join(&h),
                    confidences: None,
                }),
                None => Err(CliError::validation(format!(
                    "record `{}` has no hypothesis",
                    r.id
                ))),
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        parse_hyp_table(&text)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?
    };
    let mut seen = HashSet::new();
    for r in &rows {
        if !seen.insert(r.id.as_str()) {
            return Err(CliError::validation(format!(
                "{}: duplicate id `{}`",
                path.display(),
                r.id
            )));
        }
    }
    Ok(rows)
}

/// Hypotheses with ids, from a hypothesis table or a JSONL corpus.
fn read_hypotheses(run: &mut Run, path: &Path) -> Result<Vec<(String, Vec<String>)>> {
    let text = run.read(path)?;
    if looks_like_jsonl(&text) {
        parse_corpus_jsonl(&text)?
            .into_iter()
            .map(|r| match r.hyp {
                Some(h) => Ok((r.id, h)),
                None => Err(CliError::validation(format!(
                    "record `{}` has no hypothesis",
                    r.id
                ))),
            })
            .collect()
    } else {
        Ok(parse_hyp_table(&text)?
            .into_iter()
            .map(|h| (h.id, tokenize(&h.sentence)))
            .collect())
    }
}

fn tsv_rows<'a>(rows: impl Iterator<Item = (&'a str, String)>) -> String {
    let mut out = String::new();
    for (id, s) in rows {
        let _ = writeln!(out, "{id}\t{s}");
    }
    out
}

pub fn g2p(cfg: &PipelineConfig, args: &G2pArgs) -> Result<()> {
    let mut run = Run::new("g2p");
    let lex = load_lexicon(&mut run, cfg, &args.lexicon)?;
    let mut words = args.words.clone();
    if let Some(p) = &args.input {
        words.extend(run.read(p)?.split_whitespace().map(str::to_string));
    }
    if words.is_empty() {
        return Err(CliError::validation("no words given"));
    }
    let mut out = String::new();
    for w in &words {
        for p in lex.g2p_word(w)? {
            let _ = writeln!(out, "{w}\t{p}");
        }
    }
    run.params =
        json!({ "strict_stress": lex.options().strict_stress, "fallback": lex.options().fallback });
    deliver(&mut run, args.output.as_deref(), out);
    run.commit()
}

pub fn synth(cfg: &mut PipelineConfig, args: &SynthArgs) -> Result<()> {
    if let Some(p) = args.p_replace {
        cfg.synth.p_replace = p;
    }
    if let Some(m) = args.max_edit {
        cfg.synth.max_edit = m;
    }
    cfg.synth.near_pronunciation |= args.near_pronunciation;
    cfg.validate()?;

    let mut run = Run::new("synth");
    run.seed = Some(cfg.seed);
    let corpus = read_corpus(&mut run, &args.input)?;

    if args.channel == Channel::External {
        let hyp_path = args
            .hyps
            .as_ref()
            .ok_or_else(|| CliError::validation("--channel external needs --hyps"))?;
        let hyps = read_hyp_table(&mut run, hyp_path)?;
        let (records, report) = ingest_external_hypotheses(corpus, &hyps)?;
        run.params = json!({ "channel": "external", "matched": report.matched, "unmatched": report.unmatched });
        eprintln!(
            "{}",
            json!({ "matched": report.matched, "unmatched": report.unmatched.len() })
        );
        run.emit(&args.output, corpus_to_jsonl(&records));
        return run.commit();
    }
    if args.hyps.is_some() {
        return Err(CliError::validation(
            "--hyps only applies to --channel external",
        ));
    }

    let lex = load_lexicon(&mut run, cfg, &args.lexicon)?;
    let s = &cfg.synth;
    let channel = match args.channel {
        Channel::Synthetic1 => PhoneticChannel::synthetic1(s.p_replace),
        _ => PhoneticChannel::synthetic2(s.p_replace, s.max_edit),
    };
    let channel = if s.near_pronunciation {
        channel.with_source(CandidateSource::NearPronunciation)
    } else {
        channel
    };
    let out = corrupt_corpus(&lex, &corpus, &channel, cfg.seed)?;
    run.params = json!({
        "channel": format!("{:?}", channel.kind).to_lowercase(),
        "p_replace": s.p_replace,
        "max_edit": (args.channel == Channel::Synthetic2).then_some(s.max_edit),
        "near_pronunciation": s.near_pronunciation,
        "strict_stress": lex.options().strict_stress,
    });
    let records: Vec<CorpusRecord> = out.iter().map(|(r, _)| r.clone()).collect();
    run.emit(&args.output, corpus_to_jsonl(&records));
    if let Some(edits) = &args.edits {
        let mut text = String::new();
        for (_, prov) in &out {
            text.push_str(&serde_json::to_string(prov).expect("edit log serializes"));
            text.push('\n');
        }
        run.emit(edits, text);
    }
    run.commit()
}

pub fn gec_synth(cfg: &mut PipelineConfig, args: &GecSynthArgs) -> Result<()> {
    if let Some(p) = args.p_replace {
        cfg.gec.p_replace = p;
    }
    cfg.validate()?;
    let mut run = Run::new("gec-synth");
    run.seed = Some(cfg.seed);
    let tagged = parse_tagged(&run.read(&args.input)?)?;
    let table = InflectionTable::parse(&run.read(&args.table)?)?;
    let p = cfg.gec.p_replace;
    let seed = cfg.seed;
    let results: Vec<_> = tagged
        .par_iter()
        .enumerate()
        .map(|(i, sent)| {
            let id = format!("s{}", i + 1);
            let typed: Vec<(String, PosTag)> = sent
                .iter()
                .map(|(t, tag)| (t.clone(), tag.parse().unwrap_or_else(|e| match e {})))
                .collect();
            perturb_inflections(&id, &typed, &table, p, derive_seed(seed, "gec", &id)).map(
                |(toks, prov)| {
                    (
                        sent.iter().map(|(t, _)| t.clone()).collect::<Vec<_>>(),
                        toks,
                        prov,
                    )
                },
            )
        })
        .collect::<std::result::Result<_, _>>()?;
    let mut text = String::new();
    let mut log = String::new();
    for (orig, corrupted, prov) in &results {
        let _ = writeln!(text, "{}\t{}", corrupted.join(" "), orig.join(" "));
        log.push_str(&serde_json::to_string(prov).expect("edit log serializes"));
        log.push('\n');
    }
    run.params = json!({ "p_replace": p });
    run.emit(&args.output, text);
    if let Some(e) = &args.edits {
        run.emit(e, log);
    }
    run.commit()
}

pub fn prep(cfg: &mut PipelineConfig, args: &PrepArgs) -> Result<()> {
    let pc = &mut cfg.prep;
    pc.with_phonemes |= args.with_phonemes;
    pc.hypothesis_only |= args.hypothesis_only;
    if args.max_len.is_some() {
        pc.max_len = args.max_len;
    }
    if let Some(v) = args.token_rate {
        pc.token_rate = v;
    }
    if let Some(v) = args.random_fraction {
        pc.random_fraction = v;
    }
    if let Some(v) = args.error_focused_fraction {
        pc.error_focused_fraction = v;
    }
    if let Some(v) = &args.mask_token {
        pc.mask_token = v.clone();
    }
    cfg.validate()?;
    let pc = &cfg.prep;

    let mut run = Run::new("prep");
    run.seed = Some(cfg.seed);
    let corpus = read_corpus(&mut run, &args.input)?;
    let lex = if pc.with_phonemes && corpus.iter().any(|r| r.phonemes.is_none()) {
        Some(load_lexicon(&mut run, cfg, &args.lexicon)?)
    } else {
        None
    };
    let config = PrepConfig {
        with_phonemes: pc.with_phonemes,
        max_len: pc
            .max_len
            .unwrap_or_else(|| default_max_len(pc.with_phonemes)),
        token_rate: pc.token_rate,
        random_fraction: pc.random_fraction,
        error_focused_fraction: pc.error_focused_fraction,
        scope: if pc.hypothesis_only {
            MaskScope::HypothesisOnly
        } else {
            MaskScope::AllTokens
        },
        seed: cfg.seed,
    };
    let records = prepare_corpus(&corpus, lex.as_ref(), &config)?;
    run.params = json!({ "prep": config, "mask_token": pc.mask_token, "format": format!("{:?}", args.format).to_lowercase() });
    let text = match args.format {
        PrepFormat::Jsonl => records_to_jsonl(&records, &pc.mask_token),
        PrepFormat::Tsv => records_to_tsv(&records, &pc.mask_token),
    };
    run.emit(&args.output, text);
    run.commit()
}

fn lm_sentences(run: &mut Run, path: &Path) -> Result<Vec<String>> {
    let text = run.read(path)?;
    if looks_like_jsonl(&text) {
        Ok(parse_corpus_jsonl(&text)?
            .iter()
            .map(|r| join(&r.reference))
            .collect())
    } else {
        Ok(text.lines().map(str::to_string).collect())
    }
}

pub fn train_lm(cfg: &mut PipelineConfig, args: &TrainLmArgs) -> Result<()> {
    if let Some(o) = args.order {
        cfg.corrector.order = o;
    }
    if let Some(k) = args.k {
        cfg.corrector.k = k;
    }
    cfg.validate()?;
    let mut run = Run::new("train-lm");
    let sentences = lm_sentences(&mut run, &args.input)?;
    let lm = LanguageModel::train(&sentences, cfg.corrector.order, cfg.corrector.k)?;
    run.params = json!({ "order": lm.order(), "k": lm.k() });
    run.emit(&args.output, lm.to_text());
    run.commit()
}

pub fn correct(cfg: &mut PipelineConfig, args: &CorrectArgs) -> Result<()> {
    let c = &mut cfg.corrector;
    if let Some(v) = args.beam {
        c.beam = v;
    }
    if let Some(v) = args.order {
        c.order = v;
    }
    if let Some(v) = args.k {
        c.k = v;
    }
    if let Some(v) = args.timeout {
        c.timeout_secs = v;
    }
    c.sound_alikes |= args.sound_alikes;
    cfg.validate()?;

    let mut run = Run::new("correct");
    let hyps = read_hypotheses(&mut run, &args.input)?;
    let c = &cfg.corrector;

    let corrected: Vec<String> = if let Some(cmd) = &args.external {
        let argv: Vec<&str> = cmd.split_whitespace().collect();
        let sentences: Vec<String> = hyps.iter().map(|(_, h)| join(h)).collect();
        run.params = json!({ "mode": "external", "command": cmd });
        external_correct(&argv, &sentences, Duration::from_secs_f64(c.timeout_secs))?
    } else {
        let lm = match (&args.lm, &args.lm_corpus) {
            (Some(p), _) => {
                let text = run.read(p)?;
                LanguageModel::from_text(&text)
                    .map_err(|e| CliError::validation(format!("{}: {e}", p.display())))?
            }
            (None, Some(p)) => {
                let sentences = lm_sentences(&mut run, p)?;
                LanguageModel::train(&sentences, c.order, c.k)?
            }
            (None, None) => {
                return Err(CliError::validation(
                    "one of --lm, --lm-corpus or --external is required",
                ));
            }
        };
        let lex = load_lexicon(&mut run, cfg, &args.lexicon)?;
        let config = CorrectorConfig {
            beam: c.beam,
            penalties: c.penalties,
            candidates: CandidateOptions {
                sound_alikes: c.sound_alikes,
                max_edit: c.max_edit,
                merges: c.merges,
                splits: c.splits,
            },
        };
        run.params =
            json!({ "mode": "lm", "corrector": config, "lm_order": lm.order(), "lm_k": lm.k() });
        let inputs: Vec<Vec<String>> = hyps.iter().map(|(_, h)| h.clone()).collect();
        NoisyChannelCorrector::new(&lex, &lm, config)
            .correct_all(&inputs)
            .into_iter()
            .map(|c| join(&c.tokens))
            .collect()
    };
    let text = tsv_rows(hyps.iter().map(|(id, _)| id.as_str()).zip(corrected));
    run.emit(&args.output, text);
    run.commit()
}

pub fn rover(cfg: &mut PipelineConfig, args: &RoverArgs) -> Result<()> {
    if let Some(a) = args.alpha {
        cfg.rover.alpha = a;
    }
    if let Some(e) = args.epsilon_conf {
        cfg.rover.epsilon_conf = e;
    }
    if !args.conf.is_empty() {
        cfg.rover.system_conf = args.conf.clone();
    }
    cfg.validate()?;
    if args.hyps.len() < 2 {
        return Err(CliError::validation(
            "rover needs at least two --hyps files",
        ));
    }
    if cfg.rover.system_conf.len() > args.hyps.len() {
        return Err(CliError::validation("more --conf values than systems"));
    }

    let mut run = Run::new("rover");
    let mut tables: Vec<HashMap<String, HypEntry>> = Vec::new();
    let mut order: Vec<String> = Vec::new();
    for (i, p) in args.hyps.iter().enumerate() {
        let rows = read_hyp_table(&mut run, p)?;
        if i == 0 {
            order = rows.iter().map(|r| r.id.clone()).collect();
        } else if rows.len() != order.len() {
            return Err(CliError::validation(format!(
                "{} has {} rows, expected {}",
                p.display(),
                rows.len(),
                order.len()
            )));
        }
        tables.push(rows.into_iter().map(|r| (r.id.clone(), r)).collect());
    }
    let (alpha, eps) = (cfg.rover.alpha, cfg.rover.epsilon_conf);
    let default_conf = |sys: usize| cfg.rover.system_conf.get(sys).copied().unwrap_or(1.0);
    let combined: Vec<String> = order
        .par_iter()
        .map(|id| {
            let systems = tables
                .iter()
                .enumerate()
                .map(|(sys, t)| {
                    let row = t.get(id).ok_or_else(|| {
                        CliError::validation(format!(
                            "id `{id}` missing from {}",
                            args.hyps[sys].display()
                        ))
                    })?;
                    let tokens = tokenize(&row.sentence);
                    let scored = match &row.confidences {
                        Some(c) => ScoredHypothesis::new(tokens, c.clone()),
                        None => ScoredHypothesis::uniform(tokens, default_conf(sys)),
                    };
                    scored.map_err(|e| CliError::validation(format!("id `{id}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            combine_all(&systems, alpha, eps)
                .map(|t| join(&t))
                .map_err(|e| CliError::validation(format!("id `{id}`: {e}")))
        })
        .collect::<Result<_>>()?;
    run.params = json!({ "alpha": alpha, "epsilon_conf": eps, "system_conf": (0..args.hyps.len()).map(default_conf).collect::<Vec<_>>() });
    run.emit(
        &args.output,
        tsv_rows(order.iter().map(String::as_str).zip(combined)),
    );
    run.commit()
}

struct ScoredPair {
    id: String,
    reference: Vec<String>,
    hyp: Vec<String>,
}

fn score_pairs(run: &mut Run, args: &ScoreArgs) -> Result<Vec<ScoredPair>> {
    if let Some(p) = &args.pairs {
        let text = run.read(p)?;
        return Ok(parse_pairs(&text)
            .map_err(|e| CliError::validation(e.to_string()))?
            .into_iter()
            .map(|p| ScoredPair {
                id: p.id,
                reference: p.reference,
                hyp: p.hypothesis,
            })
            .collect());
    }
    if let Some(c) = &args.corpus {
        let corpus = read_corpus(run, c)?;
        let external: Option<HashMap<String, Vec<String>>> = match &args.hyp {
            Some(h) => Some(read_hypotheses(run, h)?.into_iter().collect()),
            None => None,
        };
        return corpus
            .into_iter()
            .map(|r| {
                let hyp = match &external {
                    Some(m) => m.get(&r.id).cloned(),
                    None => r.hyp.clone(),
                }
                .ok_or_else(|| CliError::validation(format!("no hypothesis for `{}`", r.id)))?;
                Ok(ScoredPair {
                    id: r.id,
                    reference: r.reference,
                    hyp,
                })
            })
            .collect();
    }
    match (&args.reference, &args.hyp) {
        (Some(r), Some(h)) => {
            let refs = run.read(r)?;
            let hyps = run.read(h)?;
            let (refs, hyps): (Vec<&str>, Vec<&str>) =
                (refs.lines().collect(), hyps.lines().collect());
            if refs.len() != hyps.len() {
                return Err(CliError::validation(format!(
                    "{} reference lines but {} hypothesis lines",
                    refs.len(),
                    hyps.len()
                )));
            }
            Ok(refs
                .iter()
                .zip(&hyps)
                .enumerate()
                .map(|(i, (r, h))| ScoredPair {
                    id: format!("s{}", i + 1),
                    reference: tokenize(r),
                    hyp: tokenize(h),
                })
                .collect())
        }
        _ => Err(CliError::validation(
            "score needs --reference with --hyp, --corpus, or --pairs",
        )),
    }
}

fn summary_line(label: &str, r: &WerReport) -> String {
    format!(
        "{label}\t{:.6}\tS={}\tD={}\tI={}\tN={}\terrors={}/{}\n",
        r.wer,
        r.substitutions,
        r.deletions,
        r.insertions,
        r.n_ref,
        r.errors(),
        r.n_ref
    )
}

pub fn score(args: &ScoreArgs) -> Result<()> {
    let mut run = Run::new("score");
    let pairs = score_pairs(&mut run, args)?;
    if pairs.is_empty() {
        return Err(CliError::validation("nothing to score"));
    }
    let per: Vec<(WerReport, WerReport)> = pairs
        .iter()
        .map(|p| {
            let w = wer(&p.reference, &p.hyp)
                .map_err(|e| CliError::validation(format!("`{}`: {e}", p.id)))?;
            let c = cer(&join(&p.reference), &join(&p.hyp))
                .map_err(|e| CliError::validation(format!("`{}`: {e}", p.id)))?;
            Ok((w, c))
        })
        .collect::<Result<_>>()?;
    let total_w = per.iter().skip(1).fold(per[0].0, |a, (w, _)| a.merge(w));
    let total_c = per.iter().skip(1).fold(per[0].1, |a, (_, c)| a.merge(c));

    let summary = if args.json {
        let mut s = serde_json::to_string_pretty(&json!({
            "sentences": pairs.len(),
            "wer": total_w,
            "cer": total_c,
        }))
        .expect("report serializes");
        s.push('\n');
        s
    } else {
        format!(
            "sentences\t{}\n{}{}",
            pairs.len(),
            summary_line("WER", &total_w),
            summary_line("CER", &total_c)
        )
    };
    print!("{summary}");
    if let Some(o) = &args.output {
        run.emit(o, summary);
    }
    if let Some(p) = &args.per_sentence {
        let mut t = String::from("id\tS\tD\tI\tN\tWER\tCER\n");
        for (pair, (w, c)) in pairs.iter().zip(&per) {
            let _ = writeln!(
                t,
                "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
                pair.id, w.substitutions, w.deletions, w.insertions, w.n_ref, w.wer, c.wer
            );
        }
        run.emit(p, t);
    }
    run.commit()
}

pub fn gleu_cmd(cfg: &mut PipelineConfig, args: &GleuArgs) -> Result<()> {
    if let Some(n) = args.n_max {
        cfg.gleu.n_max = n;
    }
    cfg.validate()?;
    let mut run = Run::new("gleu");
    let read_lines = |run: &mut Run, p: &PathBuf| -> Result<Vec<String>> {
        Ok(run.read(p)?.lines().map(|l| join(&tokenize(l))).collect())
    };
    let src = read_lines(&mut run, &args.source)?;
    let refs = read_lines(&mut run, &args.reference)?;
    let hyps = read_lines(&mut run, &args.hypothesis)?;
    let report = gleu(&src, &refs, &hyps, cfg.gleu.n_max)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    print!("{text}");
    run.params = json!({ "n_max": cfg.gleu.n_max });
    if let Some(o) = &args.output {
        run.emit(o, text);
    }
    run.commit()
}
