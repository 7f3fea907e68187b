use postedit_core::fixtures::load_fixtures;
use postedit_core::lexicon::{Lexicon, LexiconOptions};

#[test]
fn every_pronunciation_indexes_its_word() {
    let lex = load_fixtures().unwrap().lexicon;
    for w in lex.words() {
        for p in lex.pronunciations(w).unwrap() {
            let bucket = lex.words_with_key(&lex.key(p)).expect("key indexed");
            assert!(bucket.contains(w), "{w} missing under {p}");
        }
    }
}

#[test]
fn homophone_relation_is_symmetric() {
    let lex = load_fixtures().unwrap().lexicon;
    let words: Vec<String> = lex.words().map(str::to_string).collect();
    for w1 in &words {
        for w2 in lex.homophones(w1).unwrap() {
            assert_ne!(&w2, w1);
            assert!(lex.homophones(&w2).unwrap().contains(w1), "{w1} -> {w2}");
        }
    }
}

#[test]
fn sequence_of_one_word_is_its_first_variant() {
    let lex = load_fixtures().unwrap().lexicon;
    for w in lex.words() {
        let seq = lex.g2p_sequence(&[w]).unwrap();
        let first = lex.g2p_word(w).unwrap()[0].phonemes().to_vec();
        assert_eq!(seq, first, "{w}");
    }
}

#[test]
fn loading_is_deterministic() {
    let text = std::fs::read_to_string(
        postedit_core::fixtures::fixture_dir().join("cmudict_excerpt.dict"),
    )
    .unwrap();
    let a = Lexicon::parse(&text, LexiconOptions::default()).unwrap();
    let b = Lexicon::parse(&text, LexiconOptions::default()).unwrap();
    assert_eq!(a.to_canonical_string(), b.to_canonical_string());
    // The canonical form is itself a loadable dictionary.
    let c = Lexicon::parse(&a.to_canonical_string(), LexiconOptions::default()).unwrap();
    assert_eq!(c.to_canonical_string(), a.to_canonical_string());
    let crlf = text.replace('\n', "\r\n");
    let d = Lexicon::parse(&crlf, LexiconOptions::default()).unwrap();
    assert_eq!(d.to_canonical_string(), a.to_canonical_string());
}

#[test]
fn fixture_examples() {
    let lex = load_fixtures().unwrap().lexicon;
    let read: Vec<String> = lex
        .g2p_word("read")
        .unwrap()
        .iter()
        .map(|p| p.to_string())
        .collect();
    assert_eq!(read, ["R EH1 D", "R IY1 D"]);
    assert_eq!(
        lex.g2p_word("across").unwrap()[0].to_string(),
        "AH0 K R AO1 S"
    );
    let seq: Vec<String> = lex
        .g2p_sequence(&["a", "cross"])
        .unwrap()
        .iter()
        .map(|p| p.to_string())
        .collect();
    assert_eq!(seq, ["AH0", "K", "R", "AO1", "S"]);
    assert_eq!(lex.homophones("there").unwrap(), ["their", "they're"]);
    let strict = lex.with_options(LexiconOptions {
        fallback: false,
        ..LexiconOptions::default()
    });
    assert!(strict.g2p_word("zqx").is_err());
}
