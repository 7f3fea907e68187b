use postedit_core::alignment::{align, align_words, corpus_wer, levenshtein, wer, EditKind};
use proptest::prelude::*;

/// Plain exponential recursion over the three edit moves.
fn brute_distance(a: &[u8], b: &[u8]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ar)), Some((y, br))) => {
            let sub = brute_distance(ar, br) + usize::from(x != y);
            let del = brute_distance(ar, b) + 1;
            let ins = brute_distance(a, br) + 1;
            sub.min(del).min(ins)
        }
    }
}

fn seq() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 0..=7)
}

fn replay(reference: &[u8], hyp: &[u8], ops: &postedit_core::alignment::Alignment) -> Vec<u8> {
    let mut out = Vec::new();
    for op in &ops.ops {
        match op.kind {
            EditKind::Match => out.push(reference[op.ref_index.unwrap()]),
            EditKind::Sub | EditKind::Ins => out.push(hyp[op.hyp_index.unwrap()]),
            EditKind::Del => {}
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 2000,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn dp_matches_brute_force(a in seq(), b in seq()) {
        let al = align(&a, &b);
        let oracle = brute_distance(&a, &b);
        prop_assert_eq!(al.cost(), oracle);
        prop_assert_eq!(levenshtein(&a, &b), oracle);
    }

    #[test]
    fn replay_reconstructs_hypothesis(a in seq(), b in seq()) {
        let al = align(&a, &b);
        prop_assert_eq!(replay(&a, &b, &al), b);
    }

    #[test]
    fn swapping_sides_swaps_deletions_and_insertions(a in seq(), b in seq()) {
        let ab = align(&a, &b);
        let ba = align(&b, &a);
        prop_assert_eq!(ab.cost(), ba.cost());
        // Equal-cost paths may split differently, but D - I is fixed by length.
        let net = |al: &postedit_core::alignment::Alignment| {
            al.count(EditKind::Del) as i64 - al.count(EditKind::Ins) as i64
        };
        prop_assert_eq!(net(&ab), a.len() as i64 - b.len() as i64);
        prop_assert_eq!(net(&ba), -net(&ab));
    }

    #[test]
    fn self_alignment_is_free(a in prop::collection::vec(0u8..4, 1..=7)) {
        let words: Vec<String> = a.iter().map(|x| format!("w{x}")).collect();
        prop_assert_eq!(wer(&words, &words).unwrap().wer, 0.0);
    }

    #[test]
    fn corpus_counts_are_sums(pairs in prop::collection::vec((prop::collection::vec(0u8..4, 1..=7), seq()), 1..6)) {
        let w = |v: &Vec<u8>| v.iter().map(|x| format!("w{x}")).collect::<Vec<String>>();
        let total = corpus_wer(pairs.iter().map(|(r, h)| (w(r), w(h)))).unwrap();
        let mut errors = 0;
        let mut n = 0;
        for (r, h) in &pairs {
            let s = wer(&w(r), &w(h)).unwrap();
            errors += s.errors();
            n += s.n_ref;
        }
        prop_assert_eq!(total.errors(), errors);
        prop_assert_eq!(total.n_ref, n);
        prop_assert!((total.wer - errors as f64 / n as f64).abs() < 1e-12);
    }
}

#[test]
fn table_one_pair_counts() {
    let r: Vec<&str> =
        "there is no alternative to that restaurant across the street that played jazz"
            .split(' ')
            .collect();
    let h: Vec<&str> = "there is no altnative to that restauran a cross the street that play jazz"
        .split(' ')
        .collect();
    let rep = wer(&r, &h).unwrap();
    assert_eq!(
        (rep.substitutions, rep.deletions, rep.insertions, rep.n_ref),
        (4, 0, 1, 13)
    );
    let ids = |v: &[&str]| -> Vec<u8> {
        let vocab: Vec<&str> = r.iter().chain(&h).copied().collect();
        v.iter()
            .map(|w| vocab.iter().position(|x| x == w).unwrap() as u8)
            .collect()
    };
    // The oracle is exponential, so check the costly word-boundary region only.
    assert_eq!(
        brute_distance(&ids(&r[5..10]), &ids(&h[5..11])),
        align_words(&r[5..10], &h[5..11]).cost()
    );
}

#[test]
fn two_pair_corpus_micro_average() {
    let table1 = (
        "there is no alternative to that restaurant across the street that played jazz",
        "there is no altnative to that restauran a cross the street that play jazz",
    );
    let clean = (
        "one two three four five six seven",
        "one two three four five six seven",
    );
    let toks = |s: &str| s.split(' ').map(str::to_string).collect::<Vec<_>>();
    let rep = corpus_wer([table1, clean].map(|(r, h)| (toks(r), toks(h)))).unwrap();
    assert_eq!((rep.errors(), rep.n_ref), (5, 20));
    assert!((rep.wer - 0.25).abs() < 1e-12);
}
