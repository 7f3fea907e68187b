use postedit_core::rover::{
    build_confusion_network, combine, vote, ConfusionNetwork, ScoredHypothesis, Slot,
};
use proptest::prelude::*;

fn hyp(words: Vec<String>, confs: Vec<f64>) -> ScoredHypothesis {
    ScoredHypothesis::new(words, confs).unwrap()
}

fn uniform(s: &str, c: f64) -> ScoredHypothesis {
    ScoredHypothesis::uniform(s.split_whitespace().map(str::to_string).collect(), c).unwrap()
}

/// Confidences on a dyadic grid so that scaling by powers of two is exact.
fn scored(min_len: usize) -> impl Strategy<Value = ScoredHypothesis> {
    prop::collection::vec((0u8..4, 0u8..=8), min_len..7).prop_map(|v| {
        let words = v.iter().map(|(w, _)| format!("w{w}")).collect();
        let confs = v.iter().map(|(_, c)| f64::from(*c) / 8.0).collect();
        hyp(words, confs)
    })
}

/// Straight argmax over the slot candidates with earliest-wins ties.
fn oracle_slot(slot: &Slot, num_systems: usize, alpha: f64, eps: f64) -> Option<String> {
    let scores: Vec<f64> = slot
        .candidates
        .iter()
        .map(|c| {
            let conf = match c.word {
                None => eps,
                Some(_) => c.conf_sum / c.count as f64,
            };
            alpha * c.count as f64 / num_systems as f64 + (1.0 - alpha) * conf
        })
        .collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    slot.candidates[best].word.clone()
}

fn oracle_vote(cn: &ConfusionNetwork, alpha: f64, eps: f64) -> Vec<String> {
    cn.slots
        .iter()
        .filter_map(|s| oracle_slot(s, cn.num_systems, alpha, eps))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn network_invariants(base in scored(1), others in prop::collection::vec(scored(0), 0..4),
                          alpha in 0.0f64..=1.0, eps in 0.0f64..=1.0) {
        let cn = build_confusion_network(&base, &others).unwrap();
        prop_assert_eq!(cn.num_systems, others.len() + 1);
        for slot in &cn.slots {
            prop_assert_eq!(slot.total_count(), cn.num_systems);
        }
        prop_assert_eq!(cn.path_tokens(0).unwrap(), base.tokens().to_vec());
        for (i, h) in others.iter().enumerate() {
            prop_assert_eq!(cn.path_tokens(i + 1).unwrap(), h.tokens().to_vec());
        }
        let out = vote(&cn, alpha, eps).unwrap();
        prop_assert_eq!(&out, &oracle_vote(&cn, alpha, eps));
        // A slot every system filled with the same word always emits it.
        let mut k = 0;
        for slot in &cn.slots {
            let unanimous = slot.candidates.len() == 1 && slot.candidates[0].word.is_some();
            let winner = oracle_slot(slot, cn.num_systems, alpha, eps);
            if unanimous {
                prop_assert_eq!(&winner, &slot.candidates[0].word);
                prop_assert_eq!(Some(&out[k]), winner.as_ref());
            }
            k += usize::from(winner.is_some());
        }
    }

    #[test]
    fn combining_with_itself_is_identity(h in scored(1), alpha in 0.0f64..=1.0, eps in 0.0f64..=1.0) {
        prop_assert_eq!(combine(&h, &h, alpha, eps).unwrap(), h.tokens().to_vec());
    }

    #[test]
    fn identical_systems_vote_for_themselves(h in scored(1), n in 1usize..5, alpha in 0.0f64..=1.0, eps in 0.0f64..=1.0) {
        let cn = build_confusion_network(&h, &vec![h.clone(); n]).unwrap();
        prop_assert_eq!(vote(&cn, alpha, eps).unwrap(), h.tokens().to_vec());
    }

    #[test]
    fn scaling_confidences_keeps_winners(base in scored(1), others in prop::collection::vec(scored(0), 0..3),
                                         eps_step in 0u8..=8, shift in 1i32..4) {
        let eps = f64::from(eps_step) / 8.0;
        let factor = 0.5f64.powi(shift);
        let scale = |h: &ScoredHypothesis| hyp(h.tokens().to_vec(), h.confidences().iter().map(|c| c * factor).collect());
        let cn = build_confusion_network(&base, &others).unwrap();
        let scaled = build_confusion_network(&scale(&base), &others.iter().map(scale).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(vote(&cn, 0.0, eps).unwrap(), vote(&scaled, 0.0, eps * factor).unwrap());
    }
}

#[test]
fn epsilon_confidence_examples() {
    let base = hyp(
        vec!["a".into(), "b".into(), "c".into()],
        vec![1.0, 0.9, 1.0],
    );
    let other = uniform("a c", 1.0);
    let cn = build_confusion_network(&base, std::slice::from_ref(&other)).unwrap();
    assert_eq!(vote(&cn, 0.0, 0.7).unwrap(), ["a", "b", "c"]);

    let base = hyp(
        vec!["a".into(), "b".into(), "c".into()],
        vec![1.0, 0.5, 1.0],
    );
    let cn = build_confusion_network(&base, &[other]).unwrap();
    assert_eq!(vote(&cn, 0.0, 0.7).unwrap(), ["a", "c"]);
}

#[test]
fn agreed_prefix_survives() {
    let asr = uniform("is it text it optible", 1.0);
    let fixed = uniform("is it tax deductible", 1.0);
    for alpha in [0.0, 0.3, 0.5, 1.0] {
        for eps in [0.0, 0.7, 1.0] {
            let out = combine(&asr, &fixed, alpha, eps).unwrap();
            assert_eq!(&out[..2], ["is", "it"]);
        }
    }
    // Count tie at alpha 1 goes to the base system.
    assert_eq!(
        combine(&uniform("a b", 0.1), &uniform("a c", 1.0), 1.0, 0.7).unwrap(),
        ["a", "b"]
    );
}
