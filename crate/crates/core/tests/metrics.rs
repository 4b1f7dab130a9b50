use proptest::prelude::*;

use graphqa::metrics::{
    coverage_of_texts, dist_n, diversity, rouge1, rouge1_prf, rouge_l, token_f1, tokenize, ExactMatch, Rouge1,
    RougeVariant,
};

fn sentence() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!["add", "the", "Salt", "pan", "?", "stir", "it", ","]), 0..8)
        .prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn dist_is_a_fraction(qs in prop::collection::vec(sentence(), 0..10), n in 1usize..6) {
        let d = dist_n(&qs, n);
        prop_assert!((0.0..=1.0).contains(&d));
        // duplicating the corpus halves every nonzero Dist-n
        let doubled: Vec<String> = qs.iter().chain(&qs).cloned().collect();
        prop_assert!((dist_n(&doubled, n) - d / 2.0).abs() < 1e-12);
    }

    #[test]
    fn diversity_is_the_mean_of_dist(qs in prop::collection::vec(sentence(), 0..10)) {
        let r = diversity(&qs);
        let mean = (1..=5).map(|n| dist_n(&qs, n)).sum::<f64>() / 5.0;
        prop_assert!((r.ngram_diversity - mean).abs() < 1e-12);
        prop_assert_eq!(r.tokens, qs.iter().map(|q| tokenize(q).len()).sum::<usize>());
    }

    #[test]
    fn overlap_scores_are_bounded_and_symmetric(a in sentence(), b in sentence()) {
        for s in [rouge1(&a, &b), rouge_l(&a, &b), token_f1(&a, &b)] {
            prop_assert!((0.0..=1.0).contains(&s));
        }
        prop_assert_eq!(rouge1(&a, &b), rouge1(&b, &a));
        let (ab, ba) = (rouge1_prf(&a, &b), rouge1_prf(&b, &a));
        prop_assert_eq!(ab.precision, ba.recall);
        prop_assert!(rouge_l(&a, &b) <= rouge1(&a, &b) + 1e-12);
        if !tokenize(&a).is_empty() {
            prop_assert_eq!(rouge1(&a, &a), 1.0);
        }
    }

    #[test]
    fn coverage_grows_with_the_generated_set(
        refs in prop::collection::vec(sentence(), 1..6),
        gen in prop::collection::vec(sentence(), 1..6),
        extra in sentence(),
    ) {
        let scorer = Rouge1(RougeVariant::F1);
        let base = coverage_of_texts(&refs, &gen, &scorer).unwrap().coverage;
        let mut more = gen.clone();
        more.push(extra);
        prop_assert!(coverage_of_texts(&refs, &more, &scorer).unwrap().coverage >= base);
        // every reference covers itself
        prop_assert_eq!(coverage_of_texts(&refs, &refs, &ExactMatch).unwrap().coverage, 1.0);
    }
}
