//! Randomized invariants over sampled rationals. Inputs come from the same
//! sampler the verifier uses, driven by a proptest-chosen seed, so every
//! failure shrinks to a reproducible seed.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mahler_core::{
    build_maximal_primitive, is_direct_subfactorization, optimal_factorizations, sample_alpha,
    t_norm, Factorization, PrimeSign, ReducedRational, SearchStrategy,
};

fn alpha_from_seed(seed: u64, max_primes: usize) -> ReducedRational {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_alpha(&mut rng, max_primes, true)
}

/// All contents of the maximal primitive tree, paired with their parents.
/// This walks every edge, so the child maps are exercised on every vertex
/// the builder ever produces.
fn tree_edges(alpha: &ReducedRational) -> Vec<(Factorization, Factorization)> {
    let tree = build_maximal_primitive(alpha).expect("desk-scale build");
    tree.nodes()
        .filter_map(|node| {
            node.parent().map(|pid| {
                let parent = tree.node(pid).content().clone();
                (parent, node.content().clone())
            })
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn children_are_valid_direct_extensions(seed in any::<u64>()) {
        let alpha = alpha_from_seed(seed, 5);
        let ladder = alpha.prime_ladder().expect("ladder");
        for (parent, child) in tree_edges(&alpha) {
            prop_assert!(child.validate(&ladder).is_ok(), "{alpha}: invalid child {child}");
            prop_assert_eq!(child.level(), parent.level() + 1);
            prop_assert!(
                is_direct_subfactorization(&parent, &child, &ladder),
                "{}: {} is not one placement away from {}", alpha, parent, child
            );
            prop_assert!(child.is_primitive(), "{alpha}: primitive parent grew {child}");
        }
    }

    #[test]
    fn every_interior_vertex_has_a_child(seed in any::<u64>()) {
        let alpha = alpha_from_seed(seed, 5);
        let ladder = alpha.prime_ladder().expect("ladder");
        let tree = build_maximal_primitive(&alpha).expect("build");
        for node in tree.nodes() {
            if node.level() < ladder.len() {
                let children = node.content().children(&ladder).expect("in range");
                prop_assert!(!children.is_empty(), "{}: {} is stuck", alpha, node.content());
            }
        }
    }

    #[test]
    fn child_measures_take_at_most_two_values(seed in any::<u64>()) {
        let alpha = alpha_from_seed(seed, 5);
        let ladder = alpha.prime_ladder().expect("ladder");
        let tree = build_maximal_primitive(&alpha).expect("build");
        for node in tree.nodes() {
            if node.level() >= ladder.len() {
                continue;
            }
            let parent_measure = node.content().measure_vector();
            let appended = {
                let mut maxima = parent_measure.maxima().to_vec();
                maxima.push(ladder.prime(node.level() + 1).clone());
                mahler_core::MeasureVector::new(maxima)
            };
            let seen: BTreeSet<_> = node
                .content()
                .children(&ladder)
                .expect("in range")
                .iter()
                .map(Factorization::measure_vector)
                .collect();
            prop_assert!(seen.len() <= 2, "{}: {} child measures", alpha, seen.len());
            for measure in &seen {
                prop_assert!(
                    *measure == parent_measure || *measure == appended,
                    "{}: unexpected child measure {}", alpha, measure
                );
            }
        }
    }

    #[test]
    fn canonicalize_is_idempotent_and_preserving(seed in any::<u64>()) {
        let alpha = alpha_from_seed(seed, 5);
        let ladder = alpha.prime_ladder().expect("ladder");
        let tree = build_maximal_primitive(&alpha).expect("build");
        for node in tree.nodes() {
            let content = node.content();
            let canonical = content.canonicalize();
            prop_assert_eq!(&canonical.canonicalize(), &canonical);
            prop_assert_eq!(canonical.level(), content.level());
            prop_assert_eq!(canonical.product(), content.product());
            prop_assert_eq!(canonical.measure_vector(), content.measure_vector());
            prop_assert!(canonical.validate(&ladder).is_ok());
        }
    }

    /// Lexicographic order on measure vectors predicts t-norm order once t
    /// is large: some t below 200 separates every distinct-measure pair of
    /// same-level contents, in the same direction, at t and at 2t.
    #[test]
    fn lex_order_matches_large_t_norm_order(seed in any::<u64>()) {
        let alpha = alpha_from_seed(seed, 5);
        let ladder = alpha.prime_ladder().expect("ladder");
        let tree = build_maximal_primitive(&alpha).expect("build");
        for level in 0..=ladder.len() {
            let contents = tree.level_contents(level);
            for (i, a) in contents.iter().enumerate() {
                for b in contents.iter().skip(i + 1) {
                    let (small, large) = match a.measure_vector().cmp(&b.measure_vector()) {
                        std::cmp::Ordering::Less => (*a, *b),
                        std::cmp::Ordering::Greater => (*b, *a),
                        std::cmp::Ordering::Equal => continue,
                    };
                    let separated = |t: f64| {
                        t_norm(small, t).expect("norm") < t_norm(large, t).expect("norm")
                    };
                    let mut t = 1.0_f64;
                    let mut ok = false;
                    while t <= 200.0 {
                        if separated(t) && separated(2.0 * t) {
                            ok = true;
                            break;
                        }
                        t *= 2.0;
                    }
                    prop_assert!(ok, "{}: {} vs {} never separated", alpha, small, large);
                }
            }
        }
    }

    #[test]
    fn partials_multiply_back_to_alpha(seed in any::<u64>()) {
        let alpha = alpha_from_seed(seed, 6);
        let ladder = alpha.prime_ladder().expect("ladder");
        for n in 0..=ladder.len() {
            // alpha / alpha_n is the product of the primes still unplaced;
            // multiplying it back must recover alpha exactly.
            let partial = ladder.partial(n);
            let mut num = partial.numerator().clone();
            let mut den = partial.denominator().clone();
            for entry in &ladder.entries()[n..] {
                match entry.sign {
                    PrimeSign::Numerator => num *= &entry.prime,
                    PrimeSign::Denominator => den *= &entry.prime,
                }
            }
            let rebuilt = ReducedRational::new(num, den).expect("positive");
            prop_assert_eq!(&rebuilt, &alpha, "failed at n = {}", n);
        }
    }

    #[test]
    fn separation_indices_match_their_definition(seed in any::<u64>()) {
        let alpha = alpha_from_seed(seed, 6);
        let ladder = alpha.prime_ladder().expect("ladder");
        let indices: BTreeSet<usize> = ladder.separation_indices().into_iter().collect();
        prop_assert!(indices.contains(&0));
        prop_assert!(indices.contains(&ladder.len()));
        for n in 1..ladder.len() {
            let all_later_smaller =
                (n + 1..=ladder.len()).all(|m| ladder.prime(m) < ladder.prime(n));
            prop_assert_eq!(
                indices.contains(&n),
                all_later_smaller,
                "index {} of {}", n, alpha
            );
        }
        if ladder.is_square_free() {
            prop_assert_eq!(indices.len(), ladder.len() + 1);
        }
    }

    #[test]
    fn optimal_set_members_agree(seed in any::<u64>()) {
        let alpha = alpha_from_seed(seed, 5);
        let result =
            optimal_factorizations(&alpha, SearchStrategy::Canonical).expect("search");
        prop_assert!(!result.optimal_set.is_empty());
        for member in &result.optimal_set {
            prop_assert_eq!(member.measure_vector(), result.measure.clone());
            prop_assert!(member.is_primitive());
            let (num, den) = member.product();
            let product = ReducedRational::new(num, den).expect("positive");
            prop_assert_eq!(&product, &alpha);
        }
    }

    #[test]
    fn rendered_factorizations_parse_back(seed in any::<u64>()) {
        let alpha = alpha_from_seed(seed, 5);
        let ladder = alpha.prime_ladder().expect("ladder");
        let tree = build_maximal_primitive(&alpha).expect("build");
        for node in tree.nodes() {
            let text = node.content().to_string();
            let reparsed = Factorization::parse(&text, &ladder).expect("round trip");
            prop_assert_eq!(&reparsed, node.content());
        }
    }
}
