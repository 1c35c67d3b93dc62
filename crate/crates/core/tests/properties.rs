mod common;

use chainpart_core::oracle::{
    brute_forbidden, brute_width, min_chain_partition, DenseRelation, PatternKind,
};
use chainpart_core::partition::{Alg, FirstFit, RandomValid};
use chainpart_core::spoiler::{random_general_presentation, random_upgrowing_presentation};
use chainpart_core::{
    game_value, replay, run_game, run_game_with, ChainChoice, ChainPartition, GameConfig, Mode,
    OnlineAlgorithm, OrderError, SemiOrder, Spoiler, Transcript,
};
use common::{random_candidate, random_order, rng, GreedyRandom};
use proptest::prelude::*;

fn is_chain_partition(order: &SemiOrder, part: &ChainPartition) -> bool {
    let covered: usize = part.chains().iter().map(Vec::len).sum();
    covered == order.len()
        && part
            .chains()
            .iter()
            .all(|c| c.windows(2).all(|w| order.less(w[0], w[1])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn acceptance_matches_brute_force(seed in any::<u64>(), n in 0usize..40, allow_up in any::<bool>()) {
        let mut r = rng(seed);
        let mut order = random_order(n, &mut r, allow_up);
        for _ in 0..6 {
            let (down, up) = random_candidate(&order, &mut r, allow_up);
            let rel = DenseRelation::with_candidate(&order, &down, &up);
            let legal = rel.is_strict_order() && brute_forbidden(&rel).is_none();
            let before = order.clone();
            match order.add_point(&down, &up) {
                Ok(_) => prop_assert!(legal, "accepted {down:?} / {up:?}"),
                Err(e) => {
                    prop_assert!(!legal, "rejected legal candidate: {e}");
                    prop_assert_eq!(&order, &before);
                    if let OrderError::TwoPlusTwo { a, b, c, d } = e {
                        let w = chainpart_core::oracle::PatternWitness { kind: PatternKind::TwoPlusTwo, points: [a, b, c, d] };
                        prop_assert!(w.holds_in(&rel));
                    }
                    if let OrderError::ThreePlusOne { e, f, g, h } = e {
                        let w = chainpart_core::oracle::PatternWitness { kind: PatternKind::ThreePlusOne, points: [e, f, g, h] };
                        prop_assert!(w.holds_in(&rel));
                    }
                }
            }
        }
        prop_assert!(brute_forbidden(&order).is_none());
    }

    #[test]
    fn width_agrees_with_enumeration_and_matching(seed in any::<u64>(), n in 0usize..=20, allow_up in any::<bool>()) {
        let order = random_order(n, &mut rng(seed), allow_up);
        let w = order.width();
        prop_assert_eq!(w, brute_width(&order));
        let opt = min_chain_partition(&order);
        prop_assert_eq!(opt.chain_count(), w);
        prop_assert!(is_chain_partition(&order, &opt));
    }

    #[test]
    fn matching_partition_is_minimum_on_larger_orders(seed in any::<u64>(), n in 20usize..80) {
        let order = random_order(n, &mut rng(seed), true);
        let opt = min_chain_partition(&order);
        prop_assert_eq!(opt.chain_count(), order.width());
        prop_assert!(is_chain_partition(&order, &opt));
    }

    #[test]
    fn interval_representation_round_trips(seed in any::<u64>(), n in 0usize..60, allow_up in any::<bool>()) {
        let order = random_order(n, &mut rng(seed), allow_up);
        let rep = order.interval_representation().unwrap();
        for p in order.points() {
            for q in order.points() {
                prop_assert_eq!(rep.less(p, q), order.less(p, q), "{} vs {}", p, q);
            }
        }
    }

    #[test]
    fn down_and_up_sets_are_nested(seed in any::<u64>(), n in 0usize..50) {
        let order = random_order(n, &mut rng(seed), true);
        for p in order.points() {
            for q in order.points() {
                prop_assert!(order.down(p).is_subset(order.down(q)) || order.down(q).is_subset(order.down(p)));
                prop_assert!(order.up(p).is_subset(order.up(q)) || order.up(q).is_subset(order.up(p)));
            }
        }
    }

    #[test]
    fn random_presentations_stay_in_budget(seed in any::<u64>(), n in 1usize..120, w in 1usize..10) {
        for moves in [random_upgrowing_presentation(n, w, seed), random_general_presentation(n, w, seed)] {
            let mut order = SemiOrder::new();
            for (down, up) in &moves {
                order.add_point(down, up).unwrap();
            }
            prop_assert!(order.width() <= w);
        }
    }

    #[test]
    fn alg_stays_under_the_golden_value(seed in any::<u64>(), n in 1usize..200, w in 1usize..=10) {
        let config = GameConfig::new(Mode::UpGrowing, w, "random", "alg").with_seed(seed).with_points(n);
        let t = run_game(&config).unwrap();
        let v = replay(&t);
        prop_assert!(v.ok);
        let (referee, _) = chainpart_core::arena::replay_events(&t);
        let width = referee.order().width() as u64;
        prop_assert!(t.chains_used as u64 <= game_value(width));
        prop_assert!(is_chain_partition(referee.order(), referee.partition()));
    }

    #[test]
    fn greedy_general_play_stays_under_twice_the_width(seed in any::<u64>(), n in 1usize..150, w in 1usize..=8) {
        let algs: [Box<dyn OnlineAlgorithm>; 2] = [Box::new(FirstFit), Box::new(GreedyRandom)];
        for alg in algs {
            let config = GameConfig::new(Mode::General, w, "random", "first_fit").with_seed(seed).with_points(n);
            let spoiler = chainpart_core::spoiler_by_name("random", Mode::General, w, seed, Some(n)).unwrap();
            let t = run_game_with(&config, spoiler, alg).unwrap();
            let (referee, _) = chainpart_core::arena::replay_events(&t);
            let width = referee.order().width();
            prop_assert!(t.chains_used < 2 * width.max(1));
        }
    }

    #[test]
    fn transcripts_survive_json(seed in any::<u64>(), w in 1usize..8, algorithm in 0usize..3) {
        let name = ["alg", "first_fit", "random_valid"][algorithm];
        let t = run_game(&GameConfig::new(Mode::UpGrowing, w, "random", name).with_seed(seed)).unwrap();
        let back = Transcript::from_json(&t.to_json()).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert!(replay(&back).ok);
    }
}

#[test]
fn every_builtin_algorithm_partitions_golden_games() {
    for w in 1..=12 {
        let algs: [Box<dyn OnlineAlgorithm>; 3] =
            [Box::new(Alg), Box::new(FirstFit), Box::new(RandomValid)];
        for alg in algs {
            let config = GameConfig::new(Mode::UpGrowing, w, "golden", alg.name());
            let spoiler: Box<dyn Spoiler> =
                chainpart_core::spoiler_by_name("golden", Mode::UpGrowing, w, 0, None).unwrap();
            let t = run_game_with(&config, spoiler, alg).unwrap();
            let (referee, fault) = chainpart_core::arena::replay_events(&t);
            assert!(fault.is_none());
            assert!(is_chain_partition(referee.order(), referee.partition()));
            assert!(
                t.chains_used as u64 >= game_value(w as u64),
                "w={w} {}",
                config.algorithm
            );
        }
    }
}

#[test]
fn unassigned_choice_maps_to_new_chain() {
    let mut part = ChainPartition::new();
    let mut order = SemiOrder::new();
    let p = order.add_point(&[], &[]).unwrap();
    assert_eq!(part.assign(&order, p, ChainChoice::New), Ok(0));
}

#[test]
fn candidate_generator_hits_every_rejection_kind() {
    let mut seen = std::collections::BTreeMap::new();
    for seed in 0..300 {
        let mut r = rng(seed);
        let order = random_order(15, &mut r, true);
        for _ in 0..10 {
            let (down, up) = random_candidate(&order, &mut r, true);
            let code = match order.clone().add_point(&down, &up) {
                Ok(_) => "accepted",
                Err(e) => e.code(),
            };
            *seen.entry(code).or_insert(0) += 1;
        }
    }
    for code in [
        "accepted",
        "two_plus_two",
        "three_plus_one",
        "not_downward_closed",
        "not_transitive",
    ] {
        assert!(
            seen.get(code).copied().unwrap_or(0) > 0,
            "{code} never produced: {seen:?}"
        );
    }
}
