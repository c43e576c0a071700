mod common;

use common::*;
use safe_diffusion::game::{self, MixedStrategy};
use safe_diffusion::ratio::to_f64;
use safe_diffusion::special::*;
use safe_diffusion::zerosum;

fn complete_trees(max_n: usize) -> Vec<MaryTreeSpec> {
    let mut out = Vec::new();
    for m in 2..=max_n {
        for h in 1.. {
            match MaryTreeSpec::new(m, h) {
                Ok(s) if s.n() <= max_n => out.push(s),
                _ => break,
            }
        }
    }
    out
}

/// Expected gain against a pure reply, from the distance-count matrix.
fn oracle_gain(a: &[Vec<u32>], x: &MixedStrategy, y: usize) -> Q {
    x.sparse().into_iter().map(|(i, p)| p * Q::from_integer(a[i][y].into())).sum()
}

fn oracle_gain_against(a: &[Vec<u32>], x: usize, y: &MixedStrategy) -> Q {
    y.sparse().into_iter().map(|(j, p)| p * Q::from_integer(a[x][j].into())).sum()
}

#[test]
fn complete_trees_attain_the_closed_form() {
    let specs = complete_trees(100);
    assert!(specs.len() >= 10);
    for spec in specs {
        let t = build_mary_tree(spec);
        let value = mary_value(spec);
        assert_eq!(value, mary_value_in_height(spec));
        let sol = zerosum::solve_value(&game::game_matrix(&t)).unwrap();
        assert_eq!(sol.value, value, "T({},{})", spec.arity, spec.height);
        assert_eq!(game::guaranteed_gain(&t, &mary_mu1(spec)).unwrap().0, value);
        assert_eq!(game::maximal_gain(&t, &mary_mu2(spec)).unwrap().0, value);
    }
}

#[test]
fn mu_strategies_make_the_opponent_indifferent() {
    for spec in complete_trees(100) {
        let t = build_mary_tree(spec);
        let a = brute_matrix(&adjacency(t.n(), &t.edges()));
        let (mu1, mu2) = (mary_mu1(spec), mary_mu2(spec));
        let (a1, b1) = mu1_weights(spec);
        let (a2, b2) = mu2_weights(spec);
        let m = Q::from_integer((spec.arity as i64).into());
        assert_eq!(&a1 + &m * &b1, q(1, 1));
        assert_eq!(&a2 + &m * &b2, q(1, 1));
        let root = oracle_gain(&a, &mu1, 0);
        let root2 = oracle_gain_against(&a, 0, &mu2);
        for child in 1..=spec.arity {
            assert_eq!(oracle_gain(&a, &mu1, child), root);
            assert_eq!(oracle_gain_against(&a, child, &mu2), root2);
        }
    }
}

#[test]
fn spider_body_gain_closed_form() {
    for m in 3..=6 {
        for l in 1..=20 {
            let spec = SpiderSpec::new(m, l).unwrap();
            if spec.n() > 120 {
                continue;
            }
            let t = build_spider(spec);
            let a = brute_matrix(&adjacency(t.n(), &t.edges()));
            for k in 0..=l {
                let x = spider_strategy(spec, k).unwrap();
                let body = spider_body_gain(spec, k).unwrap();
                assert_eq!(oracle_gain(&a, &x, 0), body, "m={m} l={l} k={k}");
                assert_eq!(game::guaranteed_gain(&t, &x).unwrap().0, body, "m={m} l={l} k={k}");
            }
        }
    }
}

#[test]
fn spider_sandwich_and_examples() {
    let spec = SpiderSpec::new(3, 4).unwrap();
    let best = spider_optimal_k(spec).unwrap();
    assert_eq!((best.k, best.guaranteed_gain.clone()), (1, q(3, 1)));
    let t = build_spider(spec);
    // Player 2 at the body holds Player 1 to at most one leg.
    let (mg, _) = game::maximal_gain(&t, &MixedStrategy::pure(t.n(), 0)).unwrap();
    assert_eq!(mg, q(4, 1));

    let spec = SpiderSpec::new(3, 1).unwrap();
    let best = spider_optimal_k(spec).unwrap();
    let brute =
        (0..=1).map(|k| game::guaranteed_gain(&build_spider(spec), &spider_strategy(spec, k).unwrap()).unwrap().0);
    assert_eq!(Some(best.guaranteed_gain), brute.max());

    for m in [3, 4] {
        for l in 2..=10 {
            let spec = SpiderSpec::new(m, l).unwrap();
            let best = spider_optimal_k(spec).unwrap();
            let value = zerosum::solve_value(&game::game_matrix(&build_spider(spec))).unwrap().value;
            assert!(best.guaranteed_gain <= value && value <= q(l as i64, 1));
        }
    }
}

#[test]
fn spider_gap_grows_like_root_of_leg_length() {
    let m = 4;
    let spec = SpiderSpec::new(m, 100).unwrap();
    let best = spider_optimal_k(spec).unwrap();
    let guess = (2.0 * (100.0 / m as f64).sqrt()).round() as i64;
    assert!((best.k as i64 - guess).abs() <= 2, "k*={} guess {guess}", best.k);
    let mut last = 0.0;
    for l in [4, 9, 16, 25, 36, 49, 64, 81, 100] {
        let spec = SpiderSpec::new(m, l).unwrap();
        let gap = l as f64 - to_f64(&spider_optimal_k(spec).unwrap().guaranteed_gain);
        assert!(gap >= last - 1e-9, "gap shrank at l={l}");
        assert!(gap / (l as f64 / m as f64).sqrt() < 3.0);
        last = gap;
    }
}
