mod common;

use common::*;
use proptest::prelude::*;
use safe_diffusion::game::{self, Color, MixedStrategy};
use safe_diffusion::special::{build_mary_tree, MaryTreeSpec};
use safe_diffusion::tree::{path, star};
use safe_diffusion::Tree;

/// Random strategy with small integer weights on a random support.
fn arb_strategy(n: usize) -> impl Strategy<Value = MixedStrategy> {
    proptest::collection::vec(0i64..4, n).prop_map(move |mut w| {
        if w.iter().all(|&x| x == 0) {
            w[0] = 1;
        }
        let total: i64 = w.iter().sum();
        MixedStrategy::new(w.iter().map(|&x| q(x, total)).collect()).unwrap()
    })
}

fn tree_and_two_strategies() -> impl Strategy<Value = (Tree, MixedStrategy, MixedStrategy)> {
    arb_tree(1, 25).prop_flat_map(|(n, edges)| (Just(build(n, &edges)), arb_strategy(n), arb_strategy(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matrix_matches_distance_counts((n, edges) in arb_tree(1, 40)) {
        let t = build(n, &edges);
        let a = game::game_matrix(&t);
        let oracle = brute_matrix(&adjacency(n, &edges));
        for (i, row) in oracle.iter().enumerate() {
            prop_assert_eq!(a.row(i), &row[..]);
        }
    }

    #[test]
    fn gains_conserve_vertices((n, edges) in arb_tree(1, 30)) {
        let t = build(n, &edges);
        for i in 0..n {
            for j in 0..n {
                let c = game::simulate_diffusion(&t, i, j).unwrap();
                let total = game::pure_gain(&t, i, j)
                    + game::pure_gain(&t, j, i)
                    + c.count(Color::Grey)
                    + c.count(Color::White);
                prop_assert_eq!(total, n);
                prop_assert_eq!(c.count(Color::Player2), game::pure_gain(&t, j, i));
            }
        }
    }

    #[test]
    fn guaranteed_and_maximal_gain_bracket_the_gain((t, x, y) in tree_and_two_strategies()) {
        let g = game::gain(&t, &x, &y).unwrap();
        let (low, _) = game::guaranteed_gain(&t, &x).unwrap();
        let (high, _) = game::maximal_gain(&t, &y).unwrap();
        prop_assert!(low <= g && g <= high);
        let a = game::game_matrix(&t);
        prop_assert_eq!(game::guaranteed_gain_from_matrix(&a, &x).unwrap().0, low);
        prop_assert_eq!(game::maximal_gain_from_matrix(&a, &y).unwrap().0, high);
    }

    #[test]
    fn column_of_gains_matches_pure_gain((n, edges) in arb_tree(1, 60), y in 0usize..60) {
        let t = build(n, &edges);
        let y = y % n;
        let col = game::gains_against(&t, y);
        for (x, g) in col.iter().enumerate() {
            prop_assert_eq!(*g, game::pure_gain(&t, x, y));
        }
    }
}

/// Relabeling by an automorphism `p` must give `A[p(i)][p(j)] = A[i][j]`.
fn check_automorphism(t: &Tree, perm: &[usize]) {
    let r = t.relabeled(perm).unwrap();
    assert_eq!(r.edges(), t.edges(), "not an automorphism");
    let a = game::game_matrix(t);
    for i in 0..t.n() {
        for j in 0..t.n() {
            assert_eq!(a.get(perm[i], perm[j]), a.get(i, j));
        }
    }
}

#[test]
fn automorphisms_permute_the_matrix() {
    let n = 9;
    check_automorphism(&path(n), &(0..n).rev().collect::<Vec<_>>());
    // Star: swap two leaves, rotate the rest.
    check_automorphism(&star(5), &[0, 2, 1, 4, 5, 3]);
    // Complete binary tree of height 2: swap the two subtrees of the root.
    let t = build_mary_tree(MaryTreeSpec::new(2, 2).unwrap());
    check_automorphism(&t, &[0, 2, 1, 5, 6, 3, 4]);
}

#[test]
fn relabeled_tree_has_permuted_matrix() {
    let (n, edges) = (8, prufer_tree(8, &[3, 3, 0, 5, 5, 1]));
    let t = build(n, &edges);
    let perm = [4, 7, 0, 2, 6, 1, 5, 3];
    let r = t.relabeled(&perm).unwrap();
    let (a, b) = (game::game_matrix(&t), game::game_matrix(&r));
    for i in 0..n {
        for j in 0..n {
            assert_eq!(b.get(perm[i], perm[j]), a.get(i, j));
        }
    }
}
