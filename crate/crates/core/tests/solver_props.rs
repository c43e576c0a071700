mod common;

use common::*;
use num_traits::Zero;
use proptest::prelude::*;
use safe_diffusion::game::{self, MixedStrategy};
use safe_diffusion::ratio::to_f64;
use safe_diffusion::special::{build_mary_tree, MaryTreeSpec};
use safe_diffusion::tree::{path, star};
use safe_diffusion::zerosum::{self, DenseMatrix, Payoff, ZeroSumSolution};

/// Value of a 2x2 game: the saddle point if one exists, otherwise the
/// equalizing formula.
fn value_2x2(a: [[i64; 2]; 2]) -> Q {
    let row_min = |i: usize| a[i][0].min(a[i][1]);
    let col_max = |j: usize| a[0][j].max(a[1][j]);
    let lower = row_min(0).max(row_min(1));
    let upper = col_max(0).min(col_max(1));
    if lower == upper {
        return q(lower, 1);
    }
    let [[p, r], [s, u]] = a;
    q(p * u - r * s, p + u - r - s)
}

/// Independent check of optimality: both strategies evaluated by hand.
fn optimal<P: Payoff>(a: &P, sol: &ZeroSumSolution) -> bool {
    let (m, k) = (a.rows(), a.cols());
    let x = sol.maxmin.probs();
    let y = sol.minmax.probs();
    let col = |j: usize| (0..m).map(|i| &x[i] * Q::from_integer(a.entry(i, j).into())).sum::<Q>();
    let row = |i: usize| (0..k).map(|j| &y[j] * Q::from_integer(a.entry(i, j).into())).sum::<Q>();
    (0..k).all(|j| col(j) >= sol.value) && (0..m).all(|i| row(i) <= sol.value)
}

fn arb_matrix(max_dim: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, k)| {
        proptest::collection::vec(proptest::collection::vec(0u32..9, k), m)
            .prop_map(|rows| DenseMatrix::from_rows(rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn two_by_two_closed_form(a in proptest::array::uniform2(proptest::array::uniform2(0i64..20))) {
        let m = DenseMatrix::from_rows(a.iter().map(|r| r.iter().map(|&v| v as u32).collect()).collect()).unwrap();
        let sol = zerosum::solve_value(&m).unwrap();
        prop_assert_eq!(&sol.value, &value_2x2(a));
        prop_assert!(optimal(&m, &sol));
    }

    #[test]
    fn rectangular_games_agree_with_bland(a in arb_matrix(7)) {
        let fast = zerosum::solve_value(&a).unwrap();
        let slow = zerosum::solve_value_bland(&a).unwrap();
        prop_assert_eq!(&fast.value, &slow.value);
        prop_assert!(optimal(&a, &fast));
        prop_assert!(optimal(&a, &slow));
        prop_assert!(zerosum::verify_solution(&a, &fast));
        let float = zerosum::solve_value_float(&a).unwrap();
        prop_assert!((float.value - to_f64(&fast.value)).abs() < 1e-7);
    }

    #[test]
    fn tree_games_have_no_duality_gap((n, edges) in arb_tree(1, 60)) {
        let t = build(n, &edges);
        let a = game::game_matrix(&t);
        let sol = zerosum::solve_value(&a).unwrap();
        let c = &sol.certificate;
        prop_assert_eq!(&c.primal_objective, &c.dual_objective);
        prop_assert!(zerosum::verify_solution(&a, &sol));
        prop_assert!(optimal(&a, &sol));
        let (low, _) = game::guaranteed_gain(&t, &sol.maxmin).unwrap();
        let (high, _) = game::maximal_gain(&t, &sol.minmax).unwrap();
        prop_assert_eq!(&low, &sol.value);
        prop_assert_eq!(&high, &sol.value);
    }

    #[test]
    fn small_tree_games_agree_with_bland((n, edges) in arb_tree(1, 18)) {
        let a = game::game_matrix(&build(n, &edges));
        prop_assert_eq!(zerosum::solve_value(&a).unwrap().value, zerosum::solve_value_bland(&a).unwrap().value);
    }

    #[test]
    fn any_strategies_sandwich_the_value((n, edges) in arb_tree(2, 20), wx in proptest::collection::vec(0i64..3, 20), wy in proptest::collection::vec(0i64..3, 20)) {
        let t = build(n, &edges);
        let mk = |w: &[i64]| {
            let mut w = w[..n].to_vec();
            if w.iter().all(|&x| x == 0) { w[0] = 1; }
            let s: i64 = w.iter().sum();
            MixedStrategy::new(w.iter().map(|&x| q(x, s)).collect()).unwrap()
        };
        let value = zerosum::solve_value(&game::game_matrix(&t)).unwrap().value;
        prop_assert!(game::guaranteed_gain(&t, &mk(&wx)).unwrap().0 <= value);
        prop_assert!(game::maximal_gain(&t, &mk(&wy)).unwrap().0 >= value);
    }
}

/// The same game with rows and columns permuted by an automorphism.
fn permuted_value(t: &safe_diffusion::Tree, perm: &[usize]) {
    let a = game::game_matrix(t);
    let n = t.n();
    let rows: Vec<Vec<u32>> = (0..n).map(|i| (0..n).map(|j| a.get(perm[i], perm[j])).collect()).collect();
    let b = DenseMatrix::from_rows(rows).unwrap();
    assert_eq!(zerosum::solve_value(&a).unwrap().value, zerosum::solve_value(&b).unwrap().value);
}

#[test]
fn symmetric_trees_keep_their_value_under_automorphisms() {
    permuted_value(&path(11), &(0..11).rev().collect::<Vec<_>>());
    permuted_value(&star(6), &[0, 3, 4, 5, 6, 1, 2]);
    permuted_value(&build_mary_tree(MaryTreeSpec::new(2, 2).unwrap()), &[0, 2, 1, 5, 6, 3, 4]);
}

#[test]
fn single_vertex_and_zero_games() {
    let one = game::game_matrix(&path(1));
    assert!(zerosum::solve_value(&one).unwrap().value.is_zero());
    let z = DenseMatrix::from_rows(vec![vec![0, 0, 0]; 2]).unwrap();
    assert!(zerosum::solve_value(&z).unwrap().value.is_zero());
}
