//! Exact safety value of a tree by linear programming, with the certificate.

use safe_diffusion::game::{game_matrix, guaranteed_gain, maximal_gain};
use safe_diffusion::ratio::render;
use safe_diffusion::tree::parse_tree;
use safe_diffusion::zerosum::{solve_value, verify_solution};

fn main() -> safe_diffusion::Result<()> {
    // A "broom": a path with three extra leaves at one end.
    let t = parse_tree("8\n0 1\n1 2\n2 3\n3 4\n4 5\n4 6\n4 7\n")?;
    let a = game_matrix(&t);
    let sol = solve_value(&a)?;
    println!("value {} via {:?} ({} pivots)", render(&sol.value), sol.certificate.method, sol.certificate.pivots);
    for (v, p) in sol.maxmin.sparse() {
        println!("  player 1 starts at {v} with probability {}", render(&p));
    }
    for (v, p) in sol.minmax.sparse() {
        println!("  player 2 starts at {v} with probability {}", render(&p));
    }
    let (low, _) = guaranteed_gain(&t, &sol.maxmin)?;
    let (high, _) = maximal_gain(&t, &sol.minmax)?;
    assert_eq!(low, sol.value);
    assert_eq!(high, sol.value);
    assert!(verify_solution(&a, &sol));
    Ok(())
}
