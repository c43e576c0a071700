//! Complete m-ary trees: closed-form value, the two optimal strategies, and the LP.

use safe_diffusion::game::{game_matrix, guaranteed_gain, maximal_gain};
use safe_diffusion::ratio::render;
use safe_diffusion::special::{build_mary_tree, mary_mu1, mary_mu2, mary_value, mu1_weights, MaryTreeSpec};
use safe_diffusion::zerosum::solve_value;

fn main() -> safe_diffusion::Result<()> {
    for (m, h) in [(2, 1), (2, 2), (2, 3), (3, 2), (4, 2)] {
        let spec = MaryTreeSpec::new(m, h)?;
        let t = build_mary_tree(spec);
        let value = mary_value(spec);
        let lp = solve_value(&game_matrix(&t))?.value;
        let (g1, _) = guaranteed_gain(&t, &mary_mu1(spec))?;
        let (g2, _) = maximal_gain(&t, &mary_mu2(spec))?;
        let (alpha, beta) = mu1_weights(spec);
        println!(
            "T({m},{h}) n={:<3} value {:<10} LP {:<10} root {} children {}",
            spec.n(),
            render(&value),
            render(&lp),
            render(&alpha),
            render(&beta)
        );
        assert!(value == lp && g1 == value && g2 == value);
    }
    Ok(())
}
