//! The centroidal safe strategy on a random centroidal tree, compared with the exact value.

use safe_diffusion::css::css_run;
use safe_diffusion::experiment::sample_centroidal;
use safe_diffusion::game::game_matrix;
use safe_diffusion::ratio::{render, to_f64};
use safe_diffusion::zerosum::solve_value;

fn main() -> safe_diffusion::Result<()> {
    let (t, seed) = sample_centroidal(40, 2024)?;
    let res = css_run(&t)?;
    println!("tree seed {seed}, centroid {}", res.root);
    for b in &res.ordered_branches {
        println!(
            "  branch {:>2}: {:>2} vertices {:?} Cr = {}",
            b.index,
            b.vertices.len(),
            b.class,
            render(&b.criterion)
        );
    }
    let trace: Vec<String> = res.trace.iter().map(render).collect();
    println!("centroid-reply gain by step: {}", trace.join(" -> "));
    for (v, p) in res.strategy.sparse() {
        println!("  start {v:>2} with probability {}", render(&p));
    }
    let value = solve_value(&game_matrix(&t))?.value;
    println!(
        "guaranteed {} ({:.4}), safety value {:.4}, centroid is a worst reply: {}",
        render(&res.guaranteed_gain),
        to_f64(&res.guaranteed_gain),
        to_f64(&value),
        res.verified()
    );
    Ok(())
}
