//! Uniform strategies C_S(k) on spiders: best k against the leg length.

use safe_diffusion::game::game_matrix;
use safe_diffusion::ratio::{render, to_f64};
use safe_diffusion::special::{build_spider, spider_body_gain, spider_optimal_k, SpiderSpec};
use safe_diffusion::zerosum::solve_value;

fn main() -> safe_diffusion::Result<()> {
    println!("{:>4} {:>4} {:>3} {:>12} {:>12}", "m", "l", "k*", "GGain", "value");
    for m in [3, 4] {
        for l in [2, 4, 8, 12] {
            let spec = SpiderSpec::new(m, l)?;
            let best = spider_optimal_k(spec)?;
            assert_eq!(best.guaranteed_gain, spider_body_gain(spec, best.k)?);
            let value = solve_value(&game_matrix(&build_spider(spec)))?.value;
            println!("{m:>4} {l:>4} {:>3} {:>12} {:>12.4}", best.k, render(&best.guaranteed_gain), to_f64(&value));
        }
    }
    // The gap to l grows roughly like sqrt(l/m).
    let spec = SpiderSpec::new(4, 100)?;
    let best = spider_optimal_k(spec)?;
    println!("m=4 l=100: k*={} gap {:.3}", best.k, 100.0 - to_f64(&best.guaranteed_gain));
    Ok(())
}
