//! A small run of the random-tree experiment; prints the histogram.
//!
//! `cargo run --release --example experiment -- 100 200` reproduces the
//! full-size run.

use safe_diffusion::experiment::{run_experiment, ExperimentConfig};
use safe_diffusion::ratio::{decimal, frac};

fn main() -> safe_diffusion::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let cfg = ExperimentConfig {
        n: args.next().unwrap_or(40),
        trials: args.next().unwrap_or(40),
        seed: 7,
        ..Default::default()
    };
    let rep = run_experiment(&cfg)?;
    let h = &rep.histogram;
    for (i, c) in h.counts.iter().enumerate() {
        if *c > 0 {
            let (lo, hi) = h.bounds(i);
            let open = if i == 0 { '[' } else { '(' };
            println!("{open}{}, {}] {:>4} {}", decimal(&lo, 2), decimal(&hi, 2), c, "#".repeat(*c));
        }
    }
    println!("overflow {}", h.overflow);
    println!("failed trials {}", rep.failures.len());
    if let (Some(mean), Some(median)) = (&rep.mean, &rep.median) {
        println!("mean {} median {}", decimal(mean, 4), decimal(median, 4));
    }
    println!("share below 0.10: {}", decimal(&rep.share_below(&frac(1, 10)), 3));
    Ok(())
}
