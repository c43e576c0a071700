//! Round-by-round diffusion on a path, checked against the distance rule.

use safe_diffusion::game::{pure_gain, simulate_diffusion, Color};
use safe_diffusion::tree::path;

fn main() -> safe_diffusion::Result<()> {
    let t = path(7);
    for (x, y) in [(1, 3), (0, 6), (2, 3), (4, 4)] {
        let c = simulate_diffusion(&t, x, y)?;
        let row: String = c
            .colors
            .iter()
            .map(|col| match col {
                Color::Player1 => '1',
                Color::Player2 => '2',
                Color::Grey => 'g',
                Color::White => '.',
            })
            .collect();
        let gain = c.count(Color::Player1);
        assert_eq!(gain, pure_gain(&t, x, y));
        println!("x={x} y={y}: {row}  gain {gain} after {} rounds", c.rounds);
    }
    Ok(())
}
